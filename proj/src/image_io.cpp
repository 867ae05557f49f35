#include "binareye/image_io.hpp"

#include <cctype>
#include <fstream>
#include <vector>

namespace binareye {

namespace {

std::vector<uint8_t> read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open image: " + path);
  return std::vector<uint8_t>((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
}

// Reads one whitespace-delimited PPM header token, skipping `#` comments.
long ppm_token(const std::vector<uint8_t>& bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    if (std::isspace(bytes[pos])) {
      ++pos;
    } else if (bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  long v = 0;
  bool any = false;
  while (pos < bytes.size() && std::isdigit(bytes[pos])) {
    v = v * 10 + (bytes[pos] - '0');
    ++pos;
    any = true;
  }
  if (!any) throw Error("malformed PPM header");
  return v;
}

IntegerImage load_ppm(const std::vector<uint8_t>& bytes, std::string* warning) {
  std::size_t pos = 2;  // past "P6"
  long w = ppm_token(bytes, pos);
  long h = ppm_token(bytes, pos);
  long maxval = ppm_token(bytes, pos);
  if (pos >= bytes.size() || !std::isspace(bytes[pos]))
    throw Error("malformed PPM header");
  ++pos;
  if (w != IntegerImage::kWidth || h != IntegerImage::kHeight)
    throw Error("PPM must be 32x32, got " + std::to_string(w) + "x" +
                std::to_string(h));
  if (maxval < 1 || maxval > 255) throw Error("PPM maxval must be in [1,255]");
  if (bytes.size() - pos < IntegerImage::kBytes)
    throw Error("PPM pixel data truncated");
  std::vector<uint8_t> pixels(bytes.begin() + pos,
                              bytes.begin() + pos + IntegerImage::kBytes);
  if (maxval > 127) {
    for (auto& p : pixels) p >>= 1;
    if (warning)
      *warning = "PPM maxval " + std::to_string(maxval) +
                 " exceeds 7 bits; pixel values right-shifted by 1";
  }
  return IntegerImage(std::move(pixels));
}

}  // namespace

IntegerImage load_image(const std::string& path, std::string* warning) {
  auto bytes = read_all(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6')
    return load_ppm(bytes, warning);
  if (bytes.size() != IntegerImage::kBytes)
    throw Error("raw image must be exactly " +
                std::to_string(IntegerImage::kBytes) + " bytes, got " +
                std::to_string(bytes.size()));
  return IntegerImage(std::move(bytes));  // validates the 7-bit range
}

void save_image_raw(const IntegerImage& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open image for writing: " + path);
  out.write(reinterpret_cast<const char*>(image.bytes().data()),
            std::streamsize(image.bytes().size()));
  if (!out) throw Error("write failed: " + path);
}

}  // namespace binareye
