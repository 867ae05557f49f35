#pragma once

#include <string>

#include "binareye/bitcore.hpp"

namespace binareye {

/// Loads a 32x32 input image from either a raw 3,072-byte interleaved RGB
/// file (values must fit 7 bits) or a P6 PPM. PPMs with maxval > 127 are
/// right-shifted by one bit; `warning` (when non-null) receives a note
/// when that happens.
IntegerImage load_image(const std::string& path, std::string* warning = nullptr);

void save_image_raw(const IntegerImage& image, const std::string& path);

}  // namespace binareye
