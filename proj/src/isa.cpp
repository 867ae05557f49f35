#include "binareye/isa.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace binareye {

namespace {

constexpr uint32_t kOpcodeIo = 0;
constexpr uint32_t kOpcodeCnn = 1;
constexpr uint32_t kOpcodeFc = 2;

[[noreturn]] void fail(const std::string& msg) { throw Error(msg); }

uint32_t s_mode_code(int s) {
  switch (s) {
    case 1: return 0;
    case 2: return 1;
    case 4: return 2;
  }
  fail("S must be one of {1,2,4}");
}

int s_mode_from_code(uint32_t code) {
  switch (code) {
    case 0: return 1;
    case 1: return 2;
    case 2: return 4;
  }
  fail("invalid S field");
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  return s;
}

}  // namespace

const char* bank_name(Bank b) { return b == Bank::West ? "WEST" : "EAST"; }

const char* io_direction_name(IoDirection d) {
  switch (d) {
    case IoDirection::In: return "IN";
    case IoDirection::OutLabel: return "OUT_LABEL";
    case IoDirection::OutMap: return "OUT_MAP";
  }
  return "?";
}

void validate_program(const Program& program) {
  const auto& ins = program.instructions;
  if (ins.empty()) fail("program must contain at least one instruction");
  if (ins.size() > 16)
    fail("program memory overflow: more than 16 instructions");
  const auto* first = std::get_if<IoInstruction>(&ins.front());
  if (!first || first->direction != IoDirection::In)
    fail("first instruction must be IO IN");
  int fc_index = -1;
  for (std::size_t i = 0; i < ins.size(); ++i) {
    if (std::holds_alternative<FcInstruction>(ins[i])) {
      if (fc_index >= 0) fail("program may contain at most one FC instruction");
      fc_index = int(i);
    }
    if (const auto* cnn = std::get_if<CnnInstruction>(&ins[i])) {
      if (cnn->in_bank == cnn->out_bank)
        fail("CNN in and out banks must differ");
    }
  }
  if (fc_index >= 0) {
    // FC must be last, or followed only by a single IO OUT.
    std::size_t after = ins.size() - 1 - fc_index;
    bool ok = after == 0;
    if (after == 1) {
      const auto* io = std::get_if<IoInstruction>(&ins.back());
      ok = io && io->direction != IoDirection::In;
    }
    if (!ok) fail("FC must be the last instruction before an optional IO OUT");
  }
}

uint32_t encode_instruction(const Instruction& instruction) {
  if (const auto* io = std::get_if<IoInstruction>(&instruction)) {
    uint32_t w = kOpcodeIo;
    w |= uint32_t(io->direction) << 2;
    w |= uint32_t(io->bank) << 18;
    return w;
  }
  if (const auto* cnn = std::get_if<CnnInstruction>(&instruction)) {
    if (cnn->width < 2 || cnn->width > 32 || cnn->height < 2 || cnn->height > 32)
      fail("CNN W and H must be in [2,32]");
    if (cnn->weight_base > 0xFFF) fail("weight base exceeds 12 bits");
    uint32_t w = kOpcodeCnn;
    w |= s_mode_code(cnn->s_mode) << 2;
    w |= uint32_t(cnn->width) << 4;
    w |= uint32_t(cnn->height) << 10;
    w |= uint32_t(cnn->pool) << 16;
    w |= uint32_t(cnn->first_layer) << 17;
    w |= uint32_t(cnn->in_bank) << 18;
    w |= uint32_t(cnn->out_bank) << 19;
    w |= cnn->weight_base << 20;
    return w;
  }
  const auto& fc = std::get<FcInstruction>(instruction);
  if (fc.classes < 2 || fc.classes > 10) fail("FC class count must be in [2,10]");
  if (fc.feature_bits < 64 || fc.feature_bits > 4096 || fc.feature_bits % 64)
    fail("FC feature bits must be a multiple of 64 in [64,4096]");
  uint32_t w = kOpcodeFc;
  w |= uint32_t(fc.classes) << 4;
  w |= uint32_t(fc.feature_bits / 64) << 20;
  return w;
}

Instruction decode_instruction(uint32_t word) {
  uint32_t opcode = word & 3;
  uint32_t subop = (word >> 2) & 3;
  uint32_t wf = (word >> 4) & 0x3F;
  uint32_t hf = (word >> 10) & 0x3F;
  bool pool = (word >> 16) & 1;
  bool first = (word >> 17) & 1;
  uint32_t in_bank = (word >> 18) & 1;
  uint32_t out_bank = (word >> 19) & 1;
  uint32_t base = word >> 20;
  switch (opcode) {
    case kOpcodeIo: {
      if (subop > 2) fail("invalid IO direction field");
      if (wf || hf || pool || first || out_bank || base)
        fail("nonzero unused fields in IO word");
      return IoInstruction{IoDirection(subop), Bank(in_bank)};
    }
    case kOpcodeCnn: {
      CnnInstruction cnn;
      cnn.s_mode = s_mode_from_code(subop);
      if (wf < 2 || wf > 32 || hf < 2 || hf > 32)
        fail("CNN W and H must be in [2,32]");
      cnn.width = int(wf);
      cnn.height = int(hf);
      cnn.pool = pool;
      cnn.first_layer = first;
      cnn.in_bank = Bank(in_bank);
      cnn.out_bank = Bank(out_bank);
      cnn.weight_base = base;
      return cnn;
    }
    case kOpcodeFc: {
      if (subop || hf || pool || first || in_bank || out_bank)
        fail("nonzero unused fields in FC word");
      if (wf < 2 || wf > 10) fail("FC class count must be in [2,10]");
      if (base < 1 || base > 64) fail("FC feature field out of range");
      return FcInstruction{int(base) * 64, int(wf)};
    }
  }
  fail("reserved opcode");
}

std::vector<uint32_t> encode_program(const Program& program) {
  std::vector<uint32_t> words;
  words.reserve(program.instructions.size());
  for (const auto& i : program.instructions) words.push_back(encode_instruction(i));
  return words;
}

Program decode_program(const std::vector<uint32_t>& words) {
  Program p;
  for (uint32_t w : words) p.instructions.push_back(decode_instruction(w));
  validate_program(p);
  return p;
}

uint64_t program_hash(const Program& program) {
  uint64_t h = 14695981039346656037ull;
  for (uint32_t w : encode_program(program)) {
    for (int i = 0; i < 4; ++i) {
      h ^= (w >> (8 * i)) & 0xFF;
      h *= 1099511628211ull;
    }
  }
  return h;
}

namespace {

[[noreturn]] void fail_at(int line, const std::string& msg) {
  fail("line " + std::to_string(line) + ": " + msg);
}

Bank parse_bank(const std::string& token, int line) {
  std::string t = upper(token);
  if (t == "WEST") return Bank::West;
  if (t == "EAST") return Bank::East;
  fail_at(line, "expected WEST or EAST, got '" + token + "'");
}

long parse_int(const std::string& value, int line, const std::string& key) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != value.size())
    fail_at(line, "invalid integer for " + key + ": '" + value + "'");
  return v;
}

Instruction parse_line(const std::vector<std::string>& tokens, int line) {
  std::string mnemonic = upper(tokens[0]);
  if (mnemonic == "IO") {
    if (tokens.size() < 2) fail_at(line, "IO needs a direction");
    std::string dir = upper(tokens[1]);
    IoInstruction io;
    if (dir == "IN")
      io.direction = IoDirection::In;
    else if (dir == "OUT_LABEL")
      io.direction = IoDirection::OutLabel;
    else if (dir == "OUT_MAP")
      io.direction = IoDirection::OutMap;
    else
      fail_at(line, "unknown IO direction '" + tokens[1] + "'");
    if (tokens.size() > 3) fail_at(line, "too many operands for IO");
    if (tokens.size() == 3) io.bank = parse_bank(tokens[2], line);
    return io;
  }

  // CNN and FC take KEY=VALUE operands.
  std::map<std::string, std::string> kv;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    auto eq = tokens[i].find('=');
    if (eq == std::string::npos)
      fail_at(line, "expected KEY=VALUE, got '" + tokens[i] + "'");
    std::string key = upper(tokens[i].substr(0, eq));
    if (!kv.emplace(key, tokens[i].substr(eq + 1)).second)
      fail_at(line, "duplicate operand " + key);
  }
  auto take = [&](const std::string& key, bool required,
                  const std::string& fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) {
      if (required) fail_at(line, "missing operand " + key);
      return fallback;
    }
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  if (mnemonic == "CNN") {
    CnnInstruction cnn;
    cnn.s_mode = int(parse_int(take("S", true, ""), line, "S"));
    if (cnn.s_mode != 1 && cnn.s_mode != 2 && cnn.s_mode != 4)
      fail_at(line, "S must be one of {1,2,4}");
    long w = parse_int(take("W", true, ""), line, "W");
    long h = parse_int(take("H", true, ""), line, "H");
    if (w < 2 || w > 32 || h < 2 || h > 32)
      fail_at(line, "W and H must be in [2,32]");
    cnn.width = int(w);
    cnn.height = int(h);
    cnn.pool = parse_int(take("POOL", false, "0"), line, "POOL") != 0;
    cnn.first_layer = parse_int(take("FIRST", false, "0"), line, "FIRST") != 0;
    long wb = parse_int(take("WB", false, "0"), line, "WB");
    if (wb < 0 || wb > 0xFFF) fail_at(line, "WB out of range [0,4095]");
    cnn.weight_base = uint32_t(wb);
    cnn.in_bank = parse_bank(take("IN", true, ""), line);
    cnn.out_bank = parse_bank(take("OUT", true, ""), line);
    if (!kv.empty()) fail_at(line, "unknown operand " + kv.begin()->first);
    return cnn;
  }
  if (mnemonic == "FC") {
    FcInstruction fc;
    long n = parse_int(take("N", true, ""), line, "N");
    long classes = parse_int(take("CLASSES", true, ""), line, "CLASSES");
    if (n < 64 || n > 4096 || n % 64)
      fail_at(line, "N must be a multiple of 64 in [64,4096]");
    if (classes < 2 || classes > 10)
      fail_at(line, "CLASSES must be in [2,10]");
    fc.feature_bits = int(n);
    fc.classes = int(classes);
    if (!kv.empty()) fail_at(line, "unknown operand " + kv.begin()->first);
    return fc;
  }
  fail_at(line, "unknown mnemonic '" + tokens[0] + "'");
}

}  // namespace

Program assemble(const std::string& text) {
  Program program;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (program.instructions.size() == 16)
      fail_at(lineno, "program memory overflow: more than 16 instructions");
    program.instructions.push_back(parse_line(tokens, lineno));
  }
  validate_program(program);
  return program;
}

std::string disassemble_instruction(const Instruction& instruction) {
  std::ostringstream out;
  if (const auto* io = std::get_if<IoInstruction>(&instruction)) {
    out << "IO " << io_direction_name(io->direction);
    // Canonical form omits the (unused) WEST bank on OUT_LABEL.
    if (io->direction != IoDirection::OutLabel || io->bank != Bank::West)
      out << ' ' << bank_name(io->bank);
  } else if (const auto* cnn = std::get_if<CnnInstruction>(&instruction)) {
    out << "CNN S=" << cnn->s_mode << " W=" << cnn->width << " H=" << cnn->height
        << " POOL=" << int(cnn->pool) << " FIRST=" << int(cnn->first_layer)
        << " WB=" << cnn->weight_base << " IN=" << bank_name(cnn->in_bank)
        << " OUT=" << bank_name(cnn->out_bank);
  } else {
    const auto& fc = std::get<FcInstruction>(instruction);
    out << "FC N=" << fc.feature_bits << " CLASSES=" << fc.classes;
  }
  return out.str();
}

std::string disassemble(const Program& program) {
  validate_program(program);
  std::string out;
  for (const auto& i : program.instructions) {
    out += disassemble_instruction(i);
    out += '\n';
  }
  return out;
}

std::vector<uint8_t> serialize_program(const Program& program) {
  validate_program(program);
  auto words = encode_program(program);
  std::vector<uint8_t> bytes = {'B', 'N', 'R', 'P', 1, 0};
  bytes.push_back(uint8_t(words.size() & 0xFF));
  bytes.push_back(uint8_t(words.size() >> 8));
  for (uint32_t w : words)
    for (int i = 0; i < 4; ++i) bytes.push_back(uint8_t((w >> (8 * i)) & 0xFF));
  return bytes;
}

Program deserialize_program(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 8 || bytes[0] != 'B' || bytes[1] != 'N' || bytes[2] != 'R' ||
      bytes[3] != 'P')
    fail("not a program file (bad magic)");
  uint16_t version = uint16_t(bytes[4]) | uint16_t(bytes[5]) << 8;
  if (version != 1) fail("unsupported program file version");
  std::size_t count = std::size_t(bytes[6]) | std::size_t(bytes[7]) << 8;
  if (bytes.size() != 8 + 4 * count)
    fail("program file truncated at byte " + std::to_string(bytes.size()));
  std::vector<uint32_t> words;
  for (std::size_t i = 0; i < count; ++i) {
    uint32_t w = 0;
    for (int b = 0; b < 4; ++b)
      w |= uint32_t(bytes[8 + 4 * i + b]) << (8 * b);
    words.push_back(w);
  }
  return decode_program(words);
}

}  // namespace binareye
