#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "binareye/bitcore.hpp"

namespace binareye {

enum class Bank : uint8_t { West = 0, East = 1 };
enum class IoDirection : uint8_t { In = 0, OutLabel = 1, OutMap = 2 };

const char* bank_name(Bank b);
const char* io_direction_name(IoDirection d);

struct IoInstruction {
  IoDirection direction = IoDirection::In;
  Bank bank = Bank::West;
  bool operator==(const IoInstruction&) const = default;
};

struct CnnInstruction {
  int s_mode = 1;        // 1, 2 or 4
  int width = 2;         // input W, [2,32]
  int height = 2;        // input H, [2,32]
  bool pool = false;
  bool first_layer = false;
  uint32_t weight_base = 0;  // weight SRAM address in 1024-bit rows, 12 bits
  Bank in_bank = Bank::West;
  Bank out_bank = Bank::East;
  bool operator==(const CnnInstruction&) const = default;
};

struct FcInstruction {
  int feature_bits = 64;  // [64,4096], multiple of 64
  int classes = 2;        // [2,10]
  bool operator==(const FcInstruction&) const = default;
};

using Instruction = std::variant<IoInstruction, CnnInstruction, FcInstruction>;

/// Instruction stream, at most 16 slots. Invariants: first instruction is
/// IO IN; at most one FC, last before an optional trailing IO OUT;
/// CNN in_bank != out_bank.
struct Program {
  std::vector<Instruction> instructions;
};

/// Throws Error with a description of the first violated invariant.
void validate_program(const Program& program);

/// 32-bit instruction word layout (LSB first):
///   [1:0]   opcode       0=IO 1=CNN 2=FC, 3 reserved
///   [3:2]   subop        IO direction / CNN S (0->1, 1->2, 2->4)
///   [9:4]   W            CNN width; FC class count
///   [15:10] H            CNN height
///   [16]    pool         CNN only
///   [17]    first        CNN only
///   [18]    in bank      CNN input bank / IO bank (0=WEST 1=EAST)
///   [19]    out bank     CNN only
///   [31:20] weight base  CNN: 1024-bit rows; FC: feature_bits / 64
/// Fields unused by an opcode must be zero; decode rejects violations.
uint32_t encode_instruction(const Instruction& instruction);
Instruction decode_instruction(uint32_t word);

std::vector<uint32_t> encode_program(const Program& program);
Program decode_program(const std::vector<uint32_t>& words);

/// FNV-1a over the encoded instruction words, used to tag trace files.
uint64_t program_hash(const Program& program);

/// Parses assembly text: one instruction per line, `#` comments,
/// case-insensitive keywords. Diagnostics carry 1-based line numbers.
Program assemble(const std::string& text);

/// Canonical text form; assemble(disassemble(p)) == p.
std::string disassemble(const Program& program);

std::string disassemble_instruction(const Instruction& instruction);

/// Binary program container: magic "BNRP", u16 version, u16 count,
/// little-endian u32 words.
std::vector<uint8_t> serialize_program(const Program& program);
Program deserialize_program(const std::vector<uint8_t>& bytes);

}  // namespace binareye
