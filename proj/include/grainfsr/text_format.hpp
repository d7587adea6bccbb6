#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "grainfsr/fsr.hpp"
#include "grainfsr/transform.hpp"

namespace grainfsr {

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& message)
      : Error("line " + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// A parsed system plus the line of every directive, keyed by its target
// ("register b", "feedback b[79]", "output Z", "inject init b[79]", "param init_cycles").
struct SpecDocument {
  SystemSpec spec;
  std::map<std::string, int> lines;
};

// Line-oriented format, '#' starts a comment:
//   system <name>
//   register <id> <length>
//   feedback <id>[<i>] = <expr>
//   output <NAME> = <expr>
//   inject <mode> <id>[<i>] = <NAME>
//   param <key> = <int>
// <expr> is '+'-separated terms of '*'-separated factors: <id>[<index>],
// an output name, or the literals 0 and 1.
SpecDocument parse_spec(std::string_view text);
std::string format_spec(const SystemSpec& spec);

AnfExpr parse_expr(std::string_view text);

// `shift <reg> <src> -> <dst> : <term> [, <term>]*`, terms in source coordinates.
ShiftScript parse_script(std::string_view text);
std::string format_script(const ShiftScript& script);

enum class BitOrder { lsb, msb };

// Bit m lives in byte m/8 at position m%8 (lsb) or 7 - m%8 (msb); bytes are
// two lowercase hex digits, byte 0 first, last byte zero-padded.
std::string pack_bits(const Bits& bits, BitOrder order = BitOrder::lsb);
// Throws Error on odd length or non-hex input. With `nbits`, the hex must be
// exactly ceil(nbits/8) bytes and the result is truncated to nbits.
Bits unpack_bits(std::string_view hex, BitOrder order = BitOrder::lsb,
                 std::optional<std::size_t> nbits = {});

std::string read_file(const std::string& path);

}  // namespace grainfsr
