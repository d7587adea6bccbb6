#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "grainfsr/fsr.hpp"
#include "grainfsr/text_format.hpp"

namespace grainfsr {

// official: Grain-80's H reads s64 where the printed text has s4, and the
// Grain-128 1-bit Galois list drops the duplicated b3*b67 at g127.
// as_printed: the functions exactly as printed.
enum class TapMode { official, as_printed };

enum class InitMode {
  native,       // run the initialization loops on the variant itself
  equivalence,  // initialize the Fibonacci sibling, then map the state
};

struct GrainVariant {
  std::string name;
  std::string sibling;  // Fibonacci variant with the same key size
  SystemSpec system;
  int key_bits = 0;
  int iv_bits = 0;
  int init_cycles = 0;
  int parallel_degree = 1;
  TapMode taps = TapMode::official;
  std::shared_ptr<const Simulator> sim;

  bool is_fibonacci() const { return name == sibling; }
};

struct KeyIv {
  Bits key;
  Bits iv;
};

std::vector<std::string> variant_names();
GrainVariant variant(std::string_view name, TapMode taps = TapMode::official);

// The variant's definition in the spec text format.
std::string variant_document(std::string_view name, TapMode taps = TapMode::official);

KeyIv key_iv_from_hex(const GrainVariant& v, std::string_view key_hex, std::string_view iv_hex,
                      BitOrder order = BitOrder::lsb);

// NLFSR bit i <- key bit i, LFSR bit i <- IV bit i, remaining LFSR bits <- 1.
SystemState load(const GrainVariant& v, const KeyIv& kiv);

SystemState initialize(const GrainVariant& v, const SystemState& loaded,
                       InitMode mode = InitMode::native);

std::pair<Bits, SystemState> generate_keystream(const GrainVariant& v, const SystemState& state,
                                                std::size_t nbits);

// load + initialize + generate.
Bits keystream(const GrainVariant& v, const KeyIv& kiv, std::size_t nbits,
               InitMode mode = InitMode::native);

// Registers packed LSB-first in declaration order (b then s), with an
// "@<cycle>" suffix when the cycle counter is non-zero.
std::string encode_state(const SystemState& state);
SystemState decode_state(const SystemSpec& spec, std::string_view text);

}  // namespace grainfsr
