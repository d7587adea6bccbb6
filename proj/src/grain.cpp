#include "grainfsr/grain.hpp"

#include <map>
#include <mutex>
#include <sstream>

#include "grainfsr/transform.hpp"

namespace grainfsr {

namespace {

constexpr const char* k_grain80_lfsr =
    "feedback s[79] = s[62] + s[51] + s[38] + s[23] + s[13] + s[0]\n";

// {S} stands for the H tap that official Grain-80 reads at s[64].
constexpr const char* k_grain80_outputs =
    "output H = s[25] + b[63] + s[3]*s[{S}] + s[46]*s[{S}] + s[{S}]*b[63] + s[3]*s[25]*s[46] + "
    "s[3]*s[46]*s[{S}] + s[3]*s[46]*b[63] + s[25]*s[46]*b[63] + s[46]*s[{S}]*b[63]\n"
    "output Z = b[1] + b[2] + b[4] + b[10] + b[31] + b[43] + b[56] + H\n";

constexpr const char* k_grain128_lfsr =
    "feedback s[127] = s[0] + s[7] + s[38] + s[70] + s[81] + s[96]\n";

constexpr const char* k_grain128_outputs =
    "output H = b[12]*s[8] + s[13]*s[20] + b[95]*s[42] + s[60]*s[79] + b[12]*b[95]*s[95]\n"
    "output Z = b[2] + b[15] + b[36] + b[45] + b[64] + b[73] + b[89] + s[93] + H\n";

constexpr const char* k_grain80_fib =
    "feedback b[79] = s[0] + b[0] + b[62] + b[60] + b[52] + b[45] + b[37] + b[33] + b[28] + "
    "b[21] + b[14] + b[9] + b[63]*b[60] + b[37]*b[33] + b[15]*b[9] + b[60]*b[52]*b[45] + "
    "b[33]*b[28]*b[21] + b[63]*b[45]*b[28]*b[9] + b[60]*b[52]*b[37]*b[33] + "
    "b[63]*b[60]*b[21]*b[15] + b[63]*b[60]*b[52]*b[45]*b[37] + "
    "b[33]*b[28]*b[21]*b[15]*b[9] + b[52]*b[45]*b[37]*b[33]*b[28]*b[21]\n";

constexpr const char* k_grain80_galois_1 =
    "feedback b[79] = s[0] + b[0] + b[37]\n"
    "feedback b[78] = b[79] + b[44]\n"
    "feedback b[77] = b[78] + b[50]\n"
    "feedback b[76] = b[77] + b[57]\n"
    "feedback b[75] = b[76] + b[58]\n"
    "feedback b[74] = b[75] + b[32]*b[28]\n"
    "feedback b[73] = b[74] + b[3]\n"
    "feedback b[72] = b[73] + b[8]*b[2]\n"
    "feedback b[71] = b[72] + b[55]*b[37]*b[20]*b[1]\n"
    "feedback b[70] = b[71] + b[24]*b[19]*b[12]*b[6]*b[0]\n"
    "feedback b[69] = b[70] + b[53]*b[50]\n"
    "feedback b[68] = b[69] + b[49]*b[41]*b[26]*b[22]\n"
    "feedback b[67] = b[68] + b[9] + b[21]*b[16]*b[9]\n"
    "feedback b[66] = b[67] + b[15] + b[47]*b[39]*b[32]\n"
    "feedback b[65] = b[66] + b[0] + b[38]*b[31]*b[23]*b[19]*b[14]*b[7]\n"
    "feedback b[64] = b[65] + b[18] + b[48]*b[45]*b[6]*b[0]\n"
    "feedback b[63] = b[64] + b[47]*b[44]*b[36]*b[29]*b[21]\n";

constexpr const char* k_grain80_galois_4 =
    "feedback b[79] = s[0] + b[0] + b[62] + b[33] + b[28] + b[21] + b[15]*b[9] + "
    "b[52]*b[45]*b[37]*b[33]*b[28]*b[21]\n"
    "feedback b[75] = b[76] + b[41] + b[33] + b[5] + b[59]*b[56] + b[33]*b[29] + "
    "b[59]*b[41]*b[24]*b[5]\n"
    "feedback b[71] = b[72] + b[44] + b[25]*b[20]*b[13] + b[55]*b[52]*b[13]*b[7] + "
    "b[25]*b[20]*b[13]*b[7]*b[1]\n"
    "feedback b[67] = b[68] + b[48] + b[2] + b[48]*b[40]*b[33] + b[48]*b[40]*b[25]*b[21] + "
    "b[51]*b[48]*b[40]*b[33]*b[25]\n";

constexpr const char* k_grain80_galois_8 =
    "feedback b[79] = s[0] + b[0] + b[14] + b[9] + b[15]*b[9] + b[60]*b[52]*b[45] + "
    "b[33]*b[28]*b[21] + b[60] + b[60]*b[52]*b[37]*b[33] + b[63]*b[60]*b[21]*b[15] + "
    "b[33]*b[28]*b[21]*b[15]*b[9]\n"
    "feedback b[71] = b[72] + b[44] + b[37] + b[29] + b[25] + b[20] + b[13] + b[55]*b[52] + "
    "b[54] + b[29]*b[25] + b[55]*b[37]*b[20]*b[1] + b[55]*b[52]*b[44]*b[37]*b[29] + "
    "b[44]*b[37]*b[29]*b[25]*b[20]*b[13]\n";

constexpr const char* k_grain128_fib =
    "feedback b[127] = s[0] + b[0] + b[26] + b[56] + b[91] + b[96] + b[3]*b[67] + "
    "b[11]*b[13] + b[17]*b[18] + b[27]*b[59] + b[40]*b[48] + b[61]*b[65] + b[68]*b[84]\n";

constexpr const char* k_grain128_galois_1 =
    "feedback b[127] = s[0] + b[0] + b[3]*b[67]\n"
    "feedback b[124] = b[125] + b[0]*b[64]\n"
    "feedback b[116] = b[117] + b[0]*b[2]\n"
    "feedback b[110] = b[111] + b[0]*b[1]\n"
    "feedback b[102] = b[103] + b[71]\n"
    "feedback b[101] = b[102] + b[0]\n"
    "feedback b[100] = b[101] + b[0]*b[32]\n"
    "feedback b[99] = b[100] + b[63]\n"
    "feedback b[98] = b[99] + b[27]\n"
    "feedback b[97] = b[98] + b[38]*b[54]\n"
    "feedback b[96] = b[97] + b[30]*b[34]\n"
    "feedback b[95] = b[96] + b[8]*b[16]\n";

constexpr const char* k_grain128_galois_4 =
    "feedback b[127] = s[0] + b[0] + b[3]*b[67]\n"
    "feedback b[123] = b[124] + b[64]*b[80]\n"
    "feedback b[119] = b[120] + b[3]*b[5]\n"
    "feedback b[115] = b[116] + b[49]*b[53]\n"
    "feedback b[111] = b[112] + b[1]*b[2]\n"
    "feedback b[107] = b[108] + b[6] + b[76]\n"
    "feedback b[103] = b[104] + b[67] + b[3]*b[35]\n"
    "feedback b[99] = b[100] + b[28] + b[12]*b[20]\n";

constexpr const char* k_grain128_galois_8 =
    "feedback b[127] = s[0] + b[0] + b[56] + b[3]*b[67]\n"
    "feedback b[119] = b[120] + b[18] + b[88] + b[3]*b[5]\n"
    "feedback b[111] = b[112] + b[75] + b[1]*b[2] + b[52]*b[68]\n"
    "feedback b[103] = b[104] + b[3]*b[35] + b[16]*b[24] + b[37]*b[41]\n";

constexpr const char* k_grain128_galois_16 =
    "feedback b[127] = s[0] + b[0] + b[56] + b[3]*b[67] + b[11]*b[13] + b[40]*b[48]\n"
    "feedback b[111] = b[112] + b[10] + b[75] + b[80] + b[1]*b[2] + b[11]*b[43] + "
    "b[45]*b[49] + b[52]*b[68]\n";
struct Entry {
  const char* name;
  int key_bits;
  int iv_bits;
  int parallel;
  const char* nlfsr;
};

constexpr Entry kEntries[] = {
    {"grain80-fib", 80, 64, 1, k_grain80_fib},
    {"grain80-galois-1", 80, 64, 1, k_grain80_galois_1},
    {"grain80-galois-4", 80, 64, 4, k_grain80_galois_4},
    {"grain80-galois-8", 80, 64, 8, k_grain80_galois_8},
    {"grain128-fib", 128, 96, 1, k_grain128_fib},
    {"grain128-galois-1", 128, 96, 1, k_grain128_galois_1},
    {"grain128-galois-4", 128, 96, 4, k_grain128_galois_4},
    {"grain128-galois-8", 128, 96, 8, k_grain128_galois_8},
    {"grain128-galois-16", 128, 96, 16, k_grain128_galois_16},
};

const Entry& find_entry(std::string_view name) {
  for (const auto& e : kEntries)
    if (name == e.name) return e;
  throw Error("unknown variant '" + std::string(name) + "'");
}

std::string replace_all(std::string text, std::string_view from, std::string_view to) {
  for (std::size_t pos = 0; (pos = text.find(from, pos)) != std::string::npos; pos += to.size())
    text.replace(pos, from.size(), to);
  return text;
}

std::string sibling_of(const Entry& e) { return e.key_bits == 80 ? "grain80-fib" : "grain128-fib"; }

}  // namespace

std::vector<std::string> variant_names() {
  std::vector<std::string> names;
  for (const auto& e : kEntries) names.emplace_back(e.name);
  return names;
}

std::string variant_document(std::string_view name, TapMode taps) {
  const Entry& e = find_entry(name);
  const int n = e.key_bits;
  std::ostringstream out;
  out << "system " << e.name << (taps == TapMode::as_printed ? "-as-printed" : "") << "\n";
  out << "register b " << n << "\n";
  out << "register s " << n << "\n";
  out << "param init_cycles = " << 2 * n << "\n";
  out << "param iv_bits = " << e.iv_bits << "\n";
  out << "param key_bits = " << n << "\n";
  out << "param parallel = " << e.parallel << "\n";

  std::string nlfsr = e.nlfsr;
  if (taps == TapMode::official && std::string_view(e.name) == "grain128-galois-1")
    nlfsr = replace_all(nlfsr, "b[0] + b[3]*b[67]", "b[0]");
  out << nlfsr;
  if (n == 80) {
    out << k_grain80_lfsr;
    out << replace_all(k_grain80_outputs, "{S}", taps == TapMode::official ? "64" : "4");
  } else {
    out << k_grain128_lfsr << k_grain128_outputs;
  }
  out << "inject init b[" << n - 1 << "] = Z\n";
  out << "inject init s[" << n - 1 << "] = Z\n";
  return out.str();
}

GrainVariant variant(std::string_view name, TapMode taps) {
  static std::mutex mu;
  static std::map<std::pair<std::string, TapMode>, GrainVariant> cache;
  const Entry& e = find_entry(name);
  std::lock_guard lock(mu);
  auto key = std::make_pair(std::string(e.name), taps);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  GrainVariant v;
  v.name = e.name;
  v.sibling = sibling_of(e);
  v.system = parse_spec(variant_document(name, taps)).spec;
  v.key_bits = e.key_bits;
  v.iv_bits = e.iv_bits;
  v.init_cycles = 2 * e.key_bits;
  v.parallel_degree = e.parallel;
  v.taps = taps;
  v.sim = std::make_shared<const Simulator>(v.system);
  return cache.emplace(key, std::move(v)).first->second;
}

KeyIv key_iv_from_hex(const GrainVariant& v, std::string_view key_hex, std::string_view iv_hex,
                      BitOrder order) {
  return {unpack_bits(key_hex, order, static_cast<std::size_t>(v.key_bits)),
          unpack_bits(iv_hex, order, static_cast<std::size_t>(v.iv_bits))};
}

SystemState load(const GrainVariant& v, const KeyIv& kiv) {
  if (static_cast<int>(kiv.key.size()) != v.key_bits)
    throw Error("key has " + std::to_string(kiv.key.size()) + " bits, expected " +
                std::to_string(v.key_bits));
  if (static_cast<int>(kiv.iv.size()) != v.iv_bits)
    throw Error("iv has " + std::to_string(kiv.iv.size()) + " bits, expected " +
                std::to_string(v.iv_bits));
  SystemState st = v.sim->zero_state();
  const std::size_t b = 0, s = 1;
  for (int i = 0; i < v.key_bits; ++i) st.regs[b][i] = kiv.key[i] & 1;
  for (int i = 0; i < v.key_bits; ++i) st.regs[s][i] = i < v.iv_bits ? kiv.iv[i] & 1 : 1;
  return st;
}

SystemState initialize(const GrainVariant& v, const SystemState& loaded, InitMode mode) {
  const ModeSet init{"init"};
  if (mode == InitMode::native || v.is_fibonacci()) {
    SystemState st = loaded;
    for (int c = 0; c < v.init_cycles; ++c) st = v.sim->step(st, init);
    return st;
  }
  const GrainVariant fib = variant(v.sibling, v.taps);
  SystemState st = initialize(fib, loaded, InitMode::native);
  return map_system_state(fib.system, v.system, st);
}

std::pair<Bits, SystemState> generate_keystream(const GrainVariant& v, const SystemState& state,
                                                std::size_t nbits) {
  Bits z;
  z.reserve(nbits);
  SystemState st = state;
  for (std::size_t i = 0; i < nbits; ++i) {
    z.push_back(v.sim->output(st, "Z") ? 1 : 0);
    st = v.sim->step(st);
  }
  return {std::move(z), std::move(st)};
}

Bits keystream(const GrainVariant& v, const KeyIv& kiv, std::size_t nbits, InitMode mode) {
  return generate_keystream(v, initialize(v, load(v, kiv), mode), nbits).first;
}

std::string encode_state(const SystemState& state) {
  std::string out;
  for (const auto& r : state.regs) out += pack_bits(r);
  if (state.cycle != 0) out += "@" + std::to_string(state.cycle);
  return out;
}

SystemState decode_state(const SystemSpec& spec, std::string_view text) {
  SystemState st;
  std::string_view hex = text;
  if (auto at = text.find('@'); at != std::string_view::npos) {
    hex = text.substr(0, at);
    const std::string digits(text.substr(at + 1));
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw Error("malformed cycle counter '" + digits + "'");
    st.cycle = std::stoull(digits);
  }
  std::size_t expected = 0;
  for (const auto& r : spec.registers) expected += 2 * ((static_cast<std::size_t>(r.length) + 7) / 8);
  if (hex.size() != expected)
    throw Error("state has " + std::to_string(hex.size()) + " hex digits, expected " +
                std::to_string(expected));
  std::size_t pos = 0;
  for (const auto& r : spec.registers) {
    const std::size_t digits = 2 * ((static_cast<std::size_t>(r.length) + 7) / 8);
    st.regs.push_back(unpack_bits(hex.substr(pos, digits), BitOrder::lsb,
                                  static_cast<std::size_t>(r.length)));
    pos += digits;
  }
  return st;
}

}  // namespace grainfsr
