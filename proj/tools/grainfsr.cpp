// grainfsr: command-line front end for the Grain/FSR library.
//
// Exit status: 0 on success or an equal/uniform verdict, 1 on an unequal or
// violating verdict, 2 on usage and input errors.

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "grainfsr/grain.hpp"
#include "grainfsr/text_format.hpp"
#include "grainfsr/timing.hpp"
#include "grainfsr/transform.hpp"

using namespace grainfsr;

namespace {

constexpr int kOk = 0;
constexpr int kVerdictFailed = 1;

// Collects report fields and prints them either as "key: value" text or as
// flat key=value lines.
class Report {
 public:
  explicit Report(bool json) : json_(json) {}

  template <typename T>
  void add(const std::string& key, const T& value) {
    std::ostringstream os;
    os << value;
    fields_.emplace_back(key, os.str());
  }
  void add(const std::string& key, bool value) { fields_.emplace_back(key, value ? "true" : "false"); }

  void print(std::ostream& out) const {
    for (const auto& [k, v] : fields_) out << k << (json_ ? "=" : ": ") << v << "\n";
  }

 private:
  bool json_;
  std::vector<std::pair<std::string, std::string>> fields_;
};

struct SystemSource {
  std::string spec_path;
  std::string variant_name;
  std::string taps = "official";

  void bind(CLI::App* cmd) {
    auto* s = cmd->add_option("--spec", spec_path, "System description file");
    auto* v = cmd->add_option("--variant", variant_name, "Registry variant name");
    s->excludes(v);
    cmd->add_option("--taps", taps, "Tap mode for registry variants")
        ->check(CLI::IsMember({"official", "as-printed"}));
  }

  TapMode tap_mode() const { return taps == "as-printed" ? TapMode::as_printed : TapMode::official; }

  SystemSpec load() const {
    if (!variant_name.empty()) return variant(variant_name, tap_mode()).system;
    if (spec_path.empty()) throw CLI::RequiredError("--spec or --variant");
    return parse_spec(read_file(spec_path)).spec;
  }
};

// The register a command operates on: explicit, else "b" when present, else
// the first one.
std::string pick_register(const SystemSpec& spec, const std::string& requested) {
  if (!requested.empty()) {
    spec.reg(requested);
    return requested;
  }
  if (spec.registers.empty()) throw Error("system has no registers");
  if (spec.find_register("b")) return "b";
  return spec.registers.front().id;
}

BitOrder parse_order(const std::string& s) { return s == "msb" ? BitOrder::msb : BitOrder::lsb; }

InitMode parse_init(const std::string& s) {
  return s == "equivalence" ? InitMode::equivalence : InitMode::native;
}

std::string join(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + std::to_string(xs[i]);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grain stream ciphers and Fibonacci/Galois shift-register transformations"};
  app.require_subcommand(1);
  app.fallthrough();
  bool json = false;
  app.add_flag("--json", json, "Emit flat key=value lines");
  unsigned workers = 0;
  app.add_option("--workers", workers, "Worker threads for equivalence checks (0 = all cores)");

  int status = kOk;

  // list-variants
  auto* list_cmd = app.add_subcommand("list-variants", "List registry variants");
  list_cmd->callback([&] {
    for (const auto& name : variant_names()) {
      const GrainVariant v = variant(name);
      if (json)
        std::cout << "variant=" << name << " key_bits=" << v.key_bits << " iv_bits=" << v.iv_bits
                  << " parallel=" << v.parallel_degree << "\n";
      else
        std::cout << name << "  key " << v.key_bits << "  iv " << v.iv_bits << "  k=" << v.parallel_degree
                  << "\n";
    }
  });

  // show
  SystemSource show_src;
  auto* show_cmd = app.add_subcommand("show", "Print a system in canonical text form");
  show_src.bind(show_cmd);
  show_cmd->callback([&] { std::cout << format_spec(show_src.load()); });

  // keystream
  std::string ks_variant, ks_key, ks_iv, ks_init = "native", ks_taps = "official", ks_order = "lsb";
  std::size_t ks_bits = 128;
  auto* ks_cmd = app.add_subcommand("keystream", "Generate keystream for a key/IV");
  ks_cmd->add_option("--variant", ks_variant)->required();
  ks_cmd->add_option("--key", ks_key, "Key as hex")->required();
  ks_cmd->add_option("--iv", ks_iv, "IV as hex")->required();
  ks_cmd->add_option("--bits", ks_bits, "Keystream length");
  ks_cmd->add_option("--init", ks_init)->check(CLI::IsMember({"native", "equivalence"}));
  ks_cmd->add_option("--taps", ks_taps)->check(CLI::IsMember({"official", "as-printed"}));
  ks_cmd->add_option("--bit-order", ks_order)->check(CLI::IsMember({"lsb", "msb"}));
  ks_cmd->callback([&] {
    const GrainVariant v =
        variant(ks_variant, ks_taps == "as-printed" ? TapMode::as_printed : TapMode::official);
    const BitOrder order = parse_order(ks_order);
    const Bits z = keystream(v, key_iv_from_hex(v, ks_key, ks_iv, order), ks_bits, parse_init(ks_init));
    if (json) {
      Report r(true);
      r.add("variant", v.name);
      r.add("bits", ks_bits);
      r.add("keystream", pack_bits(z, order));
      r.print(std::cout);
    } else {
      std::cout << pack_bits(z, order) << "\n";
    }
  });

  // transform
  SystemSource tr_src;
  std::string tr_script, tr_register, tr_cost, tr_emit;
  bool tr_auto = false;
  int tr_k = 1;
  std::optional<int> tr_terminal;
  auto* tr_cmd = app.add_subcommand("transform", "Apply a shift script or distribute terms automatically");
  tr_src.bind(tr_cmd);
  auto* script_opt = tr_cmd->add_option("--script", tr_script, "Shift script file");
  auto* auto_opt = tr_cmd->add_flag("--auto", tr_auto, "Distribute movable terms greedily");
  script_opt->excludes(auto_opt);
  tr_cmd->add_option("--k", tr_k, "Bits per cycle")->check(CLI::PositiveNumber);
  tr_cmd->add_option("--terminal", tr_terminal, "Terminal bit (default: required terminal bit)");
  tr_cmd->add_option("--register", tr_register);
  tr_cmd->add_option("--cost", tr_cost, "Cost model file");
  tr_cmd->add_option("--emit-script", tr_emit, "Write the applied script to this file");
  tr_cmd->callback([&] {
    const SystemSpec spec = tr_src.load();
    ShiftScript script;
    SystemSpec result;
    std::vector<std::string> notes;
    if (tr_auto) {
      const std::string reg = pick_register(spec, tr_register);
      const int terminal = tr_terminal ? *tr_terminal : required_terminal_bit(spec, reg);
      const CostModel cost = tr_cost.empty() ? CostModel{} : parse_cost_model(read_file(tr_cost));
      DistributeResult d = auto_distribute(spec, reg, terminal, tr_k, cost);
      script = std::move(d.script);
      result = std::move(d.spec);
      for (const auto& t : d.unshiftable) notes.push_back("unshiftable " + to_string(t));
    } else if (!tr_script.empty()) {
      script = parse_script(read_file(tr_script));
      ScriptResult r = check_script(spec, script, true);
      notes = r.warnings;
      if (!r.ok) {
        std::cerr << "move " << *r.failed_move + 1 << " rejected: " << r.diagnosis << "\n";
        status = kVerdictFailed;
        return;
      }
      result = std::move(r.spec);
    } else {
      throw CLI::RequiredError("--script or --auto");
    }
    for (const auto& n : notes) std::cerr << "# " << n << "\n";
    if (!tr_emit.empty()) {
      std::ofstream out(tr_emit);
      if (!out) throw Error("cannot write " + tr_emit);
      out << format_script(script);
    }
    std::cout << format_spec(result);
  });

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Check a transformation property");
  verify_cmd->require_subcommand(1);

  SystemSource un_src;
  std::string un_register;
  std::optional<int> un_terminal;
  auto* un_cmd = verify_cmd->add_subcommand("uniform", "Check uniformity of one register");
  un_src.bind(un_cmd);
  un_cmd->add_option("--register", un_register);
  un_cmd->add_option("--terminal", un_terminal, "Check against this terminal bit");
  un_cmd->callback([&] {
    const SystemSpec spec = un_src.load();
    const RegisterSpec& reg = spec.reg(pick_register(spec, un_register));
    const UniformityReport u = check_uniform(reg, un_terminal);
    Report r(json);
    r.add("register", reg.id);
    r.add("terminal_bit", u.terminal_bit);
    r.add("uniform", u.uniform);
    for (const auto& [bit, why] : u.violations)
      r.add("violation", to_string(Var{reg.id, bit}) + " " + to_string(why));
    r.print(std::cout);
    if (!u.uniform) status = kVerdictFailed;
  });

  SystemSource co_src;
  std::string co_register, co_against;
  auto* co_cmd = verify_cmd->add_subcommand("collapse", "Unshift every term and compare with a Fibonacci form");
  co_src.bind(co_cmd);
  co_cmd->add_option("--register", co_register);
  co_cmd->add_option("--against", co_against, "Fibonacci system file (default: the variant's sibling)");
  co_cmd->callback([&] {
    const SystemSpec spec = co_src.load();
    const std::string id = pick_register(spec, co_register);
    SystemSpec fib;
    if (!co_against.empty())
      fib = parse_spec(read_file(co_against)).spec;
    else if (!co_src.variant_name.empty())
      fib = variant(variant(co_src.variant_name).sibling, co_src.tap_mode()).system;
    else
      throw CLI::RequiredError("--against");
    const CollapseDiagnosis d = diagnose_collapse(spec.reg(id), fib.reg(id));
    Report r(json);
    r.add("register", id);
    r.add("match", d.match);
    if (!d.match) r.add("diagnosis", d.summary());
    r.print(std::cout);
    if (!d.match) status = kVerdictFailed;
  });

  std::string eq_a, eq_b, eq_variant, eq_register, eq_taps = "official";
  bool eq_exhaustive = false, eq_mapped = false;
  std::optional<std::size_t> eq_horizon;
  std::size_t eq_trials = 20, eq_cycles = 1024;
  std::optional<std::uint64_t> eq_seed;
  auto* eq_cmd = verify_cmd->add_subcommand("equivalence", "Compare output sequences of two configurations");
  eq_cmd->add_option("--a", eq_a, "First system file");
  eq_cmd->add_option("--b", eq_b, "Second system file");
  eq_cmd->add_option("--variant", eq_variant, "Registry variant, compared with its Fibonacci sibling");
  eq_cmd->add_option("--taps", eq_taps)->check(CLI::IsMember({"official", "as-printed"}));
  eq_cmd->add_option("--register", eq_register);
  eq_cmd->add_flag("--exhaustive", eq_exhaustive, "Enumerate every initial state");
  eq_cmd->add_option("--horizon", eq_horizon, "Prefix length for --exhaustive (default 2^n)");
  eq_cmd->add_flag("--mapped", eq_mapped, "Random states mapped between configurations");
  eq_cmd->add_option("--trials", eq_trials);
  eq_cmd->add_option("--cycles", eq_cycles, "Cycles per trial, or keystream bits per key/IV");
  eq_cmd->add_option("--seed", eq_seed);
  eq_cmd->callback([&] {
    Report r(json);
    EquivalenceVerdict verdict;
    const TapMode taps = eq_taps == "as-printed" ? TapMode::as_printed : TapMode::official;
    if (eq_exhaustive) {
      if (eq_a.empty() || eq_b.empty()) throw CLI::RequiredError("--a and --b");
      const SystemSpec a = parse_spec(read_file(eq_a)).spec;
      const SystemSpec b = parse_spec(read_file(eq_b)).spec;
      const std::string id = pick_register(a, eq_register);
      verdict = check_equivalence_exhaustive(a.reg(id), b.reg(id), eq_horizon, workers);
      r.add("method", "exhaustive");
    } else {
      if (!eq_seed) throw CLI::RequiredError("--seed");
      if (eq_mapped) {
        SystemSpec a, b;
        if (!eq_variant.empty()) {
          const GrainVariant v = variant(eq_variant, taps);
          a = variant(v.sibling, taps).system;
          b = v.system;
        } else {
          if (eq_a.empty() || eq_b.empty()) throw CLI::RequiredError("--variant or --a and --b");
          a = parse_spec(read_file(eq_a)).spec;
          b = parse_spec(read_file(eq_b)).spec;
        }
        verdict = check_equivalence_mapped(a, b, eq_trials, eq_cycles, *eq_seed, workers);
        r.add("method", "mapped");
      } else {
        // Full cipher: equivalence-mode keystream against the Fibonacci sibling.
        if (eq_variant.empty()) throw CLI::RequiredError("--variant (or --exhaustive / --mapped)");
        const GrainVariant v = variant(eq_variant, taps);
        const GrainVariant fib = variant(v.sibling, taps);
        std::mt19937_64 rng(*eq_seed);
        for (std::size_t t = 0; t < eq_trials && verdict.equal; ++t) {
          KeyIv kiv;
          for (int i = 0; i < v.key_bits; ++i) kiv.key.push_back(rng() & 1u);
          for (int i = 0; i < v.iv_bits; ++i) kiv.iv.push_back(rng() & 1u);
          const Bits zf = keystream(fib, kiv, eq_cycles);
          const Bits zg = keystream(v, kiv, eq_cycles, InitMode::equivalence);
          for (std::size_t c = 0; c < zf.size(); ++c) {
            if (zf[c] == zg[c]) continue;
            verdict.equal = false;
            verdict.state = t;
            verdict.cycle = c;
            verdict.detail = "unequal: key/iv " + std::to_string(t) + " differs at keystream bit " +
                             std::to_string(c);
            break;
          }
        }
        if (verdict.equal)
          verdict.detail = "equal: " + std::to_string(eq_trials) + " key/iv pairs x " +
                           std::to_string(eq_cycles) + " bits";
        r.add("method", "keystream");
      }
    }
    r.add("equal", verdict.equal);
    r.add("detail", verdict.detail);
    if (!verdict.equal) {
      if (verdict.state) r.add("counterexample", *verdict.state);
      if (eq_exhaustive) r.add("side", verdict.side);
      if (verdict.cycle) r.add("cycle", *verdict.cycle);
    }
    r.print(std::cout);
    if (!verdict.equal) status = kVerdictFailed;
  });

  SystemSource pa_src;
  std::optional<int> pa_k;
  std::size_t pa_trials = 16;
  std::uint64_t pa_seed = 1;
  auto* pa_cmd = verify_cmd->add_subcommand("parallel", "Check k-bit/cycle stepping against unit steps");
  pa_src.bind(pa_cmd);
  pa_cmd->add_option("--k", pa_k, "Degree to check (default: the variant's declared degree)");
  pa_cmd->add_option("--trials", pa_trials, "Random states to step");
  pa_cmd->add_option("--seed", pa_seed);
  pa_cmd->callback([&] {
    const SystemSpec spec = pa_src.load();
    int k = 1;
    if (pa_k)
      k = *pa_k;
    else if (auto it = spec.params.find("parallel"); it != spec.params.end())
      k = static_cast<int>(it->second);
    const int max_k = max_hw_parallel_degree(spec);
    Report r(json);
    r.add("max_hw_parallel_degree", max_k);
    r.add("k", k);
    bool ok = true;
    for (const auto& reg : spec.registers) {
      std::vector<int> positions;
      for (int i = reg.length - 1; i >= 0; --i)
        if (!reg.is_shift(i)) positions.push_back(i);
      if (positions.size() <= 1) continue;
      const int terminal = required_terminal_bit(spec, reg.id);
      r.add("positions." + reg.id, join(positions));
      if (k < 2) continue;
      const std::vector<int> allowed = allowed_feedback_positions(reg.length, terminal, k);
      r.add("allowed." + reg.id, join(allowed));
      for (int p : positions)
        if (std::find(allowed.begin(), allowed.end(), p) == allowed.end()) ok = false;
    }
    if (k > max_k) {
      r.add("detail", "k exceeds the maximum hardware degree");
      ok = false;
    } else {
      const Simulator sim(spec);
      std::mt19937_64 rng(pa_seed);
      for (std::size_t t = 0; t < pa_trials && ok; ++t) {
        SystemState s = sim.zero_state();
        for (auto& reg : s.regs)
          for (auto& bit : reg) bit = rng() & 1u;
        SystemState unit = s;
        for (int i = 0; i < k; ++i) unit = sim.step(unit);
        if (sim.step_parallel(s, k).state != unit) {
          ok = false;
          r.add("detail", "trial " + std::to_string(t) + " differs after one parallel step");
        }
      }
    }
    r.add("ok", ok);
    r.print(std::cout);
    if (!ok) status = kVerdictFailed;
  });

  // analyze timing
  auto* an_cmd = app.add_subcommand("analyze", "Structural analyses");
  an_cmd->require_subcommand(1);
  SystemSource ti_src;
  std::string ti_cost;
  auto* ti_cmd = an_cmd->add_subcommand("timing", "Gate-depth critical paths and clock divider");
  ti_src.bind(ti_cmd);
  ti_cmd->add_option("--cost", ti_cost, "Cost model file");
  ti_cmd->callback([&] {
    const SystemSpec spec = ti_src.load();
    const CostModel cost = ti_cost.empty() ? CostModel{} : parse_cost_model(read_file(ti_cost));
    const TimingReport t = critical_depths(spec);
    const AreaProxy area = area_proxy(spec, cost);
    Report r(json);
    for (const auto& [name, d] : t.expr_depth) r.add("depth." + name, d);
    for (const auto& [name, d] : t.register_depth) r.add("register_depth." + name, d);
    r.add("keygen_depth", t.keygen_depth);
    r.add("init_depth", t.init_depth);
    r.add("divider", t.divider.factor);
    if (t.divider.clamped) r.add("divider_clamped", true);
    if (t.divider_overhead_ge > 0) r.add("divider_overhead_ge", t.divider_overhead_ge);
    r.add("area.xor2", area.xor_gates);
    r.add("area.and2", area.and_gates);
    r.add("area.weighted", area.weighted);
    r.print(std::cout);
  });

  // map-state
  std::string ms_variant, ms_fib, ms_galois, ms_state, ms_taps = "official";
  auto* ms_cmd = app.add_subcommand("map-state", "Map a Fibonacci state into a Galois configuration");
  ms_cmd->add_option("--variant", ms_variant, "Galois registry variant (Fibonacci side is its sibling)");
  ms_cmd->add_option("--taps", ms_taps)->check(CLI::IsMember({"official", "as-printed"}));
  ms_cmd->add_option("--fib", ms_fib, "Fibonacci system file");
  ms_cmd->add_option("--galois", ms_galois, "Galois system file");
  ms_cmd->add_option("--state", ms_state, "Fibonacci state as hex, registers in declaration order")
      ->required();
  ms_cmd->callback([&] {
    SystemSpec fib, gal;
    if (!ms_variant.empty()) {
      const TapMode taps = ms_taps == "as-printed" ? TapMode::as_printed : TapMode::official;
      const GrainVariant v = variant(ms_variant, taps);
      fib = variant(v.sibling, taps).system;
      gal = v.system;
    } else {
      if (ms_fib.empty() || ms_galois.empty()) throw CLI::RequiredError("--variant or --fib and --galois");
      fib = parse_spec(read_file(ms_fib)).spec;
      gal = parse_spec(read_file(ms_galois)).spec;
    }
    const SystemState mapped = map_system_state(fib, gal, decode_state(fib, ms_state));
    if (json)
      std::cout << "state=" << encode_state(mapped) << "\n";
    else
      std::cout << encode_state(mapped) << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return status;
}
