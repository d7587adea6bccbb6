#include "grainfsr/transform.hpp"

#include <algorithm>
#include <random>
#include <thread>

namespace grainfsr {

std::string to_string(UniformityViolation v) {
  switch (v) {
    case UniformityViolation::non_singular: return "non-singular";
    case UniformityViolation::depends_on_successor: return "depends-on-successor";
    case UniformityViolation::index_above_terminal: return "index-above-terminal";
  }
  return "unknown";
}

AnfExpr nonshift_part(const RegisterSpec& reg, int bit) {
  return xor_merge(reg.feedback_of(bit), TermSet{ProductTerm{reg.successor(bit)}});
}

int terminal_bit(const RegisterSpec& reg) {
  int t = 0;
  while (t < reg.length - 1 && reg.is_shift(t)) ++t;
  return t;
}

int min_terminal_bit(const AnfExpr& feedback, const std::string& reg) {
  int tau = 0;
  for (const auto& t : feedback.terms()) {
    int lo = -1, hi = -1;
    for (const auto& v : t.vars()) {
      if (v.reg != reg || v.is_signal()) continue;
      lo = lo < 0 ? v.index : std::min(lo, v.index);
      hi = std::max(hi, v.index);
    }
    if (hi >= 0) tau = std::max(tau, hi - lo);
  }
  return tau;
}

int required_terminal_bit(const SystemSpec& system, const std::string& reg_id) {
  const auto& reg = system.reg(reg_id);
  const RegisterSpec fib = collapse_to_fibonacci(reg);
  int required = min_terminal_bit(fib.feedback_of(reg.length - 1), reg_id);
  for (const auto& o : system.outputs) {
    auto s = analyze(o.expr);
    if (auto it = s.index_range.find(reg_id); it != s.index_range.end())
      required = std::max(required, it->second.max);
  }
  return required;
}

namespace {

void check_move_bounds(const RegisterSpec& reg, const ShiftMove& move) {
  if (move.reg != reg.id) throw Error("shift targets register " + move.reg + ", not " + reg.id);
  if (move.source < 0 || move.source >= reg.length || move.dest < 0 || move.dest >= reg.length)
    throw Error("shift " + std::to_string(move.source) + " -> " + std::to_string(move.dest) +
                " out of range for register " + reg.id);
}

// True when unshifting/shifting a term by `delta` leaves [0, n-1].
bool wraps(const TermSet& terms, int delta, int n) {
  for (const auto& t : terms)
    for (const auto& v : t.vars())
      if (v.index + delta < 0 || v.index + delta >= n) return true;
  return false;
}

}  // namespace

RegisterSpec apply_shift(const RegisterSpec& reg, const ShiftMove& move) {
  check_move_bounds(reg, move);
  const AnfExpr source = reg.feedback_of(move.source);
  for (const auto& t : move.terms)
    if (!source.contains(t))
      throw Error("term " + to_string(t) + " not present in feedback of " +
                  to_string(Var{reg.id, move.source}));
  const TermSet moved = remap_indices(move.terms, reg.id, move.dest - move.source, reg.length);

  RegisterSpec out = reg;
  out.feedback[move.source] = xor_merge(source, move.terms);
  out.feedback[move.dest] = xor_merge(out.feedback_of(move.dest), moved);
  out.normalize();
  return out;
}

SystemSpec apply_shift(const SystemSpec& system, const ShiftMove& move) {
  SystemSpec out = system;
  auto* reg = out.find_register(move.reg);
  if (!reg) throw Error("unknown register '" + move.reg + "'");
  *reg = apply_shift(*reg, move);
  return out;
}

UniformityReport check_uniform(const RegisterSpec& reg, std::optional<int> terminal) {
  UniformityReport report;
  report.terminal_bit = terminal.value_or(terminal_bit(reg));
  for (int i = 0; i < reg.length; ++i) {
    if (reg.is_shift(i)) continue;
    const Var succ = reg.successor(i);
    const AnfExpr f = reg.feedback_of(i);
    if (!f.contains(ProductTerm{succ})) {
      report.violations.emplace_back(i, UniformityViolation::non_singular);
      continue;
    }
    const AnfExpr g = nonshift_part(reg, i);
    bool uses_succ = false, above = false;
    for (const auto& t : g.terms()) {
      for (const auto& v : t.vars()) {
        if (v.reg != reg.id || v.is_signal()) continue;
        uses_succ |= v == succ;
        above |= i > report.terminal_bit && v.index > report.terminal_bit;
      }
    }
    if (uses_succ) report.violations.emplace_back(i, UniformityViolation::depends_on_successor);
    if (above) report.violations.emplace_back(i, UniformityViolation::index_above_terminal);
  }
  report.uniform = report.violations.empty();
  return report;
}

namespace {

std::string describe(const UniformityReport& r, const std::string& reg) {
  std::string out = "not uniform (terminal bit " + std::to_string(r.terminal_bit) + "):";
  for (const auto& [bit, why] : r.violations)
    out += " " + reg + "[" + std::to_string(bit) + "] " + to_string(why) + ";";
  return out;
}

}  // namespace

ScriptResult check_script(const SystemSpec& fib, const ShiftScript& script, bool warn_required) {
  ScriptResult result;
  result.spec = fib;
  for (const auto& reg : fib.registers) {
    bool touched = std::any_of(script.begin(), script.end(),
                               [&](const ShiftMove& m) { return m.reg == reg.id; });
    if (!touched) continue;
    auto report = check_uniform(reg);
    if (!report.uniform) {
      result.ok = false;
      result.diagnosis = "input register " + reg.id + " " + describe(report, reg.id);
      return result;
    }
  }

  std::map<std::string, int> required;
  for (std::size_t m = 0; m < script.size(); ++m) {
    const auto& move = script[m];
    auto fail = [&](std::string why) {
      result.ok = false;
      result.failed_move = m;
      result.diagnosis = "move " + std::to_string(m + 1) + ": " + std::move(why);
      return result;
    };
    SystemSpec next;
    try {
      next = apply_shift(result.spec, move);
    } catch (const Error& e) {
      return fail(e.what());
    }
    const auto& reg = next.reg(move.reg);
    if (move.dest >= move.source)
      return fail("destination " + std::to_string(move.dest) + " is not below source " +
                  std::to_string(move.source));
    if (wraps(move.terms, move.dest - move.source, reg.length))
      return fail("reindexing wraps around the register");
    auto report = check_uniform(reg);
    if (!report.uniform) return fail(describe(report, reg.id));

    if (warn_required) {
      if (!required.count(move.reg)) required[move.reg] = required_terminal_bit(fib, move.reg);
      if (move.dest < required[move.reg])
        result.warnings.push_back("move " + std::to_string(m + 1) + ": destination " +
                                  std::to_string(move.dest) + " is below required terminal bit " +
                                  std::to_string(required[move.reg]));
    }
    result.spec = std::move(next);
  }
  return result;
}

std::vector<int> allowed_feedback_positions(int n, int terminal, int k) {
  if (k < 1) throw Error("parallel degree must be at least 1");
  if (terminal < 0 || terminal > n - 1) throw Error("terminal bit out of range");
  const int count = std::max(1, (n - 1 - terminal) / k);
  std::vector<int> out;
  for (int i = 0; i < count; ++i) out.push_back(n - 1 - i * k);
  return out;
}

int max_hw_parallel_degree(const SystemSpec& system) {
  validate(system);
  // A sub-step s of a k-wide block may read bit v only if v+s stays inside the
  // register and no bit in [v, v+s-1] is rewritten by feedback.
  std::map<std::string, std::vector<int>> reads;
  std::map<std::string, std::vector<bool>> written;
  for (const auto& reg : system.registers) {
    auto& w = written[reg.id];
    w.assign(static_cast<std::size_t>(reg.length), false);
    for (int i = 0; i < reg.length; ++i) w[static_cast<std::size_t>(i)] = !reg.is_shift(i);
    w.back() = true;
  }
  auto note = [&](const AnfExpr& e) {
    for (const auto& t : e.terms())
      for (const auto& v : t.vars())
        if (!v.is_signal()) reads[v.reg].push_back(v.index);
  };
  for (const auto& reg : system.registers)
    for (int i = 0; i < reg.length; ++i)
      if (!reg.is_shift(i) || i == reg.length - 1) note(reg.feedback_of(i));
  for (const auto& o : system.outputs) note(o.expr);

  int best = 0;
  for (const auto& reg : system.registers) best = std::max(best, reg.length);
  for (const auto& reg : system.registers) {
    const auto& w = written[reg.id];
    for (int v : reads[reg.id]) {
      int k = 1;
      while (v + k <= reg.length - 1 && !w[static_cast<std::size_t>(v + k - 1)]) ++k;
      best = std::min(best, k);
    }
  }
  return std::max(best, 1);
}

DistributeResult auto_distribute(const SystemSpec& fib, const std::string& reg_id, int terminal,
                                 int k, const CostModel& cost) {
  const auto& reg = fib.reg(reg_id);
  const int n = reg.length;
  const int top = n - 1;
  {
    auto report = check_uniform(reg);
    if (!report.uniform) throw Error("register " + reg_id + " " + describe(report, reg_id));
  }
  const auto positions = allowed_feedback_positions(n, terminal, k);
  const AnfExpr top_g = nonshift_part(reg, top);

  // One XOR leaf plus the height of the term's AND tree.
  auto term_cost = [&](const ProductTerm& t) { return cost.xor2 + cost.and2 * term_depth(t); };

  std::map<int, double> load;
  for (int p : positions) load[p] = 0;
  load[top] = cost.xor2;  // the successor leaf

  std::vector<ProductTerm> movable;
  DistributeResult result;
  for (const auto& t : top_g.terms()) {
    bool foreign = std::any_of(t.vars().begin(), t.vars().end(),
                               [&](const Var& v) { return v.reg != reg_id || v.is_signal(); });
    if (foreign)
      load[top] += term_cost(t);
    else
      movable.push_back(t);
  }
  // Heaviest first, ties in reverse canonical order.
  std::reverse(movable.begin(), movable.end());
  std::stable_sort(movable.begin(), movable.end(), [&](const ProductTerm& a, const ProductTerm& b) {
    return term_cost(a) > term_cost(b);
  });

  RegisterSpec current = reg;
  std::map<int, TermSet> placed;
  for (const auto& term : movable) {
    std::vector<int> order(positions.begin(), positions.end());
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      if (load[a] != load[b]) return load[a] < load[b];
      return a > b;
    });
    bool done = false;
    for (int p : order) {
      if (p == top) {
        load[top] += term_cost(term);
        done = true;
        break;
      }
      if (wraps(TermSet{term}, p - top, n)) continue;
      RegisterSpec trial = apply_shift(current, ShiftMove{reg_id, top, p, TermSet{term}});
      if (!check_uniform(trial).uniform) continue;
      current = std::move(trial);
      placed[p].insert(term);
      load[p] += term_cost(term);
      done = true;
      break;
    }
    if (!done) {
      result.unshiftable.push_back(term);
      load[top] += term_cost(term);
    }
  }

  for (auto it = placed.rbegin(); it != placed.rend(); ++it)
    result.script.push_back(ShiftMove{reg_id, top, it->first, it->second});
  auto checked = check_script(fib, result.script);
  if (!checked.ok) throw Error("auto_distribute produced an invalid script: " + checked.diagnosis);
  result.spec = std::move(checked.spec);
  return result;
}

RegisterSpec collapse_to_fibonacci(const RegisterSpec& galois) {
  const int top = galois.length - 1;
  RegisterSpec out;
  out.id = galois.id;
  out.length = galois.length;
  AnfExpr acc = galois.feedback_of(top);
  for (int j = 0; j < top; ++j) {
    if (galois.is_shift(j)) continue;
    const AnfExpr g = nonshift_part(galois, j);
    TermSet back = remap_indices(g.terms(), galois.id, top - j, galois.length);
    acc = xor_merge(acc, AnfExpr(std::move(back), g.constant()));
  }
  out.feedback[top] = std::move(acc);
  out.normalize();
  return out;
}

SystemSpec collapse_to_fibonacci(const SystemSpec& galois) {
  SystemSpec out = galois;
  for (auto& reg : out.registers) reg = collapse_to_fibonacci(reg);
  return out;
}

Bits map_initial_state(const RegisterSpec& fib, const RegisterSpec& galois, const Bits& a) {
  const int n = galois.length;
  if (fib.length != n || static_cast<int>(a.size()) != n)
    throw Error("map_initial_state: length mismatch");
  auto report = check_uniform(galois);
  if (!report.uniform) throw Error("map_initial_state: galois register " + describe(report, galois.id));
  const int t = report.terminal_bit;
  for (int j = t; j <= n - 2; ++j) {
    if (galois.is_shift(j)) continue;
    const AnfExpr f = galois.feedback_of(j);
    for (const auto& term : f.terms())
      for (const auto& v : term.vars())
        if (v.reg != galois.id || v.is_signal())
          throw Error("map_initial_state: foreign variable " + to_string(v) + " below the top bit at " +
                      to_string(Var{galois.id, j}));
  }
  Bits c = a;
  for (int i = t + 1; i < n; ++i) {
    bool acc = a[static_cast<std::size_t>(i)];
    for (int j = t; j <= i - 1; ++j) {
      if (galois.is_shift(j)) continue;
      const AnfExpr g = nonshift_part(galois, j);
      const int offset = i - 1 - j;
      acc ^= evaluate_with(g, [&](const Var& v) {
        const int idx = v.index + offset;
        if (idx >= n) throw Error("map_initial_state: variable " + to_string(v) + " of " +
                                  to_string(Var{galois.id, j}) + " reads beyond the register");
        return a[static_cast<std::size_t>(idx)] != 0;
      });
    }
    c[static_cast<std::size_t>(i)] = acc;
  }
  return c;
}

namespace {

// Feedback of an autonomous register as bitmasks over an integer state.
struct MaskRegister {
  int n = 0;
  std::vector<std::pair<bool, std::vector<std::uint32_t>>> bits;  // (constant, term masks)

  explicit MaskRegister(const RegisterSpec& reg) : n(reg.length) {
    for (int i = 0; i < n; ++i) {
      const AnfExpr f = reg.feedback_of(i);
      std::vector<std::uint32_t> masks;
      for (const auto& t : f.terms()) {
        std::uint32_t m = 0;
        for (const auto& v : t.vars()) {
          if (v.reg != reg.id || v.is_signal())
            throw Error("exhaustive check needs autonomous registers; found " + to_string(v));
          m |= 1u << v.index;
        }
        masks.push_back(m);
      }
      bits.emplace_back(f.constant(), std::move(masks));
    }
  }

  std::uint32_t next(std::uint32_t s) const {
    std::uint32_t out = 0;
    for (int i = 0; i < n; ++i) {
      const auto& [constant, masks] = bits[static_cast<std::size_t>(i)];
      bool b = constant;
      for (auto m : masks) b ^= (s & m) == m;
      out |= static_cast<std::uint32_t>(b) << i;
    }
    return out;
  }
};

using Prefix = std::vector<std::uint64_t>;

std::vector<Prefix> all_prefixes(const RegisterSpec& reg, std::size_t horizon, unsigned workers) {
  const MaskRegister mr(reg);
  const std::size_t states = std::size_t{1} << reg.length;
  std::vector<std::uint32_t> next(states);
  for (std::size_t s = 0; s < states; ++s) next[s] = mr.next(static_cast<std::uint32_t>(s));

  const std::size_t words = (horizon + 63) / 64;
  std::vector<Prefix> out(states, Prefix(words, 0));
  auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t s0 = lo; s0 < hi; ++s0) {
      std::uint32_t s = static_cast<std::uint32_t>(s0);
      auto& p = out[s0];
      for (std::size_t c = 0; c < horizon; ++c) {
        p[c / 64] |= static_cast<std::uint64_t>(s & 1u) << (c % 64);
        s = next[s];
      }
    }
  };
  if (workers <= 1 || states < 1024) {
    work(0, states);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (states + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      std::size_t lo = w * chunk, hi = std::min(states, lo + chunk);
      if (lo < hi) pool.emplace_back(work, lo, hi);
    }
    for (auto& t : pool) t.join();
  }
  return out;
}

unsigned resolve_workers(unsigned workers) {
  if (workers) return workers;
  return std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
}

}  // namespace

EquivalenceVerdict check_equivalence_exhaustive(const RegisterSpec& a, const RegisterSpec& b,
                                                std::optional<std::size_t> horizon,
                                                unsigned workers) {
  if (a.length != b.length)
    throw Error("length mismatch: " + std::to_string(a.length) + " vs " + std::to_string(b.length));
  if (a.length > 20) throw Error("register too large for exhaustive check (n > 20)");
  const int n = a.length;
  const std::size_t states = std::size_t{1} << n;
  const std::size_t len = horizon.value_or(states);
  if (static_cast<double>(states) * static_cast<double>(len) > 4.0e9)
    throw Error("exhaustive check would need 2^" + std::to_string(n) + " prefixes of " +
                std::to_string(len) + " bits; pass a shorter horizon");
  workers = resolve_workers(workers);

  const auto pa = all_prefixes(a, len, workers);
  const auto pb = all_prefixes(b, len, workers);

  std::vector<std::uint32_t> ia(states), ib(states);
  for (std::size_t s = 0; s < states; ++s) ia[s] = ib[s] = static_cast<std::uint32_t>(s);
  auto by_prefix = [](const std::vector<Prefix>& p) {
    return [&p](std::uint32_t x, std::uint32_t y) { return p[x] != p[y] ? p[x] < p[y] : x < y; };
  };
  std::sort(ia.begin(), ia.end(), by_prefix(pa));
  std::sort(ib.begin(), ib.end(), by_prefix(pb));

  // Walk both sorted lists; any group with unequal multiplicity is unmatched.
  std::optional<std::pair<std::uint32_t, char>> worst;
  auto consider = [&](std::uint32_t s, char side) {
    if (!worst || s < worst->first || (s == worst->first && side < worst->second)) worst = {s, side};
  };
  std::size_t x = 0, y = 0;
  while (x < states || y < states) {
    const Prefix* key = nullptr;
    if (y >= states || (x < states && pa[ia[x]] <= pb[ib[y]]))
      key = &pa[ia[x]];
    else
      key = &pb[ib[y]];
    std::size_t x0 = x, y0 = y;
    while (x < states && pa[ia[x]] == *key) ++x;
    while (y < states && pb[ib[y]] == *key) ++y;
    if (x - x0 == y - y0) continue;
    if (x - x0 > y - y0)
      for (std::size_t i = x0; i < x; ++i) consider(ia[i], 'A');
    else
      for (std::size_t i = y0; i < y; ++i) consider(ib[i], 'B');
  }

  EquivalenceVerdict v;
  if (!worst) {
    v.detail = "equal: " + std::to_string(states) + " prefixes of length " + std::to_string(len);
    return v;
  }
  v.equal = false;
  v.state = worst->first;
  v.side = worst->second;
  const Prefix& mine = worst->second == 'A' ? pa[worst->first] : pb[worst->first];
  const Prefix& other = worst->second == 'A' ? pb[worst->first] : pa[worst->first];
  for (std::size_t c = 0; c < len; ++c) {
    auto bit = [&](const Prefix& p) { return (p[c / 64] >> (c % 64)) & 1u; };
    v.prefix.push_back(static_cast<std::uint8_t>(bit(mine)));
    if (!v.cycle && bit(mine) != bit(other)) v.cycle = c;
  }
  v.detail = "unequal: prefix from state " + std::to_string(worst->first) + " of side " +
             std::string(1, worst->second) + " has no partner on the other side";
  return v;
}

bool is_transformed(const RegisterSpec& fib, const RegisterSpec& galois) {
  RegisterSpec f = fib, g = galois;
  f.normalize();
  g.normalize();
  return f.feedback != g.feedback;
}

SystemState map_system_state(const SystemSpec& fib, const SystemSpec& galois,
                             const SystemState& state) {
  if (fib.registers.size() != galois.registers.size() ||
      state.regs.size() != fib.registers.size())
    throw Error("systems have different register sets");
  SystemState out = state;
  for (std::size_t r = 0; r < fib.registers.size(); ++r) {
    const auto& rf = fib.registers[r];
    const auto& rg = galois.registers[r];
    if (rf.id != rg.id || rf.length != rg.length)
      throw Error("register " + rf.id + " differs in identity or length");
    if (is_transformed(rf, rg)) out.regs[r] = map_initial_state(rf, rg, state.regs[r]);
  }
  return out;
}

EquivalenceVerdict check_equivalence_mapped(const SystemSpec& fib, const SystemSpec& galois,
                                            std::size_t trials, std::size_t cycles,
                                            std::uint64_t seed, unsigned workers) {
  if (fib.registers.size() != galois.registers.size())
    throw Error("systems have different register sets");
  const Simulator sim_f(fib);
  const Simulator sim_g(galois);

  std::vector<int> compare_upto;
  for (std::size_t r = 0; r < fib.registers.size(); ++r) {
    const auto& rg = galois.registers[r];
    compare_upto.push_back(is_transformed(fib.registers[r], rg) ? terminal_bit(rg) : rg.length - 1);
  }
  // Surface mapping errors here rather than inside a worker thread.
  (void)map_system_state(fib, galois, sim_f.zero_state());

  struct Failure {
    std::size_t trial;
    std::size_t cycle;
    std::string what;
  };
  auto run_trial = [&](std::size_t trial) -> std::optional<Failure> {
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (trial + 1)));
    SystemState a = sim_f.zero_state();
    for (auto& reg : a.regs)
      for (auto& bit : reg) bit = static_cast<std::uint8_t>(rng() & 1u);
    SystemState g = map_system_state(fib, galois, a);
    for (std::size_t c = 0; c < cycles; ++c) {
      for (std::size_t r = 0; r < a.regs.size(); ++r)
        for (int i = 0; i <= compare_upto[r]; ++i)
          if (a.regs[r][static_cast<std::size_t>(i)] != g.regs[r][static_cast<std::size_t>(i)])
            return Failure{trial, c, to_string(Var{fib.registers[r].id, i})};
      a = sim_f.step(a);
      g = sim_g.step(g);
    }
    return std::nullopt;
  };

  workers = resolve_workers(workers);
  std::vector<std::optional<Failure>> found(trials);
  auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t t = lo; t < hi; ++t) {
      found[t] = run_trial(t);
      if (found[t]) break;
    }
  };
  if (workers <= 1 || trials < 4) {
    work(0, trials);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (trials + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      std::size_t lo = w * chunk, hi = std::min(trials, lo + chunk);
      if (lo < hi) pool.emplace_back(work, lo, hi);
    }
    for (auto& t : pool) t.join();
  }

  EquivalenceVerdict v;
  for (const auto& f : found) {
    if (!f) continue;
    v.equal = false;
    v.state = f->trial;
    v.cycle = f->cycle;
    v.detail = "unequal: trial " + std::to_string(f->trial) + " diverges at cycle " +
               std::to_string(f->cycle) + " on " + f->what;
    return v;
  }
  v.detail = "equal: " + std::to_string(trials) + " trials x " + std::to_string(cycles) + " cycles";
  return v;
}

}  // namespace grainfsr

namespace grainfsr {

std::string CollapseDiagnosis::summary() const {
  if (match) return "collapse matches";
  std::vector<std::string> parts;
  for (const auto& t : missing) parts.push_back("missing " + to_string(t));
  for (const auto& t : extra) parts.push_back("extra " + to_string(t));
  for (const auto& [t, bits] : duplicates) {
    std::string d = "duplicate " + to_string(t) + " from bits";
    for (int b : bits) d += " " + std::to_string(b);
    parts.push_back(d);
  }
  std::string out = "collapse mismatch: ";
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "; " : "") + parts[i];
  return out;
}

CollapseDiagnosis diagnose_collapse(const RegisterSpec& galois, const RegisterSpec& fib) {
  CollapseDiagnosis d;
  const int top = galois.length - 1;
  std::map<ProductTerm, std::vector<int>> sources;
  for (int j = 0; j <= top; ++j) {
    if (j < top && galois.is_shift(j)) continue;
    const AnfExpr g = j == top ? galois.feedback_of(top) : nonshift_part(galois, j);
    const TermSet back = j == top ? g.terms() : remap_indices(g.terms(), galois.id, top - j, galois.length);
    for (const auto& t : back) sources[t].push_back(j);
  }
  for (const auto& [t, bits] : sources)
    if (bits.size() > 1) d.duplicates.emplace_back(t, bits);

  const AnfExpr collapsed = collapse_to_fibonacci(galois).feedback_of(top);
  const AnfExpr want = fib.feedback_of(top);
  for (const auto& t : want.terms())
    if (!collapsed.contains(t)) d.missing.insert(t);
  for (const auto& t : collapsed.terms())
    if (!want.contains(t)) d.extra.insert(t);
  d.match = d.missing.empty() && d.extra.empty() && collapsed.constant() == want.constant() &&
            fib.length == galois.length;
  return d;
}

ShiftScript derive_script(const RegisterSpec& galois) {
  ShiftScript script;
  const int top = galois.length - 1;
  for (int j = top - 1; j >= 0; --j) {
    if (galois.is_shift(j)) continue;
    const AnfExpr g = nonshift_part(galois, j);
    if (g.constant()) throw Error("constant feedback at " + to_string(Var{galois.id, j}) + " cannot be scripted");
    script.push_back(ShiftMove{galois.id, top, j, remap_indices(g.terms(), galois.id, top - j, galois.length)});
  }
  return script;
}

}  // namespace grainfsr
