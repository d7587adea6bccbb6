#include "grainfsr/fsr.hpp"

#include <algorithm>
#include <functional>

namespace grainfsr {

AnfExpr RegisterSpec::feedback_of(int bit) const {
  auto it = feedback.find(bit);
  if (it != feedback.end()) return it->second;
  return AnfExpr::variable(successor(bit));
}

bool RegisterSpec::is_shift(int bit) const {
  auto it = feedback.find(bit);
  return it == feedback.end() || it->second == AnfExpr::variable(successor(bit));
}

void RegisterSpec::normalize() {
  std::erase_if(feedback, [this](const auto& kv) {
    return kv.second == AnfExpr::variable(successor(kv.first));
  });
}

const RegisterSpec* SystemSpec::find_register(std::string_view id) const {
  for (const auto& r : registers)
    if (r.id == id) return &r;
  return nullptr;
}

RegisterSpec* SystemSpec::find_register(std::string_view id) {
  for (auto& r : registers)
    if (r.id == id) return &r;
  return nullptr;
}

const RegisterSpec& SystemSpec::reg(std::string_view id) const {
  const auto* r = find_register(id);
  if (!r) throw Error("unknown register '" + std::string(id) + "'");
  return *r;
}

const NamedOutput* SystemSpec::find_output(std::string_view name) const {
  for (const auto& o : outputs)
    if (o.name == name) return &o;
  return nullptr;
}

namespace {

void check_vars(const SystemSpec& spec, const AnfExpr& e, bool allow_signals,
                const std::string& where) {
  for (const auto& t : e.terms()) {
    for (const auto& v : t.vars()) {
      if (v.is_signal()) {
        if (!allow_signals)
          throw Error(where + ": output reference " + v.reg + " not allowed here");
        if (!spec.find_output(v.reg))
          throw Error(where + ": undeclared output " + v.reg);
        continue;
      }
      const auto* r = spec.find_register(v.reg);
      if (!r) throw Error(where + ": undeclared register " + v.reg);
      if (v.index < 0 || v.index >= r->length)
        throw Error(where + ": index out of range in " + to_string(v));
    }
  }
}

}  // namespace

std::vector<std::string> output_order(const SystemSpec& spec) {
  enum class Mark { none, active, done };
  std::map<std::string, Mark> mark;
  std::vector<std::string> order;
  std::function<void(const NamedOutput&)> visit = [&](const NamedOutput& o) {
    auto& m = mark[o.name];
    if (m == Mark::done) return;
    if (m == Mark::active) throw Error("output cycle through " + o.name);
    m = Mark::active;
    for (const auto& t : o.expr.terms())
      for (const auto& v : t.vars())
        if (v.is_signal()) {
          const auto* dep = spec.find_output(v.reg);
          if (!dep) throw Error("undeclared output " + v.reg);
          visit(*dep);
        }
    mark[o.name] = Mark::done;
    order.push_back(o.name);
  };
  for (const auto& o : spec.outputs) visit(o);
  return order;
}

void validate(const SystemSpec& spec) {
  std::set<std::string> names;
  for (const auto& r : spec.registers) {
    if (r.id.empty()) throw Error("register with empty id");
    if (r.length < 1) throw Error("register " + r.id + " must have positive length");
    if (!names.insert(r.id).second) throw Error("duplicate register " + r.id);
  }
  for (const auto& o : spec.outputs)
    if (!names.insert(o.name).second) throw Error("duplicate name " + o.name);

  for (const auto& r : spec.registers) {
    for (const auto& [bit, e] : r.feedback) {
      std::string where = "feedback " + r.id + "[" + std::to_string(bit) + "]";
      if (bit < 0 || bit >= r.length) throw Error(where + ": index out of range");
      check_vars(spec, e, false, where);
    }
  }
  for (const auto& o : spec.outputs) check_vars(spec, o.expr, true, "output " + o.name);
  for (const auto& inj : spec.injections) {
    const auto* r = spec.find_register(inj.reg);
    if (!r) throw Error("injection into undeclared register " + inj.reg);
    if (inj.bit < 0 || inj.bit >= r->length)
      throw Error("injection target " + inj.reg + "[" + std::to_string(inj.bit) +
                  "] out of range");
    if (!spec.find_output(inj.output)) throw Error("injection of undeclared output " + inj.output);
  }
  output_order(spec);
}

Simulator::Simulator(SystemSpec spec) : spec_(std::move(spec)) {
  validate(spec_);
  offsets_.push_back(0);
  for (const auto& r : spec_.registers)
    offsets_.push_back(offsets_.back() + static_cast<std::size_t>(r.length));

  output_names_ = output_order(spec_);
  for (const auto& name : output_names_) output_exprs_.push_back(compile(spec_.find_output(name)->expr));

  for (const auto& r : spec_.registers)
    for (int i = 0; i < r.length; ++i) next_.push_back(compile(r.feedback_of(i)));

  for (const auto& inj : spec_.injections) {
    CompiledInjection c;
    c.mode = inj.mode;
    c.target = flat(Var{inj.reg, inj.bit});
    c.output_slot = static_cast<int>(
        std::find(output_names_.begin(), output_names_.end(), inj.output) - output_names_.begin());
    injections_.push_back(std::move(c));
  }
}

int Simulator::register_index(std::string_view id) const {
  for (std::size_t i = 0; i < spec_.registers.size(); ++i)
    if (spec_.registers[i].id == id) return static_cast<int>(i);
  throw Error("unknown register '" + std::string(id) + "'");
}

int Simulator::flat(const Var& v) const {
  if (v.is_signal()) {
    auto it = std::find(output_names_.begin(), output_names_.end(), v.reg);
    return -static_cast<int>(it - output_names_.begin()) - 1;
  }
  return static_cast<int>(offsets_[static_cast<std::size_t>(register_index(v.reg))]) + v.index;
}

Simulator::CompiledExpr Simulator::compile(const AnfExpr& e) const {
  CompiledExpr c;
  c.constant = e.constant();
  for (const auto& t : e.terms()) {
    std::vector<int> term;
    for (const auto& v : t.vars()) term.push_back(flat(v));
    c.terms.push_back(std::move(term));
  }
  return c;
}

bool Simulator::eval(const CompiledExpr& e, const Bits& flat, const Bits& signals) const {
  bool acc = e.constant;
  for (const auto& term : e.terms) {
    bool product = true;
    for (int idx : term) {
      std::uint8_t bit = idx >= 0 ? flat[static_cast<std::size_t>(idx)]
                                  : signals[static_cast<std::size_t>(-idx - 1)];
      if (bit > 1) throw Error("value not available within a parallel block");
      if (!bit) {
        product = false;
        break;
      }
    }
    acc ^= product;
  }
  return acc;
}

Bits Simulator::eval_outputs(const Bits& flat) const {
  Bits signals(output_exprs_.size(), 0);
  for (std::size_t slot = 0; slot < output_exprs_.size(); ++slot)
    signals[slot] = eval(output_exprs_[slot], flat, signals);
  return signals;
}

Bits Simulator::flatten(const SystemState& s) const {
  check_state(s);
  Bits out;
  out.reserve(width());
  for (const auto& r : s.regs) out.insert(out.end(), r.begin(), r.end());
  return out;
}

void Simulator::unflatten(const Bits& flat, SystemState& s) const {
  for (std::size_t r = 0; r < spec_.registers.size(); ++r)
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(offsets_[r]),
              flat.begin() + static_cast<std::ptrdiff_t>(offsets_[r + 1]), s.regs[r].begin());
}

SystemState Simulator::zero_state() const {
  SystemState s;
  for (const auto& r : spec_.registers) s.regs.emplace_back(static_cast<std::size_t>(r.length), 0);
  return s;
}

void Simulator::check_state(const SystemState& state) const {
  if (state.regs.size() != spec_.registers.size())
    throw Error("state has " + std::to_string(state.regs.size()) + " registers, spec has " +
                std::to_string(spec_.registers.size()));
  for (std::size_t r = 0; r < state.regs.size(); ++r)
    if (state.regs[r].size() != static_cast<std::size_t>(spec_.registers[r].length))
      throw Error("state length mismatch for register " + spec_.registers[r].id);
}

SystemState Simulator::step(const SystemState& state, const ModeSet& modes) const {
  const Bits cur = flatten(state);
  bool need_signals = false;
  for (const auto& inj : injections_) need_signals |= modes.count(inj.mode) != 0;
  const Bits signals = need_signals ? eval_outputs(cur) : Bits(output_exprs_.size(), 0);

  Bits nxt(cur.size());
  for (std::size_t i = 0; i < cur.size(); ++i) nxt[i] = eval(next_[i], cur, signals);
  for (const auto& inj : injections_)
    if (modes.count(inj.mode))
      nxt[static_cast<std::size_t>(inj.target)] ^= signals[static_cast<std::size_t>(inj.output_slot)];

  SystemState out = state;
  unflatten(nxt, out);
  ++out.cycle;
  return out;
}

RunResult Simulator::run(const SystemState& state, std::size_t cycles, const ModeSet& modes,
                         const std::vector<Signal>& watch) const {
  std::vector<std::pair<bool, int>> resolved;  // (is output, flat offset or slot)
  for (const auto& w : watch) {
    if (w.bit >= 0) {
      const auto* r = spec_.find_register(w.name);
      if (!r || w.bit >= r->length)
        throw Error("unknown watch target " + w.name + "[" + std::to_string(w.bit) + "]");
      resolved.emplace_back(false, flat(Var{w.name, w.bit}));
    } else {
      auto it = std::find(output_names_.begin(), output_names_.end(), w.name);
      if (it == output_names_.end()) throw Error("unknown watch target " + w.name);
      resolved.emplace_back(true, static_cast<int>(it - output_names_.begin()));
    }
  }

  RunResult result;
  result.traces.assign(watch.size(), Bits{});
  for (auto& t : result.traces) t.reserve(cycles);
  SystemState cur = state;
  check_state(cur);
  for (std::size_t c = 0; c < cycles; ++c) {
    const Bits f = flatten(cur);
    const Bits signals = eval_outputs(f);
    for (std::size_t w = 0; w < resolved.size(); ++w) {
      auto [is_output, idx] = resolved[w];
      result.traces[w].push_back(is_output ? signals[static_cast<std::size_t>(idx)]
                                           : f[static_cast<std::size_t>(idx)]);
    }
    cur = step(cur, modes);
  }
  result.final_state = std::move(cur);
  return result;
}

BitMatrix Simulator::tap_trace(const SystemState& state, std::size_t cycles, std::string_view reg,
                               const ModeSet& modes) const {
  const auto r = static_cast<std::size_t>(register_index(reg));
  BitMatrix rows;
  rows.reserve(cycles);
  SystemState cur = state;
  check_state(cur);
  for (std::size_t c = 0; c < cycles; ++c) {
    rows.push_back(cur.regs[r]);
    cur = step(cur, modes);
  }
  return rows;
}

bool Simulator::output(const SystemState& state, std::string_view name) const {
  auto it = std::find(output_names_.begin(), output_names_.end(), name);
  if (it == output_names_.end()) throw Error("unknown output " + std::string(name));
  return eval_outputs(flatten(state))[static_cast<std::size_t>(it - output_names_.begin())];
}

std::map<std::string, bool> Simulator::outputs(const SystemState& state) const {
  const Bits signals = eval_outputs(flatten(state));
  std::map<std::string, bool> out;
  for (std::size_t i = 0; i < output_names_.size(); ++i) out[output_names_[i]] = signals[i];
  return out;
}

ParallelStepResult Simulator::step_parallel(const SystemState& state, int k,
                                            const ModeSet& modes) const {
  if (k < 1) throw Error("parallel degree must be at least 1");
  const Bits orig = flatten(state);
  constexpr std::uint8_t kUnavailable = 2;

  // Bits whose next value is not a plain shift: explicit feedback, active
  // injection targets and the top bit.
  std::vector<std::vector<bool>> written(spec_.registers.size());
  for (std::size_t r = 0; r < spec_.registers.size(); ++r) {
    const auto& reg = spec_.registers[r];
    written[r].assign(static_cast<std::size_t>(reg.length), false);
    for (int i = 0; i < reg.length; ++i) written[r][static_cast<std::size_t>(i)] = !reg.is_shift(i);
    written[r].back() = true;
  }
  for (const auto& inj : spec_.injections)
    if (modes.count(inj.mode))
      written[static_cast<std::size_t>(register_index(inj.reg))][static_cast<std::size_t>(inj.bit)] =
          true;

  // view[s]: the register contents at sub-step s as far as they are still
  // copies of the starting state.
  std::vector<Bits> view(static_cast<std::size_t>(k), Bits(orig.size(), kUnavailable));
  for (std::size_t r = 0; r < spec_.registers.size(); ++r) {
    const int n = spec_.registers[r].length;
    const std::size_t off = offsets_[r];
    for (int v = 0; v < n; ++v) {
      for (int s = 0; s < k && v + s < n; ++s) {
        if (s > 0 && written[r][static_cast<std::size_t>(v + s - 1)]) break;
        view[static_cast<std::size_t>(s)][off + static_cast<std::size_t>(v)] =
            orig[off + static_cast<std::size_t>(v + s)];
      }
    }
  }

  ParallelStepResult result;
  std::vector<Bits> signals(static_cast<std::size_t>(k));
  for (int s = 0; s < k; ++s) signals[static_cast<std::size_t>(s)] = eval_outputs(view[static_cast<std::size_t>(s)]);
  for (std::size_t slot = 0; slot < output_names_.size(); ++slot) {
    Bits seq;
    for (int s = 0; s < k; ++s) seq.push_back(signals[static_cast<std::size_t>(s)][slot]);
    result.outputs[output_names_[slot]] = std::move(seq);
  }

  auto written_value = [&](std::size_t flat_bit, int s) {
    const auto& vs = view[static_cast<std::size_t>(s)];
    const auto& sig = signals[static_cast<std::size_t>(s)];
    std::uint8_t v = eval(next_[flat_bit], vs, sig);
    for (const auto& inj : injections_)
      if (modes.count(inj.mode) && static_cast<std::size_t>(inj.target) == flat_bit)
        v ^= sig[static_cast<std::size_t>(inj.output_slot)];
    return v;
  };

  Bits nxt(orig.size());
  for (std::size_t r = 0; r < spec_.registers.size(); ++r) {
    const int n = spec_.registers[r].length;
    const std::size_t off = offsets_[r];
    for (int q = 0; q < n; ++q) {
      std::uint8_t value = 0;
      bool found = false;
      for (int d = 0; d < k && q + d < n; ++d) {
        if (written[r][static_cast<std::size_t>(q + d)]) {
          value = written_value(off + static_cast<std::size_t>(q + d), k - 1 - d);
          found = true;
          break;
        }
      }
      if (!found) value = orig[off + static_cast<std::size_t>(q + k)];
      nxt[off + static_cast<std::size_t>(q)] = value;
    }
  }

  result.state = state;
  unflatten(nxt, result.state);
  result.state.cycle += static_cast<std::uint64_t>(k);
  return result;
}

SystemState step(const SystemSpec& spec, const SystemState& state, const ModeSet& modes) {
  return Simulator(spec).step(state, modes);
}

RunResult run(const SystemSpec& spec, const SystemState& state, std::size_t cycles,
              const ModeSet& modes, const std::vector<Signal>& watch) {
  return Simulator(spec).run(state, cycles, modes, watch);
}

BitMatrix tap_trace(const SystemSpec& spec, const SystemState& state, std::size_t cycles,
                    std::string_view reg, const ModeSet& modes) {
  return Simulator(spec).tap_trace(state, cycles, reg, modes);
}

SystemSpec single_register_system(const RegisterSpec& reg) {
  SystemSpec s;
  s.name = reg.id;
  s.registers.push_back(reg);
  return s;
}

}  // namespace grainfsr
