#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "grainfsr/anf.hpp"

namespace grainfsr {

using Bits = std::vector<std::uint8_t>;
using BitMatrix = std::vector<Bits>;  // rows are cycles
using ModeSet = std::set<std::string>;

// One shift register. Bits missing from `feedback` shift: f_i = x_{(i+1) mod n}.
struct RegisterSpec {
  std::string id;
  int length = 0;
  std::map<int, AnfExpr> feedback;

  // The effective feedback of bit i, with the implicit shift filled in.
  AnfExpr feedback_of(int bit) const;
  bool is_shift(int bit) const;
  Var successor(int bit) const { return Var{id, (bit + 1) % length}; }

  // Drops explicit entries equal to the implicit shift.
  void normalize();

  friend bool operator==(const RegisterSpec&, const RegisterSpec&) = default;
};

// While `mode` is active, the output's value is XORed into the bit's next state.
struct Injection {
  std::string mode;
  std::string reg;
  int bit = 0;
  std::string output;
  friend bool operator==(const Injection&, const Injection&) = default;
};

struct NamedOutput {
  std::string name;
  AnfExpr expr;
  friend bool operator==(const NamedOutput&, const NamedOutput&) = default;
};

struct SystemSpec {
  std::string name;
  std::vector<RegisterSpec> registers;
  std::vector<NamedOutput> outputs;
  std::vector<Injection> injections;
  std::map<std::string, long long> params;

  const RegisterSpec* find_register(std::string_view id) const;
  RegisterSpec* find_register(std::string_view id);
  const RegisterSpec& reg(std::string_view id) const;
  const NamedOutput* find_output(std::string_view name) const;

  friend bool operator==(const SystemSpec&, const SystemSpec&) = default;
};

// Checks register ids, index ranges, variable resolution, injection targets
// and acyclicity of output references. Throws Error.
void validate(const SystemSpec& spec);

// Output names in dependency order.
std::vector<std::string> output_order(const SystemSpec& spec);

struct SystemState {
  std::vector<Bits> regs;  // same order as SystemSpec::registers
  std::uint64_t cycle = 0;
  friend bool operator==(const SystemState&, const SystemState&) = default;
};

// A watchable signal: a register bit (bit >= 0) or a named output (bit < 0).
struct Signal {
  std::string name;
  int bit = -1;

  static Signal output(std::string n) { return {std::move(n), -1}; }
  static Signal tap(std::string reg, int b) { return {std::move(reg), b}; }
};

struct RunResult {
  std::vector<Bits> traces;  // aligned with the watch list
  SystemState final_state;
};

struct ParallelStepResult {
  SystemState state;
  std::map<std::string, Bits> outputs;  // each output's value at every sub-step
};

// A validated spec lowered to flat bit offsets for fast stepping. Immutable.
class Simulator {
 public:
  explicit Simulator(SystemSpec spec);

  const SystemSpec& spec() const { return spec_; }
  SystemState zero_state() const;
  void check_state(const SystemState& state) const;

  SystemState step(const SystemState& state, const ModeSet& modes = {}) const;

  // Values of each watched signal at `cycles` consecutive states, outputs
  // evaluated before each step.
  RunResult run(const SystemState& state, std::size_t cycles, const ModeSet& modes,
                const std::vector<Signal>& watch) const;

  BitMatrix tap_trace(const SystemState& state, std::size_t cycles, std::string_view reg,
                      const ModeSet& modes = {}) const;

  bool output(const SystemState& state, std::string_view name) const;
  std::map<std::string, bool> outputs(const SystemState& state) const;

  // Advances k cycles with duplicated feedback logic: every value written in
  // the block is computed from the block's starting state with indices offset
  // by the sub-step, the way a k-bit/cycle circuit does it. Throws Error when
  // some sub-step would need a value produced inside the same block.
  ParallelStepResult step_parallel(const SystemState& state, int k,
                                   const ModeSet& modes = {}) const;

 private:
  struct CompiledExpr {
    bool constant = false;
    std::vector<std::vector<int>> terms;  // flat bit offsets; signals are negative: -(slot+1)
  };
  struct CompiledInjection {
    std::string mode;
    int target = 0;  // flat offset
    int output_slot = 0;
  };

  std::size_t width() const { return offsets_.back(); }
  int flat(const Var& v) const;
  CompiledExpr compile(const AnfExpr& e) const;
  bool eval(const CompiledExpr& e, const Bits& flat, const Bits& signals) const;
  Bits flatten(const SystemState& s) const;
  void unflatten(const Bits& flat, SystemState& s) const;
  Bits eval_outputs(const Bits& flat) const;
  int register_index(std::string_view id) const;

  SystemSpec spec_;
  std::vector<std::size_t> offsets_;  // per register start, plus total
  std::vector<CompiledExpr> next_;    // per flat bit
  std::vector<std::string> output_names_;  // by slot, dependency order
  std::vector<CompiledExpr> output_exprs_;
  std::vector<CompiledInjection> injections_;
};

// Convenience wrappers that compile the spec on every call.
SystemState step(const SystemSpec& spec, const SystemState& state, const ModeSet& modes = {});
RunResult run(const SystemSpec& spec, const SystemState& state, std::size_t cycles,
              const ModeSet& modes, const std::vector<Signal>& watch);
BitMatrix tap_trace(const SystemSpec& spec, const SystemState& state, std::size_t cycles,
                    std::string_view reg, const ModeSet& modes = {});

// Wraps a single autonomous register into a system with no outputs.
SystemSpec single_register_system(const RegisterSpec& reg);

}  // namespace grainfsr
