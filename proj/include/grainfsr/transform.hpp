#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "grainfsr/anf.hpp"
#include "grainfsr/fsr.hpp"
#include "grainfsr/timing.hpp"

namespace grainfsr {

// Moves `terms` (given in source coordinates) from the feedback of bit
// `source` to bit `dest`, reindexing by dest - source mod n.
struct ShiftMove {
  std::string reg;
  int source = 0;
  int dest = 0;
  TermSet terms;
  friend bool operator==(const ShiftMove&, const ShiftMove&) = default;
};

using ShiftScript = std::vector<ShiftMove>;

enum class UniformityViolation { non_singular, depends_on_successor, index_above_terminal };

std::string to_string(UniformityViolation v);

struct UniformityReport {
  bool uniform = true;
  int terminal_bit = 0;
  std::vector<std::pair<int, UniformityViolation>> violations;
};

// g_i = f_i xor x_{i+1}: the part of a feedback function beyond the shift.
AnfExpr nonshift_part(const RegisterSpec& reg, int bit);

// Largest t such that every bit below t is a pure shift.
int terminal_bit(const RegisterSpec& reg);

// Max over product terms of (max index - min index), counting only variables
// of `reg`. Foreign variables never constrain the terminal bit.
int min_terminal_bit(const AnfExpr& feedback, const std::string& reg);

// The smallest terminal bit that keeps every bit of `reg` read by a combining
// output a delayed copy of bit 0.
int required_terminal_bit(const SystemSpec& system, const std::string& reg);

RegisterSpec apply_shift(const RegisterSpec& reg, const ShiftMove& move);
SystemSpec apply_shift(const SystemSpec& system, const ShiftMove& move);

// Checks singularity and that bits above the terminal bit read nothing above
// it. `terminal` overrides the computed terminal bit.
UniformityReport check_uniform(const RegisterSpec& reg, std::optional<int> terminal = {});

struct ScriptResult {
  bool ok = true;
  SystemSpec spec;                     // final spec, or the spec before the failing move
  std::optional<std::size_t> failed_move;
  std::string diagnosis;
  std::vector<std::string> warnings;  // moves below the required terminal bit
};

// Applies the moves in order, re-checking uniformity after each. When
// `warn_required` is set, destinations below required_terminal_bit are
// reported as warnings.
ScriptResult check_script(const SystemSpec& fib, const ShiftScript& script,
                          bool warn_required = false);

// n-1-i*k for i = 0 .. floor((n-1-terminal)/k) - 1, descending. Always
// contains n-1.
std::vector<int> allowed_feedback_positions(int n, int terminal, int k);

// Largest k such that every register-local tap v satisfies v + k - 1 <= n - 1
// and, for Galois registers, no feedback position lies in [v, v + k - 2].
int max_hw_parallel_degree(const SystemSpec& system);

struct DistributeResult {
  SystemSpec spec;
  ShiftScript script;
  std::vector<ProductTerm> unshiftable;  // left at the top bit
};

DistributeResult auto_distribute(const SystemSpec& fib, const std::string& reg, int terminal, int k,
                                 const CostModel& cost = {});

// Unshifts every term below the top bit back onto bit n-1.
RegisterSpec collapse_to_fibonacci(const RegisterSpec& galois);
SystemSpec collapse_to_fibonacci(const SystemSpec& galois);

struct CollapseDiagnosis {
  bool match = true;
  TermSet missing;  // in the fibonacci feedback but not reproduced
  TermSet extra;    // reproduced but not in the fibonacci feedback
  // Original-coordinate terms reached from more than one bit; XOR cancels them.
  std::vector<std::pair<ProductTerm, std::vector<int>>> duplicates;
  std::string summary() const;
};

CollapseDiagnosis diagnose_collapse(const RegisterSpec& galois, const RegisterSpec& fib);

// One move per explicit bit below the top, in descending destination order,
// that rebuilds `galois` from its collapsed form.
ShiftScript derive_script(const RegisterSpec& galois);

// Maps a Fibonacci register state to a state of the equivalent Galois register
// that emits the same bit-0 sequence (and the same bits 0..terminal). Only the
// Galois side's functions are used; whether it actually collapses to `fib` is
// left to diagnose_collapse or to simulation.
Bits map_initial_state(const RegisterSpec& fib, const RegisterSpec& galois, const Bits& fib_state);

// True when the two registers differ in some feedback function.
bool is_transformed(const RegisterSpec& fib, const RegisterSpec& galois);

// Applies map_initial_state to every register that differs between the systems.
SystemState map_system_state(const SystemSpec& fib, const SystemSpec& galois,
                             const SystemState& state);

struct EquivalenceVerdict {
  bool equal = true;
  std::string detail;
  // Counterexample: the lowest initial state (of side `side`) whose output
  // prefix has no partner, and the first cycle where it differs from the other
  // side's prefix for the same initial state. Mapped checks report the trial.
  std::optional<std::uint64_t> state;
  char side = 'A';
  std::optional<std::size_t> cycle;
  Bits prefix;
};

// Compares the multisets of bit-0 prefixes (length `horizon`, default 2^n) over
// all initial states. Registers must be autonomous and n <= 20.
EquivalenceVerdict check_equivalence_exhaustive(const RegisterSpec& a, const RegisterSpec& b,
                                                std::optional<std::size_t> horizon = {},
                                                unsigned workers = 0);

// Random-state simulation of two systems that differ only in register
// configurations. Each trial draws a state for `fib`, maps every transformed
// register with map_initial_state, and compares bit 0 and the time-aligned
// columns 0..terminal of every register over `cycles` steps.
EquivalenceVerdict check_equivalence_mapped(const SystemSpec& fib, const SystemSpec& galois,
                                            std::size_t trials, std::size_t cycles,
                                            std::uint64_t seed, unsigned workers = 0);

}  // namespace grainfsr
