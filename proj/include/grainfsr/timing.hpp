#pragma once

#include <map>
#include <string>
#include <string_view>

#include "grainfsr/anf.hpp"
#include "grainfsr/fsr.hpp"

namespace grainfsr {

// Two-input AND/XOR gate basis, one depth unit per gate level. The weights
// only scale area_proxy and default to 1.
struct CostModel {
  double xor2 = 1.0;
  double and2 = 1.0;
};

// Reads `weight xor2 = <float>` / `weight and2 = <float>` lines.
CostModel parse_cost_model(std::string_view text);

using DepthEnv = std::map<std::string, int>;

int ceil_log2(std::size_t x);

// Balanced-tree depth: ceil(log2(leaves)) + deepest leaf, where a product term
// of degree d is a leaf of depth ceil(log2(d)) and an output reference is a
// leaf of its own depth.
int expr_depth(const AnfExpr& expr, const DepthEnv& env = {});

// Depth a single term contributes as a leaf.
int term_depth(const ProductTerm& term, const DepthEnv& env = {});

struct DividerChoice {
  int factor = 1;
  bool clamped = false;  // ratio exceeded 4
};

DividerChoice divider_factor(int init_depth, int keygen_depth);

struct TimingReport {
  std::map<std::string, int> expr_depth;      // "b[79]", "H", ...
  std::map<std::string, int> register_depth;  // max feedback depth per register
  int keygen_depth = 0;
  int init_depth = 0;
  DividerChoice divider;
  double divider_overhead_ge = 0.0;  // quoted area of the divide-by-4 block
};

inline constexpr double kDivideByFourOverheadGe = 25.67;

TimingReport critical_depths(const SystemSpec& system);

struct AreaProxy {
  std::size_t xor_gates = 0;
  std::size_t and_gates = 0;
  double weighted = 0.0;
};

AreaProxy area_proxy(const AnfExpr& expr, const CostModel& cost = {});
AreaProxy area_proxy(const SystemSpec& system, const CostModel& cost = {});

}  // namespace grainfsr
