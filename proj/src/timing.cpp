#include "grainfsr/timing.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace grainfsr {

CostModel parse_cost_model(std::string_view text) {
  CostModel model;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string kw, gate, eq;
    double value = 0;
    if (!(ls >> kw)) continue;
    if (kw != "weight" || !(ls >> gate >> eq >> value) || eq != "=")
      throw Error("cost model line " + std::to_string(lineno) + ": expected 'weight <gate> = <float>'");
    std::string rest;
    if (ls >> rest) throw Error("cost model line " + std::to_string(lineno) + ": trailing text");
    if (!(value > 0)) throw Error("cost model line " + std::to_string(lineno) + ": weight must be positive");
    if (gate == "xor2")
      model.xor2 = value;
    else if (gate == "and2")
      model.and2 = value;
    else
      throw Error("cost model line " + std::to_string(lineno) + ": unknown gate " + gate);
  }
  return model;
}

int ceil_log2(std::size_t x) {
  int d = 0;
  std::size_t cap = 1;
  while (cap < x) {
    cap <<= 1;
    ++d;
  }
  return d;
}

int term_depth(const ProductTerm& term, const DepthEnv& env) {
  if (term.degree() == 1 && term.vars().front().is_signal()) {
    auto it = env.find(term.vars().front().reg);
    return it == env.end() ? 0 : it->second;
  }
  int leaf = 0;
  for (const auto& v : term.vars())
    if (v.is_signal())
      if (auto it = env.find(v.reg); it != env.end()) leaf = std::max(leaf, it->second);
  return ceil_log2(term.degree()) + leaf;
}

int expr_depth(const AnfExpr& expr, const DepthEnv& env) {
  std::size_t leaves = expr.terms().size();
  if (leaves == 0) return 0;
  int deepest = 0;
  for (const auto& t : expr.terms()) deepest = std::max(deepest, term_depth(t, env));
  return ceil_log2(std::max<std::size_t>(1, leaves)) + deepest;
}

DividerChoice divider_factor(int init_depth, int keygen_depth) {
  if (init_depth <= keygen_depth) return {1, false};
  if (keygen_depth <= 0) return {4, true};
  if (init_depth <= 2 * keygen_depth) return {2, false};
  if (init_depth <= 4 * keygen_depth) return {4, false};
  return {4, true};
}

TimingReport critical_depths(const SystemSpec& system) {
  validate(system);
  TimingReport report;
  DepthEnv env;
  for (const auto& name : output_order(system)) {
    int d = expr_depth(system.find_output(name)->expr, env);
    env[name] = d;
    report.expr_depth[name] = d;
  }
  for (const auto& reg : system.registers) {
    int worst = 0;
    for (const auto& [bit, e] : reg.feedback) {
      int d = expr_depth(e, env);
      report.expr_depth[to_string(Var{reg.id, bit})] = d;
      worst = std::max(worst, d);
    }
    report.register_depth[reg.id] = worst;
    report.keygen_depth = std::max(report.keygen_depth, worst);
  }
  // Outputs nobody else consumes (Z for Grain) sit on the keystream path.
  std::set<std::string> consumed;
  for (const auto& o : system.outputs)
    for (const auto& t : o.expr.terms())
      for (const auto& v : t.vars())
        if (v.is_signal()) consumed.insert(v.reg);
  for (const auto& o : system.outputs)
    if (!consumed.count(o.name)) report.keygen_depth = std::max(report.keygen_depth, env.at(o.name));

  int loop = -1;
  for (const auto& inj : system.injections) {
    const auto& reg = system.reg(inj.reg);
    int feedback = expr_depth(reg.feedback_of(inj.bit), env);
    loop = std::max({loop, env.at(inj.output), feedback});
  }
  report.init_depth = loop < 0 ? report.keygen_depth : loop + 1;
  report.divider = divider_factor(report.init_depth, report.keygen_depth);
  if (report.divider.factor == 4) report.divider_overhead_ge = kDivideByFourOverheadGe;
  return report;
}

AreaProxy area_proxy(const AnfExpr& expr, const CostModel& cost) {
  AreaProxy a;
  if (!expr.terms().empty()) a.xor_gates = expr.terms().size() - 1;
  for (const auto& t : expr.terms()) a.and_gates += t.degree() - 1;
  a.weighted = static_cast<double>(a.xor_gates) * cost.xor2 + static_cast<double>(a.and_gates) * cost.and2;
  return a;
}

AreaProxy area_proxy(const SystemSpec& system, const CostModel& cost) {
  AreaProxy total;
  auto add = [&](const AnfExpr& e) {
    auto a = area_proxy(e, cost);
    total.xor_gates += a.xor_gates;
    total.and_gates += a.and_gates;
    total.weighted += a.weighted;
  };
  for (const auto& reg : system.registers)
    for (const auto& [bit, e] : reg.feedback) add(e);
  for (const auto& o : system.outputs) add(o.expr);
  return total;
}

}  // namespace grainfsr
