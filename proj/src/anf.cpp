#include "grainfsr/anf.hpp"

#include <algorithm>

namespace grainfsr {

std::string to_string(const Var& v) {
  if (v.is_signal()) return v.reg;
  return v.reg + "[" + std::to_string(v.index) + "]";
}

ProductTerm::ProductTerm(std::initializer_list<Var> vars)
    : ProductTerm(std::vector<Var>(vars)) {}

ProductTerm::ProductTerm(std::vector<Var> vars) : vars_(std::move(vars)) {
  if (vars_.empty()) throw Error("product term must contain at least one variable");
  std::sort(vars_.begin(), vars_.end());
  vars_.erase(std::unique(vars_.begin(), vars_.end()), vars_.end());
}

bool ProductTerm::contains(const Var& v) const {
  return std::binary_search(vars_.begin(), vars_.end(), v);
}

bool operator<(const ProductTerm& a, const ProductTerm& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  return std::lexicographical_compare(a.vars_.begin(), a.vars_.end(), b.vars_.begin(),
                                      b.vars_.end());
}

std::string to_string(const ProductTerm& t) {
  std::string out;
  for (const auto& v : t.vars()) {
    if (!out.empty()) out += '*';
    out += to_string(v);
  }
  return out;
}

std::string to_string(const AnfExpr& e) {
  if (e.is_zero()) return "0";
  std::string out;
  for (const auto& t : e.terms()) {
    if (!out.empty()) out += " + ";
    out += to_string(t);
  }
  if (e.constant()) out += out.empty() ? "1" : " + 1";
  return out;
}

bool evaluate(const AnfExpr& expr, const Assignment& assignment) {
  return evaluate_with(expr, [&](const Var& v) {
    auto it = assignment.find(v);
    if (it == assignment.end()) throw Error("unassigned variable " + to_string(v));
    return it->second;
  });
}

AnfExpr xor_merge(const AnfExpr& expr, const TermSet& terms) {
  TermSet merged = expr.terms();
  for (const auto& t : terms) {
    auto [it, inserted] = merged.insert(t);
    if (!inserted) merged.erase(it);
  }
  return AnfExpr(std::move(merged), expr.constant());
}

AnfExpr xor_merge(const AnfExpr& a, const AnfExpr& b) {
  AnfExpr merged = xor_merge(a, b.terms());
  return AnfExpr(merged.terms(), a.constant() != b.constant());
}

TermSet remap_indices(const TermSet& terms, const std::string& reg, int delta, int modulus) {
  if (modulus <= 0) throw Error("remap modulus must be positive");
  TermSet out;
  for (const auto& t : terms) {
    std::vector<Var> vars;
    vars.reserve(t.degree());
    for (const auto& v : t.vars()) {
      if (v.reg != reg || v.is_signal())
        throw Error("foreign variable " + to_string(v) + " cannot be remapped within register " +
                    reg);
      int k = ((v.index + delta) % modulus + modulus) % modulus;
      vars.push_back(Var{reg, k});
    }
    out.insert(ProductTerm(std::move(vars)));
  }
  return out;
}

AnfSummary analyze(const AnfExpr& expr) {
  AnfSummary s;
  s.term_count = expr.terms().size();
  for (const auto& t : expr.terms()) {
    s.max_degree = std::max(s.max_degree, t.degree());
    for (const auto& v : t.vars()) {
      s.support.insert(v);
      if (v.is_signal()) continue;
      auto [it, inserted] = s.index_range.try_emplace(v.reg, IndexRange{v.index, v.index});
      if (!inserted) {
        it->second.min = std::min(it->second.min, v.index);
        it->second.max = std::max(it->second.max, v.index);
      }
    }
  }
  return s;
}

}  // namespace grainfsr
