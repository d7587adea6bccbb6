#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace grainfsr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A register-qualified bit variable such as b[63] or s[0]. A Var whose index
// is kSignal names a combining output (e.g. H inside Z) instead of a bit.
struct Var {
  static constexpr int kSignal = -1;

  std::string reg;
  int index = 0;

  bool is_signal() const { return index == kSignal; }

  // Canonical order: register name ascending, then bit index descending.
  friend bool operator<(const Var& a, const Var& b) {
    if (a.reg != b.reg) return a.reg < b.reg;
    return a.index > b.index;
  }
  friend bool operator==(const Var&, const Var&) = default;
};

std::string to_string(const Var& v);

// AND of a non-empty set of variables.
class ProductTerm {
 public:
  ProductTerm(std::initializer_list<Var> vars);
  explicit ProductTerm(std::vector<Var> vars);

  const std::vector<Var>& vars() const { return vars_; }
  std::size_t degree() const { return vars_.size(); }
  bool contains(const Var& v) const;

  // Ordered by degree, then lexicographically over the canonical var order.
  friend bool operator<(const ProductTerm& a, const ProductTerm& b);
  friend bool operator==(const ProductTerm&, const ProductTerm&) = default;

 private:
  std::vector<Var> vars_;
};

std::string to_string(const ProductTerm& t);

using TermSet = std::set<ProductTerm>;

// XOR of product terms plus a constant bit. Always canonical: a term either
// occurs once or not at all.
class AnfExpr {
 public:
  AnfExpr() = default;
  explicit AnfExpr(bool constant) : constant_(constant) {}
  AnfExpr(TermSet terms, bool constant = false)
      : terms_(std::move(terms)), constant_(constant) {}

  static AnfExpr variable(const Var& v) { return AnfExpr(TermSet{ProductTerm{v}}); }

  const TermSet& terms() const { return terms_; }
  bool constant() const { return constant_; }
  bool is_zero() const { return terms_.empty() && !constant_; }
  bool contains(const ProductTerm& t) const { return terms_.count(t) != 0; }

  friend bool operator==(const AnfExpr&, const AnfExpr&) = default;

 private:
  TermSet terms_;
  bool constant_ = false;
};

// Formats as "b[62] + b[63]*b[60] + 1"; the zero function prints as "0".
std::string to_string(const AnfExpr& e);

using Assignment = std::map<Var, bool>;

// Throws Error naming the first variable missing from the assignment.
bool evaluate(const AnfExpr& expr, const Assignment& assignment);

// Evaluates with an arbitrary lookup `bool(const Var&)`.
template <typename Lookup>
bool evaluate_with(const AnfExpr& expr, Lookup&& lookup) {
  bool acc = expr.constant();
  for (const auto& term : expr.terms()) {
    bool product = true;
    for (const auto& v : term.vars()) {
      if (!lookup(v)) {
        product = false;
        break;
      }
    }
    acc ^= product;
  }
  return acc;
}

// Symmetric difference of the expression's terms with `terms`.
AnfExpr xor_merge(const AnfExpr& expr, const TermSet& terms);
AnfExpr xor_merge(const AnfExpr& a, const AnfExpr& b);

// Maps every index k of register `reg` to (k + delta) mod modulus. Throws on
// any variable that belongs to another register.
TermSet remap_indices(const TermSet& terms, const std::string& reg, int delta, int modulus);

struct IndexRange {
  int min = 0;
  int max = 0;
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

struct AnfSummary {
  std::size_t term_count = 0;
  std::size_t max_degree = 0;
  std::map<std::string, IndexRange> index_range;  // per register, signals excluded
  std::set<Var> support;
};

AnfSummary analyze(const AnfExpr& expr);

}  // namespace grainfsr
