#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "grainfsr/anf.hpp"
#include "grainfsr/fsr.hpp"
#include "grainfsr/transform.hpp"

namespace testsupport {

using namespace grainfsr;

inline Var x(int i) { return Var{"x", i}; }

// A random nonsingular Fibonacci register on "x": f_{n-1} = x0 + random terms
// of degree 1..3 over x1..x{n-1}.
inline RegisterSpec random_fibonacci(std::mt19937_64& rng, int n, int max_terms = 6) {
  std::uniform_int_distribution<int> idx(1, n - 1), deg(1, 3), count(1, max_terms);
  TermSet terms{ProductTerm{x(0)}};
  const int want = count(rng);
  for (int t = 0; t < want; ++t) {
    std::vector<Var> vars;
    const int d = deg(rng);
    for (int i = 0; i < d; ++i) vars.push_back(x(idx(rng)));
    terms.insert(ProductTerm(vars));
  }
  RegisterSpec reg{"x", n, {}};
  reg.feedback[n - 1] = AnfExpr(terms);
  reg.normalize();
  return reg;
}

struct RandomTransform {
  RegisterSpec fib;
  RegisterSpec galois;
  ShiftScript script;
  int terminal = 0;
};

inline ProductTerm lowered(const ProductTerm& t, int by) {
  std::vector<Var> vars;
  for (const auto& v : t.vars()) vars.push_back(Var{v.reg, v.index - by});
  return ProductTerm(vars);
}

// Draws a final destination for every term of the top bit that keeps the
// register uniform for a random terminal bit and never wraps. Moves are chained
// downwards (top -> d1 -> d2 ...), each one leaving behind the terms that end
// at its destination, so every intermediate register is uniform too.
inline RandomTransform random_uniform_transform(std::mt19937_64& rng, int n) {
  RandomTransform out;
  out.fib = random_fibonacci(rng, n);
  const AnfExpr top = out.fib.feedback_of(n - 1);
  const int tau_min = min_terminal_bit(top, "x");
  out.terminal = std::uniform_int_distribution<int>(tau_min, n - 1)(rng);
  std::map<int, std::vector<ProductTerm>, std::greater<>> by_dest;
  for (const auto& term : top.terms()) {
    const int lo_idx = term.vars().back().index;
    const int hi_idx = term.vars().front().index;
    const int lo = std::max(out.terminal, n - 1 - lo_idx);
    const int hi = std::min(n - 1, out.terminal + n - 1 - hi_idx);
    const int dest = std::uniform_int_distribution<int>(lo, hi)(rng);
    if (dest != n - 1) by_dest[dest].push_back(term);
  }
  int at = n - 1;
  for (auto it = by_dest.begin(); it != by_dest.end(); ++it) {
    TermSet moving;
    for (auto rest = it; rest != by_dest.end(); ++rest)
      for (const auto& t : rest->second) moving.insert(lowered(t, n - 1 - at));
    out.script.push_back(ShiftMove{"x", at, it->first, moving});
    at = it->first;
  }
  const ScriptResult r = check_script(single_register_system(out.fib), out.script);
  if (!r.ok) throw Error("generated script rejected: " + r.diagnosis);
  out.galois = r.spec.reg("x");
  return out;
}

// Removes one term from, or replaces one term in, a random explicit bit. The
// result stays uniform but no longer collapses to the original function. When
// no fresh replacement exists the term is simply removed.
inline RegisterSpec mutate_one_term(std::mt19937_64& rng, const RegisterSpec& galois, int terminal) {
  std::vector<int> bits;
  for (const auto& [bit, expr] : galois.feedback)
    if (!nonshift_part(galois, bit).terms().empty()) bits.push_back(bit);
  const int bit = bits[std::uniform_int_distribution<std::size_t>(0, bits.size() - 1)(rng)];
  const AnfExpr g = nonshift_part(galois, bit);
  std::vector<ProductTerm> terms(g.terms().begin(), g.terms().end());
  const ProductTerm victim = terms[std::uniform_int_distribution<std::size_t>(0, terms.size() - 1)(rng)];

  TermSet change{victim};
  if (rng() & 1u) {
    // Replace with a different term whose variables stay at or below the
    // terminal bit, and never reads the successor (x0 for the top bit).
    const int limit = std::min(terminal, bit);
    std::uniform_int_distribution<int> idx(bit == galois.length - 1 ? 1 : 0, limit);
    for (int attempt = 0; attempt < 64; ++attempt) {
      ProductTerm fresh({x(idx(rng)), x(idx(rng))});
      if (fresh != victim && !g.contains(fresh)) {
        change.insert(fresh);
        break;
      }
    }
  }
  RegisterSpec out = galois;
  out.feedback[bit] = xor_merge(galois.feedback_of(bit), change);
  out.normalize();
  return out;
}

}  // namespace testsupport
