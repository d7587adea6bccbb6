#include <gtest/gtest.h>

#include "grainfsr/grain.hpp"
#include "grainfsr/text_format.hpp"
#include "grainfsr/timing.hpp"
#include "grainfsr/transform.hpp"

using namespace grainfsr;

TEST(Depth, Basics) {
  EXPECT_EQ(ceil_log2(0), 0);
  EXPECT_EQ(ceil_log2(1), 0);
  EXPECT_EQ(ceil_log2(2), 1);
  EXPECT_EQ(ceil_log2(23), 5);
  EXPECT_EQ(expr_depth(parse_expr("b[3]")), 0);
  EXPECT_EQ(expr_depth(AnfExpr(true)), 0);
  EXPECT_EQ(expr_depth(AnfExpr{}), 0);
  EXPECT_EQ(expr_depth(parse_expr("b[3] + b[4]")), 1);
  EXPECT_EQ(expr_depth(parse_expr("b[3]*b[4]*b[5]")), 2);
  EXPECT_EQ(expr_depth(parse_expr("b[1] + H"), {{"H", 3}}), 4);
}

TEST(Depth, GrainNlfsr) {
  EXPECT_EQ(expr_depth(variant("grain80-fib").system.reg("b").feedback_of(79)), 8);
  const RegisterSpec g1 = variant("grain80-galois-1").system.reg("b");
  int worst = 0, at = -1;
  for (int i = 0; i < 80; ++i) {
    const int d = expr_depth(g1.feedback_of(i));
    if (d > worst) worst = d, at = i;
  }
  EXPECT_EQ(worst, 5);
  EXPECT_EQ(at, 65);
}

TEST(CriticalDepths, InitAtLeastInjectedOutputs) {
  for (const auto& name : variant_names()) {
    const TimingReport t = critical_depths(variant(name).system);
    EXPECT_GE(t.init_depth, t.expr_depth.at("Z")) << name;
    EXPECT_GE(t.keygen_depth, t.expr_depth.at("Z")) << name;
    for (const auto& [reg, d] : t.register_depth) EXPECT_LE(d, t.keygen_depth);
  }
}

TEST(CriticalDepths, GaloisShortensFeedback) {
  for (const auto& name : variant_names()) {
    const GrainVariant v = variant(name);
    if (v.is_fibonacci()) continue;
    const TimingReport g = critical_depths(v.system);
    const TimingReport f = critical_depths(variant(v.sibling).system);
    EXPECT_LT(g.register_depth.at("b"), f.register_depth.at("b")) << name;
  }
}

TEST(CriticalDepths, SystemWithoutInjections) {
  const SystemSpec s = parse_spec("system a\nregister x 4\nfeedback x[3] = x[0] + x[1]*x[2]\n").spec;
  const TimingReport t = critical_depths(s);
  EXPECT_EQ(t.keygen_depth, 2);
  EXPECT_EQ(t.init_depth, 2);
  EXPECT_EQ(t.divider.factor, 1);
}

TEST(Divider, Factors) {
  EXPECT_EQ(divider_factor(5, 9).factor, 1);
  EXPECT_EQ(divider_factor(9, 9).factor, 1);
  EXPECT_EQ(divider_factor(10, 9).factor, 2);
  EXPECT_EQ(divider_factor(18, 9).factor, 2);
  EXPECT_EQ(divider_factor(19, 9).factor, 4);
  EXPECT_EQ(divider_factor(36, 9).factor, 4);
  const DividerChoice clamp = divider_factor(40, 9);
  EXPECT_EQ(clamp.factor, 4);
  EXPECT_TRUE(clamp.clamped);
  EXPECT_EQ(divider_factor(3, 0).factor, 4);
}

TEST(Divider, OverheadOnlyForFour) {
  EXPECT_EQ(critical_depths(variant("grain80-fib").system).divider_overhead_ge, 0.0);
  // An injected output is itself on the keystream path, so only a zero-depth
  // keystream path leaves room for a ratio above 2.
  const SystemSpec s = parse_spec("system d\nregister x 4\noutput A = x[0]\ninject init x[3] = A\n").spec;
  const TimingReport t = critical_depths(s);
  EXPECT_EQ(t.keygen_depth, 0);
  EXPECT_EQ(t.init_depth, 1);
  EXPECT_EQ(t.divider.factor, 4);
  EXPECT_DOUBLE_EQ(t.divider_overhead_ge, kDivideByFourOverheadGe);
}

TEST(CostModel, Parse) {
  const CostModel m = parse_cost_model("# weights\nweight xor2 = 2.5\n\nweight and2 = 1.25\n");
  EXPECT_DOUBLE_EQ(m.xor2, 2.5);
  EXPECT_DOUBLE_EQ(m.and2, 1.25);
  EXPECT_THROW(parse_cost_model("weight xor2 = 0\n"), Error);
  EXPECT_THROW(parse_cost_model("weight xor2 = -1\n"), Error);
  EXPECT_THROW(parse_cost_model("weight nand2 = 1\n"), Error);
  EXPECT_THROW(parse_cost_model("weight xor2 1\n"), Error);
}

TEST(Area, AndCountPreservedByShifting) {
  const CostModel cost{2.0, 3.0};
  for (const auto& name : variant_names()) {
    const GrainVariant v = variant(name);
    std::size_t and_g = 0, and_f = 0;
    for (int i = 0; i < v.key_bits; ++i) {
      if (v.system.reg("b").is_shift(i)) continue;
      and_g += area_proxy(nonshift_part(v.system.reg("b"), i), cost).and_gates;
    }
    const RegisterSpec fb = variant(v.sibling).system.reg("b");
    and_f = area_proxy(fb.feedback_of(fb.length - 1), cost).and_gates;
    EXPECT_EQ(and_g, and_f) << name;
    const AreaProxy sys_g = area_proxy(v.system, cost), sys_f = area_proxy(variant(v.sibling).system, cost);
    EXPECT_EQ(sys_g.and_gates, sys_f.and_gates) << name;
  }
}

TEST(Area, WeightedSum) {
  const AreaProxy a = area_proxy(parse_expr("b[1] + b[2]*b[3]*b[4] + b[5]"), CostModel{2.0, 3.0});
  EXPECT_EQ(a.xor_gates, 2u);
  EXPECT_EQ(a.and_gates, 2u);
  EXPECT_DOUBLE_EQ(a.weighted, 2 * 2.0 + 2 * 3.0);
}
