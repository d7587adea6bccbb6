#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "grainfsr/fsr.hpp"
#include "grainfsr/grain.hpp"
#include "grainfsr/text_format.hpp"
#include "grainfsr/transform.hpp"

using namespace grainfsr;

namespace {

SystemSpec spec_of(const char* text) { return parse_spec(text).spec; }

SystemState random_state(const Simulator& sim, std::mt19937_64& rng) {
  SystemState st = sim.zero_state();
  for (auto& reg : st.regs)
    for (auto& bit : reg) bit = rng() & 1u;
  return st;
}

const char* kSmallFib =
    "system small\n"
    "register x 4\n"
    "feedback x[3] = x[0] + x[1]*x[2]\n";

}  // namespace

TEST(Step, PureShiftZeroIsFixed) {
  const SystemSpec spec = spec_of("system shift\nregister x 8\n");
  const SystemState zero = Simulator(spec).zero_state();
  const SystemState next = step(spec, zero);
  EXPECT_EQ(next.regs, zero.regs);
  EXPECT_EQ(next.cycle, 1u);
}

TEST(Step, SmallFibonacci) {
  const SystemSpec spec = spec_of(kSmallFib);
  SystemState st{{{1, 1, 0, 0}}, 0};
  EXPECT_EQ(step(spec, st).regs[0], (Bits{1, 0, 0, 1}));
}

TEST(Step, InjectionOnlyUnderItsMode) {
  const GrainVariant v = variant("grain80-fib");
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const SystemState st = random_state(*v.sim, rng);
    const SystemState plain = v.sim->step(st);
    const SystemState init = v.sim->step(st, {"init"});
    const bool z = v.sim->output(st, "Z");
    for (std::size_t r = 0; r < 2; ++r) {
      EXPECT_EQ(init.regs[r][79], plain.regs[r][79] ^ z);
      for (int i = 0; i < 79; ++i) EXPECT_EQ(init.regs[r][i], plain.regs[r][i]);
    }
    EXPECT_EQ(v.sim->step(st, {"other"}), plain);
  }
}

// Independent bit-level trace of one init-mode step.
TEST(Step, MatchesHandWrittenGrain80Step) {
  const GrainVariant v = variant("grain80-fib");
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const SystemState st = random_state(*v.sim, rng);
    const Bits& b = st.regs[0];
    const Bits& s = st.regs[1];
    const int x0 = s[3], x1 = s[25], x2 = s[46], x3 = s[64], x4 = b[63];
    const int h = x1 ^ x4 ^ (x0 & x3) ^ (x2 & x3) ^ (x3 & x4) ^ (x0 & x1 & x2) ^ (x0 & x2 & x3) ^
                  (x0 & x2 & x4) ^ (x1 & x2 & x4) ^ (x2 & x3 & x4);
    const int z = b[1] ^ b[2] ^ b[4] ^ b[10] ^ b[31] ^ b[43] ^ b[56] ^ h;
    const int f = s[62] ^ s[51] ^ s[38] ^ s[23] ^ s[13] ^ s[0];
    const SystemState next = v.sim->step(st, {"init"});
    EXPECT_EQ(next.regs[1][79], f ^ z);
    EXPECT_EQ(v.sim->output(st, "Z"), z != 0);
  }
}

TEST(Step, InvariantUnderRegisterOrder) {
  const SystemSpec a = variant("grain128-galois-4").system;
  SystemSpec swapped = a;
  std::reverse(swapped.registers.begin(), swapped.registers.end());
  const Simulator sa(a), sb(swapped);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    SystemState st = random_state(sa, rng);
    SystemState rev = st;
    std::reverse(rev.regs.begin(), rev.regs.end());
    for (int c = 0; c < 40; ++c) {
      st = sa.step(st, {"init"});
      rev = sb.step(rev, {"init"});
    }
    std::reverse(rev.regs.begin(), rev.regs.end());
    EXPECT_EQ(st, rev);
  }
}

TEST(Step, Deterministic) {
  const GrainVariant v = variant("grain80-galois-8");
  std::mt19937_64 rng(2);
  const SystemState st = random_state(*v.sim, rng);
  EXPECT_EQ(v.sim->step(st, {"init"}), v.sim->step(st, {"init"}));
}

TEST(Step, RejectsMalformedState) {
  const Simulator sim(spec_of(kSmallFib));
  EXPECT_THROW(sim.step(SystemState{{{1, 0, 1}}, 0}), Error);
  EXPECT_THROW(sim.step(SystemState{{}, 0}), Error);
}

TEST(Run, ShiftRegisterBitZero) {
  const SystemSpec spec = spec_of("system shift\nregister x 3\n");
  const RunResult r = run(spec, SystemState{{{1, 0, 1}}, 0}, 3, {}, {Signal::tap("x", 0)});
  EXPECT_EQ(r.traces[0], (Bits{1, 0, 1}));
  EXPECT_EQ(r.final_state.cycle, 3u);
}

TEST(Run, ZeroCycles) {
  const SystemSpec spec = spec_of(kSmallFib);
  const SystemState st{{{1, 1, 0, 1}}, 4};
  const RunResult r = run(spec, st, 0, {}, {Signal::tap("x", 0)});
  EXPECT_TRUE(r.traces[0].empty());
  EXPECT_EQ(r.final_state, st);
}

TEST(Run, UnknownWatchTarget) {
  const SystemSpec spec = spec_of(kSmallFib);
  const SystemState st{{{1, 1, 0, 1}}, 0};
  EXPECT_THROW(run(spec, st, 2, {}, {Signal::tap("y", 0)}), Error);
  EXPECT_THROW(run(spec, st, 2, {}, {Signal::tap("x", 4)}), Error);
  EXPECT_THROW(run(spec, st, 2, {}, {Signal::output("Q")}), Error);
}

TEST(Run, ZMatchesKeystream) {
  const GrainVariant v = variant("grain80-fib");
  const KeyIv kiv = key_iv_from_hex(v, "0123456789abcdef1234", "0123456789abcdef");
  const SystemState st = initialize(v, load(v, kiv));
  const RunResult r = v.sim->run(st, 64, {}, {Signal::output("Z")});
  EXPECT_EQ(r.traces[0], generate_keystream(v, st, 64).first);
}

TEST(TapTrace, ShiftColumnsAreDelayedCopies) {
  const SystemSpec spec = spec_of(kSmallFib);
  const BitMatrix m = tap_trace(spec, SystemState{{{1, 0, 1, 1}}, 0}, 20, "x");
  ASSERT_EQ(m.size(), 20u);
  for (std::size_t c = 0; c + 3 < m.size(); ++c)
    for (int i = 1; i <= 3; ++i) EXPECT_EQ(m[c][i], m[c + i][0]);
  EXPECT_TRUE(tap_trace(spec, SystemState{{{1, 0, 1, 1}}, 0}, 0, "x").empty());
  EXPECT_THROW(tap_trace(spec, SystemState{{{1, 0, 1, 1}}, 0}, 1, "q"), Error);
}

TEST(TapTrace, GaloisColumnsUpToTerminal) {
  const GrainVariant v = variant("grain80-galois-1");
  std::mt19937_64 rng(21);
  const BitMatrix m = v.sim->tap_trace(random_state(*v.sim, rng), 400, "b");
  for (std::size_t c = 0; c + 63 < m.size(); ++c)
    for (int i = 1; i <= 63; ++i) ASSERT_EQ(m[c][i], m[c + i][0]) << "bit " << i << " cycle " << c;
  bool bit64_delayed = true;
  for (std::size_t c = 0; c + 64 < m.size(); ++c) bit64_delayed &= m[c][64] == m[c + 64][0];
  EXPECT_FALSE(bit64_delayed);
}

TEST(Validate, RejectsBadSystems) {
  EXPECT_THROW(spec_of("system a\nregister x 4\noutput A = B\noutput B = A\n"), Error);
  EXPECT_THROW(spec_of("system a\nregister x 4\ninject init y[0] = A\noutput A = x[0]\n"), Error);
  EXPECT_THROW(spec_of("system a\nregister x 4\ninject init x[0] = Q\n"), Error);
  EXPECT_THROW(spec_of("system a\nregister x 4\nfeedback x[3] = y[0]\n"), Error);
  EXPECT_THROW(spec_of("system a\nregister x 4\nregister x 5\n"), Error);
}

TEST(Outputs, EvaluateInDependencyOrder) {
  const SystemSpec spec = spec_of(
      "system o\nregister x 2\noutput B = A + x[1]\noutput A = x[0]*x[1]\n");
  const Simulator sim(spec);
  EXPECT_EQ(output_order(spec), (std::vector<std::string>{"A", "B"}));
  EXPECT_TRUE(sim.output(SystemState{{{0, 1}}, 0}, "B"));
  EXPECT_FALSE(sim.output(SystemState{{{1, 1}}, 0}, "B"));
}

TEST(StepParallel, EqualsUnitSteps) {
  std::mt19937_64 rng(17);
  const std::vector<std::pair<std::string, int>> cases = {
      {"grain80-fib", 16},     {"grain80-fib", 5},      {"grain80-galois-4", 4},
      {"grain80-galois-8", 8}, {"grain128-fib", 32},    {"grain128-galois-4", 4},
      {"grain128-galois-8", 8}, {"grain128-galois-16", 16}, {"grain80-galois-1", 1}};
  for (const auto& [name, k] : cases) {
    const GrainVariant v = variant(name);
    for (const ModeSet& modes : {ModeSet{}, ModeSet{"init"}}) {
      for (int trial = 0; trial < 8; ++trial) {
        const SystemState st = random_state(*v.sim, rng);
        SystemState unit = st;
        Bits z;
        for (int i = 0; i < k; ++i) {
          z.push_back(v.sim->output(unit, "Z"));
          unit = v.sim->step(unit, modes);
        }
        const ParallelStepResult p = v.sim->step_parallel(st, k, modes);
        EXPECT_EQ(p.state, unit) << name << " k=" << k;
        EXPECT_EQ(p.outputs.at("Z"), z) << name << " k=" << k;
      }
    }
  }
}

TEST(StepParallel, RefusesDegreeBeyondStructure) {
  std::mt19937_64 rng(1);
  const GrainVariant fib = variant("grain80-fib");
  EXPECT_THROW(fib.sim->step_parallel(random_state(*fib.sim, rng), 17), Error);
  const GrainVariant g4 = variant("grain80-galois-4");
  EXPECT_THROW(g4.sim->step_parallel(random_state(*g4.sim, rng), 5), Error);
  EXPECT_THROW(g4.sim->step_parallel(random_state(*g4.sim, rng), 0), Error);
}
