#include "modsynth/acc0_synth.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "doctest.h"
#include "modsynth/cc0_synth.hpp"
#include "modsynth/circuit.hpp"
#include "modsynth/errors.hpp"
#include "modsynth/numth.hpp"
#include "modsynth/symfn.hpp"
#include "test_util.hpp"

using namespace modsynth;
using namespace modsynth::testutil;

namespace {

// Oracle: e_J(point) by the standard Newton-style DP, independent of the
// circuit construction.
std::uint64_t esym_oracle(const std::vector<std::uint64_t>& point,
                          std::uint32_t J, std::uint64_t p) {
  std::vector<std::uint64_t> dp(J + 1, 0);
  dp[0] = 1 % p;
  for (std::uint64_t x : point) {
    for (std::uint32_t j = J; j >= 1; --j)
      dp[j] = (dp[j] + x % p * dp[j - 1]) % p;
  }
  return dp[J];
}

// Oracle: digit j of value in base q.
std::uint64_t digit_oracle(std::uint64_t value, std::uint64_t q,
                           std::uint32_t j) {
  for (std::uint32_t t = 0; t < j; ++t) value /= q;
  return value % q;
}

std::uint64_t eval_gate(const Circuit& c, GateId g,
                        const std::vector<std::uint8_t>& x) {
  Circuit copy = c;
  copy.set_output(g);
  return copy.evaluate(x);
}

bool moduli_divide(const Circuit& c, std::uint64_t m) {
  for (GateId id = 0; id < c.size(); ++id) {
    const Gate& g = c.gate(id);
    if (g.kind == GateKind::kMod && m % g.modulus != 0) return false;
  }
  return true;
}

bool has_modulus(const Circuit& c, std::uint64_t m) {
  for (GateId id = 0; id < c.size(); ++id) {
    const Gate& g = c.gate(id);
    if (g.kind == GateKind::kMod && g.modulus == m) return true;
  }
  return false;
}

// Random strictly alternating arithmetic circuit; root may be any kind.
std::uint32_t random_arith_rec(ArithCircuit& c, std::mt19937_64& rng,
                               std::uint32_t depth, bool parent_plus) {
  std::uniform_int_distribution<int> coin(0, 9);
  if (depth == 0 || coin(rng) < 2) {
    if (coin(rng) < 3) {
      ArithGate g;
      g.kind = ArithKind::kConst;
      g.value = std::uniform_int_distribution<std::uint64_t>(0, c.p - 1)(rng);
      return c.add(std::move(g));
    }
    ArithGate g;
    g.kind = ArithKind::kVar;
    g.var_index =
        std::uniform_int_distribution<std::uint32_t>(0, c.n - 1)(rng);
    return c.add(std::move(g));
  }
  ArithGate g;
  g.kind = parent_plus ? ArithKind::kTimes : ArithKind::kPlus;
  const int fanin = std::uniform_int_distribution<int>(1, 3)(rng);
  for (int i = 0; i < fanin; ++i)
    g.children.push_back(random_arith_rec(c, rng, depth - 1, !parent_plus));
  return c.add(std::move(g));
}

ArithCircuit random_arith(std::mt19937_64& rng, std::uint64_t p,
                          std::uint32_t n, std::uint32_t depth) {
  ArithCircuit c;
  c.p = p;
  c.n = n;
  c.output = random_arith_rec(c, rng, depth, /*parent_plus=*/false);
  return c;
}

std::uint64_t arith_eval_bits(const ArithCircuit& c, std::uint32_t mask) {
  std::vector<std::uint64_t> point(c.n);
  for (std::uint32_t i = 0; i < c.n; ++i) point[i] = (mask >> i) & 1;
  return c.eval(point);
}

}  // namespace

TEST_CASE("goodness check matches the divisibility certificate") {
  CHECK(goodness_check(6));
  CHECK(goodness_check(30));
  CHECK(goodness_check(42));
  CHECK(goodness_check(2));
  CHECK_FALSE(goodness_check(15));
  CHECK_FALSE(goodness_check(5));

  std::vector<std::pair<std::uint64_t, bool>> cert;
  CHECK_FALSE(goodness_check(15, &cert));
  REQUIRE(cert.size() == 1);  // phi(15) = 8 = 2^3
  CHECK(cert[0].first == 2);
  CHECK_FALSE(cert[0].second);

  cert.clear();
  CHECK(goodness_check(42, &cert));  // phi(42) = 12 = 2^2 * 3
  REQUIRE(cert.size() == 2);
  CHECK(cert[0] == std::pair<std::uint64_t, bool>{2, true});
  CHECK(cert[1] == std::pair<std::uint64_t, bool>{3, true});

  CHECK_THROWS_AS(goodness_check(12), UsageError);  // not square-free
  CHECK_THROWS_AS(goodness_check(1), UsageError);
  CHECK_THROWS_AS(goodness_check(0), UsageError);
}

TEST_CASE("field encoding uses the smallest primitive root") {
  const FieldEnc e5 = make_field_enc(5);
  CHECK(e5.generator == 2);
  CHECK(e5.log[1] == 0);
  CHECK(e5.log[2] == 1);
  CHECK(e5.log[4] == 2);
  CHECK(e5.log[3] == 3);

  for (std::uint64_t p : {3ull, 7ull, 11ull, 13ull}) {
    const FieldEnc enc = make_field_enc(p);
    for (std::uint64_t v = 1; v < p; ++v)
      CHECK(mod_pow(enc.generator, enc.log[v], p) == v);
    // the log table is a bijection [1,p) -> [0,p-1)
    std::vector<bool> seen(p - 1, false);
    for (std::uint64_t v = 1; v < p; ++v) {
      CHECK(enc.log[v] < p - 1);
      CHECK_FALSE(seen[enc.log[v]]);
      seen[enc.log[v]] = true;
    }
  }
  CHECK_THROWS_AS(make_field_enc(2), UsageError);
  CHECK_THROWS_AS(make_field_enc(9), UsageError);
}

TEST_CASE("elementary symmetric circuits match the DP oracle") {
  // flat expansion: one TIMES per 2-subset of 4 variables
  {
    const ArithCircuit c = esym_arith_circuit(4, 2, 3, 1);
    c.validate();
    std::size_t times2 = 0;
    for (const ArithGate& g : c.gates)
      if (g.kind == ArithKind::kTimes && g.children.size() == 2) ++times2;
    CHECK(times2 == 6);
    for (std::uint32_t mask = 0; mask < 81; ++mask) {
      std::vector<std::uint64_t> pt(4);
      std::uint32_t v = mask;
      for (int i = 0; i < 4; ++i, v /= 3) pt[i] = v % 3;
      CHECK(c.eval(pt) == esym_oracle(pt, 2, 3));
    }
  }
  // blocked recursion, Boolean and random field points
  {
    const ArithCircuit c = esym_arith_circuit(8, 3, 5, 2);
    c.validate();
    CHECK(c.depth() <= 4);
    for (std::uint32_t mask = 0; mask < 256; ++mask) {
      std::vector<std::uint64_t> pt(8);
      for (int i = 0; i < 8; ++i) pt[i] = (mask >> i) & 1;
      CHECK(c.eval(pt) == esym_oracle(pt, 3, 5));
    }
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::uint64_t> d(0, 4);
    for (int t = 0; t < 200; ++t) {
      std::vector<std::uint64_t> pt(8);
      for (auto& x : pt) x = d(rng);
      CHECK(c.eval(pt) == esym_oracle(pt, 3, 5));
    }
  }
  // depth bound across shapes
  for (std::uint32_t ell = 1; ell <= 3; ++ell) {
    const ArithCircuit c = esym_arith_circuit(9, 4, 7, ell);
    CHECK(c.depth() <= 2 * ell);
    std::mt19937_64 rng(11 + ell);
    std::uniform_int_distribution<std::uint64_t> d(0, 6);
    for (int t = 0; t < 100; ++t) {
      std::vector<std::uint64_t> pt(9);
      for (auto& x : pt) x = d(rng);
      CHECK(c.eval(pt) == esym_oracle(pt, 4, 7));
    }
  }
  // e_0 is the constant 1
  {
    const ArithCircuit c = esym_arith_circuit(5, 0, 3, 2);
    std::vector<std::uint64_t> pt(5, 2);
    CHECK(c.eval(pt) == 1);
  }
  CHECK_THROWS_AS(esym_arith_circuit(4, 5, 3, 1), UsageError);
  CHECK_THROWS_AS(esym_arith_circuit(4, 2, 3, 0), UsageError);
  CHECK_THROWS_AS(esym_arith_circuit(4, 2, 4, 1), UsageError);
}

TEST_CASE("arith validation rejects broken alternation") {
  ArithCircuit c;
  c.p = 3;
  c.n = 2;
  ArithGate v0;
  v0.kind = ArithKind::kVar;
  v0.var_index = 0;
  const auto a = c.add(std::move(v0));
  ArithGate p1;
  p1.kind = ArithKind::kPlus;
  p1.children = {a};
  const auto b = c.add(std::move(p1));
  ArithGate p2;
  p2.kind = ArithKind::kPlus;
  p2.children = {b};  // PLUS feeding PLUS
  ArithGate t;
  t.kind = ArithKind::kTimes;
  t.children = {c.add(std::move(p2))};
  c.output = c.add(std::move(t));
  CHECK_THROWS_AS(c.validate(), StructError);
}

TEST_CASE("power wrap squares a sum") {
  const ArithCircuit base = esym_arith_circuit(2, 1, 3, 1);
  const ArithCircuit sq = power_wrap(base, 2);
  sq.validate();
  for (std::uint64_t x0 = 0; x0 < 3; ++x0)
    for (std::uint64_t x1 = 0; x1 < 3; ++x1)
      CHECK(sq.eval({x0, x1}) == (x0 + x1) * (x0 + x1) % 3);
  CHECK_THROWS_AS(power_wrap(base, 0), UsageError);

  // wrapping a wide TIMES inserts the identity PLUS to keep alternation
  const ArithCircuit c = esym_arith_circuit(4, 2, 5, 1);
  const ArithCircuit p4 = power_wrap(c, 4);
  p4.validate();
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint64_t> d(0, 4);
  for (int t = 0; t < 50; ++t) {
    std::vector<std::uint64_t> pt(4);
    for (auto& x : pt) x = d(rng);
    CHECK(p4.eval(pt) == mod_pow(c.eval(pt), 4, 5));
  }
}

TEST_CASE("boolean conversion computes the nonzero indicator") {
  // p = 3: [sum of 4 bits != 0 mod 3]
  {
    const ArithCircuit a = power_wrap(esym_arith_circuit(4, 1, 3, 1), 2);
    const BooleanBundles bb = arith_to_boolean(a);
    bb.circuit.validate();
    for (std::uint32_t mask = 0; mask < 16; ++mask) {
      const auto x = bits_of(mask, 4);
      const std::uint8_t want = weight_of(mask) % 3 != 0 ? 1 : 0;
      CHECK(bb.circuit.evaluate(x) == want);
    }
  }
  // p = 2: parity comes out of a single MOD_2 per PLUS, no MOD_1 anywhere
  {
    const ArithCircuit a = esym_arith_circuit(3, 1, 2, 1);
    const BooleanBundles bb = arith_to_boolean(a);
    CHECK_FALSE(has_modulus(bb.circuit, 1));
    for (std::uint32_t mask = 0; mask < 8; ++mask)
      CHECK(bb.circuit.evaluate(bits_of(mask, 3)) == weight_of(mask) % 2);
  }
  // constant product 2 * 3 = 1 mod 5: bundle pins the value
  {
    ArithCircuit a;
    a.p = 5;
    a.n = 1;
    ArithGate c2;
    c2.kind = ArithKind::kConst;
    c2.value = 2;
    ArithGate c3;
    c3.kind = ArithKind::kConst;
    c3.value = 3;
    ArithGate t;
    t.kind = ArithKind::kTimes;
    t.children = {a.add(std::move(c2)), a.add(std::move(c3))};
    a.output = a.add(std::move(t));
    const BooleanBundles bb = arith_to_boolean(a);
    const std::vector<std::uint8_t> x = {0};
    for (std::uint64_t i = 0; i < 5; ++i) {
      const std::uint64_t want = (i == 0 || i == 1) ? 1 : 0;  // value is 1
      CHECK(eval_gate(bb.circuit, bb.bundle[a.output][i], x) == want);
    }
  }
}

TEST_CASE("bundles are well-formed on random alternating circuits") {
  for (std::uint64_t p : {3ull, 5ull, 7ull}) {
    std::mt19937_64 rng(1000 + p);
    for (int trial = 0; trial < 20; ++trial) {
      const std::uint32_t n = 2 + trial % 4;
      ArithCircuit raw = random_arith(rng, p, n, 2 + trial % 3);
      const ArithCircuit a = power_wrap(raw, static_cast<std::uint32_t>(p - 1));
      const BooleanBundles bb = arith_to_boolean(a);
      bb.circuit.validate();
      REQUIRE(bb.bundle.size() == a.gates.size());
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        const auto x = bits_of(mask, n);
        std::vector<std::uint64_t> pt(n);
        for (std::uint32_t i = 0; i < n; ++i) pt[i] = x[i];
        // every gate's unary bundle agrees with its field value
        for (std::size_t gid = 0; gid < a.gates.size(); ++gid) {
          ArithCircuit probe = a;
          probe.output = static_cast<std::uint32_t>(gid);
          const std::uint64_t v = probe.eval(pt);
          for (std::uint64_t i = 0; i < p; ++i) {
            const std::uint64_t want = i == 0 ? (v != 0) : (v == i);
            CHECK(eval_gate(bb.circuit, bb.bundle[gid][i], x) == want);
          }
        }
        // output is the root nonzero indicator, and the wrap makes it 0/1
        const std::uint64_t v = a.eval(pt);
        CHECK((v == 0 || v == 1));
        CHECK(bb.circuit.evaluate(x) == v);
      }
    }
  }
}

TEST_CASE("modulus elimination rewrites MOD_6 under p = 7") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 6; ++trial) {
    Circuit c(4);
    std::vector<WireRef> wires;
    std::uniform_int_distribution<std::uint64_t> md(1, 5);
    for (GateId i = 0; i < 4; ++i) {
      // [x_i = 1] as a MOD_7 gate
      const GateId m7 = c.add_mod(7, 1, {{i, 6}});
      wires.push_back({m7, md(rng)});
    }
    const std::uint64_t shift = md(rng);
    const GateId m6 = c.add_mod(6, shift, wires);
    c.set_output(m6);

    const Circuit out = eliminate_modpm1(c, 7, 42);
    out.validate();
    CHECK_FALSE(has_modulus(out, 6));
    CHECK(moduli_divide(out, 42));
    if (out.gate(out.output()).kind == GateKind::kAnd)
      CHECK(out.gate(out.output()).inputs.size() <= 2);
    CHECK(first_mismatch(c, out) == -1);
  }
}

TEST_CASE("modulus elimination with a single prime power emits no AND") {
  // p = 3: p-1 = 2, one digit test, the MOD_2 replaces the gate in place
  Circuit c(3);
  std::vector<WireRef> wires;
  for (GateId i = 0; i < 3; ++i) {
    const GateId m3 = c.add_mod(3, 1, {{i, 2}});
    wires.push_back({m3, 1});
  }
  c.set_output(c.add_mod(2, 1, wires));
  const Circuit out = eliminate_modpm1(c, 3, 6);
  CHECK(out.gate(out.output()).kind == GateKind::kMod);
  CHECK(out.gate(out.output()).modulus == 2);
  CHECK(first_mismatch(c, out) == -1);
}

TEST_CASE("modulus elimination expands the second base-2 digit under p = 5") {
  // p = 5: p-1 = 4 = 2^2, digit 1 needs the e_2 support expansion
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 4; ++trial) {
    Circuit c(4);
    std::vector<WireRef> wires;
    std::uniform_int_distribution<std::uint64_t> md(1, 3);
    for (GateId i = 0; i < 4; ++i) {
      const GateId m5 = c.add_mod(5, 1, {{i, 4}});
      wires.push_back({m5, md(rng)});
    }
    c.set_output(c.add_mod(4, md(rng), wires));
    const Circuit out = eliminate_modpm1(c, 5, 10);
    out.validate();
    CHECK_FALSE(has_modulus(out, 4));
    CHECK(moduli_divide(out, 10));
    CHECK(first_mismatch(c, out) == -1);
  }
}

TEST_CASE("modulus elimination names the first missing prime") {
  Circuit c(2);
  const GateId m7 = c.add_mod(7, 1, {{0, 6}});
  c.set_output(c.add_mod(6, 0, {{m7, 1}}));
  CHECK_THROWS_WITH_AS(eliminate_modpm1(c, 7, 15),
                       doctest::Contains("prime 2"), UsageError);
  CHECK_THROWS_AS(eliminate_modpm1(c, 4, 42), UsageError);
  CHECK_THROWS_AS(eliminate_modpm1(c, 2, 42), UsageError);
}

TEST_CASE("divisibility circuits match the weight oracle") {
  struct PlanCase {
    std::uint32_t n;
    std::vector<std::pair<std::uint64_t, std::uint32_t>> plan;
    std::uint32_t budget;
    std::uint64_t modulus;
  };
  const std::vector<PlanCase> cases = {
      {12, {{2, 1}, {3, 1}}, 2, 6},
      {8, {{2, 2}}, 3, 4},
      {9, {{3, 2}}, 5, 9},
      {12, {{2, 1}, {3, 1}, {7, 1}}, 2, 42},
      {10, {{5, 1}}, 2, 5},
      {7, {{2, 2}}, 4, 4},
  };
  for (const PlanCase& pc : cases) {
    CAPTURE(pc.modulus);
    CAPTURE(pc.n);
    const Circuit c = synth_modm_function(pc.n, pc.plan, pc.budget);
    c.validate();
    CHECK(c.gate(c.output()).kind == GateKind::kAnd);
    const auto miss = first_mismatch(c, [&](const std::vector<std::uint8_t>& x) {
      std::uint32_t w = 0;
      for (auto b : x) w += b;
      return static_cast<std::uint8_t>(w % pc.modulus == 0);
    });
    CHECK(miss == -1);
  }
}

TEST_CASE("divisibility circuits reject short depth budgets") {
  CHECK_THROWS_WITH_AS(synth_modm_function(8, {{2, 2}}, 2),
                       doctest::Contains("minimum feasible depth"),
                       UsageError);
  CHECK_THROWS_WITH_AS(synth_modm_function(9, {{3, 2}}, 4),
                       doctest::Contains("minimum feasible depth"),
                       UsageError);
  CHECK_THROWS_AS(synth_modm_function(8, {{4, 1}}, 3), UsageError);
  CHECK_THROWS_AS(synth_modm_function(8, {{2, 1}, {2, 1}}, 3), UsageError);
  CHECK_THROWS_AS(synth_modm_function(8, {{2, 0}}, 3), UsageError);
  CHECK_THROWS_AS(synth_modm_function(8, {}, 3), UsageError);
  // a plan whose deep digit is vacuous on n inputs stays depth-2 feasible
  const Circuit c = synth_modm_function(4, {{5, 2}}, 2);
  const auto miss = first_mismatch(c, [&](const std::vector<std::uint8_t>& x) {
    std::uint32_t w = 0;
    for (auto b : x) w += b;
    return static_cast<std::uint8_t>(w % 25 == 0);
  });
  CHECK(miss == -1);
}

TEST_CASE("acc parameters follow the exponent rule") {
  const AccParams p = make_acc_params(42, 4, 8);
  CHECK(p.primes == std::vector<std::uint64_t>{2, 3, 7});
  CHECK(p.alpha_num == 3);
  CHECK(p.alpha_den == 15);
  CHECK(p.exponents == std::vector<std::uint32_t>{1, 1, 1});

  // boundary: gap 3 is small (3^15 < 8^9), gap 4 is not (4^15 > 8^9)
  CHECK(acc_small_gap(p, 0, 3));
  CHECK(acc_small_gap(p, 5, 2));
  CHECK_FALSE(acc_small_gap(p, 0, 4));
  CHECK_FALSE(acc_small_gap(p, 8, 0));

  // larger n pushes the exponents up: need 2^(15 s) >= n^3
  const AccParams big = make_acc_params(42, 4, 64);
  CHECK(big.exponents[0] == 2);  // 2^15 < 64^3 = 2^18 <= 2^30
  CHECK(big.exponents[1] == 1);
  CHECK(big.exponents[2] == 1);

  CHECK_THROWS_AS(make_acc_params(20, 4, 8), UsageError);
  CHECK_THROWS_WITH_AS(make_acc_params(15, 4, 8), doctest::Contains("2"),
                       UsageError);
  CHECK_THROWS_AS(make_acc_params(42, 3, 8), UsageError);
}

namespace {

AccParams hand_params(std::vector<std::uint64_t> primes,
                      std::vector<std::uint32_t> exps, std::uint32_t n,
                      std::uint64_t num, std::uint64_t den) {
  AccParams p;
  p.m = 1;
  for (std::uint64_t q : primes) p.m *= q;
  p.d = 4;
  p.n = n;
  p.primes = std::move(primes);
  p.exponents = std::move(exps);
  p.alpha_num = num;
  p.alpha_den = den;
  return p;
}

// checks the two-slice contract exhaustively
void check_slices(const Circuit& c, std::uint32_t n, std::uint32_t i,
                  std::uint32_t j) {
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const std::uint32_t w = weight_of(mask);
    if (w != i && w != j) continue;
    const auto x = bits_of(mask, n);
    CHECK(c.evaluate(x) == (w == i ? 1 : 0));
  }
}

}  // namespace

TEST_CASE("small-gap discriminator reads one base-p digit") {
  // worked instance: n = 10, weights 3 vs 5 under 3^2
  {
    const AccParams p = hand_params({3}, {2}, 10, 1, 1);
    REQUIRE(acc_small_gap(p, 3, 5));
    const Discriminator d = make_discriminator(3, 5, 10, p);
    CHECK(d.small_gap);
    CHECK(d.prime == 3);
    CHECK(d.pad_ones == 4);  // (9 - 5 mod 9) mod 9
    CHECK(d.digit == 0);     // (3 + 4) mod 9 = 7, not divisible by 3
    check_slices(d.circuit, 10, 3, 5);
  }
  // digit 1 in base 2: weights 1 vs 3 under 2^2, pad 1
  {
    const AccParams p = hand_params({2}, {2}, 6, 5, 1);
    REQUIRE(acc_small_gap(p, 1, 3));
    const Discriminator d = make_discriminator(1, 3, 6, p);
    CHECK(d.small_gap);
    CHECK(d.prime == 2);
    CHECK(d.pad_ones == 1);
    CHECK(d.digit == 1);
    check_slices(d.circuit, 6, 1, 3);
    // digit_1(w + 1) in base 2 on every weight, not just the two slices
    for (std::uint32_t mask = 0; mask < 64; ++mask) {
      const std::uint32_t w = weight_of(mask);
      const std::uint8_t want = digit_oracle(w + 1, 2, 1) != 0 ? 1 : 0;
      CHECK(d.circuit.evaluate(bits_of(mask, 6)) == want);
    }
  }
  // digit 1 in base 3: weights 4 vs 1 under 3^2 route through elimination
  {
    const AccParams p = hand_params({3}, {2}, 6, 5, 1);
    REQUIRE(acc_small_gap(p, 4, 1));
    const Discriminator d = make_discriminator(4, 1, 6, p);
    CHECK(d.small_gap);
    CHECK(d.pad_ones == 8);
    CHECK(d.digit == 1);
    CHECK(moduli_divide(d.circuit, 6));
    check_slices(d.circuit, 6, 4, 1);
    for (std::uint32_t mask = 0; mask < 64; ++mask) {
      const std::uint32_t w = weight_of(mask);
      const std::uint8_t want = digit_oracle(w + 8, 3, 1) != 0 ? 1 : 0;
      CHECK(d.circuit.evaluate(bits_of(mask, 6)) == want);
    }
  }
  // congruent weights cannot be separated digit-wise
  {
    const AccParams p = hand_params({2}, {1}, 6, 5, 1);
    REQUIRE(acc_small_gap(p, 1, 3));
    CHECK_THROWS_AS(make_discriminator(1, 3, 6, p), UsageError);
  }
  CHECK_THROWS_AS(
      make_discriminator(2, 2, 6, hand_params({2}, {1}, 6, 1, 1)),
      UsageError);
  CHECK_THROWS_AS(
      make_discriminator(2, 7, 6, hand_params({2}, {1}, 6, 1, 1)),
      UsageError);
}

TEST_CASE("large-gap discriminator thresholds the majority side") {
  // gap forced large by a tiny alpha
  const AccParams p = hand_params({2}, {1}, 10, 1, 5);
  REQUIRE_FALSE(acc_small_gap(p, 10, 0));
  {
    const Discriminator d = make_discriminator(10, 0, 10, p);
    CHECK_FALSE(d.small_gap);
    CHECK_FALSE(d.flipped);
    CHECK(d.threshold == 5);
    check_slices(d.circuit, 10, 10, 0);
  }
  {
    const Discriminator d = make_discriminator(0, 10, 10, p);
    CHECK(d.flipped);
    CHECK(d.threshold == 5);
    check_slices(d.circuit, 10, 0, 10);
  }
  // asymmetric pair, both orientations, all weights follow the threshold
  {
    const Discriminator d = make_discriminator(9, 2, 10, p);
    CHECK(d.threshold == 6);  // ceil((9+2)/2)
    for (std::uint32_t mask = 0; mask < 1024; ++mask) {
      const std::uint32_t w = weight_of(mask);
      CHECK(d.circuit.evaluate(bits_of(mask, 10)) == (w >= 6 ? 1 : 0));
    }
  }
  {
    const Discriminator d = make_discriminator(2, 9, 10, p);
    CHECK(d.flipped);
    CHECK(d.threshold == 5);  // 10 - floor((2+9)/2)
    for (std::uint32_t mask = 0; mask < 1024; ++mask) {
      const std::uint32_t w = weight_of(mask);
      // at least 5 zeros, i.e. weight at most 5
      CHECK(d.circuit.evaluate(bits_of(mask, 10)) == (w <= 5 ? 1 : 0));
    }
  }
}

TEST_CASE("every weight pair at m = 42 separates") {
  const std::uint32_t n = 8;
  const AccParams p = make_acc_params(42, 4, n);
  for (std::uint32_t i = 0; i <= n; ++i) {
    for (std::uint32_t j = 0; j <= n; ++j) {
      if (i == j) continue;
      CAPTURE(i);
      CAPTURE(j);
      const Discriminator d = make_discriminator(i, j, n, p);
      check_slices(d.circuit, n, i, j);
    }
  }
}

TEST_CASE("acc synthesis computes symmetric functions at depth 4") {
  const std::uint32_t n = 8;
  auto run = [&](const SymFnSpec& spec) {
    const Circuit c = synth_symmetric_acc(spec, 42, 4);
    c.validate();
    CHECK(moduli_divide(c, 42));
    CHECK(metrics(c).depth <= 4);
    const auto miss =
        first_mismatch(c, [&](const std::vector<std::uint8_t>& x) {
          std::uint32_t w = 0;
          for (auto b : x) w += b;
          return static_cast<std::uint8_t>(spec.eval_weight(w));
        });
    CHECK(miss == -1);
  };
  run(symfn_majority(n));
  run(symfn_parity(n));
  run(symfn_mod(n, 3));
  run(symfn_exact(n, 4));
  std::mt19937_64 rng(99);
  for (std::uint32_t t = 0; t < 5; ++t) run(symfn_random(n, rng, t));

  // constant companions short-circuit
  {
    SymFnSpec all1;
    all1.n = 4;
    all1.companion.assign(5, 1);
    const Circuit c = synth_symmetric_acc(all1, 42, 4);
    CHECK(c.gate(c.output()).kind == GateKind::kConst1);
  }
  {
    SymFnSpec all0;
    all0.n = 4;
    all0.companion.assign(5, 0);
    const Circuit c = synth_symmetric_acc(all0, 42, 4);
    CHECK(c.gate(c.output()).kind == GateKind::kConst0);
  }
  CHECK_THROWS_AS(synth_symmetric_acc(symfn_majority(4), 15, 4), UsageError);
  CHECK_THROWS_AS(synth_symmetric_acc(symfn_majority(4), 20, 4), UsageError);
  CHECK_THROWS_AS(synth_symmetric_acc(symfn_majority(4), 42, 3), UsageError);
}

TEST_CASE("acc synthesis scales to ten inputs") {
  const Circuit c = synth_symmetric_acc(symfn_majority(10), 42, 4);
  CHECK(metrics(c).depth <= 4);
  const auto miss = first_mismatch(c, [&](const std::vector<std::uint8_t>& x) {
    std::uint32_t w = 0;
    for (auto b : x) w += b;
    return static_cast<std::uint8_t>(w > 5);
  });
  CHECK(miss == -1);
}

TEST_CASE("majority substitution can route through the acc backend") {
  // two-level majority tree with some negations
  Circuit tc0(9);
  std::vector<std::uint8_t> comp_maj3 = {0, 0, 1, 1};
  std::vector<GateId> mids;
  for (int b = 0; b < 3; ++b) {
    std::vector<GateId> kids = {static_cast<GateId>(3 * b),
                                static_cast<GateId>(3 * b + 1),
                                static_cast<GateId>(3 * b + 2)};
    if (b == 1) kids[0] = tc0.add_not(kids[0]);
    mids.push_back(tc0.add_sym(kids, comp_maj3));
  }
  mids[2] = tc0.add_not(mids[2]);
  tc0.set_output(tc0.add_sym(mids, comp_maj3));

  const Circuit plain = subst_majority(tc0, 42, 4, false, false);
  const Circuit acc = subst_majority(tc0, 42, 4, false, true);
  acc.validate();
  CHECK(moduli_divide(acc, 42));
  for (GateId id = 0; id < acc.size(); ++id)
    CHECK(acc.gate(id).kind != GateKind::kSym);
  CHECK(first_mismatch(tc0, acc) == -1);
  CHECK(first_mismatch(plain, acc) == -1);

  // acc path insists on a good modulus
  CHECK_THROWS_AS(subst_majority(tc0, 15, 4, false, true), UsageError);
}
