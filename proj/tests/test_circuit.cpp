#include "modsynth/circuit.hpp"

#include <random>

#include "doctest.h"
#include "modsynth/errors.hpp"
#include "modsynth/netlist.hpp"
#include "modsynth/symfn.hpp"
#include "test_util.hpp"

using namespace modsynth;
using testutil::bits_of;
using testutil::first_mismatch;
using testutil::random_circuit;

TEST_CASE("MOD gate semantics") {
  Circuit c(2);

  SUBCASE("shift completes a multiple") {
    GateId g = c.add_mod(5, 4, {{0, 1}});
    c.set_output(g);
    CHECK(c.evaluate(std::vector<std::uint8_t>{1, 0}));
    CHECK_FALSE(c.evaluate(std::vector<std::uint8_t>{0, 0}));
  }
  SUBCASE("empty sum is divisible") {
    GateId g = c.add_mod(6, 0, {});
    c.set_output(g);
    CHECK(c.evaluate(std::vector<std::uint8_t>{0, 0}));
  }
  SUBCASE("shifted parity is XNOR-like") {
    GateId g = c.add_mod(2, 1, {{0, 1}, {1, 1}});
    c.set_output(g);
    CHECK(c.evaluate(std::vector<std::uint8_t>{1, 0}));
    CHECK(c.evaluate(std::vector<std::uint8_t>{0, 1}));
    CHECK_FALSE(c.evaluate(std::vector<std::uint8_t>{1, 1}));
    CHECK_FALSE(c.evaluate(std::vector<std::uint8_t>{0, 0}));
  }
  SUBCASE("duplicate wires merge and multiplicities reduce") {
    GateId g = c.add_mod(3, 0, {{0, 2}, {0, 4}, {1, 3}});
    c.set_output(g);
    // 2+4 = 6 ≡ 0 mod 3 kills the x0 wire; 3 ≡ 0 kills the x1 wire.
    CHECK(c.gate(g).wires.empty());
    CHECK(c.evaluate(std::vector<std::uint8_t>{1, 1}));
  }
}

TEST_CASE("evaluate_sum_at reports the reduced linear form") {
  Circuit c(1);
  GateId g = c.add_mod(5, 4, {{0, 1}});
  c.set_output(g);
  CHECK(c.evaluate_sum_at(g, std::vector<std::uint8_t>{1}) == 0);
  CHECK(c.evaluate_sum_at(g, std::vector<std::uint8_t>{0}) == 4);
  CHECK_THROWS_AS(c.evaluate_sum_at(0, std::vector<std::uint8_t>{1}),
                  UsageError);
}

TEST_CASE("boolean gates") {
  Circuit c(3);
  GateId nt = c.add_not(0);
  GateId an = c.add_and({nt, 1});
  GateId orr = c.add_or({an, 2});
  c.set_output(orr);
  auto ref = [](const std::vector<std::uint8_t>& x) {
    return ((!x[0] && x[1]) || x[2]) != 0;
  };
  CHECK(first_mismatch(c, ref) == -1);
}

TEST_CASE("SYM gate looks up the companion by count") {
  Circuit c(3);
  GateId s = c.add_sym({0, 1, 2}, {1, 0, 0, 1});  // 1 iff weight 0 or 3
  c.set_output(s);
  auto ref = [](const std::vector<std::uint8_t>& x) {
    int w = x[0] + x[1] + x[2];
    return w == 0 || w == 3;
  };
  CHECK(first_mismatch(c, ref) == -1);
}

TEST_CASE("empty AND is 1 and empty OR is 0") {
  Circuit c(1);
  GateId a = c.add_and({});
  GateId o = c.add_or({});
  c.set_output(a);
  CHECK(c.evaluate(std::vector<std::uint8_t>{0}));
  c.set_output(o);
  CHECK_FALSE(c.evaluate(std::vector<std::uint8_t>{0}));
}

TEST_CASE("validate rejects malformed gates") {
  SUBCASE("forward reference") {
    Circuit c(1);
    Gate g;
    g.kind = GateKind::kAnd;
    g.inputs = {5};
    c.add_raw(std::move(g));
    c.set_output(1);
    CHECK_THROWS_AS(c.validate(), StructError);
  }
  SUBCASE("zero multiplicity") {
    Circuit c(1);
    Gate g;
    g.kind = GateKind::kMod;
    g.modulus = 3;
    g.wires = {{0, 0}};
    c.add_raw(std::move(g));
    c.set_output(1);
    CHECK_THROWS_AS(c.validate(), StructError);
  }
  SUBCASE("shift not below modulus") {
    Circuit c(1);
    Gate g;
    g.kind = GateKind::kMod;
    g.modulus = 3;
    g.shift = 3;
    c.add_raw(std::move(g));
    c.set_output(1);
    CHECK_THROWS_AS(c.validate(), StructError);
  }
  SUBCASE("companion length") {
    Circuit c(2);
    Gate g;
    g.kind = GateKind::kSym;
    g.inputs = {0, 1};
    g.companion = {1, 0};
    c.add_raw(std::move(g));
    c.set_output(2);
    CHECK_THROWS_AS(c.validate(), StructError);
  }
  SUBCASE("builders check references") {
    Circuit c(1);
    CHECK_THROWS_AS(c.add_not(7), StructError);
    CHECK_THROWS_AS(c.add_mod(1, 0, {}), UsageError);
  }
}

TEST_CASE("metrics levels and shape") {
  SUBCASE("two MOD layers") {
    Circuit c(1);
    GateId one = c.add_const(true);
    GateId m3 = c.add_mod(3, 0, {{0, 1}, {one, 1}});
    GateId m2 = c.add_mod(2, 0, {{m3, 1}});
    c.set_output(m2);
    Metrics m = metrics(c);
    CHECK(m.depth == 2);
    CHECK(m.shape_string() == "MOD(2)/MOD(3)");
    CHECK(m.total_gates == 4);
    CHECK(m.total_wires == 3);
    CHECK(m.max_fanin_by_layer == std::vector<std::uint64_t>{1, 2});
  }
  SUBCASE("NOT gates are level-transparent") {
    Circuit c(1);
    GateId m3 = c.add_mod(3, 1, {{0, 2}});
    GateId nt = c.add_not(m3);
    GateId an = c.add_and({nt, 0});
    c.set_output(an);
    Metrics m = metrics(c);
    CHECK(m.depth == 2);
    CHECK(m.shape_string() == "AND/MOD(3)");
    CHECK(m.count_by_kind[static_cast<int>(GateKind::kNot)] == 1);
    CHECK(m.total_wires == 2 + 1 + 2);
  }
  SUBCASE("dead gates do not shape layers") {
    Circuit c(1);
    GateId dead = c.add_sym({0}, {1, 0});
    (void)dead;
    GateId live = c.add_mod(2, 0, {{0, 1}});
    c.set_output(live);
    Metrics m = metrics(c);
    CHECK(m.depth == 1);
    CHECK(m.shape_string() == "MOD(2)");
  }
  SUBCASE("depth equals layer count on random circuits") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 30; ++t) {
      Circuit c = random_circuit(rng, 4, 12);
      Metrics m = metrics(c);
      CHECK(m.depth == m.layer_shape.size());
    }
  }
}

TEST_CASE("lower_not_gates") {
  SUBCASE("single NOT over an input") {
    Circuit c(1);
    GateId nt = c.add_not(0);
    c.set_output(nt);
    Circuit low = lower_not_gates(c);
    low.validate();
    CHECK(low.gate(nt).kind == GateKind::kMod);
    CHECK(first_mismatch(c, low) == -1);
  }
  SUBCASE("NOT over a parity gate flips its shift") {
    Circuit c(2);
    GateId m2 = c.add_mod(2, 1, {{0, 1}, {1, 1}});
    GateId nt = c.add_not(m2);
    c.set_output(nt);
    Circuit low = lower_not_gates(c);
    CHECK(low.gate(nt).kind == GateKind::kMod);
    CHECK(low.gate(nt).shift == 0);
    CHECK(low.gate(nt).wires.size() == 2);
    CHECK(first_mismatch(c, low) == -1);
  }
  SUBCASE("random circuits stay equivalent and NOT-free") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 50; ++t) {
      Circuit c = random_circuit(rng, 5, 14);
      Circuit low = lower_not_gates(c);
      low.validate();
      for (const Gate& g : low.gates()) CHECK(g.kind != GateKind::kNot);
      CHECK(first_mismatch(c, low) == -1);
      CHECK(lower_not_gates(low) == low);
    }
  }
}

TEST_CASE("lower_shifts_to_const1") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 30; ++t) {
    Circuit c = random_circuit(rng, 4, 10);
    Circuit flat = lower_shifts_to_const1(c);
    flat.validate();
    for (const Gate& g : flat.gates())
      if (g.kind == GateKind::kMod) CHECK(g.shift == 0);
    CHECK(first_mismatch(c, flat) == -1);
  }
  SUBCASE("no-op without shifts") {
    Circuit c(1);
    GateId g = c.add_mod(3, 0, {{0, 1}});
    c.set_output(g);
    CHECK(lower_shifts_to_const1(c) == c);
  }
}

TEST_CASE("prune keeps inputs and the live cone") {
  Circuit c(3);
  c.add_and({0, 1});             // dead
  GateId live = c.add_or({1, 2});
  c.add_not(0);                  // dead
  c.set_output(live);
  Circuit p = prune_dead_gates(c);
  p.validate();
  CHECK(p.size() == 4);  // 3 inputs + OR
  CHECK(p.num_inputs() == 3);
  CHECK(first_mismatch(c, p) == -1);
}

TEST_CASE("graft splices a subcircuit over chosen wires") {
  Circuit inner(2);
  GateId x = inner.add_mod(2, 1, {{0, 1}, {1, 1}});
  inner.set_output(x);

  Circuit outer(4);
  GateId a = outer.add_and({0, 1});
  GateId b = outer.add_or({2, 3});
  std::vector<GateId> wires = {a, b};
  GateId got = graft(inner, outer, wires);
  outer.set_output(got);
  outer.validate();
  auto ref = [](const std::vector<std::uint8_t>& x) {
    int v0 = x[0] && x[1], v1 = x[2] || x[3];
    return (1 + v0 + v1) % 2 == 0;
  };
  CHECK(first_mismatch(outer, ref) == -1);
}

TEST_CASE("FlatCircuit matches the scalar evaluator") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 40; ++t) {
    std::uint32_t n = 3 + t % 4;
    Circuit c = random_circuit(rng, n, 16);
    FlatCircuit fc(c);
    std::vector<std::uint64_t> masks(n);
    // 64 assignments per batch: lane l gets the bits of (base + l).
    for (std::uint64_t base = 0; base < (1ull << n); base += 64) {
      for (std::uint32_t i = 0; i < n; ++i) {
        std::uint64_t m = 0;
        for (int l = 0; l < 64; ++l)
          if (((base + l) >> i) & 1) m |= 1ull << l;
        masks[i] = m;
      }
      std::uint64_t got = fc.eval_batch(masks.data());
      for (int l = 0; l < 64 && base + l < (1ull << n); ++l) {
        bool want = c.evaluate(bits_of(base + l, n));
        CHECK(((got >> l) & 1) == (want ? 1 : 0));
      }
    }
  }

  SUBCASE("output sums agree with evaluate_sum_at") {
    Circuit c(3);
    GateId g = c.add_mod(5, 2, {{0, 1}, {1, 3}, {2, 4}});
    c.set_output(g);
    FlatCircuit fc(c);
    std::uint64_t masks[3];
    for (std::uint32_t i = 0; i < 3; ++i) {
      std::uint64_t m = 0;
      for (int l = 0; l < 8; ++l)
        if ((l >> i) & 1) m |= 1ull << l;
      masks[i] = m;
    }
    std::uint32_t sums[64];
    std::uint64_t got = fc.eval_batch_with_sums(masks, sums);
    for (int l = 0; l < 8; ++l) {
      CHECK(sums[l] == c.evaluate_sum_at(g, bits_of(l, 3)));
      CHECK(((got >> l) & 1) == (sums[l] == 0 ? 1 : 0));
    }
  }
}

TEST_CASE("netlist serialization") {
  SUBCASE("minimal circuit") {
    Circuit c;
    c.add_input(0);
    c.set_output(0);
    CHECK(serialize_netlist(c) == "MODCKT 1\ninputs 1\ngate 0 INPUT 0\noutput 0\n");
  }
  SUBCASE("round trip on random circuits") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 40; ++t) {
      Circuit c = random_circuit(rng, 4, 12);
      Circuit back = parse_netlist(serialize_netlist(c));
      back.validate();
      CHECK(back == c);
    }
  }
  SUBCASE("kitchen-sink gate coverage") {
    Circuit c(2);
    GateId k0 = c.add_const(false);
    GateId k1 = c.add_const(true);
    GateId nt = c.add_not(0);
    GateId an = c.add_and({nt, 1, k1});
    GateId orr = c.add_or({an, k0});
    GateId sy = c.add_sym({orr, nt}, {1, 0, 1});
    GateId mo = c.add_mod(6, 4, {{sy, 2}, {an, 5}});
    c.set_output(mo);
    Circuit back = parse_netlist(serialize_netlist(c));
    CHECK(back == c);
    CHECK(serialize_netlist(back) == serialize_netlist(c));
  }
}

TEST_CASE("netlist parse errors carry line numbers") {
  auto bad = [](const std::string& text) {
    CHECK_THROWS_AS(parse_netlist(text), StructError);
  };
  bad("MODCKT 2\ninputs 1\ngate 0 INPUT 0\noutput 0\n");
  bad("MODCKT 1\ninputs 1\ngate 0 INPUT 0\n");                    // no output
  bad("MODCKT 1\ninputs 1\ngate 1 INPUT 0\noutput 0\n");          // id gap
  bad("MODCKT 1\ninputs 1\ngate 0 INPUT 0\noutput 1\n");          // undefined
  bad("MODCKT 1\ninputs 1\ngate 0 INPUT 3\noutput 0\n");          // index >= n
  bad("MODCKT 1\ninputs 1\ngate 0 FOO\noutput 0\n");              // kind
  bad("MODCKT 1\ninputs 1\ngate 0 INPUT 0\ngate 1 MOD 3 0 0:0\noutput 1\n");
  bad("MODCKT 1\ninputs 1\ngate 0 INPUT 0\ngate 1 MOD 3 5\noutput 1\n");
  bad("MODCKT 1\ninputs 1\ngate 0 INPUT 0\ngate 1 MOD 1 0\noutput 1\n");
  bad("MODCKT 1\ninputs 1\ngate 0 INPUT 0\ngate 1 SYM 101 0\noutput 1\n");
  bad("MODCKT 1\ninputs 1\ngate 0 INPUT 0\ngate 1 AND 1\noutput 1\n");
  bad("MODCKT 1\ninputs 1\ngate 0 INPUT 0\noutput 0\njunk\n");

  SUBCASE("messages name the line") {
    try {
      parse_netlist("MODCKT 1\ninputs 1\ngate 0 INPUT 0\ngate 1 MOD 3 0 0:0\noutput 1\n");
      CHECK(false);
    } catch (const StructError& e) {
      CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
  }
}

TEST_CASE("netlist declared width survives a round trip") {
  Circuit c;
  c.add_input(0);
  c.set_output(0);
  c.set_num_inputs(4);
  Circuit back = parse_netlist(serialize_netlist(c));
  CHECK(back.num_inputs() == 4);
  CHECK(back == c);
}

TEST_CASE("symmetric function specs") {
  SymFnSpec maj = symfn_majority(5);
  CHECK(maj.eval_weight(3));
  CHECK_FALSE(maj.eval_weight(2));
  SymFnSpec par = symfn_parity(4);
  CHECK_FALSE(par.eval_weight(2));
  CHECK(par.eval_weight(3));
  SymFnSpec m3 = symfn_mod(6, 3);
  CHECK(m3.eval_weight(3));
  CHECK(m3.eval_weight(0));
  CHECK_FALSE(m3.eval_weight(4));
  SymFnSpec ex = symfn_exact(6, 2);
  CHECK(ex.eval_weight(2));
  CHECK_FALSE(ex.eval_weight(3));

  SUBCASE("selectors") {
    CHECK(symfn_from_selector("maj", 5).companion == maj.companion);
    CHECK(symfn_from_selector("mod:3", 6).companion == m3.companion);
    CHECK(symfn_from_selector("exact:2", 6).companion == ex.companion);
    CHECK_THROWS_AS(symfn_from_selector("nope", 4), UsageError);
    CHECK_THROWS_AS(symfn_from_selector("exact:9", 4), UsageError);
  }
  SUBCASE("file format round trip") {
    CHECK(serialize_symfn(ex) == "SYMFN 6 0010000\n");
    SymFnSpec back = parse_symfn(serialize_symfn(maj));
    CHECK(back.n == 5);
    CHECK(back.companion == maj.companion);
    CHECK_THROWS_AS(parse_symfn("SYMFN 3 01\n"), StructError);
    CHECK_THROWS_AS(parse_symfn("SYMFN 3 01x1\n"), StructError);
    CHECK_THROWS_AS(parse_symfn("NOPE 3 0101\n"), StructError);
  }
}
