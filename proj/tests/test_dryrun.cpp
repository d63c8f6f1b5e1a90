#include "modsynth/dryrun.hpp"

#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "modsynth/cc0_synth.hpp"
#include "modsynth/circuit.hpp"
#include "modsynth/errors.hpp"
#include "modsynth/symfn.hpp"

using namespace modsynth;

namespace {

std::vector<SymFnSpec> probe_specs(std::uint32_t n) {
  std::vector<SymFnSpec> specs = {symfn_majority(n), symfn_parity(n),
                                  symfn_mod(n, 3), symfn_exact(n, (n + 1) / 2)};
  std::mt19937_64 rng(90 + n);
  specs.push_back(symfn_random(n, rng, 0));
  specs.push_back(symfn_random(n, rng, 1));
  return specs;
}

void check_exact(const SymFnSpec& spec, const DryrunCount& counted,
                 const Circuit& built) {
  const Metrics m = metrics(built);
  CAPTURE(spec.name);
  CHECK(counted.gates == BigInt(m.total_gates));
  CHECK(counted.wires == BigInt(m.total_wires));
}

}  // namespace

TEST_CASE("counts equal materialized metrics across n, k and functions") {
  for (std::uint32_t n = 2; n <= 12; ++n)
    for (std::uint32_t k = 2; k <= 4; ++k)
      for (const SymFnSpec& spec : probe_specs(n))
        check_exact(spec, count_depth3(spec, k), synth_depth3(spec, k));
}

TEST_CASE("counts equal materialized metrics for the depth-3 preset") {
  for (std::uint32_t n = 2; n <= 8; ++n)
    for (const SymFnSpec& spec : probe_specs(n))
      check_exact(spec, count_depth3_preset31(spec),
                  synth_depth3_preset31(spec));
}

TEST_CASE("constant functions") {
  SymFnSpec zero;
  zero.n = 6;
  zero.companion.assign(7, 0);
  const DryrunCount z = count_depth3(zero, 3);
  CHECK(z.gates == 7);  // inputs plus the never-firing output gate
  CHECK(z.wires == 0);
  check_exact(zero, z, synth_depth3(zero, 3));

  SymFnSpec one;
  one.n = 6;
  one.companion.assign(7, 1);
  check_exact(one, count_depth3(one, 3), synth_depth3(one, 3));
  check_exact(one, count_depth3_preset31(one), synth_depth3_preset31(one));
}

TEST_CASE("large instances stay cheap") {
  const DryrunCount big3 = count_depth3(symfn_majority(2048), 3);
  CHECK(big3.gates > BigInt(1) << 64);  // far beyond anything materializable
  CHECK(big3.wires > big3.gates);
}

TEST_CASE("growth report and fit") {
  const GrowthReport rep = growth_report_depth3({64, 128, 256, 512, 1024}, 3);
  REQUIRE(rep.rows.size() == 5);
  CHECK(rep.rows[0].n == 64);
  CHECK(rep.rows[0].param == 3);
  CHECK(rep.beta > 0.2);
  CHECK(rep.beta < 0.6);

  const std::string csv = growth_csv(rep);
  CHECK(csv.substr(0, 20) == "n,param,gates,wires\n");
  CHECK(csv.find("\n64,3,") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);

  CHECK_THROWS_AS(fit_beta({rep.rows[0], rep.rows[1]}), UsageError);
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(count_depth3(symfn_majority(8), 1), UsageError);
  SymFnSpec empty;
  empty.n = 0;
  empty.companion = {1};
  CHECK_THROWS_AS(count_depth3(empty, 3), UsageError);
}
