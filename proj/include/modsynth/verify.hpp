#pragma once

// Equivalence checking of circuits against weight oracles, structural and
// semantic invariant probes, report formatting, and a single-edit mutation
// helper for corruption testing.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "modsynth/acc0_synth.hpp"
#include "modsynth/circuit.hpp"
#include "modsynth/symfn.hpp"

namespace modsynth {

// g[popcount(x)]
std::uint8_t oracle_eval(const SymFnSpec& spec,
                         const std::vector<std::uint8_t>& x);

enum class VerifyMode { kExhaustive, kSampled };

struct InvariantResult {
  std::string name;
  bool pass = false;
  std::string witness;  // empty on pass
};

struct VerifyReport {
  VerifyMode mode = VerifyMode::kExhaustive;
  std::uint64_t inputs_tested = 0;
  std::uint64_t mismatch_count = 0;
  std::vector<std::vector<std::uint8_t>> mismatches;  // first 16 assignments
  std::vector<InvariantResult> invariants;
  std::uint64_t seed = 0;  // sampled mode only
  double elapsed_seconds = 0.0;

  bool ok() const;
};

// Exhaustive mode refuses n beyond this unless forced.
inline constexpr std::uint32_t kExhaustiveLimit = 24;

struct VerifyOptions {
  VerifyMode mode = VerifyMode::kExhaustive;
  std::uint64_t seed = 0;
  std::uint64_t samples = 100'000;  // sampled mode, before the weight ramp
  bool force = false;
  unsigned threads = 0;  // 0 = hardware concurrency
};

// Exhaustive: all 2^n assignments.  Sampled: the n+1 canonical weight
// representatives 0^(n-w) 1^w followed by seeded uniform assignments.
VerifyReport check_equiv(const Circuit& c, const SymFnSpec& spec,
                         const VerifyOptions& opts = {});

// Probes: "output-sum-01(p)", "layer-shape(PATTERN)",
// "no-modulus-outside(m)".  Throws UsageError on unknown names.
InvariantResult check_invariant(const Circuit& c, const std::string& probe,
                                const VerifyOptions& opts = {});

// The bundle probe needs the arithmetic circuit alongside the Boolean one,
// so it lives outside the string dispatcher.
InvariantResult check_bundle_wellformed(const ArithCircuit& arith,
                                        const BooleanBundles& bundles);

// Line-oriented human text / key=value machine text.  Neither includes the
// elapsed time, keeping identical runs byte-identical.
std::string format_report(const VerifyReport& r);
std::string format_report_kv(const VerifyReport& r);

// One structurally valid single-field edit: a MOD shift bump, a MOD wire
// multiplicity change, a SYM companion flip, or a constant flip.  Throws
// UsageError when the circuit has no mutable field.
Circuit mutate_circuit(const Circuit& c, std::mt19937_64& rng);

}  // namespace modsynth
