#pragma once

// Synthesis of constant-depth circuits for symmetric functions built purely
// from MOD gates: the depth-3 form MOD_p / MOD_{m'} / MOD_p, the depth-d
// tradeoff that trades modulus for depth, and rewrites that push SYM gates
// and majority-based circuits through these constructions.

#include <cstdint>
#include <utility>
#include <vector>

#include "modsynth/circuit.hpp"
#include "modsynth/symfn.hpp"

namespace modsynth {

struct PartitionPlan {
  std::uint32_t t = 1;
  std::vector<std::uint32_t> part_sizes;
  // contiguous [lo, hi) variable index ranges, disjoint, covering [0, n)
  std::vector<std::pair<std::uint32_t, std::uint32_t>> part_variable_ranges;
  // (T, composition T_1..T_t) with g(T) = 1 and 0 <= T_i <= part size,
  // in lexicographic (T, composition) order
  std::vector<std::pair<std::uint32_t, std::vector<std::uint32_t>>> enumeration;
};

PartitionPlan make_partition_plan(const SymFnSpec& spec, std::uint32_t t);

// One MOD_modulus gate over AND gates, one per monomial of the exact-weight
// polynomial; outputs 1 iff the input weight equals target.
Circuit synth_emaj_depth2(std::uint32_t v, std::uint32_t target,
                          std::uint64_t modulus,
                          const std::vector<std::uint64_t>& primes);

// MOD_2 / MOD_{m'} / MOD_2 with m' the product of the first k-1 odd primes
// and t = floor(n^(1/k)) parts.
Circuit synth_depth3(const SymFnSpec& spec, std::uint32_t k);

// MOD_5 / MOD_6 / MOD_5 with t = ceil(n^(1/3)) parts.
Circuit synth_depth3_preset31(const SymFnSpec& spec);

// Depth exactly d using only divisors of m as moduli; the output gate is
// MOD_p for odd d and MOD_q for even d, p < q the two smallest prime
// factors of m.  With share=true identical recursive blocks are emitted
// once and reused instead of copied per use.
Circuit synth_depthd(const SymFnSpec& spec, std::uint64_t m, std::uint32_t d,
                     bool share = false);

// Replaces every SYM child of a MOD_5 (or MOD_2) output gate by the matching
// depth-3 construction, merging the blocks' output sums into the top gate.
// k is the synth_depth3 parameter used when the top gate is MOD_2.
Circuit rewrite_modp_sym(const Circuit& c, std::uint32_t k);

// Replaces every SYM gate of a SYM/NOT circuit by a depth-d block
// (synth_symmetric_acc when use_acc is set and m passes goodness_check),
// folding NOT gates into the blocks' bottom layers.
Circuit subst_majority(const Circuit& tc0, std::uint64_t m, std::uint32_t d,
                       bool share = false, bool use_acc = false);

}  // namespace modsynth
