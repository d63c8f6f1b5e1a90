#include "modsynth/cc0_synth.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "modsynth/acc0_synth.hpp"
#include "modsynth/errors.hpp"
#include "modsynth/linearize.hpp"
#include "modsynth/numth.hpp"
#include "modsynth/sympoly.hpp"

namespace modsynth {

PartitionPlan make_partition_plan(const SymFnSpec& spec, std::uint32_t t) {
  const std::uint32_t n = spec.n;
  if (n == 0) throw UsageError("partition plan: function must have inputs");
  if (t < 1 || t > n)
    throw UsageError("partition plan: part count must be in [1, n]");

  PartitionPlan plan;
  plan.t = t;
  const std::uint32_t big = (n + t - 1) / t;   // first n mod t parts
  const std::uint32_t small = n / t;
  const std::uint32_t nbig = n % t == 0 ? t : n % t;
  std::uint32_t lo = 0;
  for (std::uint32_t i = 0; i < t; ++i) {
    const std::uint32_t v = i < nbig ? big : small;
    plan.part_sizes.push_back(v);
    plan.part_variable_ranges.push_back({lo, lo + v});
    lo += v;
  }

  // suffix capacity: how much weight the parts after i can still absorb
  std::vector<std::uint32_t> suffix(t + 1, 0);
  for (std::uint32_t i = t; i-- > 0;)
    suffix[i] = suffix[i + 1] + plan.part_sizes[i];

  std::vector<std::uint32_t> comp(t, 0);
  for (std::uint32_t T = 0; T <= n; ++T) {
    if (!spec.eval_weight(T)) continue;
    // lexicographically ascending compositions of T with comp[i] <= size[i];
    // rem always holds the weight left for positions >= i, and stays within
    // what those positions can absorb
    std::uint32_t i = 0;
    std::uint32_t rem = T;
    while (true) {
      while (i < t) {
        comp[i] = rem > suffix[i + 1] ? rem - suffix[i + 1] : 0;
        rem -= comp[i];
        ++i;
      }
      plan.enumeration.push_back({T, comp});
      // bump the rightmost position that can grow while leaving a feasible
      // remainder for the positions after it
      bool advanced = false;
      for (std::uint32_t j = t; j-- > 0;) {
        rem += comp[j];
        const std::uint32_t cap = std::min(plan.part_sizes[j], rem);
        if (j + 1 < t && comp[j] < cap &&
            rem - (comp[j] + 1) <= suffix[j + 1]) {
          ++comp[j];
          rem -= comp[j];
          i = j + 1;
          advanced = true;
          break;
        }
      }
      if (!advanced) break;
    }
  }
  return plan;
}

namespace {

// Exact-weight polynomial for a block, cached by (v, target); the inner
// modulus and primes are fixed per synthesis call.
struct PolyCache {
  std::vector<std::uint64_t> primes;
  std::map<std::pair<std::uint32_t, std::uint32_t>, SparseMultilinearPoly> map;

  const SparseMultilinearPoly& get(std::uint32_t v, std::uint32_t target) {
    auto it = map.find({v, target});
    if (it != map.end()) return it->second;
    EmajPlan plan = make_emaj_plan(v, target, primes);
    return map.emplace(std::pair{v, target}, emaj_poly(plan)).first->second;
  }
};

Circuit constant_circuit(std::uint32_t n, std::uint64_t p, bool one) {
  Circuit c(n);
  c.set_output(c.add_mod(p, one ? 0 : 1, {}));
  return c;
}

// The depth-3 pipeline shared by synth_depth3, the preset and the depth-d
// base case: a depth-5 circuit (sum over branch ANDs of per-part exact-weight
// MOD_{m'} gates, themselves over monomial ANDs of MOD_p variable views) is
// collapsed twice by absorb_and_layer.  polarity[i] != 0 folds a negation of
// variable i into its bottom view.
Circuit depth3_core(const SymFnSpec& spec, std::uint64_t p, std::uint64_t minner,
                    std::uint32_t t_req,
                    const std::vector<std::uint8_t>& polarity) {
  const std::uint32_t n = spec.n;
  if (!is_prime(p)) throw UsageError("depth-3 synthesis: outer modulus " +
                                     std::to_string(p) + " is not prime");
  if (minner < 2 || !is_square_free(minner) || std::gcd(p, minner) != 1)
    throw UsageError(
        "depth-3 synthesis: inner modulus must be square-free and coprime to "
        "the outer prime");

  const std::uint32_t t =
      std::max<std::uint32_t>(1, std::min<std::uint32_t>(t_req, n));
  PartitionPlan plan = make_partition_plan(spec, t);
  if (plan.enumeration.empty()) return constant_circuit(n, p, false);

  PolyCache polys{prime_factors(minner), {}};

  std::vector<std::set<std::uint32_t>> used(t);
  for (const auto& [T, comp] : plan.enumeration)
    for (std::uint32_t i = 0; i < t; ++i) used[i].insert(comp[i]);

  Circuit c(n);
  std::vector<GateId> var_gate(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const bool neg = i < polarity.size() && polarity[i] != 0;
    const ModGateSpec s =
        neg ? negated_var_as_mod(p, i) : boolean_var_as_mod(p, i);
    var_gate[i] = c.add_mod(s.modulus, s.shift, s.wires);
  }

  std::vector<GateId> monomial_ands;
  std::map<std::pair<std::uint32_t, std::uint32_t>, GateId> block;
  for (std::uint32_t i = 0; i < t; ++i) {
    const auto [lo, hi] = plan.part_variable_ranges[i];
    const std::uint32_t v = hi - lo;
    // all monomials any used target touches, ordered by (degree, mask)
    std::set<std::pair<std::uint32_t, std::uint64_t>> masks;
    for (std::uint32_t target : used[i])
      for (const auto& [mask, coeff] : polys.get(v, target).terms)
        if (mask != 0)
          masks.insert({static_cast<std::uint32_t>(std::popcount(mask)), mask});
    std::map<std::uint64_t, GateId> and_of_mask;
    for (const auto& [sz, mask] : masks) {
      std::vector<GateId> kids;
      for (std::uint32_t b = 0; b < v; ++b)
        if (mask >> b & 1) kids.push_back(var_gate[lo + b]);
      GateId id = c.add_and(std::move(kids));
      and_of_mask.emplace(mask, id);
      monomial_ands.push_back(id);
    }
    for (std::uint32_t target : used[i]) {
      const SparseMultilinearPoly& poly = polys.get(v, target);
      std::uint64_t shift = 0;
      std::vector<WireRef> wires;
      for (const auto& [mask, coeff] : poly.terms) {
        if (mask == 0)
          shift = coeff;
        else
          wires.push_back({and_of_mask.at(mask), coeff});
      }
      block.emplace(std::pair{i, target}, c.add_mod(minner, shift, wires));
    }
  }

  std::vector<WireRef> top;
  for (const auto& [T, comp] : plan.enumeration) {
    std::vector<GateId> kids;
    for (std::uint32_t i = 0; i < t; ++i) kids.push_back(block.at({i, comp[i]}));
    top.push_back({c.add_and(std::move(kids)), p - 1});
  }
  // shift 1 with multiplicities p-1: the output sum is 1 - [some branch
  // fires], i.e. literally 0 or 1, and the gate fires exactly on f(x) = 1.
  c.set_output(c.add_mod(p, 1, std::move(top)));

  c = absorb_and_layer(c, monomial_ands, minner);
  std::vector<GateId> branch_ands;
  for (GateId g = 0; g < c.size(); ++g)
    if (c.gate(g).kind == GateKind::kAnd) branch_ands.push_back(g);
  c = absorb_and_layer(c, branch_ands, p);
  return prune_dead_gates(c);
}

Circuit depthd_core(const SymFnSpec& spec, std::uint64_t m, std::uint32_t d,
                    bool share, const std::vector<std::uint8_t>& polarity);

// Children of the depth-d recursion, memoized on everything that shapes them.
struct BlockCache {
  std::uint64_t m = 0;
  bool share = false;
  std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t,
                      std::vector<std::uint8_t>>,
           Circuit>
      built;
  // share mode: output gate of the single grafted copy, keyed additionally
  // by the variable offset the copy was wired to
  std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t,
                      std::uint32_t, std::vector<std::uint8_t>>,
           GateId>
      placed;

  const Circuit& get(std::uint32_t v, std::uint32_t target, std::uint32_t d,
                     const std::vector<std::uint8_t>& pol) {
    std::tuple<std::uint32_t, std::uint32_t, std::uint32_t,
               std::vector<std::uint8_t>>
        key{v, target, d, pol};
    auto it = built.find(key);
    if (it != built.end()) return it->second;
    Circuit blk = depthd_core(symfn_exact(v, target), m, d, share, pol);
    return built.emplace(std::move(key), std::move(blk)).first->second;
  }
};

Circuit depthd_core(const SymFnSpec& spec, std::uint64_t m, std::uint32_t d,
                    bool share, const std::vector<std::uint8_t>& polarity) {
  if (d < 3) throw UsageError("depth-d synthesis: depth must be at least 3");
  if (!is_square_free(m))
    throw UsageError("depth-d synthesis: modulus " + std::to_string(m) +
                     " is not square-free");
  const std::vector<std::uint64_t> factors = prime_factors(m);
  const std::uint32_t r = static_cast<std::uint32_t>(factors.size());
  if (r < 2)
    throw UsageError("depth-d synthesis: modulus needs at least two prime "
                     "factors");
  const std::uint64_t p = factors[0], q = factors[1];
  const std::uint32_t n = spec.n;

  if (d == 3) {
    const std::uint32_t t =
        static_cast<std::uint32_t>(iroot_floor(n, r));
    return depth3_core(spec, p, m / p, t, polarity);
  }

  const std::uint64_t a = d % 2 == 1 ? p : q;
  const std::uint32_t t = static_cast<std::uint32_t>(std::max<std::uint64_t>(
      1, std::min<std::uint64_t>(iroot_ceil(n, r + d - 3), n)));
  PartitionPlan plan = make_partition_plan(spec, t);
  if (plan.enumeration.empty()) return constant_circuit(n, a, false);

  BlockCache cache{m, share, {}, {}};
  Circuit c(n);
  std::vector<GateId> branch_ands;
  std::vector<WireRef> top;
  for (const auto& [T, comp] : plan.enumeration) {
    std::vector<GateId> kids;
    for (std::uint32_t i = 0; i < t; ++i) {
      const auto [lo, hi] = plan.part_variable_ranges[i];
      const std::uint32_t v = hi - lo;
      std::vector<std::uint8_t> pol;
      if (!polarity.empty())
        pol.assign(polarity.begin() + lo, polarity.begin() + hi);
      std::vector<GateId> inputs(v);
      std::iota(inputs.begin(), inputs.end(), lo);
      std::tuple<std::uint32_t, std::uint32_t, std::uint32_t, std::uint32_t,
                 std::vector<std::uint8_t>>
          key{lo, v, comp[i], d - 1, pol};
      if (share) {
        auto it = cache.placed.find(key);
        if (it != cache.placed.end()) {
          kids.push_back(it->second);
          continue;
        }
      }
      const Circuit& blk = cache.get(v, comp[i], d - 1, pol);
      GateId out = graft(blk, c, inputs);
      if (share) cache.placed.emplace(std::move(key), out);
      kids.push_back(out);
    }
    GateId band = c.add_and(std::move(kids));
    branch_ands.push_back(band);
    top.push_back({band, a - 1});
  }
  c.set_output(c.add_mod(a, 1, std::move(top)));
  c = absorb_and_layer(c, branch_ands, a);
  return prune_dead_gates(c);
}

}  // namespace

Circuit synth_emaj_depth2(std::uint32_t v, std::uint32_t target,
                          std::uint64_t modulus,
                          const std::vector<std::uint64_t>& primes) {
  Circuit c(v);
  if (target > v) {
    // no input reaches the target weight
    c.set_output(c.add_mod(modulus, 1, {}));
    return c;
  }
  EmajPlan plan = make_emaj_plan(v, target, primes);
  SparseMultilinearPoly poly = emaj_poly(plan);
  std::uint64_t shift = 0;
  std::vector<WireRef> wires;
  for (const auto& [mask, coeff] : poly.terms) {
    if (mask == 0) {
      shift = coeff;
      continue;
    }
    std::vector<GateId> kids;
    for (std::uint32_t b = 0; b < v; ++b)
      if (mask >> b & 1) kids.push_back(b);
    wires.push_back({c.add_and(std::move(kids)), coeff});
  }
  c.set_output(c.add_mod(modulus, shift, std::move(wires)));
  return c;
}

Circuit synth_depth3(const SymFnSpec& spec, std::uint32_t k) {
  if (k < 2) throw UsageError("synth_depth3: k must be at least 2");
  std::uint64_t minner = 1;
  std::uint64_t prime = 3;
  for (std::uint32_t i = 0; i + 1 < k; ++i) {
    minner *= prime;
    do ++prime;
    while (!is_prime(prime));
  }
  const std::uint32_t t =
      static_cast<std::uint32_t>(iroot_floor(spec.n, k));
  return depth3_core(spec, 2, minner, t, {});
}

Circuit synth_depth3_preset31(const SymFnSpec& spec) {
  const std::uint32_t t = static_cast<std::uint32_t>(iroot_ceil(spec.n, 3));
  return depth3_core(spec, 5, 6, t, {});
}

Circuit synth_depthd(const SymFnSpec& spec, std::uint64_t m, std::uint32_t d,
                     bool share) {
  return depthd_core(spec, m, d, share, {});
}

Circuit rewrite_modp_sym(const Circuit& c, std::uint32_t k) {
  const Gate& topg = c.gate(c.output());
  if (topg.kind != GateKind::kMod || (topg.modulus != 5 && topg.modulus != 2))
    throw UsageError(
        "rewrite_modp_sym: output gate must be MOD_5 or MOD_2");
  const std::uint64_t p = topg.modulus;
  for (const WireRef& w : topg.wires)
    if (c.gate(w.gate).kind != GateKind::kSym)
      throw UsageError("rewrite_modp_sym: every output wire must feed from a "
                       "SYM gate");

  Circuit out(c.num_inputs());
  std::vector<GateId> remap(c.size(), 0);
  for (GateId id = 0; id < c.size(); ++id) {
    if (id == c.output()) continue;
    const Gate& g = c.gate(id);
    if (g.kind == GateKind::kInput) {
      remap[id] = g.input_index;
      continue;
    }
    Gate ng = g;
    for (GateId& ch : ng.inputs) ch = remap[ch];
    for (WireRef& w : ng.wires) w.gate = remap[w.gate];
    remap[id] = out.add_raw(std::move(ng));
  }

  std::uint64_t shift = topg.shift;
  std::vector<WireRef> wires;
  for (const WireRef& w : topg.wires) {
    const Gate& sym = c.gate(w.gate);
    SymFnSpec spec{static_cast<std::uint32_t>(sym.inputs.size()),
                   sym.companion, "sym"};
    Circuit blk = p == 5 ? synth_depth3_preset31(spec) : synth_depth3(spec, k);
    std::vector<GateId> leads;
    for (GateId chi : sym.inputs) leads.push_back(remap[chi]);
    GateId blk_out = graft(blk, out, leads);
    const Gate& bo = out.gate(blk_out);
    // the block's output sum is 1 - value, so the parent picks up
    // mult*(1 - shift_b) and the negated block wires
    shift = (shift + w.mult % p * ((1 + p - bo.shift % p) % p)) % p;
    for (const WireRef& bw : bo.wires)
      wires.push_back({bw.gate, (p - bw.mult * (w.mult % p) % p) % p});
  }
  out.set_output(out.add_mod(p, shift, std::move(wires)));
  return prune_dead_gates(out);
}

Circuit subst_majority(const Circuit& tc0, std::uint64_t m, std::uint32_t d,
                       bool share, bool use_acc) {
  const bool acc = use_acc && goodness_check(m);
  if (use_acc && !acc)
    throw UsageError("subst_majority: modulus " + std::to_string(m) +
                     " fails the goodness check");

  struct Rep {
    GateId wire = 0;
    bool neg = false;
  };
  std::vector<Rep> rep(tc0.size());
  Circuit out(tc0.num_inputs());

  for (GateId id = 0; id < tc0.size(); ++id) {
    const Gate& g = tc0.gate(id);
    switch (g.kind) {
      case GateKind::kInput:
        rep[id] = {g.input_index, false};
        break;
      case GateKind::kNot:
        rep[id] = {rep[g.inputs[0]].wire, !rep[g.inputs[0]].neg};
        break;
      case GateKind::kSym: {
        SymFnSpec spec{static_cast<std::uint32_t>(g.inputs.size()),
                       g.companion, "sym"};
        std::vector<GateId> leads;
        std::vector<std::uint8_t> pol;
        bool any_neg = false;
        for (GateId chi : g.inputs) {
          leads.push_back(rep[chi].wire);
          pol.push_back(rep[chi].neg ? 1 : 0);
          any_neg |= rep[chi].neg;
        }
        GateId blk_out;
        if (acc) {
          // the ACC construction reads plain wires; realize negations as
          // NOT gates, which stay depth-free
          for (std::size_t i = 0; i < leads.size(); ++i)
            if (pol[i]) leads[i] = out.add_not(leads[i]);
          Circuit blk = synth_symmetric_acc(spec, m, d);
          blk_out = graft(blk, out, leads);
        } else {
          Circuit blk = depthd_core(spec, m, d, share,
                                    any_neg ? pol : std::vector<std::uint8_t>{});
          blk_out = graft(blk, out, leads);
        }
        rep[id] = {blk_out, false};
        break;
      }
      default:
        throw UsageError(
            "subst_majority: circuit may contain only SYM and NOT gates");
    }
  }

  Rep top = rep[tc0.output()];
  if (top.neg) {
    const Gate& og = out.gate(top.wire);
    if (og.kind == GateKind::kMod && !acc) {
      // depth-d outputs have sum in {0,1}, so shifting by -1 complements
      top.wire = out.add_mod(og.modulus,
                             (og.shift + og.modulus - 1) % og.modulus, og.wires);
    } else {
      top.wire = out.add_not(top.wire);
    }
  }
  out.set_output(top.wire);
  return prune_dead_gates(out);
}

}  // namespace modsynth
