#include "modsynth/linearize.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "modsynth/errors.hpp"
#include "modsynth/numth.hpp"

namespace modsynth {

namespace {

std::vector<WireRef> canonical_wires(std::uint64_t modulus,
                                     std::vector<WireRef> wires) {
  std::map<GateId, std::uint64_t> acc;
  for (const WireRef& w : wires) acc[w.gate] = (acc[w.gate] + w.mult) % modulus;
  std::vector<WireRef> out;
  for (const auto& [g, m] : acc)
    if (m != 0) out.push_back({g, m});
  return out;
}

}  // namespace

ModGateSpec make_mod_spec(std::uint64_t modulus, std::uint64_t shift,
                          std::vector<WireRef> wires) {
  if (modulus < 2) throw UsageError("mod spec: modulus must be at least 2");
  return {modulus, shift % modulus, canonical_wires(modulus, std::move(wires))};
}

ModGateSpec mod_spec_of(const Gate& g) {
  if (g.kind != GateKind::kMod)
    throw UsageError("mod_spec_of: gate is not a MOD gate");
  return {g.modulus, g.shift, g.wires};
}

ModGateSpec lift_modulus(const ModGateSpec& g, std::uint64_t u) {
  if (u == 0) throw UsageError("lift_modulus: factor must be positive");
  ModGateSpec out;
  out.modulus = g.modulus * u;
  out.shift = g.shift * u;
  out.wires = g.wires;
  for (WireRef& w : out.wires) w.mult *= u;
  return out;
}

ModGateSpec boolean_var_as_mod(std::uint64_t b, GateId wire) {
  if (b < 2) throw UsageError("boolean_var_as_mod: modulus must be at least 2");
  return {b, 1, {{wire, b - 1}}};
}

ModGateSpec negated_var_as_mod(std::uint64_t b, GateId wire) {
  if (b < 2) throw UsageError("negated_var_as_mod: modulus must be at least 2");
  return {b, 0, {{wire, 1}}};
}

namespace {

// Normal vectors of hyperplanes through 0 in Z_q^k, one representative per
// hyperplane (first nonzero coordinate scaled to 1), in lexicographic order.
std::vector<std::vector<std::uint64_t>> hyperplane_normals(std::uint64_t q,
                                                           std::size_t k) {
  std::vector<std::vector<std::uint64_t>> out;
  for (std::size_t lead = 0; lead < k; ++lead) {
    // first nonzero coordinate is at lead and scaled to 1; the rest are free
    std::vector<std::uint64_t> w(k, 0);
    w[lead] = 1;
    while (true) {
      out.push_back(w);
      std::size_t pos = k;
      bool wrapped = true;
      while (pos > lead + 1) {
        --pos;
        if (++w[pos] < q) {
          wrapped = false;
          break;
        }
        w[pos] = 0;
      }
      if (wrapped) break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

LinearizationPlan and_of_mods(std::uint64_t a, std::uint64_t b,
                              const std::vector<ModGateSpec>& gates) {
  if (a < 2 || b < 2)
    throw UsageError("and_of_mods: moduli must be at least 2");
  if (std::gcd(a, b) != 1)
    throw UsageError("and_of_mods: moduli must be coprime");
  if (!is_square_free(b))
    throw UsageError("and_of_mods: inner modulus must be square-free");

  LinearizationPlan plan;
  plan.outer_modulus = a;
  plan.inner_modulus = b;

  const std::size_t k = gates.size();
  if (k == 0) {
    plan.constant = 1 % a;
    return plan;
  }

  std::vector<ModGateSpec> lifted;
  lifted.reserve(k);
  for (const ModGateSpec& g : gates) {
    if (g.modulus == 0 || b % g.modulus != 0)
      throw UsageError("and_of_mods: gate modulus " + std::to_string(g.modulus) +
                       " does not divide " + std::to_string(b));
    lifted.push_back(g.modulus == b ? g : lift_modulus(g, b / g.modulus));
  }

  const std::vector<std::uint64_t> primes = prime_factors(b);
  const std::size_t np = primes.size();

  // Per prime q: inverse of q^(k-1) mod a, the constant branch value, and
  // the CRT weight lifting a coordinate mod q to mod b.
  std::vector<std::vector<std::vector<std::uint64_t>>> normals(np);
  std::vector<std::uint64_t> inv_q(np), d_q(np), crt_q(np);
  std::uint64_t term_bound = 1;
  for (std::size_t i = 0; i < np; ++i) {
    const std::uint64_t q = primes[i];
    std::uint64_t h = 0, pw = 1;  // h = (q^k - 1)/(q - 1)
    for (std::size_t j = 0; j < k; ++j) {
      h += pw;
      if (pw > kLinearTermCap) throw UsageError("and_of_mods: fan-in too large");
      pw *= q;
    }
    // A_q = (q^(k-1) - 1)/(q - 1) = h - q^(k-1)
    const std::uint64_t A_q = h - pw / q;
    inv_q[i] = mod_inverse(mod_pow(q % a, k - 1, a), a);
    d_q[i] = (a - inv_q[i] * (A_q % a) % a) % a;
    crt_q[i] = (b / q) % b * mod_inverse((b / q) % q, q) % b;
    normals[i] = hyperplane_normals(q, k);
    if (term_bound > kLinearTermCap / (h + 1))
      throw UsageError("and_of_mods: term count exceeds cap");
    term_bound *= h + 1;
  }

  std::uint64_t constant = 1 % a;
  for (std::size_t i = 0; i < np; ++i) constant = constant * d_q[i] % a;
  plan.constant = constant;

  // Subsets of primes taking the hyperplane branch; the empty subset is the
  // constant computed above.
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << np); ++mask) {
    std::uint64_t coeff = 1 % a;
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < np; ++i) {
      if (mask >> i & 1) {
        coeff = coeff * inv_q[i] % a;
        chosen.push_back(i);
      } else {
        coeff = coeff * d_q[i] % a;
      }
    }
    if (coeff == 0) continue;

    std::vector<std::size_t> pick(chosen.size(), 0);
    while (true) {
      // merged coefficient of gate j: sum over chosen primes of w_q[j]*crt_q
      std::uint64_t shift = 0;
      std::map<GateId, std::uint64_t> acc;
      for (std::size_t j = 0; j < k; ++j) {
        std::uint64_t u = 0;
        for (std::size_t c = 0; c < chosen.size(); ++c) {
          const std::size_t i = chosen[c];
          u = (u + normals[i][pick[c]][j] % primes[i] * crt_q[i]) % b;
        }
        if (u == 0) continue;
        shift = (shift + u * (lifted[j].shift % b)) % b;
        for (const WireRef& w : lifted[j].wires) {
          acc[w.gate] = (acc[w.gate] + u * (w.mult % b)) % b;
        }
      }
      ModGateSpec form;
      form.modulus = b;
      form.shift = shift;
      for (const auto& [g, m] : acc)
        if (m != 0) form.wires.push_back({g, m});
      plan.terms.push_back({coeff, std::move(form)});

      std::size_t pos = chosen.size();
      bool done = false;
      while (true) {
        if (pos == 0) {
          done = true;
          break;
        }
        --pos;
        if (++pick[pos] < normals[chosen[pos]].size()) break;
        pick[pos] = 0;
      }
      if (done) break;
    }
  }
  return plan;
}

Circuit absorb_and_layer(const Circuit& c, const std::vector<GateId>& and_ids,
                         std::uint64_t a) {
  if (and_ids.empty()) return c;

  std::set<GateId> selected(and_ids.begin(), and_ids.end());
  if (selected.count(c.output()))
    throw UsageError("absorb_and_layer: the output gate cannot be absorbed");
  std::uint64_t b = 1;
  for (GateId id : and_ids) {
    if (id >= c.size() || c.gate(id).kind != GateKind::kAnd)
      throw UsageError("absorb_and_layer: gate " + std::to_string(id) +
                       " is not an AND gate");
    for (GateId ch_id : c.gate(id).inputs) {
      const Gate& ch = c.gate(ch_id);
      if (ch.kind != GateKind::kMod)
        throw UsageError("absorb_and_layer: AND " + std::to_string(id) +
                         " has a non-MOD child");
      b = std::lcm(b, ch.modulus);
    }
  }
  if (b == 1) b = 2;  // every selected AND has fan-in 0
  if (!is_square_free(b) || std::gcd(a, b) != 1)
    throw UsageError(
        "absorb_and_layer: children moduli must merge into a square-free "
        "modulus coprime to the outer one");

  const auto parents = gate_parents(c);
  for (GateId id : and_ids)
    for (GateId p : parents[id]) {
      const Gate& pg = c.gate(p);
      if (pg.kind != GateKind::kMod || pg.modulus != a)
        throw UsageError("absorb_and_layer: parent of AND " +
                         std::to_string(id) + " is not a MOD_" +
                         std::to_string(a) + " gate");
    }

  // Plans are computed against original ids, then remapped while rebuilding.
  std::map<GateId, LinearizationPlan> plans;
  for (GateId id : and_ids) {
    std::vector<ModGateSpec> children;
    for (GateId ch_id : c.gate(id).inputs)
      children.push_back(mod_spec_of(c.gate(ch_id)));
    plans.emplace(id, and_of_mods(a, b, children));
  }

  Circuit out(c.num_inputs());
  std::vector<GateId> remap(c.size(), 0);
  // term gate ids per selected AND, in plan order
  std::map<GateId, std::vector<GateId>> term_ids;

  for (GateId id = 0; id < c.size(); ++id) {
    const Gate& g = c.gate(id);
    if (g.kind == GateKind::kInput) {
      remap[id] = g.input_index;  // Circuit(n) lays inputs out at ids 0..n-1
      continue;
    }
    if (selected.count(id)) {
      const LinearizationPlan& plan = plans.at(id);
      std::vector<GateId>& ids = term_ids[id];
      for (const LinearTerm& t : plan.terms) {
        std::vector<WireRef> wires = t.form.wires;
        for (WireRef& w : wires) w.gate = remap[w.gate];
        ids.push_back(out.add_mod(b, t.form.shift, std::move(wires)));
      }
      remap[id] = 0;  // never referenced below
      continue;
    }
    Gate ng = g;
    for (GateId& ch : ng.inputs) ch = remap[ch];
    bool touches = false;
    for (const WireRef& w : ng.wires)
      if (selected.count(w.gate)) touches = true;
    if (touches) {
      std::uint64_t shift = ng.shift;
      std::vector<WireRef> wires;
      for (const WireRef& w : ng.wires) {
        if (!selected.count(w.gate)) {
          wires.push_back({remap[w.gate], w.mult});
          continue;
        }
        const LinearizationPlan& plan = plans.at(w.gate);
        const std::vector<GateId>& ids = term_ids.at(w.gate);
        shift = (shift + w.mult % a * plan.constant) % a;
        for (std::size_t t = 0; t < plan.terms.size(); ++t) {
          const std::uint64_t m = w.mult % a * plan.terms[t].coefficient % a;
          if (m != 0) wires.push_back({ids[t], m});
        }
      }
      remap[id] = out.add_mod(a, shift, std::move(wires));
      continue;
    }
    for (WireRef& w : ng.wires) w.gate = remap[w.gate];
    remap[id] = out.add_raw(std::move(ng));
  }
  out.set_output(remap[c.output()]);
  return out;
}

}  // namespace modsynth
