#include "modsynth/acc0_synth.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <tuple>

#include <boost/multiprecision/cpp_int.hpp>

#include "modsynth/errors.hpp"
#include "modsynth/linearize.hpp"
#include "modsynth/numth.hpp"

namespace modsynth {

namespace {

using boost::multiprecision::cpp_int;

constexpr GateId kNoGate = static_cast<GateId>(-1);

std::uint64_t upow(std::uint64_t base, std::uint32_t exp) {
  std::uint64_t r = 1;
  for (std::uint32_t i = 0; i < exp; ++i) r *= base;
  return r;
}

cpp_int big_pow(std::uint64_t base, std::uint64_t exp) {
  cpp_int r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) r *= base;
  return r;
}

// C(nn, kk) mod prime q by Lucas.
std::uint64_t binom_mod(std::uint64_t nn, std::uint64_t kk, std::uint64_t q) {
  std::uint64_t r = 1;
  while (kk > 0) {
    const std::uint64_t nd = nn % q, kd = kk % q;
    if (kd > nd) return 0;
    for (std::uint64_t t = 0; t < kd; ++t) {
      r = r * ((nd - t) % q) % q;
      r = r * mod_inverse(t + 1, q) % q;
    }
    nn /= q;
    kk /= q;
  }
  return r;
}

}  // namespace

bool goodness_check(std::uint64_t m,
                    std::vector<std::pair<std::uint64_t, bool>>* certificate) {
  if (m < 2 || !is_square_free(m)) {
    throw UsageError("goodness_check: modulus must be square-free and >= 2");
  }
  bool good = true;
  for (std::uint64_t q : prime_factors(euler_phi(m))) {
    const bool divides = m % q == 0;
    if (certificate != nullptr) certificate->emplace_back(q, divides);
    good = good && divides;
  }
  return good;
}

FieldEnc make_field_enc(std::uint64_t p) {
  if (p < 3 || !is_prime(p))
    throw UsageError("field encoding requires an odd prime");
  FieldEnc enc;
  enc.p = p;
  enc.generator = primitive_root(p);
  enc.log.assign(static_cast<std::size_t>(p), 0);
  std::uint64_t v = 1;
  for (std::uint32_t k = 0; k + 1 < p; ++k) {
    enc.log[static_cast<std::size_t>(v)] = k;
    v = v * enc.generator % p;
  }
  return enc;
}

std::uint32_t ArithCircuit::add(ArithGate g) {
  gates.push_back(std::move(g));
  return static_cast<std::uint32_t>(gates.size() - 1);
}

void ArithCircuit::validate() const {
  if (!is_prime(p))
    throw UsageError("arith circuit: characteristic must be prime");
  if (gates.empty()) throw StructError("arith circuit: no gates");
  if (output >= gates.size())
    throw StructError("arith circuit: output gate out of range");
  for (std::size_t id = 0; id < gates.size(); ++id) {
    const ArithGate& g = gates[id];
    switch (g.kind) {
      case ArithKind::kVar:
        if (g.var_index >= n)
          throw StructError("arith circuit: variable index out of range");
        break;
      case ArithKind::kConst:
        if (g.value >= p)
          throw StructError("arith circuit: constant not reduced mod p");
        break;
      case ArithKind::kPlus:
      case ArithKind::kTimes:
        if (g.children.empty())
          throw StructError("arith circuit: operator gate without children");
        for (std::uint32_t ch : g.children) {
          if (ch >= id)
            throw StructError("arith circuit: children must precede the gate");
          if (gates[ch].kind == g.kind)
            throw StructError("arith circuit: PLUS/TIMES must alternate");
        }
        break;
    }
  }
  if (gates[output].kind != ArithKind::kTimes)
    throw StructError("arith circuit: output gate must be TIMES");
}

std::uint64_t ArithCircuit::eval(const std::vector<std::uint64_t>& point) const {
  if (point.size() < n) throw UsageError("arith eval: point too short");
  std::vector<std::uint64_t> val(gates.size(), 0);
  for (std::size_t id = 0; id < gates.size(); ++id) {
    const ArithGate& g = gates[id];
    switch (g.kind) {
      case ArithKind::kVar:
        val[id] = point[g.var_index] % p;
        break;
      case ArithKind::kConst:
        val[id] = g.value;
        break;
      case ArithKind::kPlus: {
        std::uint64_t s = 0;
        for (std::uint32_t ch : g.children) s = (s + val[ch]) % p;
        val[id] = s;
        break;
      }
      case ArithKind::kTimes: {
        std::uint64_t s = 1;
        for (std::uint32_t ch : g.children) s = s * val[ch] % p;
        val[id] = s;
        break;
      }
    }
  }
  return val[output];
}

std::uint32_t ArithCircuit::depth() const {
  std::vector<std::uint32_t> dep(gates.size(), 0);
  for (std::size_t id = 0; id < gates.size(); ++id) {
    const ArithGate& g = gates[id];
    if (g.kind != ArithKind::kPlus && g.kind != ArithKind::kTimes) continue;
    std::uint32_t mx = 0;
    for (std::uint32_t ch : g.children) mx = std::max(mx, dep[ch]);
    dep[id] = mx + (g.children.size() > 1 ? 1 : 0);
  }
  return dep[output];
}

namespace {

// Shared-subcircuit builder for the block recursion behind e_J.
struct EsymBuilder {
  ArithCircuit c;
  std::uint32_t blocks_per_level = 1;
  std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t,
                      std::uint32_t>,
           std::uint32_t>
      memo;  // (lo, hi, J, levels) -> gate
  std::vector<std::uint32_t> var_gate;
  std::size_t work = 0;

  std::uint32_t var(std::uint32_t i) {
    if (var_gate[i] == UINT32_MAX) {
      ArithGate g;
      g.kind = ArithKind::kVar;
      g.var_index = i;
      var_gate[i] = c.add(std::move(g));
    }
    return var_gate[i];
  }

  void bump(std::size_t k) {
    work += k;
    if (work > kArithTermCap)
      throw StructError(
          "elementary symmetric circuit exceeds the composition term cap");
  }

  // Gate computing e_J over variables [lo, hi); requires 1 <= J <= hi - lo.
  // Returns a PLUS gate or a bare variable, never a TIMES.
  std::uint32_t build(std::uint32_t lo, std::uint32_t hi, std::uint32_t J,
                      std::uint32_t levels) {
    const std::uint32_t v = hi - lo;
    if (v == 1) return var(lo);
    const auto key = std::tuple{lo, hi, J, levels};
    if (auto it = memo.find(key); it != memo.end()) return it->second;

    std::vector<std::uint32_t> kids;
    if (levels <= 1) {
      // direct expansion: one monomial per J-subset of the range
      std::vector<std::uint32_t> idx(J);
      std::iota(idx.begin(), idx.end(), 0u);
      while (true) {
        bump(1);
        if (J == 1) {
          kids.push_back(var(lo + idx[0]));
        } else {
          ArithGate t;
          t.kind = ArithKind::kTimes;
          for (std::uint32_t i : idx) t.children.push_back(var(lo + i));
          kids.push_back(c.add(std::move(t)));
        }
        std::uint32_t pos = J;
        while (pos > 0 && idx[pos - 1] == v - (J - pos) - 1) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::uint32_t i = pos; i < J; ++i) idx[i] = idx[i - 1] + 1;
      }
    } else {
      const std::uint32_t nb = std::min(blocks_per_level, v);
      const std::uint32_t small = v / nb;
      const std::uint32_t nbig = v - small * nb;
      std::vector<std::pair<std::uint32_t, std::uint32_t>> ranges;
      std::uint32_t at = lo;
      for (std::uint32_t b = 0; b < nb; ++b) {
        const std::uint32_t sz = small + (b < nbig ? 1 : 0);
        ranges.emplace_back(at, at + sz);
        at += sz;
      }
      // suffix capacities for pruning the composition odometer
      std::vector<std::uint32_t> suffix(nb + 1, 0);
      for (std::uint32_t b = nb; b-- > 0;)
        suffix[b] = suffix[b + 1] + (ranges[b].second - ranges[b].first);
      std::vector<std::uint32_t> comp(nb, 0);
      std::function<void(std::uint32_t, std::uint32_t)> rec =
          [&](std::uint32_t b, std::uint32_t rem) {
            if (b == nb) {
              bump(1);
              std::vector<std::uint32_t> factors;
              for (std::uint32_t i = 0; i < nb; ++i) {
                if (comp[i] == 0) continue;
                factors.push_back(
                    build(ranges[i].first, ranges[i].second, comp[i],
                          levels - 1));
              }
              ArithGate t;
              t.kind = ArithKind::kTimes;
              t.children = std::move(factors);
              kids.push_back(c.add(std::move(t)));
              return;
            }
            const std::uint32_t cap =
                std::min(ranges[b].second - ranges[b].first, rem);
            for (std::uint32_t x = 0; x <= cap; ++x) {
              if (rem - x > suffix[b + 1]) continue;
              comp[b] = x;
              rec(b + 1, rem - x);
            }
            comp[b] = 0;
          };
      rec(0, J);
    }
    ArithGate plus;
    plus.kind = ArithKind::kPlus;
    plus.children = std::move(kids);
    const std::uint32_t out = c.add(std::move(plus));
    memo.emplace(key, out);
    return out;
  }
};

}  // namespace

ArithCircuit esym_arith_circuit(std::uint32_t n, std::uint32_t J,
                                std::uint64_t p, std::uint32_t ell) {
  if (ell < 1)
    throw UsageError("elementary symmetric circuit: depth parameter ell >= 1");
  if (!is_prime(p))
    throw UsageError("elementary symmetric circuit: p must be prime");
  if (J > n)
    throw UsageError(
        "elementary symmetric circuit: index exceeds the variable count");
  EsymBuilder b;
  b.c.p = p;
  b.c.n = n;
  b.blocks_per_level =
      n >= 2 ? static_cast<std::uint32_t>(iroot_ceil(n, ell)) : 1;
  b.var_gate.assign(n, UINT32_MAX);
  std::uint32_t root;
  if (J == 0) {
    ArithGate one;
    one.kind = ArithKind::kConst;
    one.value = 1 % p;
    const std::uint32_t cid = b.c.add(std::move(one));
    ArithGate t;
    t.kind = ArithKind::kTimes;
    t.children = {cid};
    root = b.c.add(std::move(t));
  } else {
    const std::uint32_t e = b.build(0, n, J, ell);
    ArithGate t;
    t.kind = ArithKind::kTimes;
    t.children = {e};
    root = b.c.add(std::move(t));
  }
  b.c.output = root;
  b.c.validate();
  return b.c;
}

ArithCircuit power_wrap(const ArithCircuit& c, std::uint32_t e) {
  if (e == 0) throw UsageError("power wrap: exponent must be positive");
  ArithCircuit out = c;
  std::uint32_t base = out.output;
  if (out.gates[base].kind == ArithKind::kTimes) {
    if (out.gates[base].children.size() == 1) {
      base = out.gates[base].children[0];
    } else {
      ArithGate w;
      w.kind = ArithKind::kPlus;
      w.children = {base};
      base = out.add(std::move(w));
    }
  }
  ArithGate t;
  t.kind = ArithKind::kTimes;
  t.children.assign(e, base);
  out.output = out.add(std::move(t));
  out.validate();
  return out;
}

BooleanBundles arith_to_boolean(const ArithCircuit& arith) {
  arith.validate();
  const std::uint64_t p = arith.p;
  BooleanBundles out;
  out.p = p;
  Circuit& c = out.circuit;
  c = Circuit(arith.n);
  GateId c0 = kNoGate, c1 = kNoGate;
  auto const0 = [&] {
    if (c0 == kNoGate) c0 = c.add_const(false);
    return c0;
  };
  auto const1 = [&] {
    if (c1 == kNoGate) c1 = c.add_const(true);
    return c1;
  };
  FieldEnc enc;
  if (p >= 3) enc = make_field_enc(p);

  out.bundle.resize(arith.gates.size());
  for (std::size_t id = 0; id < arith.gates.size(); ++id) {
    const ArithGate& g = arith.gates[id];
    std::vector<GateId>& b = out.bundle[id];
    b.assign(static_cast<std::size_t>(p), kNoGate);
    switch (g.kind) {
      case ArithKind::kVar:
        b[0] = g.var_index;
        b[1] = g.var_index;
        for (std::uint64_t i = 2; i < p; ++i) b[i] = const0();
        break;
      case ArithKind::kConst:
        b[0] = g.value != 0 ? const1() : const0();
        for (std::uint64_t i = 1; i < p; ++i)
          b[i] = (i == g.value) ? const1() : const0();
        break;
      case ArithKind::kPlus: {
        // weighted unary sum; constant children fold into the shift
        std::vector<WireRef> base;
        std::uint64_t fold = 0;
        for (std::uint32_t ch : g.children) {
          for (std::uint64_t i = 1; i < p; ++i) {
            const GateId w = out.bundle[ch][i];
            if (c0 != kNoGate && w == c0) continue;
            if (c1 != kNoGate && w == c1) {
              fold += i;
              continue;
            }
            base.push_back({w, i});
          }
        }
        if (p == 2) {
          const GateId gate = c.add_mod(2, (1 + fold) % 2, base);
          b[0] = gate;
          b[1] = gate;
        } else {
          for (std::uint64_t i = 0; i < p; ++i) {
            const GateId gate = c.add_mod(p, ((p - i) + fold) % p, base);
            if (i == 0) {
              b[0] = c.add_not(gate);
            } else {
              b[i] = gate;
            }
          }
        }
        break;
      }
      case ArithKind::kTimes: {
        // nonzero iff every factor is; zero factors kill the bundle outright
        bool dead = false;
        std::vector<GateId> nz;
        for (std::uint32_t ch : g.children) {
          const GateId w = out.bundle[ch][0];
          if (c0 != kNoGate && w == c0) dead = true;
          if (c1 != kNoGate && w == c1) continue;
          nz.push_back(w);
        }
        if (dead) {
          for (std::uint64_t i = 0; i < p; ++i) b[i] = const0();
          break;
        }
        if (p == 2) {
          const GateId gate = nz.empty() ? const1() : c.add_and(nz);
          b[0] = gate;
          b[1] = gate;
          break;
        }
        b[0] = nz.empty() ? const1() : c.add_and(nz);
        for (std::uint64_t i = 1; i < p; ++i) {
          std::vector<WireRef> lw;
          std::uint64_t lfold = 0;
          for (std::uint32_t ch : g.children) {
            for (std::uint64_t ip = 2; ip < p; ++ip) {
              const GateId w = out.bundle[ch][ip];
              const std::uint64_t lg = enc.log[ip];
              if (c0 != kNoGate && w == c0) continue;
              if (c1 != kNoGate && w == c1) {
                lfold += lg;
                continue;
              }
              lw.push_back({w, lg});
            }
          }
          const std::uint64_t pm1 = p - 1;
          const std::uint64_t shift =
              ((pm1 - enc.log[i] % pm1) + lfold) % pm1;
          const GateId gi = c.add_mod(pm1, shift, lw);
          std::vector<GateId> ai = nz;
          ai.push_back(gi);
          b[i] = c.add_and(ai);
        }
        break;
      }
    }
  }
  c.set_output(out.bundle[arith.output][0]);
  return out;
}

namespace {

// Splices AND children of AND gates upward; inner ANDs that lose all their
// parents get pruned by the caller.
Circuit flatten_and_chains(const Circuit& c) {
  Circuit out(c.num_inputs());
  std::vector<GateId> remap(c.size());
  for (GateId id = 0; id < c.size(); ++id) {
    const Gate& g = c.gate(id);
    if (g.kind == GateKind::kInput) {
      remap[id] = g.input_index;
      continue;
    }
    if (g.kind == GateKind::kAnd) {
      std::vector<GateId> kids;
      for (GateId ch : g.inputs) {
        const GateId nid = remap[ch];
        if (out.gate(nid).kind == GateKind::kAnd) {
          const auto& inner = out.gate(nid).inputs;
          kids.insert(kids.end(), inner.begin(), inner.end());
        } else {
          kids.push_back(nid);
        }
      }
      std::sort(kids.begin(), kids.end());
      kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
      remap[id] = out.add_and(std::move(kids));
      continue;
    }
    Gate ng = g;
    for (GateId& ch : ng.inputs) ch = remap[ch];
    for (WireRef& w : ng.wires) w.gate = remap[w.gate];
    remap[id] = out.add_raw(std::move(ng));
  }
  out.set_output(remap[c.output()]);
  return out;
}

// Absorbs every AND gate whose children are all MOD gates (square-free lcm
// coprime to the parents' common modulus) into its MOD parents.
Circuit absorb_eligible_ands(Circuit cur) {
  for (int round = 0; round < 8; ++round) {
    const auto parents = gate_parents(cur);
    std::map<std::uint64_t, std::vector<GateId>> groups;
    for (GateId id = 0; id < cur.size(); ++id) {
      const Gate& g = cur.gate(id);
      if (g.kind != GateKind::kAnd || id == cur.output()) continue;
      if (parents[id].empty()) continue;
      std::uint64_t b = 1;
      bool ok = !g.inputs.empty();
      for (GateId ch : g.inputs) {
        const Gate& cg = cur.gate(ch);
        if (cg.kind != GateKind::kMod) {
          ok = false;
          break;
        }
        b = std::lcm(b, cg.modulus);
      }
      if (!ok || !is_square_free(b)) continue;
      std::uint64_t a = 0;
      for (GateId pid : parents[id]) {
        const Gate& pg = cur.gate(pid);
        if (pg.kind != GateKind::kMod) {
          ok = false;
          break;
        }
        if (a == 0) a = pg.modulus;
        if (a != pg.modulus) ok = false;
      }
      if (!ok || a < 2 || std::gcd(a, b) != 1) continue;
      groups[a].push_back(id);
    }
    if (groups.empty()) break;
    auto best = groups.begin();
    for (auto it = groups.begin(); it != groups.end(); ++it)
      if (it->second.size() > best->second.size()) best = it;
    cur = absorb_and_layer(cur, best->second, best->first);
  }
  return cur;
}

}  // namespace

Circuit eliminate_modpm1(const Circuit& c, std::uint64_t p, std::uint64_t m) {
  if (p < 3 || !is_prime(p))
    throw UsageError("modulus elimination: p must be an odd prime");
  const std::uint64_t pm1 = p - 1;
  for (std::uint64_t q : prime_factors(pm1)) {
    if (m % q != 0)
      throw UsageError("modulus elimination: prime " + std::to_string(q) +
                       " of p-1 does not divide the target modulus " +
                       std::to_string(m));
  }
  c.validate();

  Circuit out(c.num_inputs());
  std::vector<GateId> remap(c.size());
  // Boolean gates viewed as MOD_p indicators, for linearizing monomials.
  auto mod_view = [&](GateId oid) -> ModGateSpec {
    const Gate& g = out.gate(oid);
    switch (g.kind) {
      case GateKind::kMod:
        return mod_spec_of(g);
      case GateKind::kInput:
        return boolean_var_as_mod(p, oid);
      case GateKind::kConst0:
        return make_mod_spec(p, 1, {});
      case GateKind::kConst1:
        return make_mod_spec(p, 0, {});
      case GateKind::kNot:
        return negated_var_as_mod(p, g.inputs[0]);
      default:
        throw StructError(
            "modulus elimination: cannot linearize a monomial over a " +
            std::string(gate_kind_name(g.kind)) + " gate");
    }
  };

  for (GateId id = 0; id < c.size(); ++id) {
    const Gate& g = c.gate(id);
    if (g.kind == GateKind::kInput) {
      remap[id] = g.input_index;
      continue;
    }
    if (g.kind != GateKind::kMod || g.modulus != pm1) {
      Gate ng = g;
      for (GateId& ch : ng.inputs) ch = remap[ch];
      for (WireRef& w : ng.wires) w.gate = remap[w.gate];
      remap[id] = out.add_raw(std::move(ng));
      continue;
    }

    // one digit-zero test per (q, j) with q^e || p-1 and j < e
    std::vector<std::pair<GateId, std::uint64_t>> items;
    for (const WireRef& w : g.wires) items.emplace_back(remap[w.gate], w.mult);
    const std::uint64_t sigma = g.shift;
    std::vector<GateId> tests;
    for (std::uint64_t q : prime_factors(pm1)) {
      std::uint32_t e = 0;
      for (std::uint64_t v = pm1; v % q == 0; v /= q) ++e;
      for (std::uint32_t j = 0; j < e; ++j) {
        const std::uint64_t sz = upow(q, j);
        if (sz == 1) {
          std::vector<WireRef> wires;
          for (const auto& [oid, cnt] : items) wires.push_back({oid, cnt});
          tests.push_back(out.add_mod(q, sigma % q, wires));
          continue;
        }
        // e_sz over the multiset: group monomials by variable support
        std::map<std::vector<GateId>, std::uint64_t> by_support;
        std::vector<GateId> sup;
        std::size_t steps = 0;
        std::function<void(std::size_t, std::uint64_t, std::uint64_t)> rec =
            [&](std::size_t at, std::uint64_t rem, std::uint64_t coeff) {
              if (++steps > 1'000'000)
                throw StructError(
                    "modulus elimination: digit test expansion too large");
              if (at == items.size()) {
                const std::uint64_t cc =
                    coeff * binom_mod(sigma, rem, q) % q;
                if (cc != 0) {
                  auto it = by_support.try_emplace(sup, 0).first;
                  it->second = (it->second + cc) % q;
                }
                return;
              }
              const auto& [oid, cnt] = items[at];
              rec(at + 1, rem, coeff);
              // any positive pick contributes the gate once to the support
              for (std::uint64_t k = 1; k <= std::min(cnt, rem); ++k) {
                const std::uint64_t bc = binom_mod(cnt, k, q);
                if (bc == 0) continue;
                sup.push_back(oid);
                rec(at + 1, rem - k, coeff * bc % q);
                sup.pop_back();
              }
            };
        rec(0, sz, 1);
        std::uint64_t shift = 0;
        std::vector<WireRef> wires;
        for (const auto& [support, co] : by_support) {
          if (co % q == 0) continue;
          if (support.empty()) {
            shift = (shift + co) % q;
            continue;
          }
          std::vector<ModGateSpec> kid_views;
          std::uint64_t b = 1;
          for (GateId gid : support) {
            kid_views.push_back(mod_view(gid));
            b = std::lcm(b, kid_views.back().modulus);
          }
          LinearizationPlan plan = and_of_mods(q, b, kid_views);
          shift = (shift + co * plan.constant) % q;
          for (const LinearTerm& term : plan.terms) {
            const GateId fg = out.add_mod(term.form.modulus, term.form.shift,
                                          term.form.wires);
            wires.push_back({fg, co * term.coefficient % q});
          }
        }
        tests.push_back(out.add_mod(q, shift % q, wires));
      }
    }
    remap[id] = tests.size() == 1 ? tests[0] : out.add_and(tests);
  }
  out.set_output(remap[c.output()]);
  out = flatten_and_chains(out);
  out = absorb_eligible_ands(std::move(out));
  return prune_dead_gates(out);
}

namespace {

// Depth budget accounting for one digit test: base-2 tests read the
// arithmetic circuit directly (2 levels per block level), odd-p tests pay
// the 3-levels-per-block-level conversion.
std::uint32_t esym_levels_for_budget(std::uint64_t pa,
                                     std::uint32_t depth_budget) {
  if (pa == 2) return std::max(1u, (depth_budget - 1) / 2);
  return std::max(1u, (depth_budget - 2) / 3);
}

}  // namespace

Circuit synth_modm_function(
    std::uint32_t n,
    const std::vector<std::pair<std::uint64_t, std::uint32_t>>& plan,
    std::uint32_t depth_budget) {
  if (n == 0) throw UsageError("modulus function: need at least one input");
  if (plan.empty()) throw UsageError("modulus function: empty digit plan");
  std::vector<std::uint64_t> seen;
  for (const auto& [pa, sa] : plan) {
    if (!is_prime(pa))
      throw UsageError("modulus function: plan base " + std::to_string(pa) +
                       " is not prime");
    if (sa == 0) throw UsageError("modulus function: zero exponent in plan");
    seen.push_back(pa);
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw UsageError("modulus function: repeated prime in plan");

  std::uint32_t min_needed = 2;
  for (const auto& [pa, sa] : plan) {
    if (sa > 1 && pa <= n)
      min_needed = std::max(min_needed, pa == 2 ? 3u : 5u);
  }
  if (depth_budget < min_needed)
    throw UsageError("modulus function: depth budget " +
                     std::to_string(depth_budget) +
                     " is insufficient; minimum feasible depth is " +
                     std::to_string(min_needed));

  Circuit out(n);
  std::vector<GateId> inputs(n);
  std::iota(inputs.begin(), inputs.end(), 0u);
  std::vector<GateId> tests;
  for (const auto& [pa, sa] : plan) {
    for (std::uint32_t j = 0; j < sa; ++j) {
      const std::uint64_t sz = upow(pa, j);
      if (sz > n) continue;  // digit is identically zero on n inputs
      if (j == 0) {
        std::vector<WireRef> wires;
        for (GateId i : inputs) wires.push_back({i, 1});
        tests.push_back(out.add_mod(pa, 0, wires));
        continue;
      }
      const std::uint32_t ell = esym_levels_for_budget(pa, depth_budget);
      if (pa == 2) {
        ArithCircuit a =
            esym_arith_circuit(n, static_cast<std::uint32_t>(sz), 2, ell);
        BooleanBundles bb = arith_to_boolean(a);
        const GateId v = graft(bb.circuit, out, inputs);
        tests.push_back(out.add_not(v));
      } else {
        ArithCircuit a = power_wrap(
            esym_arith_circuit(n, static_cast<std::uint32_t>(sz), pa, ell),
            static_cast<std::uint32_t>(pa - 1));
        BooleanBundles bb = arith_to_boolean(a);
        Circuit el =
            eliminate_modpm1(bb.circuit, pa, pa * radical(pa - 1));
        const GateId v = graft(el, out, inputs);
        tests.push_back(out.add_not(v));
      }
    }
  }
  out.set_output(out.add_and(std::move(tests)));
  return prune_dead_gates(out);
}

AccParams make_acc_params(std::uint64_t m, std::uint32_t d, std::uint32_t n) {
  std::vector<std::pair<std::uint64_t, bool>> cert;
  if (!goodness_check(m, &cert)) {
    std::string bad;
    for (const auto& [q, ok] : cert)
      if (!ok) {
        bad = std::to_string(q);
        break;
      }
    throw UsageError("modulus " + std::to_string(m) +
                     " fails the goodness check: prime " + bad +
                     " divides phi(m) but not m");
  }
  if (d < 4) throw UsageError("acc synthesis: depth must be at least 4");
  if (n == 0) throw UsageError("acc synthesis: need at least one input");
  AccParams params;
  params.m = m;
  params.d = d;
  params.n = n;
  params.primes = prime_factors(m);
  const std::uint64_t r = params.primes.size();
  params.alpha_num = d - 1;
  params.alpha_den = (r + 3) * (d - 1) - 3;
  for (std::uint64_t pa : params.primes) {
    const cpp_int need = big_pow(n, params.alpha_num);
    std::uint32_t s = 1;
    while (big_pow(pa, static_cast<std::uint64_t>(s) * params.alpha_den) <
           need)
      ++s;
    params.exponents.push_back(s);
  }
  return params;
}

bool acc_small_gap(const AccParams& params, std::uint32_t i, std::uint32_t j) {
  const std::uint64_t gap = i > j ? i - j : j - i;
  return big_pow(gap, params.alpha_den) <
         big_pow(params.n, params.alpha_num * params.primes.size());
}

Discriminator make_discriminator(std::uint32_t i, std::uint32_t j,
                                 std::uint32_t n, const AccParams& params) {
  if (i == j) throw UsageError("discriminator: weights must differ");
  if (i > n || j > n)
    throw UsageError("discriminator: weights must lie in [0, n]");
  Discriminator disc;
  disc.i = i;
  disc.j = j;

  if (acc_small_gap(params, i, j)) {
    // first prime whose digit range separates the weights
    for (std::size_t a = 0; a < params.primes.size(); ++a) {
      const std::uint64_t pa = params.primes[a];
      const std::uint64_t P = upow(pa, params.exponents[a]);
      if (i % P == j % P) continue;
      disc.small_gap = true;
      disc.prime = pa;
      disc.pad_ones = static_cast<std::uint32_t>((P - j % P) % P);
      const std::uint64_t delta = (i % P + disc.pad_ones) % P;
      std::uint64_t dd = delta;
      std::uint32_t b = 0;
      while (dd % pa == 0) {
        dd /= pa;
        ++b;
      }
      disc.digit = b;

      Circuit c(n);
      if (b == 0) {
        // weight + pads != 0 mod pa; the pads fold into the shift
        std::vector<WireRef> wires;
        for (GateId v = 0; v < n; ++v) wires.push_back({v, 1});
        const GateId zero = c.add_mod(pa, disc.pad_ones % pa, wires);
        c.set_output(c.add_not(zero));
      } else {
        const std::uint32_t ell = std::max(1u, (params.d - 1) / 3);
        const std::uint32_t padded = n + disc.pad_ones;
        std::vector<GateId> wires(padded);
        std::iota(wires.begin(), wires.end() - disc.pad_ones, 0u);
        ArithCircuit a = esym_arith_circuit(
            padded, static_cast<std::uint32_t>(upow(pa, b)), pa, ell);
        if (disc.pad_ones > 0) {
          const GateId one = c.add_const(true);
          for (std::uint32_t k = 0; k < disc.pad_ones; ++k)
            wires[n + k] = one;
        }
        if (pa == 2) {
          BooleanBundles bb = arith_to_boolean(a);
          c.set_output(graft(bb.circuit, c, wires));
        } else {
          ArithCircuit pw =
              power_wrap(a, static_cast<std::uint32_t>(pa - 1));
          BooleanBundles bb = arith_to_boolean(pw);
          Circuit el =
              eliminate_modpm1(bb.circuit, pa, pa * radical(pa - 1));
          c.set_output(graft(el, c, wires));
        }
      }
      disc.circuit = std::move(c);
      return disc;
    }
    throw UsageError(
        "discriminator: no prime separates weights " + std::to_string(i) +
        " and " + std::to_string(j) +
        " within the digit plan; raise alpha or the depth");
  }

  // large gap: monotone threshold block
  disc.small_gap = false;
  disc.flipped = j > i;
  const std::uint32_t lim = (i + j) / 2;
  disc.threshold = disc.flipped ? n - lim : (i + j + 1) / 2;
  Circuit c(n);
  std::vector<GateId> lits(n);
  for (GateId v = 0; v < n; ++v) lits[v] = disc.flipped ? c.add_not(v) : v;
  // subset count guard
  {
    std::uint64_t cnt = 1;
    for (std::uint32_t t = 1; t <= disc.threshold; ++t) {
      cnt = cnt * (n - t + 1) / t;
      if (cnt > 2'000'000)
        throw StructError(
            "discriminator: threshold subset expansion too large");
    }
  }
  std::vector<GateId> ors;
  std::vector<std::uint32_t> idx(disc.threshold);
  std::iota(idx.begin(), idx.end(), 0u);
  const std::uint32_t th = disc.threshold;
  while (true) {
    std::vector<GateId> kids;
    for (std::uint32_t v : idx) kids.push_back(lits[v]);
    ors.push_back(c.add_and(std::move(kids)));
    std::uint32_t pos = th;
    while (pos > 0 && idx[pos - 1] == n - (th - pos) - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::uint32_t t = pos; t < th; ++t) idx[t] = idx[t - 1] + 1;
  }
  const GateId orr = c.add_or(std::move(ors));
  c.set_output(c.add_and({orr}));
  disc.circuit = std::move(c);
  return disc;
}

Circuit synth_discriminator(std::uint32_t i, std::uint32_t j, std::uint32_t n,
                            const AccParams& params) {
  return make_discriminator(i, j, n, params).circuit;
}

Circuit synth_symmetric_acc(const SymFnSpec& spec, const AccParams& params) {
  if (spec.n != params.n)
    throw UsageError("acc synthesis: params were built for a different n");
  if (params.d < 4) throw UsageError("acc synthesis: depth must be at least 4");
  if (!goodness_check(params.m))
    throw UsageError("acc synthesis: modulus " + std::to_string(params.m) +
                     " is not good");
  const std::uint32_t n = spec.n;
  std::vector<std::uint32_t> accepted;
  for (std::uint32_t w = 0; w <= n; ++w)
    if (spec.eval_weight(w)) accepted.push_back(w);
  if (accepted.empty() || accepted.size() == n + 1) {
    Circuit c(n);
    c.set_output(c.add_const(!accepted.empty()));
    return c;
  }

  Circuit out(n);
  std::vector<GateId> inputs(n);
  std::iota(inputs.begin(), inputs.end(), 0u);
  std::vector<GateId> ands;
  for (std::uint32_t i : accepted) {
    std::vector<GateId> kids;
    for (std::uint32_t j = 0; j <= n; ++j) {
      if (j == i) continue;
      Discriminator d = make_discriminator(i, j, n, params);
      kids.push_back(graft(d.circuit, out, inputs));
    }
    ands.push_back(out.add_and(std::move(kids)));
  }
  out.set_output(out.add_or(std::move(ands)));
  out = flatten_and_chains(out);
  return prune_dead_gates(out);
}

Circuit synth_symmetric_acc(const SymFnSpec& spec, std::uint64_t m,
                            std::uint32_t d) {
  return synth_symmetric_acc(spec, make_acc_params(m, d, spec.n));
}

}  // namespace modsynth
