#include "modsynth/dryrun.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "modsynth/errors.hpp"
#include "modsynth/numth.hpp"
#include "modsynth/sympoly.hpp"

namespace modsynth {

namespace {

BigInt big_pow(std::uint64_t base, std::uint32_t exp) {
  BigInt r = 1;
  for (std::uint32_t i = 0; i < exp; ++i) r *= base;
  return r;
}

// (q^k - 1) / (q - 1): hyperplane count in Z_q^k, and the number of term
// forms one absorbed AND of fan-in k contributes per chosen prime q.
BigInt geom(std::uint64_t q, std::uint32_t k) {
  BigInt r = 0, pw = 1;
  for (std::uint32_t i = 0; i < k; ++i) {
    r += pw;
    pw *= q;
  }
  return r;
}

std::vector<BigInt> pascal_row(std::uint32_t v) {
  std::vector<BigInt> row(v + 1);
  row[0] = 1;
  for (std::uint32_t d = 1; d <= v; ++d)
    row[d] = row[d - 1] * (v - d + 1) / d;
  return row;
}

// Total wire multiplicity of the geom(p, d) forms replacing one absorbed AND
// of d variable views: a form for normal u carries mult (p - u_j) on the
// j-th variable.  Per position j, normals with lead before j spread coord j
// uniformly, normals leading at j pin it to 1, later leads pin it to 0.
BigInt form_wires_per_and(std::uint64_t p, std::uint32_t d) {
  const BigInt half = BigInt(p) * (p - 1) / 2;
  BigInt total = 0;
  for (std::uint32_t j = 0; j < d; ++j) {
    BigInt uniform = 0;
    for (std::uint32_t l = 0; l < j; ++l) uniform += big_pow(p, d - 2 - l);
    total += uniform * half + big_pow(p, d - 1 - j) * (p - 1);
  }
  return total;
}

// Everything the counts need about one exact-weight block gate: which
// monomial degrees appear, and the total multiplicity its replacement wires
// carry per outer coefficient u.
struct BlockData {
  std::vector<std::uint32_t> degrees;  // d >= 1 with a nonzero coefficient
  std::vector<BigInt> wiresum;         // [u] -> sum over wires of (u*mu % m')
};

struct BlockCounter {
  std::uint64_t p;
  std::uint64_t minner;
  std::vector<std::uint64_t> primes;
  std::map<std::uint32_t, std::vector<BigInt>> binom;
  std::map<std::pair<std::uint32_t, std::uint32_t>, BlockData> cache;

  const std::vector<BigInt>& binom_row(std::uint32_t v) {
    auto it = binom.find(v);
    if (it == binom.end()) it = binom.emplace(v, pascal_row(v)).first;
    return it->second;
  }

  // Weight profile of the exact-weight polynomial, then its multilinear
  // coefficients by finite differences; symmetry makes every same-degree
  // coefficient equal.
  const BlockData& get(std::uint32_t v, std::uint32_t target) {
    auto it = cache.find({v, target});
    if (it != cache.end()) return it->second;

    const EmajPlan plan = make_emaj_plan(v, target, primes);
    std::vector<std::uint64_t> h(v + 1, 0);
    for (std::uint32_t w = 0; w <= v; ++w) {
      std::uint64_t s = 0;
      for (std::size_t i = 0; i < plan.primes.size(); ++i) {
        std::uint64_t pe = 1;
        for (std::uint32_t e = 0; e < plan.exponents[i]; ++e)
          pe *= plan.primes[i];
        if (w % pe != target % pe)
          s = (s + plan.crt_coefficients[i]) % plan.modulus;
      }
      h[w] = s;
    }

    BlockData data;
    const std::vector<BigInt>& comb = binom_row(v);
    std::map<std::uint64_t, BigInt> count_by_mult;
    std::vector<std::uint64_t> diff = h;
    for (std::uint32_t d = 1; d <= v; ++d) {
      for (std::uint32_t w = 0; w + d <= v; ++w)
        diff[w] = (diff[w + 1] + minner - diff[w]) % minner;
      const std::uint64_t coeff = diff[0];
      if (coeff == 0) continue;
      data.degrees.push_back(d);
      // parent wire multiplicity after absorbing a degree-d AND
      const std::uint64_t inv =
          mod_inverse(mod_pow(p % minner, d - 1, minner), minner);
      const std::uint64_t mu = coeff * inv % minner;
      count_by_mult[mu] += comb[d] * geom(p, d);
    }
    data.wiresum.assign(minner, BigInt(0));
    for (std::uint64_t u = 1; u < minner; ++u)
      for (const auto& [mu, cnt] : count_by_mult)
        data.wiresum[u] += cnt * (u * mu % minner);
    return cache.emplace(std::pair{v, target}, std::move(data)).first->second;
  }
};

DryrunCount count_depth3_core(const SymFnSpec& spec, std::uint64_t p,
                              std::uint64_t minner, std::uint32_t t_req) {
  const std::uint32_t n = spec.n;
  if (n == 0) throw UsageError("dry-run count: function must have inputs");
  if (!is_prime(p))
    throw UsageError("dry-run count: outer modulus must be prime");
  if (minner < 2 || !is_square_free(minner) || std::gcd(p, minner) != 1)
    throw UsageError(
        "dry-run count: inner modulus must be square-free and coprime to the "
        "outer prime");

  const std::uint32_t t =
      std::max<std::uint32_t>(1, std::min<std::uint32_t>(t_req, n));
  const std::uint32_t big = (n + t - 1) / t;
  const std::uint32_t small = n / t;
  const std::uint32_t nbig = n % t == 0 ? t : n % t;
  std::vector<std::uint32_t> sizes(t);
  for (std::uint32_t i = 0; i < t; ++i) sizes[i] = i < nbig ? big : small;

  std::vector<std::uint8_t> accepted(n + 1);
  bool any = false;
  for (std::uint32_t T = 0; T <= n; ++T) {
    accepted[T] = spec.eval_weight(T);
    any = any || accepted[T];
  }
  if (!any) return {BigInt(n) + 1, BigInt(0)};
  std::vector<std::uint32_t> acc_prefix(n + 2, 0);
  for (std::uint32_t T = 0; T <= n; ++T)
    acc_prefix[T + 1] = acc_prefix[T] + accepted[T];

  // A block target x is realized at part i iff some accepted total lies in
  // [x, x + (n - v_i)]: the other parts absorb any remainder in that range.
  std::vector<std::vector<std::uint32_t>> used(t);
  for (std::uint32_t i = 0; i < t; ++i) {
    const std::uint32_t rest = n - sizes[i];
    for (std::uint32_t x = 0; x <= sizes[i]; ++x)
      if (acc_prefix[std::min(n, x + rest) + 1] > acc_prefix[x])
        used[i].push_back(x);
  }

  BlockCounter blocks{p, minner, prime_factors(minner), {}, {}};

  // Bottom layer: monomial ANDs are shared across the targets of a part, so
  // the degrees that matter are the union over that part's used targets.
  BigInt bottom_forms = 0, bottom_wires = 0;
  for (std::uint32_t i = 0; i < t; ++i) {
    std::vector<std::uint8_t> deg_used(sizes[i] + 1, 0);
    for (std::uint32_t x : used[i])
      for (std::uint32_t d : blocks.get(sizes[i], x).degrees) deg_used[d] = 1;
    const std::vector<BigInt>& comb = blocks.binom_row(sizes[i]);
    for (std::uint32_t d = 1; d <= sizes[i]; ++d)
      if (deg_used[d]) {
        bottom_forms += comb[d] * geom(p, d);
        bottom_wires += comb[d] * form_wires_per_and(p, d);
      }
  }

  // Middle layer: replacing one branch AND of fan-in t.  Per prime q of the
  // inner modulus: the inverse branch coefficient, the constant branch value
  // and the CRT lift, exactly as the linearization computes them.
  const std::vector<std::uint64_t>& qs = blocks.primes;
  const std::size_t np = qs.size();
  std::vector<std::uint64_t> inv_q(np), d_q(np), crt_q(np);
  std::vector<BigInt> h_q(np);
  for (std::size_t i = 0; i < np; ++i) {
    const std::uint64_t q = qs[i];
    h_q[i] = geom(q, t);
    const std::uint64_t a_mod =
        ((h_q[i] - big_pow(q, t - 1)) % p).convert_to<std::uint64_t>();
    inv_q[i] = mod_inverse(mod_pow(q % p, t - 1, p), p);
    d_q[i] = (p - inv_q[i] * a_mod % p) % p;
    crt_q[i] = minner / q % minner * mod_inverse(minner / q % q, q) % minner;
  }

  // Coordinate statistics of the normal vectors in Z_q^t, per position j.
  auto coord_count = [&](std::size_t i, std::uint32_t j,
                         std::uint64_t r) -> BigInt {
    const std::uint64_t q = qs[i];
    BigInt c = 0;
    for (std::uint32_t l = 0; l < j; ++l) c += big_pow(q, t - 2 - l);
    if (r == 1) c += big_pow(q, t - 1 - j);
    if (r == 0) c += geom(q, t - 1 - j);
    return c;
  };

  // terms_per_branch: gates each branch AND turns into.  ow_per_branch: the
  // output-side multiplicities of those gates.  weight_at[j][u]: how many of
  // them act on the j-th block with combined coefficient u.
  BigInt terms_per_branch = 0, ow_per_branch = 0;
  std::vector<std::vector<BigInt>> weight_at(
      t, std::vector<BigInt>(minner, BigInt(0)));
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << np); ++mask) {
    std::uint64_t coeff = 1 % p;
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < np; ++i) {
      if (mask >> i & 1) {
        coeff = coeff * inv_q[i] % p;
        chosen.push_back(i);
      } else {
        coeff = coeff * d_q[i] % p;
      }
    }
    if (coeff == 0) continue;
    BigInt prod = 1;
    for (std::size_t i : chosen) prod *= h_q[i];
    terms_per_branch += prod;
    ow_per_branch += prod * ((p - 1) * coeff % p);

    std::vector<std::uint64_t> r(chosen.size(), 0);
    while (true) {
      std::uint64_t u = 0;
      for (std::size_t c = 0; c < chosen.size(); ++c)
        u = (u + r[c] * crt_q[chosen[c]]) % minner;
      for (std::uint32_t j = 0; j < t; ++j) {
        BigInt w = 1;
        for (std::size_t c = 0; c < chosen.size(); ++c)
          w *= coord_count(chosen[c], j, r[c]);
        weight_at[j][u] += w;
      }
      std::size_t pos = chosen.size();
      bool done = true;
      while (pos-- > 0) {
        if (++r[pos] < qs[chosen[pos]]) {
          done = false;
          break;
        }
        r[pos] = 0;
      }
      if (done) break;
    }
  }

  // Wire multiplicity the j-th slot of one branch contributes when its block
  // pins target x.
  auto slot_wires = [&](std::uint32_t j, std::uint32_t x) {
    const BlockData& blk = blocks.get(sizes[j], x);
    BigInt s = 0;
    for (std::uint64_t u = 1; u < minner; ++u)
      if (weight_at[j][u] != 0) s += weight_at[j][u] * blk.wiresum[u];
    return s;
  };

  // Composition counts and accumulated slot wires over all branches at once:
  // cnt[s] counts cap-respecting compositions of s over the parts seen so
  // far, acc[s] sums their slot wires.  Accepted totals are harvested at the
  // end; targets outside used[] can never extend to one, so they are skipped.
  std::vector<BigInt> cnt(n + 1, BigInt(0)), acc(n + 1, BigInt(0));
  cnt[0] = 1;
  std::uint32_t cap = 0;
  for (std::uint32_t j = 0; j < t; ++j) {
    cap += sizes[j];
    std::vector<BigInt> ncnt(n + 1, BigInt(0)), nacc(n + 1, BigInt(0));
    for (std::uint32_t x : used[j]) {
      const BigInt h2 = slot_wires(j, x);
      for (std::uint32_t s = x; s <= cap; ++s) {
        if (cnt[s - x] == 0) continue;
        ncnt[s] += cnt[s - x];
        nacc[s] += acc[s - x] + cnt[s - x] * h2;
      }
    }
    cnt.swap(ncnt);
    acc.swap(nacc);
  }
  BigInt branch_count = 0, middle_wires = 0;
  for (std::uint32_t T = 0; T <= n; ++T)
    if (accepted[T]) {
      branch_count += cnt[T];
      middle_wires += acc[T];
    }

  DryrunCount out;
  out.gates = BigInt(n) + bottom_forms + branch_count * terms_per_branch + 1;
  out.wires =
      bottom_wires + middle_wires + branch_count * ow_per_branch;
  return out;
}

}  // namespace

DryrunCount count_depth3(const SymFnSpec& spec, std::uint32_t k) {
  if (k < 2) throw UsageError("count_depth3: k must be at least 2");
  std::uint64_t minner = 1;
  std::uint64_t prime = 3;
  for (std::uint32_t i = 0; i + 1 < k; ++i) {
    minner *= prime;
    do ++prime;
    while (!is_prime(prime));
  }
  const std::uint32_t t = static_cast<std::uint32_t>(iroot_floor(spec.n, k));
  return count_depth3_core(spec, 2, minner, t);
}

DryrunCount count_depth3_preset31(const SymFnSpec& spec) {
  const std::uint32_t t = static_cast<std::uint32_t>(iroot_ceil(spec.n, 3));
  return count_depth3_core(spec, 5, 6, t);
}

namespace {

double log2_big(const BigInt& x) {
  if (x <= 0) throw UsageError("growth fit: counts must be positive");
  const unsigned b = boost::multiprecision::msb(x);
  if (b < 52) return std::log2(x.convert_to<double>());
  const BigInt top = x >> (b - 52);
  return static_cast<double>(b - 52) + std::log2(top.convert_to<double>());
}

}  // namespace

double fit_beta(const std::vector<GrowthRow>& rows) {
  if (rows.size() < 3)
    throw UsageError("growth fit: need at least three ramp points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const GrowthRow& r : rows) {
    const double x = std::log2(static_cast<double>(r.n));
    const double y = std::log2(log2_big(r.gates));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(rows.size());
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

GrowthReport growth_report_depth3(const std::vector<std::uint32_t>& ns,
                                  std::uint32_t k) {
  GrowthReport rep;
  for (std::uint32_t n : ns) {
    const DryrunCount c = count_depth3(symfn_majority(n), k);
    rep.rows.push_back({n, k, c.gates, c.wires});
  }
  rep.beta = fit_beta(rep.rows);
  return rep;
}

std::string growth_csv(const GrowthReport& report) {
  std::string s = "n,param,gates,wires\n";
  for (const GrowthRow& r : report.rows)
    s += std::to_string(r.n) + "," + std::to_string(r.param) + "," +
         r.gates.str() + "," + r.wires.str() + "\n";
  return s;
}

}  // namespace modsynth
