#include "modsynth/sympoly.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

#include "modsynth/errors.hpp"
#include "modsynth/numth.hpp"

namespace modsynth {

namespace {

void check_poly_args(std::uint32_t n, std::uint64_t modulus) {
  if (n > 63) throw UsageError("polynomials support at most 63 variables");
  if (modulus < 2) throw UsageError("polynomial modulus must be at least 2");
}

void check_compatible(const SparseMultilinearPoly& p,
                      const SparseMultilinearPoly& q) {
  if (p.n != q.n) throw UsageError("polynomial variable counts differ");
  if (p.modulus != q.modulus) throw UsageError("polynomial moduli differ");
}

}  // namespace

std::uint32_t SparseMultilinearPoly::degree() const {
  std::uint32_t d = 0;
  for (const auto& [mask, coeff] : terms)
    d = std::max(d, static_cast<std::uint32_t>(std::popcount(mask)));
  return d;
}

SparseMultilinearPoly poly_const(std::uint32_t n, std::uint64_t modulus,
                                 std::uint64_t c) {
  check_poly_args(n, modulus);
  SparseMultilinearPoly p{n, modulus, {}};
  c %= modulus;
  if (c) p.terms.push_back({0, c});
  return p;
}

SparseMultilinearPoly poly_add(const SparseMultilinearPoly& p,
                               const SparseMultilinearPoly& q) {
  check_compatible(p, q);
  SparseMultilinearPoly out{p.n, p.modulus, {}};
  std::size_t i = 0, j = 0;
  while (i < p.terms.size() || j < q.terms.size()) {
    std::uint64_t mask, coeff;
    if (j >= q.terms.size() ||
        (i < p.terms.size() && p.terms[i].first < q.terms[j].first)) {
      mask = p.terms[i].first;
      coeff = p.terms[i].second;
      ++i;
    } else if (i >= p.terms.size() || q.terms[j].first < p.terms[i].first) {
      mask = q.terms[j].first;
      coeff = q.terms[j].second;
      ++j;
    } else {
      mask = p.terms[i].first;
      coeff = (p.terms[i].second + q.terms[j].second) % p.modulus;
      ++i;
      ++j;
    }
    if (coeff) out.terms.push_back({mask, coeff});
  }
  return out;
}

SparseMultilinearPoly poly_scale(const SparseMultilinearPoly& p,
                                 std::uint64_t c) {
  SparseMultilinearPoly out{p.n, p.modulus, {}};
  c %= p.modulus;
  for (const auto& [mask, coeff] : p.terms) {
    std::uint64_t v = coeff * c % p.modulus;
    if (v) out.terms.push_back({mask, v});
  }
  return out;
}

SparseMultilinearPoly poly_mul(const SparseMultilinearPoly& p,
                               const SparseMultilinearPoly& q,
                               std::size_t term_cap) {
  check_compatible(p, q);
  SparseMultilinearPoly out{p.n, p.modulus, {}};
  if (p.terms.empty() || q.terms.empty()) return out;

  if (p.n <= 24) {
    // Dense-by-mask accumulation.  Coefficient products are tiny, so raw
    // 64-bit sums cannot overflow before the final reduction.
    std::vector<std::uint64_t> acc(std::size_t(1) << p.n, 0);
    for (const auto& [ma, ca] : p.terms)
      for (const auto& [mb, cb] : q.terms) acc[ma | mb] += ca * cb;
    for (std::uint64_t mask = 0; mask < acc.size(); ++mask) {
      std::uint64_t v = acc[mask] % p.modulus;
      if (v) out.terms.push_back({mask, v});
    }
  } else {
    std::unordered_map<std::uint64_t, std::uint64_t> acc;
    acc.reserve(p.terms.size() + q.terms.size());
    for (const auto& [ma, ca] : p.terms) {
      for (const auto& [mb, cb] : q.terms) {
        std::uint64_t& slot = acc[ma | mb];
        slot = (slot + ca * cb) % p.modulus;
      }
      if (acc.size() > term_cap)
        throw UsageError("polynomial expansion exceeds the term cap");
    }
    for (const auto& [mask, v] : acc)
      if (v % p.modulus) out.terms.push_back({mask, v % p.modulus});
    std::sort(out.terms.begin(), out.terms.end());
  }
  if (out.terms.size() > term_cap)
    throw UsageError("polynomial expansion exceeds the term cap");
  return out;
}

std::uint64_t poly_eval(const SparseMultilinearPoly& p,
                        std::uint64_t point_mask) {
  std::uint64_t v = 0;
  for (const auto& [mask, coeff] : p.terms)
    if ((mask & point_mask) == mask) v = (v + coeff) % p.modulus;
  return v;
}

std::vector<std::uint64_t> poly_eval_all(const SparseMultilinearPoly& p) {
  if (p.n > 30) throw UsageError("poly_eval_all limited to 30 variables");
  std::vector<std::uint64_t> v(std::size_t(1) << p.n, 0);
  for (const auto& [mask, coeff] : p.terms) v[mask] = coeff;
  // Subset-sum sweep: after pass i, v[a] sums terms whose mask matches a on
  // the first i+1 variables and is contained in a on the rest.
  for (std::uint32_t i = 0; i < p.n; ++i) {
    std::uint64_t bit = std::uint64_t(1) << i;
    for (std::uint64_t a = 0; a < v.size(); ++a)
      if (a & bit) v[a] = (v[a] + v[a ^ bit]) % p.modulus;
  }
  return v;
}

std::string dump_poly(const SparseMultilinearPoly& p) {
  std::string out;
  for (const auto& [mask, coeff] : p.terms) {
    out += std::to_string(coeff);
    out += " :";
    bool first = true;
    for (std::uint32_t i = 0; i < p.n; ++i) {
      if ((mask >> i) & 1) {
        out += first ? " " : ",";
        out += std::to_string(i);
        first = false;
      }
    }
    out += '\n';
  }
  return out;
}

std::uint64_t lucas_digit(std::uint64_t N, std::uint64_t p, std::uint32_t i) {
  if (!is_prime(p)) throw UsageError("lucas_digit requires a prime base");
  for (std::uint32_t k = 0; k < i; ++k) N /= p;
  return N % p;
}

SparseMultilinearPoly esym_poly(std::uint32_t n, std::uint32_t J,
                                std::uint64_t modulus) {
  check_poly_args(n, modulus);
  SparseMultilinearPoly p{n, modulus, {}};
  if (J > n) return p;
  if (J == 0) return poly_const(n, modulus, 1);
  double log_count = 0;
  for (std::uint32_t i = 0; i < J; ++i)
    log_count += std::log2(double(n - i)) - std::log2(double(i + 1));
  if (log_count > std::log2(double(kDefaultTermCap)))
    throw UsageError("esym_poly would exceed the term cap");
  // Subsets of size J in increasing mask order (Gosper's hack).
  std::uint64_t mask = (std::uint64_t(1) << J) - 1;
  std::uint64_t limit = std::uint64_t(1) << n;
  while (mask < limit) {
    p.terms.push_back({mask, 1 % modulus});
    std::uint64_t c = mask & -mask;
    std::uint64_t r = mask + c;
    mask = (((r ^ mask) >> 2) / c) | r;
  }
  return p;
}

SparseMultilinearPoly digit_match_poly(std::uint64_t q, std::uint32_t t,
                                       const std::vector<std::uint64_t>& digits,
                                       std::uint32_t n,
                                       std::size_t term_cap) {
  if (!is_prime(q)) throw UsageError("digit_match_poly requires a prime base");
  if (digits.size() != t)
    throw UsageError("digit_match_poly needs exactly t digits");
  for (std::uint64_t c : digits)
    if (c >= q) throw UsageError("digit out of range");
  check_poly_args(n, q);

  SparseMultilinearPoly match = poly_const(n, q, 1);
  std::uint64_t power = 1;  // q^j
  for (std::uint32_t j = 0; j < t; ++j) {
    SparseMultilinearPoly e =
        power <= n ? esym_poly(n, static_cast<std::uint32_t>(power), q)
                   : SparseMultilinearPoly{n, q, {}};
    // diff = c_j - e_{q^j}
    SparseMultilinearPoly diff =
        poly_add(poly_const(n, q, digits[j]), poly_scale(e, q - 1));
    // diff^(q-1) is the is-nonzero indicator of the digit mismatch
    SparseMultilinearPoly pw = poly_const(n, q, 1);
    for (std::uint64_t r = 0; r + 1 < q; ++r) pw = poly_mul(pw, diff, term_cap);
    // 1 - pw = [digit_j equals c_j]
    SparseMultilinearPoly factor =
        poly_add(poly_const(n, q, 1), poly_scale(pw, q - 1));
    match = poly_mul(match, factor, term_cap);
    if (power > n) power = n + 1;  // saturate, avoids overflow for large q^j
    else power *= q;
  }
  // 1 - match: zero exactly where every digit agrees
  return poly_add(poly_const(n, q, 1), poly_scale(match, q - 1));
}

EmajPlan make_emaj_plan(std::uint32_t v, std::uint32_t target,
                        std::vector<std::uint64_t> primes) {
  if (primes.empty()) throw UsageError("need at least one prime");
  std::sort(primes.begin(), primes.end());
  for (std::size_t i = 0; i < primes.size(); ++i) {
    if (!is_prime(primes[i])) throw UsageError("plan moduli must be prime");
    if (i && primes[i] == primes[i - 1])
      throw UsageError("plan primes must be distinct");
  }
  if (target > v) throw UsageError("target weight exceeds variable count");

  EmajPlan plan;
  plan.v = v;
  plan.target = target;
  plan.primes = primes;
  const std::size_t K = primes.size();

  // Smallest t with q^(tK) >= v+1, i.e. ceil(log_q((v+1)^(1/K))), computed
  // without floating point.
  auto initial_exp = [&](std::uint64_t q) {
    std::uint32_t t = 0;
    // pw = q^(tK), saturating far above any 32-bit v.
    auto le_target = [&](std::uint32_t tt) {
      long double pw = 1.0L;
      for (std::uint64_t i = 0; i < tt * K; ++i) {
        pw *= q;
        if (pw > 1e18L) return false;
      }
      return pw < static_cast<long double>(v) + 1.0L;
    };
    while (le_target(t)) ++t;
    return t;
  };
  std::vector<std::uint64_t> powers;
  for (std::uint64_t q : primes) {
    std::uint32_t t = initial_exp(q);
    plan.exponents.push_back(t);
    std::uint64_t pw = 1;
    for (std::uint32_t i = 0; i < t; ++i) pw *= q;
    powers.push_back(pw);
  }
  auto range_covers = [&]() {
    unsigned __int128 prod = 1;
    for (std::uint64_t pw : powers) prod *= pw;
    return prod > v;
  };
  while (!range_covers()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < K; ++i)
      if (powers[i] < powers[best]) best = i;
    plan.exponents[best]++;
    powers[best] *= primes[best];
  }

  plan.modulus = 1;
  for (std::uint64_t q : primes) plan.modulus *= q;
  for (std::uint64_t q : primes) plan.crt_coefficients.push_back(plan.modulus / q);
  return plan;
}

SparseMultilinearPoly emaj_poly(const EmajPlan& plan, std::size_t term_cap) {
  SparseMultilinearPoly out = poly_const(plan.v, plan.modulus, 0);
  for (std::size_t i = 0; i < plan.primes.size(); ++i) {
    std::uint64_t q = plan.primes[i];
    std::uint32_t t = plan.exponents[i];
    std::vector<std::uint64_t> digits;
    std::uint64_t rem = plan.target;
    for (std::uint32_t j = 0; j < t; ++j) {
      digits.push_back(rem % q);
      rem /= q;
    }
    SparseMultilinearPoly pq = digit_match_poly(q, t, digits, plan.v, term_cap);
    // Lift Z_q coefficients into Z_{m'} scaled by M_i.  Well-defined because
    // M_i * q = m'.
    SparseMultilinearPoly lifted{plan.v, plan.modulus, {}};
    for (const auto& [mask, coeff] : pq.terms) {
      std::uint64_t c = plan.crt_coefficients[i] * coeff % plan.modulus;
      if (c) lifted.terms.push_back({mask, c});
    }
    out = poly_add(out, lifted);
  }
  return out;
}

}  // namespace modsynth
