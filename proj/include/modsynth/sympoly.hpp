#pragma once

// Sparse multilinear polynomials over Z_m, with the digit-matching and
// exact-weight polynomials built from elementary symmetric polynomials.

#include <cstdint>
#include <string>
#include <vector>

namespace modsynth {

// Monomials are variable-index bitmasks, so n is capped at 63.  Terms are
// sorted by mask and carry coefficients in [1, modulus-1].
struct SparseMultilinearPoly {
  std::uint32_t n = 0;
  std::uint64_t modulus = 2;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> terms;

  std::uint32_t degree() const;  // max monomial size; 0 for the zero poly
  bool is_zero() const { return terms.empty(); }
};

inline constexpr std::size_t kDefaultTermCap = 20'000'000;

SparseMultilinearPoly poly_const(std::uint32_t n, std::uint64_t modulus,
                                 std::uint64_t c);
SparseMultilinearPoly poly_add(const SparseMultilinearPoly& p,
                               const SparseMultilinearPoly& q);
SparseMultilinearPoly poly_scale(const SparseMultilinearPoly& p,
                                 std::uint64_t c);
// Multilinear product: monomial index sets union, x^2 = x.
SparseMultilinearPoly poly_mul(const SparseMultilinearPoly& p,
                               const SparseMultilinearPoly& q,
                               std::size_t term_cap = kDefaultTermCap);

std::uint64_t poly_eval(const SparseMultilinearPoly& p, std::uint64_t point_mask);
// Values on every Boolean point, index = assignment mask (subset-sum sweep).
std::vector<std::uint64_t> poly_eval_all(const SparseMultilinearPoly& p);

// One line per term: "<coeff> : i1,i2,..." ("<coeff> :" for the constant).
std::string dump_poly(const SparseMultilinearPoly& p);

// Digit i of N base p; by Lucas this is binomial(N, p^i) mod p.
std::uint64_t lucas_digit(std::uint64_t N, std::uint64_t p, std::uint32_t i);

// Sum of all C(n, J) degree-J monomials.  On a weight-w point the value is
// C(w, J) mod modulus.  J > n gives the zero polynomial.
SparseMultilinearPoly esym_poly(std::uint32_t n, std::uint32_t J,
                                std::uint64_t modulus);

// 1 - prod_j (1 - (c_j - e_{q^j})^(q-1)) over Z_q: Boolean-valued, and 0
// exactly when the weight is congruent to sum c_j q^j mod q^t.
SparseMultilinearPoly digit_match_poly(std::uint64_t q, std::uint32_t t,
                                       const std::vector<std::uint64_t>& digits,
                                       std::uint32_t n,
                                       std::size_t term_cap = kDefaultTermCap);

struct EmajPlan {
  std::uint32_t v = 0;
  std::uint32_t target = 0;                 // weight the polynomial pins down
  std::vector<std::uint64_t> primes;        // q_1 < ... < q_{k-1}
  std::vector<std::uint32_t> exponents;     // t_i with prod q_i^{t_i} > v
  std::vector<std::uint64_t> crt_coefficients;  // M_i = m'/q_i
  std::uint64_t modulus = 1;                // m' = prod q_i
};

// Exponents start at ceil(log_{q_i}((v+1)^{1/#primes})) and are bumped
// round-robin (smallest power first) until the prime powers cover [0, v].
EmajPlan make_emaj_plan(std::uint32_t v, std::uint32_t target,
                        std::vector<std::uint64_t> primes);

// Vanishes mod m' exactly on weight-`target` points of {0,1}^v.
SparseMultilinearPoly emaj_poly(const EmajPlan& plan,
                                std::size_t term_cap = kDefaultTermCap);

}  // namespace modsynth
