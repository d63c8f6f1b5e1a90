#pragma once

#include <cstdint>
#include <vector>

#include "modsynth/errors.hpp"

namespace modsynth {

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// Distinct prime factors, ascending.
inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

inline bool is_square_free(std::uint64_t n) {
  if (n == 0) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      n /= d;
      if (n % d == 0) return false;
    }
  }
  return true;
}

inline std::uint64_t radical(std::uint64_t n) {
  std::uint64_t r = 1;
  for (std::uint64_t p : prime_factors(n)) r *= p;
  return r;
}

inline std::uint64_t euler_phi(std::uint64_t n) {
  std::uint64_t r = n;
  for (std::uint64_t p : prime_factors(n)) r = r / p * (p - 1);
  return r;
}

// Largest t with t^k <= n (k >= 1), computed without floating point.
inline std::uint64_t iroot_floor(std::uint64_t n, std::uint32_t k) {
  if (k == 0) throw UsageError("iroot_floor: k must be positive");
  if (k == 1 || n < 2) return n;
  std::uint64_t t = 1;
  while (true) {
    // does (t+1)^k still fit under n?
    std::uint64_t pw = 1;
    bool over = false;
    for (std::uint32_t i = 0; i < k; ++i) {
      if (pw > n / (t + 1)) {
        over = true;
        break;
      }
      pw *= t + 1;
    }
    if (over || pw > n) return t;
    ++t;
  }
}

// Smallest t with t^k >= n.
inline std::uint64_t iroot_ceil(std::uint64_t n, std::uint32_t k) {
  std::uint64_t t = iroot_floor(n, k);
  std::uint64_t pw = 1;
  for (std::uint32_t i = 0; i < k && pw <= n; ++i) pw *= t;
  return pw >= n ? t : t + 1;
}

inline std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp,
                             std::uint64_t m) {
  std::uint64_t r = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) r = r * base % m;
    base = base * base % m;
    exp >>= 1;
  }
  return r;
}

inline std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t m) {
  std::int64_t t = 0, new_t = 1;
  std::int64_t r = static_cast<std::int64_t>(m);
  std::int64_t new_r = static_cast<std::int64_t>(a % m);
  while (new_r != 0) {
    std::int64_t q = r / new_r;
    std::int64_t tmp = t - q * new_t;
    t = new_t;
    new_t = tmp;
    tmp = r - q * new_r;
    r = new_r;
    new_r = tmp;
  }
  if (r != 1)
    throw UsageError("no inverse of " + std::to_string(a) + " modulo " +
                     std::to_string(m));
  return static_cast<std::uint64_t>(t < 0 ? t + static_cast<std::int64_t>(m) : t);
}

// Smallest generator of the multiplicative group mod p.
inline std::uint64_t primitive_root(std::uint64_t p) {
  if (!is_prime(p)) throw UsageError("primitive_root requires a prime");
  if (p == 2) return 1;
  std::uint64_t phi = p - 1;
  auto facs = prime_factors(phi);
  for (std::uint64_t g = 2; g < p; ++g) {
    bool ok = true;
    for (std::uint64_t q : facs)
      if (mod_pow(g, phi / q, p) == 1) { ok = false; break; }
    if (ok) return g;
  }
  throw UsageError("no primitive root found");  // unreachable for prime p
}

}  // namespace modsynth
