#pragma once

// AND/OR/NOT/MOD circuits for symmetric functions via arithmetic circuits
// over F_p: elementary symmetric polynomials evaluated by shallow arithmetic
// circuits, converted to Boolean circuits through unary field encodings,
// with the MOD_{p-1} side gates eliminated over a good modulus, and weight
// discriminators assembled into an OR-of-AND top.

#include <cstdint>
#include <utility>
#include <vector>

#include "modsynth/circuit.hpp"
#include "modsynth/symfn.hpp"

namespace modsynth {

// true iff every prime factor of phi(m) divides m (m square-free, >= 2).
// certificate, when given, receives one (prime, divides) pair per prime
// factor of phi(m).
bool goodness_check(std::uint64_t m,
                    std::vector<std::pair<std::uint64_t, bool>>* certificate =
                        nullptr);

enum class ArithKind : std::uint8_t { kVar, kConst, kPlus, kTimes };

struct ArithGate {
  ArithKind kind = ArithKind::kConst;
  std::uint32_t var_index = 0;   // kVar
  std::uint64_t value = 0;       // kConst, in [0, p)
  std::vector<std::uint32_t> children;  // kPlus / kTimes
};

// Strictly alternating PLUS/TIMES circuit over F_p; leaves (variables and
// constants) may appear at any level, the output gate is TIMES.
struct ArithCircuit {
  std::uint64_t p = 2;
  std::uint32_t n = 0;
  std::vector<ArithGate> gates;
  std::uint32_t output = 0;

  std::uint32_t add(ArithGate g);
  void validate() const;  // alternation, output kind, acyclicity, ranges
  std::uint64_t eval(const std::vector<std::uint64_t>& point) const;
  // PLUS/TIMES nodes on the deepest path; single-child nodes are identity
  // wraps and do not count.
  std::uint32_t depth() const;
};

// Unary encoding tables of F_p^*: the smallest primitive root and its
// discrete-log table, used by the TIMES gadget.
struct FieldEnc {
  std::uint64_t p = 3;
  std::uint64_t generator = 2;
  std::vector<std::uint32_t> log;  // log[v] for v in [1, p), log[g^k] = k
};

FieldEnc make_field_enc(std::uint64_t p);  // odd primes only

inline constexpr std::size_t kArithTermCap = 2'000'000;

// e_J over blocks: ell-1 block-splitting levels (B = ceil(n^(1/ell)) blocks
// each) with monomial-expanded leaves; depth <= 2*ell, output TIMES.
ArithCircuit esym_arith_circuit(std::uint32_t n, std::uint32_t J,
                                std::uint64_t p, std::uint32_t ell);

// TIMES of e copies of the circuit's natural root: x -> x^e.
ArithCircuit power_wrap(const ArithCircuit& c, std::uint32_t e);

// Boolean circuit plus the unary wire bundle b_0..b_{p-1} per arithmetic
// gate: b_0 = [value != 0], b_i = [value = i] for i >= 1.  The circuit
// output is the root's b_0.
struct BooleanBundles {
  Circuit circuit;
  std::uint64_t p = 2;
  std::vector<std::vector<GateId>> bundle;  // [arith gate id][i]
};

BooleanBundles arith_to_boolean(const ArithCircuit& c);

// Rewrites every MOD_{p-1} gate into an AND of base-q digit-zero tests over
// the prime powers q^e dividing p-1, with the monomial ANDs of each test
// linearized away and eligible top ANDs absorbed into their MOD parents.
// Requires every prime factor of p-1 to divide m; the result uses only
// moduli dividing m alongside AND/NOT.
Circuit eliminate_modpm1(const Circuit& c, std::uint64_t p, std::uint64_t m);

// AND over digit-zero tests per (prime, digit) of the plan; outputs 1 iff
// the input weight is divisible by the realized modulus prod p_a^{s_a}.
Circuit synth_modm_function(
    std::uint32_t n, const std::vector<std::pair<std::uint64_t, std::uint32_t>>& plan,
    std::uint32_t depth_budget);

struct AccParams {
  std::uint64_t m = 2;
  std::uint32_t d = 4;
  std::uint32_t n = 0;
  std::vector<std::uint64_t> primes;     // ascending prime factors of m
  std::uint64_t alpha_num = 0;           // alpha = (d-1)/((r+3)(d-1)-3)
  std::uint64_t alpha_den = 1;
  std::vector<std::uint32_t> exponents;  // s_a = ceil(alpha log_{p_a} n)
};

AccParams make_acc_params(std::uint64_t m, std::uint32_t d, std::uint32_t n);

// |i-j| < n^(alpha*r), the regime where a digit test separates the weights.
bool acc_small_gap(const AccParams& params, std::uint32_t i, std::uint32_t j);

// Outputs 1 on every weight-i input and 0 on every weight-j input; behavior
// on other weights is unconstrained.  Small gaps get a single base-p_a digit
// test on a constant-padded weight, large gaps a monotone threshold block.
struct Discriminator {
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  bool small_gap = false;
  std::uint64_t prime = 0;      // small gap: the separating p_a
  std::uint32_t digit = 0;      // small gap: lowest nonzero digit position
  std::uint32_t pad_ones = 0;   // small gap: CONST1 pads after the live inputs
  std::uint32_t threshold = 0;  // large gap: subset size of the OR-of-AND
  bool flipped = false;         // large gap: thresholds the zero count
  Circuit circuit;
};

Discriminator make_discriminator(std::uint32_t i, std::uint32_t j,
                                 std::uint32_t n, const AccParams& params);
Circuit synth_discriminator(std::uint32_t i, std::uint32_t j, std::uint32_t n,
                            const AccParams& params);

// OR over accepted weights i of AND over j != i of discriminators, with
// discriminator output ANDs collapsed into the second layer.
Circuit synth_symmetric_acc(const SymFnSpec& spec, const AccParams& params);
Circuit synth_symmetric_acc(const SymFnSpec& spec, std::uint64_t m,
                            std::uint32_t d);

}  // namespace modsynth
