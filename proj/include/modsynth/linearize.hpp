#pragma once

// Replacing an AND of MOD_b gates by a weighted modulo-a sum of MOD_b gates,
// for coprime a and square-free b.  The identity behind it: over Z_q^k, a
// point lies on all (q^k-1)/(q-1) hyperplanes through 0 iff it is 0, and on
// exactly (q^{k-1}-1)/(q-1) of them otherwise, so the zero-test is an affine
// combination of hyperplane indicators; the product over the primes q | b is
// expanded and re-merged into single MOD_b indicators by CRT.

#include <cstdint>
#include <vector>

#include "modsynth/circuit.hpp"

namespace modsynth {

// A MOD gate viewed as data: fires iff shift + sum mult*wire is 0 mod modulus.
struct ModGateSpec {
  std::uint64_t modulus = 2;
  std::uint64_t shift = 0;
  std::vector<WireRef> wires;  // merged, sorted by gate id, mults in [1, mod)

  friend bool operator==(const ModGateSpec&, const ModGateSpec&) = default;
};

ModGateSpec make_mod_spec(std::uint64_t modulus, std::uint64_t shift,
                          std::vector<WireRef> wires);
ModGateSpec mod_spec_of(const Gate& g);  // view an existing MOD gate

// Multiplies modulus, shift and multiplicities by u; same truth table.
ModGateSpec lift_modulus(const ModGateSpec& g, std::uint64_t u);

// MOD_b(shift=1, {wire: b-1}) equals the wire's value.
ModGateSpec boolean_var_as_mod(std::uint64_t b, GateId wire);
// MOD_b(shift=0, {wire: 1}) equals the wire's negation.
ModGateSpec negated_var_as_mod(std::uint64_t b, GateId wire);

struct LinearTerm {
  std::uint64_t coefficient;  // in [1, a-1]
  ModGateSpec form;           // MOD_b indicator over the merged input multiset
};

// constant + sum coeff*[form fires] mod a equals the AND of the source gates
// on every input, and the value is always 0 or 1.
struct LinearizationPlan {
  std::uint64_t outer_modulus = 2;  // a
  std::uint64_t inner_modulus = 2;  // b
  std::uint64_t constant = 0;
  std::vector<LinearTerm> terms;
};

inline constexpr std::uint64_t kLinearTermCap = 50'000'000;

// Gates whose modulus properly divides b are lifted first.
LinearizationPlan and_of_mods(std::uint64_t a, std::uint64_t b,
                              const std::vector<ModGateSpec>& gates);

// Replaces each listed AND gate (children all MOD gates of moduli dividing a
// common square-free b coprime to a, parents MOD_a gates) by its linearization:
// term forms become gates, coefficients multiply into the parents'
// multiplicities, constants accumulate into the parents' shifts.
Circuit absorb_and_layer(const Circuit& c, const std::vector<GateId>& and_ids,
                         std::uint64_t a);

}  // namespace modsynth
