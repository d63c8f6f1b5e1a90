#pragma once

// A symmetric Boolean function on n variables, given by its companion table
// g: f(x) = g[popcount(x)].  File format: one line `SYMFN <n> <bitstring>`
// where the bitstring has length n+1.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace modsynth {

struct SymFnSpec {
  std::uint32_t n = 0;
  std::vector<std::uint8_t> companion;  // length n+1
  std::string name;

  bool eval_weight(std::uint32_t w) const { return companion[w] != 0; }
};

SymFnSpec symfn_majority(std::uint32_t n);           // 1 iff 2*weight > n
SymFnSpec symfn_parity(std::uint32_t n);             // 1 iff weight odd
SymFnSpec symfn_mod(std::uint32_t n, std::uint32_t M);  // 1 iff weight % M == 0
SymFnSpec symfn_exact(std::uint32_t n, std::uint32_t T);
SymFnSpec symfn_random(std::uint32_t n, std::mt19937_64& rng, std::uint32_t tag);

// Accepts "maj", "parity", "mod:<M>", "exact:<T>".  Throws UsageError.
SymFnSpec symfn_from_selector(const std::string& selector, std::uint32_t n);

std::string serialize_symfn(const SymFnSpec& spec);
SymFnSpec parse_symfn(const std::string& text);  // StructError on bad format
SymFnSpec load_symfn_file(const std::string& path);

}  // namespace modsynth
