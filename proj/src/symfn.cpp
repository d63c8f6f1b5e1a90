#include "modsynth/symfn.hpp"

#include <fstream>
#include <sstream>

#include "modsynth/errors.hpp"

namespace modsynth {

SymFnSpec symfn_majority(std::uint32_t n) {
  SymFnSpec s{n, {}, "maj"};
  for (std::uint32_t w = 0; w <= n; ++w) s.companion.push_back(2 * w > n);
  return s;
}

SymFnSpec symfn_parity(std::uint32_t n) {
  SymFnSpec s{n, {}, "parity"};
  for (std::uint32_t w = 0; w <= n; ++w) s.companion.push_back(w & 1);
  return s;
}

SymFnSpec symfn_mod(std::uint32_t n, std::uint32_t M) {
  if (M < 1) throw UsageError("mod:<M> requires M >= 1");
  SymFnSpec s{n, {}, "mod:" + std::to_string(M)};
  for (std::uint32_t w = 0; w <= n; ++w) s.companion.push_back(w % M == 0);
  return s;
}

SymFnSpec symfn_exact(std::uint32_t n, std::uint32_t T) {
  if (T > n) throw UsageError("exact:<T> requires T <= n");
  SymFnSpec s{n, {}, "exact:" + std::to_string(T)};
  for (std::uint32_t w = 0; w <= n; ++w) s.companion.push_back(w == T);
  return s;
}

SymFnSpec symfn_random(std::uint32_t n, std::mt19937_64& rng,
                       std::uint32_t tag) {
  SymFnSpec s{n, {}, "random#" + std::to_string(tag)};
  for (std::uint32_t w = 0; w <= n; ++w)
    s.companion.push_back(static_cast<std::uint8_t>(rng() & 1));
  return s;
}

SymFnSpec symfn_from_selector(const std::string& selector, std::uint32_t n) {
  if (selector == "maj") return symfn_majority(n);
  if (selector == "parity") return symfn_parity(n);
  if (selector.rfind("mod:", 0) == 0) {
    std::uint32_t M = 0;
    try {
      M = static_cast<std::uint32_t>(std::stoul(selector.substr(4)));
    } catch (...) {
      throw UsageError("bad function selector: " + selector);
    }
    return symfn_mod(n, M);
  }
  if (selector.rfind("exact:", 0) == 0) {
    std::uint32_t T = 0;
    try {
      T = static_cast<std::uint32_t>(std::stoul(selector.substr(6)));
    } catch (...) {
      throw UsageError("bad function selector: " + selector);
    }
    return symfn_exact(n, T);
  }
  throw UsageError("unknown function selector '" + selector +
                   "' (expected maj, parity, mod:<M>, exact:<T>)");
}

std::string serialize_symfn(const SymFnSpec& spec) {
  std::string out = "SYMFN " + std::to_string(spec.n) + " ";
  for (std::uint8_t b : spec.companion) out += b ? '1' : '0';
  out += '\n';
  return out;
}

SymFnSpec parse_symfn(const std::string& text) {
  std::istringstream ss(text);
  std::string tag, bits;
  std::uint64_t n = 0;
  if (!(ss >> tag >> n >> bits) || tag != "SYMFN")
    throw StructError("expected 'SYMFN <n> <bitstring>'");
  std::string rest;
  if (ss >> rest) throw StructError("trailing content after SYMFN line");
  if (bits.size() != n + 1)
    throw StructError("companion bitstring must have length n + 1");
  SymFnSpec spec;
  spec.n = static_cast<std::uint32_t>(n);
  spec.name = "file";
  for (char ch : bits) {
    if (ch != '0' && ch != '1')
      throw StructError("companion must be a bitstring");
    spec.companion.push_back(ch == '1');
  }
  return spec;
}

SymFnSpec load_symfn_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open spec file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_symfn(ss.str());
}

}  // namespace modsynth
