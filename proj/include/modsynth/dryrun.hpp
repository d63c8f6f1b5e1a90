#pragma once

// Closed-form gate and wire counts for the depth-3 synthesizers, computed
// without materializing the circuit, plus growth-rate reporting across a
// ramp of input sizes.

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "modsynth/symfn.hpp"

namespace modsynth {

using BigInt = boost::multiprecision::cpp_int;

struct DryrunCount {
  BigInt gates;
  BigInt wires;
};

// Counts agree exactly with metrics(synth_depth3(spec, k)) and
// metrics(synth_depth3_preset31(spec)).
DryrunCount count_depth3(const SymFnSpec& spec, std::uint32_t k);
DryrunCount count_depth3_preset31(const SymFnSpec& spec);

struct GrowthRow {
  std::uint32_t n = 0;
  std::uint32_t param = 0;  // the k handed to the synthesizer
  BigInt gates;
  BigInt wires;
};

struct GrowthReport {
  std::vector<GrowthRow> rows;
  double beta = 0.0;  // least-squares slope of log2(log2(gates)) vs log2(n)
};

// Refuses fewer than three rows: a slope from one or two points says nothing.
double fit_beta(const std::vector<GrowthRow>& rows);

// Majority at every n in the ramp.
GrowthReport growth_report_depth3(const std::vector<std::uint32_t>& ns,
                                  std::uint32_t k);

// Header "n,param,gates,wires", one row per line.
std::string growth_csv(const GrowthReport& report);

}  // namespace modsynth
