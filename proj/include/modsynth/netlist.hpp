#pragma once

// Text netlist format "MODCKT 1".  Layout:
//
//   MODCKT 1
//   inputs <n>
//   gate <id> INPUT <idx>
//   gate <id> CONST1
//   gate <id> CONST0
//   gate <id> NOT <in>
//   gate <id> AND <in>...
//   gate <id> OR <in>...
//   gate <id> SYM <bitstring> <in>...
//   gate <id> MOD <m> <shift> <in>:<mult>...
//   output <id>
//
// ASCII, LF line endings, fields space-separated, gate ids 0..N-1 in order.

#include <string>

#include "modsynth/circuit.hpp"

namespace modsynth {

std::string serialize_netlist(const Circuit& c);

// Throws StructError with a line number on malformed input.
Circuit parse_netlist(const std::string& text);

Circuit load_netlist_file(const std::string& path);
void save_netlist_file(const Circuit& c, const std::string& path);

}  // namespace modsynth
