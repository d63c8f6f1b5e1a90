#include "modsynth/netlist.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "modsynth/errors.hpp"

namespace modsynth {

std::string serialize_netlist(const Circuit& c) {
  std::ostringstream out;
  out << "MODCKT 1\n";
  out << "inputs " << c.num_inputs() << "\n";
  for (GateId id = 0; id < c.size(); ++id) {
    const Gate& g = c.gate(id);
    out << "gate " << id << ' ' << gate_kind_name(g.kind);
    switch (g.kind) {
      case GateKind::kInput:
        out << ' ' << g.input_index;
        break;
      case GateKind::kConst0:
      case GateKind::kConst1:
        break;
      case GateKind::kSym: {
        out << ' ';
        for (std::uint8_t b : g.companion) out << (b ? '1' : '0');
        for (GateId in : g.inputs) out << ' ' << in;
        break;
      }
      case GateKind::kMod:
        out << ' ' << g.modulus << ' ' << g.shift;
        for (const WireRef& w : g.wires) out << ' ' << w.gate << ':' << w.mult;
        break;
      default:  // NOT / AND / OR
        for (GateId in : g.inputs) out << ' ' << in;
        break;
    }
    out << '\n';
  }
  out << "output " << c.output() << "\n";
  return out.str();
}

namespace {

struct LineError {
  std::size_t line;
  std::string msg;
};

std::uint64_t parse_u64(const std::string& tok) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw std::invalid_argument("expected a non-negative integer, got '" + tok + "'");
  return v;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

}  // namespace

Circuit parse_netlist(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) lines.push_back(cur);

  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) -> void {
    throw StructError("netlist line " + std::to_string(lineno) + ": " + msg);
  };

  Circuit c;
  try {
    std::size_t i = 0;
    lineno = 1;
    if (i >= lines.size() || lines[i] != "MODCKT 1") fail("expected header 'MODCKT 1'");
    ++i;

    lineno = i + 1;
    if (i >= lines.size()) fail("missing 'inputs' line");
    auto toks = split_ws(lines[i]);
    if (toks.size() != 2 || toks[0] != "inputs") fail("expected 'inputs <n>'");
    std::uint64_t declared_n = parse_u64(toks[1]);
    ++i;

    GateId next_id = 0;
    bool saw_output = false;
    for (; i < lines.size(); ++i) {
      lineno = i + 1;
      toks = split_ws(lines[i]);
      if (toks.empty()) fail("blank line");
      if (toks[0] == "output") {
        if (toks.size() != 2) fail("expected 'output <id>'");
        std::uint64_t out_id = parse_u64(toks[1]);
        if (out_id >= next_id) fail("output references undefined gate");
        c.set_output(static_cast<GateId>(out_id));
        saw_output = true;
        ++i;
        break;
      }
      if (toks[0] != "gate") fail("expected 'gate' or 'output'");
      if (toks.size() < 3) fail("truncated gate line");
      if (parse_u64(toks[1]) != next_id)
        fail("gate ids must be consecutive from 0; expected " +
             std::to_string(next_id));

      Gate g;
      const std::string& kind = toks[2];
      auto ref = [&](const std::string& tok) -> GateId {
        std::uint64_t v = parse_u64(tok);
        if (v >= next_id) fail("reference to undefined gate " + tok);
        return static_cast<GateId>(v);
      };
      if (kind == "INPUT") {
        if (toks.size() != 4) fail("expected 'gate <id> INPUT <idx>'");
        g.kind = GateKind::kInput;
        std::uint64_t idx = parse_u64(toks[3]);
        if (idx >= declared_n) fail("input index exceeds declared input count");
        g.input_index = static_cast<std::uint32_t>(idx);
      } else if (kind == "CONST1" || kind == "CONST0") {
        if (toks.size() != 3) fail("constant gates take no arguments");
        g.kind = kind == "CONST1" ? GateKind::kConst1 : GateKind::kConst0;
      } else if (kind == "NOT") {
        if (toks.size() != 4) fail("expected 'gate <id> NOT <in>'");
        g.kind = GateKind::kNot;
        g.inputs = {ref(toks[3])};
      } else if (kind == "AND" || kind == "OR") {
        g.kind = kind == "AND" ? GateKind::kAnd : GateKind::kOr;
        for (std::size_t t = 3; t < toks.size(); ++t)
          g.inputs.push_back(ref(toks[t]));
      } else if (kind == "SYM") {
        if (toks.size() < 4) fail("SYM needs a companion bitstring");
        g.kind = GateKind::kSym;
        for (char ch : toks[3]) {
          if (ch != '0' && ch != '1') fail("companion must be a bitstring");
          g.companion.push_back(ch == '1');
        }
        for (std::size_t t = 4; t < toks.size(); ++t)
          g.inputs.push_back(ref(toks[t]));
        if (g.companion.size() != g.inputs.size() + 1)
          fail("companion length must be fan-in + 1");
      } else if (kind == "MOD") {
        if (toks.size() < 5) fail("expected 'gate <id> MOD <m> <shift> ...'");
        g.kind = GateKind::kMod;
        g.modulus = parse_u64(toks[3]);
        if (g.modulus < 2) fail("modulus must be at least 2");
        g.shift = parse_u64(toks[4]);
        if (g.shift >= g.modulus) fail("shift must be below modulus");
        for (std::size_t t = 5; t < toks.size(); ++t) {
          std::size_t colon = toks[t].find(':');
          if (colon == std::string::npos) fail("wire must be '<in>:<mult>'");
          GateId in = ref(toks[t].substr(0, colon));
          std::uint64_t mult = parse_u64(toks[t].substr(colon + 1));
          if (mult == 0) fail("multiplicity must be positive");
          g.wires.push_back({in, mult});
        }
      } else {
        fail("unknown gate kind '" + kind + "'");
      }
      c.add_raw(std::move(g));
      ++next_id;
    }
    if (!saw_output) fail("missing 'output' line");
    for (; i < lines.size(); ++i) {
      lineno = i + 1;
      if (!split_ws(lines[i]).empty()) fail("content after 'output' line");
    }
    // A netlist may declare more inputs than it instantiates INPUT gates for.
    if (declared_n > c.num_inputs())
      c.set_num_inputs(static_cast<std::uint32_t>(declared_n));
  } catch (const std::invalid_argument& e) {
    throw StructError("netlist line " + std::to_string(lineno) + ": " + e.what());
  }
  return c;
}

Circuit load_netlist_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open netlist file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_netlist(ss.str());
}

void save_netlist_file(const Circuit& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write netlist file: " + path);
  out << serialize_netlist(c);
  if (!out) throw UsageError("failed writing netlist file: " + path);
}

}  // namespace modsynth
