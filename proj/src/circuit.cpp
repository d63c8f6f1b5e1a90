#include "modsynth/circuit.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <set>
#include <sstream>

#include "modsynth/errors.hpp"

namespace modsynth {

const char* gate_kind_name(GateKind k) {
  switch (k) {
    case GateKind::kInput:  return "INPUT";
    case GateKind::kConst0: return "CONST0";
    case GateKind::kConst1: return "CONST1";
    case GateKind::kNot:    return "NOT";
    case GateKind::kAnd:    return "AND";
    case GateKind::kOr:     return "OR";
    case GateKind::kSym:    return "SYM";
    case GateKind::kMod:    return "MOD";
  }
  return "?";
}

Circuit::Circuit(std::uint32_t n_inputs) {
  for (std::uint32_t i = 0; i < n_inputs; ++i) add_input(i);
  num_inputs_ = n_inputs;
}

void Circuit::set_num_inputs(std::uint32_t n) {
  if (n < num_inputs_)
    throw StructError("cannot shrink input count below an instantiated index");
  num_inputs_ = n;
}

void Circuit::set_output(GateId id) {
  if (id >= gates_.size()) throw StructError("output id out of range");
  output_ = id;
}

GateId Circuit::add_input(std::uint32_t input_index) {
  Gate g;
  g.kind = GateKind::kInput;
  g.input_index = input_index;
  if (input_index + 1 > num_inputs_) num_inputs_ = input_index + 1;
  gates_.push_back(std::move(g));
  return static_cast<GateId>(gates_.size() - 1);
}

GateId Circuit::add_const(bool value) {
  Gate g;
  g.kind = value ? GateKind::kConst1 : GateKind::kConst0;
  gates_.push_back(std::move(g));
  return static_cast<GateId>(gates_.size() - 1);
}

GateId Circuit::add_not(GateId in) {
  if (in >= gates_.size()) throw StructError("NOT references undefined gate");
  Gate g;
  g.kind = GateKind::kNot;
  g.inputs = {in};
  gates_.push_back(std::move(g));
  return static_cast<GateId>(gates_.size() - 1);
}

static void check_refs(const std::vector<GateId>& ins, std::size_t next_id,
                       const char* kind) {
  for (GateId in : ins) {
    if (in >= next_id) {
      throw StructError(std::string(kind) + " references undefined gate " +
                        std::to_string(in));
    }
  }
}

GateId Circuit::add_and(std::vector<GateId> ins) {
  check_refs(ins, gates_.size(), "AND");
  std::sort(ins.begin(), ins.end());
  ins.erase(std::unique(ins.begin(), ins.end()), ins.end());
  Gate g;
  g.kind = GateKind::kAnd;
  g.inputs = std::move(ins);
  gates_.push_back(std::move(g));
  return static_cast<GateId>(gates_.size() - 1);
}

GateId Circuit::add_or(std::vector<GateId> ins) {
  check_refs(ins, gates_.size(), "OR");
  std::sort(ins.begin(), ins.end());
  ins.erase(std::unique(ins.begin(), ins.end()), ins.end());
  Gate g;
  g.kind = GateKind::kOr;
  g.inputs = std::move(ins);
  gates_.push_back(std::move(g));
  return static_cast<GateId>(gates_.size() - 1);
}

GateId Circuit::add_sym(std::vector<GateId> ins,
                        std::vector<std::uint8_t> companion) {
  check_refs(ins, gates_.size(), "SYM");
  if (companion.size() != ins.size() + 1)
    throw StructError("SYM companion length must be fan-in + 1");
  for (std::uint8_t b : companion)
    if (b > 1) throw StructError("SYM companion entries must be bits");
  Gate g;
  g.kind = GateKind::kSym;
  g.inputs = std::move(ins);
  g.companion = std::move(companion);
  gates_.push_back(std::move(g));
  return static_cast<GateId>(gates_.size() - 1);
}

GateId Circuit::add_mod(std::uint64_t modulus, std::uint64_t shift,
                        std::vector<WireRef> wires) {
  if (modulus < 2) throw UsageError("MOD modulus must be at least 2");
  std::map<GateId, std::uint64_t> merged;
  for (const WireRef& w : wires) {
    if (w.gate >= gates_.size())
      throw StructError("MOD references undefined gate " + std::to_string(w.gate));
    merged[w.gate] = (merged[w.gate] + w.mult % modulus) % modulus;
  }
  Gate g;
  g.kind = GateKind::kMod;
  g.modulus = modulus;
  g.shift = shift % modulus;
  for (auto& [id, mult] : merged)
    if (mult != 0) g.wires.push_back({id, mult});
  gates_.push_back(std::move(g));
  return static_cast<GateId>(gates_.size() - 1);
}

GateId Circuit::add_raw(Gate g) {
  if (g.kind == GateKind::kInput && g.input_index + 1 > num_inputs_)
    num_inputs_ = g.input_index + 1;
  gates_.push_back(std::move(g));
  return static_cast<GateId>(gates_.size() - 1);
}

void Circuit::validate() const {
  if (gates_.empty()) throw StructError("circuit has no gates");
  if (output_ >= gates_.size()) throw StructError("output id out of range");
  for (GateId id = 0; id < gates_.size(); ++id) {
    const Gate& g = gates_[id];
    auto fail = [&](const std::string& msg) {
      throw StructError("gate " + std::to_string(id) + ": " + msg);
    };
    switch (g.kind) {
      case GateKind::kInput:
        if (g.input_index >= num_inputs_) fail("input index out of range");
        break;
      case GateKind::kConst0:
      case GateKind::kConst1:
        break;
      case GateKind::kNot:
        if (g.inputs.size() != 1) fail("NOT must have exactly one input");
        [[fallthrough]];
      case GateKind::kAnd:
      case GateKind::kOr:
        for (GateId in : g.inputs)
          if (in >= id) fail("forward or self reference");
        break;
      case GateKind::kSym:
        if (g.companion.size() != g.inputs.size() + 1)
          fail("companion length must be fan-in + 1");
        for (std::uint8_t b : g.companion)
          if (b > 1) fail("companion entries must be bits");
        for (GateId in : g.inputs)
          if (in >= id) fail("forward or self reference");
        break;
      case GateKind::kMod:
        if (g.modulus < 2) fail("modulus must be at least 2");
        if (g.shift >= g.modulus) fail("shift must be below modulus");
        for (const WireRef& w : g.wires) {
          if (w.gate >= id) fail("forward or self reference");
          if (w.mult == 0) fail("multiplicity must be positive");
        }
        break;
    }
  }
}

void Circuit::eval_all(std::span<const std::uint8_t> x,
                       std::vector<std::uint8_t>& v) const {
  v.resize(gates_.size());
  for (GateId id = 0; id < gates_.size(); ++id) {
    const Gate& g = gates_[id];
    switch (g.kind) {
      case GateKind::kInput:
        v[id] = x[g.input_index] ? 1 : 0;
        break;
      case GateKind::kConst0:
        v[id] = 0;
        break;
      case GateKind::kConst1:
        v[id] = 1;
        break;
      case GateKind::kNot:
        v[id] = v[g.inputs[0]] ^ 1;
        break;
      case GateKind::kAnd: {
        std::uint8_t r = 1;
        for (GateId in : g.inputs) r &= v[in];
        v[id] = r;
        break;
      }
      case GateKind::kOr: {
        std::uint8_t r = 0;
        for (GateId in : g.inputs) r |= v[in];
        v[id] = r;
        break;
      }
      case GateKind::kSym: {
        std::size_t cnt = 0;
        for (GateId in : g.inputs) cnt += v[in];
        v[id] = g.companion[cnt];
        break;
      }
      case GateKind::kMod: {
        std::uint64_t s = g.shift;
        for (const WireRef& w : g.wires)
          if (v[w.gate]) s += w.mult % g.modulus;
        v[id] = (s % g.modulus == 0) ? 1 : 0;
        break;
      }
    }
  }
}

bool Circuit::evaluate(std::span<const std::uint8_t> x) const {
  if (x.size() != num_inputs_)
    throw UsageError("assignment length does not match input count");
  std::vector<std::uint8_t> v;
  eval_all(x, v);
  return v[output_] != 0;
}

std::uint64_t Circuit::evaluate_sum_at(GateId id,
                                       std::span<const std::uint8_t> x) const {
  if (id >= gates_.size()) throw UsageError("gate id out of range");
  const Gate& g = gates_[id];
  if (g.kind != GateKind::kMod)
    throw UsageError("evaluate_sum_at requires a MOD gate");
  if (x.size() != num_inputs_)
    throw UsageError("assignment length does not match input count");
  std::vector<std::uint8_t> v;
  eval_all(x, v);
  std::uint64_t s = g.shift;
  for (const WireRef& w : g.wires)
    if (v[w.gate]) s += w.mult % g.modulus;
  return s % g.modulus;
}

// Levels ignore NOT gates: a NOT sits on the wire of its operand, so the
// output-side depth of the operand passes through unchanged.
static std::vector<std::uint32_t> gate_levels(const Circuit& c) {
  std::vector<std::uint32_t> level(c.size(), 0);
  for (GateId id = 0; id < c.size(); ++id) {
    const Gate& g = c.gate(id);
    std::uint32_t m = 0;
    for (GateId in : g.inputs) m = std::max(m, level[in]);
    for (const WireRef& w : g.wires) m = std::max(m, level[w.gate]);
    switch (g.kind) {
      case GateKind::kInput:
      case GateKind::kConst0:
      case GateKind::kConst1:
        level[id] = 0;
        break;
      case GateKind::kNot:
        level[id] = m;
        break;
      default:
        level[id] = m + 1;
        break;
    }
  }
  return level;
}

static std::vector<bool> reachable_from_output(const Circuit& c) {
  std::vector<bool> seen(c.size(), false);
  std::vector<GateId> stack = {c.output()};
  seen[c.output()] = true;
  while (!stack.empty()) {
    GateId id = stack.back();
    stack.pop_back();
    const Gate& g = c.gate(id);
    for (GateId in : g.inputs)
      if (!seen[in]) { seen[in] = true; stack.push_back(in); }
    for (const WireRef& w : g.wires)
      if (!seen[w.gate]) { seen[w.gate] = true; stack.push_back(w.gate); }
  }
  return seen;
}

std::string Metrics::shape_string() const {
  std::string out;
  for (std::size_t i = 0; i < layer_shape.size(); ++i) {
    if (i) out += '/';
    out += layer_shape[i];
  }
  return out;
}

Metrics metrics(const Circuit& c) {
  Metrics m;
  m.total_gates = c.size();
  for (GateId id = 0; id < c.size(); ++id) {
    const Gate& g = c.gate(id);
    m.count_by_kind[static_cast<int>(g.kind)]++;
    m.total_wires += g.inputs.size();
    for (const WireRef& w : g.wires) m.total_wires += w.mult;
  }

  std::vector<std::uint32_t> level = gate_levels(c);
  std::vector<bool> live = reachable_from_output(c);
  m.depth = level[c.output()];

  std::vector<std::set<std::string>> labels(m.depth);
  m.max_fanin_by_layer.assign(m.depth, 0);
  for (GateId id = 0; id < c.size(); ++id) {
    if (!live[id]) continue;
    const Gate& g = c.gate(id);
    std::uint64_t fanin = 0;
    std::string label;
    switch (g.kind) {
      case GateKind::kAnd: label = "AND"; fanin = g.inputs.size(); break;
      case GateKind::kOr:  label = "OR";  fanin = g.inputs.size(); break;
      case GateKind::kSym: label = "SYM"; fanin = g.inputs.size(); break;
      case GateKind::kMod:
        label = "MOD(" + std::to_string(g.modulus) + ")";
        fanin = g.wires.size();
        break;
      default:
        continue;
    }
    std::uint32_t layer = m.depth - level[id];  // 0 = output layer
    labels[layer].insert(label);
    m.max_fanin_by_layer[layer] = std::max(m.max_fanin_by_layer[layer], fanin);
  }
  for (const auto& set : labels) {
    std::string joined;
    for (const std::string& s : set) {
      if (!joined.empty()) joined += '+';
      joined += s;
    }
    m.layer_shape.push_back(joined);
  }
  return m;
}

Circuit lower_not_gates(const Circuit& c) {
  Circuit out = c;
  for (GateId id = 0; id < out.size(); ++id) {
    Gate& g = const_cast<Gate&>(out.gate(id));
    if (g.kind != GateKind::kNot) continue;
    GateId in = g.inputs[0];
    const Gate& src = out.gate(in);
    Gate repl;
    repl.kind = GateKind::kMod;
    if (src.kind == GateKind::kMod && src.modulus == 2) {
      // Complementing a parity test just flips its shift.
      repl.modulus = 2;
      repl.shift = src.shift ^ 1;
      repl.wires = src.wires;
    } else {
      repl.modulus = 2;
      repl.shift = 0;
      repl.wires = {{in, 1}};
    }
    g = std::move(repl);
  }
  return out;
}

Circuit lower_shifts_to_const1(const Circuit& c) {
  bool any = false;
  for (const Gate& g : c.gates())
    if (g.kind == GateKind::kMod && g.shift != 0) any = true;
  if (!any) return c;

  Circuit out;
  GateId one = out.add_const(true);
  std::vector<GateId> remap(c.size());
  for (GateId id = 0; id < c.size(); ++id) {
    Gate g = c.gate(id);
    for (GateId& in : g.inputs) in = remap[in];
    for (WireRef& w : g.wires) w.gate = remap[w.gate];
    if (g.kind == GateKind::kMod && g.shift != 0) {
      g.wires.insert(g.wires.begin(), {one, g.shift});
      g.shift = 0;
    }
    remap[id] = out.add_raw(std::move(g));
  }
  out.set_output(remap[c.output()]);
  return out;
}

Circuit prune_dead_gates(const Circuit& c) {
  std::vector<bool> live = reachable_from_output(c);
  for (GateId id = 0; id < c.size(); ++id)
    if (c.gate(id).kind == GateKind::kInput) live[id] = true;

  std::vector<GateId> remap(c.size(), 0);
  Circuit out;
  for (GateId id = 0; id < c.size(); ++id) {
    if (!live[id]) continue;
    Gate g = c.gate(id);
    for (GateId& in : g.inputs) in = remap[in];
    for (WireRef& w : g.wires) w.gate = remap[w.gate];
    remap[id] = out.add_raw(std::move(g));
  }
  out.set_output(remap[c.output()]);
  return out;
}

std::vector<std::vector<GateId>> gate_parents(const Circuit& c) {
  std::vector<std::vector<GateId>> parents(c.size());
  for (GateId id = 0; id < c.size(); ++id) {
    const Gate& g = c.gate(id);
    for (GateId in : g.inputs) parents[in].push_back(id);
    for (const WireRef& w : g.wires) parents[w.gate].push_back(id);
  }
  return parents;
}

GateId graft(const Circuit& src, Circuit& dst,
             std::span<const GateId> input_wires) {
  std::vector<GateId> remap(src.size());
  for (GateId id = 0; id < src.size(); ++id) {
    const Gate& g = src.gate(id);
    if (g.kind == GateKind::kInput) {
      if (g.input_index >= input_wires.size())
        throw UsageError("graft: missing replacement for input " +
                         std::to_string(g.input_index));
      remap[id] = input_wires[g.input_index];
      if (remap[id] >= dst.size())
        throw StructError("graft: replacement wire out of range");
      continue;
    }
    Gate copy = g;
    for (GateId& in : copy.inputs) in = remap[in];
    for (WireRef& w : copy.wires) w.gate = remap[w.gate];
    remap[id] = dst.add_raw(std::move(copy));
  }
  return remap[src.output()];
}

FlatCircuit::FlatCircuit(const Circuit& c) {
  n_ = c.num_inputs();
  output_ = c.output();
  output_is_mod_ = c.gate(c.output()).kind == GateKind::kMod;
  nodes_.reserve(c.size());
  for (GateId id = 0; id < c.size(); ++id) {
    const Gate& g = c.gate(id);
    Node nd;
    nd.kind = g.kind;
    nd.entry_begin = static_cast<std::uint32_t>(entries_.size());
    switch (g.kind) {
      case GateKind::kInput:
        nd.a = g.input_index;
        break;
      case GateKind::kNot:
        nd.a = g.inputs[0];
        break;
      case GateKind::kSym:
        nd.a = static_cast<std::uint32_t>(companions_.size());
        companions_.insert(companions_.end(), g.companion.begin(),
                           g.companion.end());
        [[fallthrough]];
      case GateKind::kAnd:
      case GateKind::kOr:
        for (GateId in : g.inputs) entries_.push_back({in, 1});
        break;
      case GateKind::kMod: {
        nd.modulus = g.modulus;
        nd.shift = g.shift;
        for (const WireRef& w : g.wires) {
          std::uint32_t mu = static_cast<std::uint32_t>(w.mult % g.modulus);
          if (mu) entries_.push_back({w.gate, mu});
        }
        break;
      }
      default:
        break;
    }
    nd.entry_end = static_cast<std::uint32_t>(entries_.size());
    nodes_.push_back(nd);
  }
  values_.resize(nodes_.size() * 64);
}

std::uint64_t FlatCircuit::run(const std::uint64_t* input_masks,
                               std::uint32_t* out_sums) const {
  std::uint8_t* vals = values_.data();
  for (std::size_t gi = 0; gi < nodes_.size(); ++gi) {
    const Node& nd = nodes_[gi];
    std::uint8_t* out = vals + gi * 64;
    switch (nd.kind) {
      case GateKind::kInput: {
        std::uint64_t msk = input_masks[nd.a];
        for (int l = 0; l < 64; ++l) out[l] = (msk >> l) & 1;
        break;
      }
      case GateKind::kConst0:
        std::memset(out, 0, 64);
        break;
      case GateKind::kConst1:
        std::memset(out, 1, 64);
        break;
      case GateKind::kNot: {
        const std::uint8_t* in = vals + std::size_t(nd.a) * 64;
        for (int l = 0; l < 64; ++l) out[l] = in[l] ^ 1;
        break;
      }
      case GateKind::kAnd: {
        std::memset(out, 1, 64);
        for (std::uint32_t e = nd.entry_begin; e < nd.entry_end; ++e) {
          const std::uint8_t* in = vals + std::size_t(entries_[e].first) * 64;
          for (int l = 0; l < 64; ++l) out[l] &= in[l];
        }
        break;
      }
      case GateKind::kOr: {
        std::memset(out, 0, 64);
        for (std::uint32_t e = nd.entry_begin; e < nd.entry_end; ++e) {
          const std::uint8_t* in = vals + std::size_t(entries_[e].first) * 64;
          for (int l = 0; l < 64; ++l) out[l] |= in[l];
        }
        break;
      }
      case GateKind::kSym: {
        std::uint32_t cnt[64] = {};
        for (std::uint32_t e = nd.entry_begin; e < nd.entry_end; ++e) {
          const std::uint8_t* in = vals + std::size_t(entries_[e].first) * 64;
          for (int l = 0; l < 64; ++l) cnt[l] += in[l];
        }
        const std::uint8_t* comp = companions_.data() + nd.a;
        for (int l = 0; l < 64; ++l) out[l] = comp[cnt[l]];
        break;
      }
      case GateKind::kMod: {
        std::uint32_t s[64];
        for (int l = 0; l < 64; ++l) s[l] = static_cast<std::uint32_t>(nd.shift);
        for (std::uint32_t e = nd.entry_begin; e < nd.entry_end; ++e) {
          const std::uint8_t* in = vals + std::size_t(entries_[e].first) * 64;
          std::uint32_t mu = entries_[e].second;
          for (int l = 0; l < 64; ++l) s[l] += mu * in[l];
        }
        std::uint32_t m = static_cast<std::uint32_t>(nd.modulus);
        if (out_sums && gi == output_) {
          for (int l = 0; l < 64; ++l) {
            std::uint32_t r = s[l] % m;
            out_sums[l] = r;
            out[l] = (r == 0);
          }
        } else {
          for (int l = 0; l < 64; ++l) out[l] = (s[l] % m == 0);
        }
        break;
      }
    }
  }
  const std::uint8_t* ov = vals + std::size_t(output_) * 64;
  std::uint64_t packed = 0;
  for (int l = 0; l < 64; ++l) packed |= std::uint64_t(ov[l]) << l;
  return packed;
}

std::uint64_t FlatCircuit::eval_batch(const std::uint64_t* input_masks) const {
  return run(input_masks, nullptr);
}

std::uint64_t FlatCircuit::eval_batch_with_sums(
    const std::uint64_t* input_masks, std::uint32_t* out_sums) const {
  if (!output_is_mod_)
    throw UsageError("eval_batch_with_sums requires a MOD output gate");
  return run(input_masks, out_sums);
}

}  // namespace modsynth
