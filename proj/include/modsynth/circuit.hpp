#pragma once

// Gate-level IR for constant-depth circuits over {INPUT, CONST, NOT, AND, OR,
// SYM, MOD}.  A MOD gate fires (outputs 1) iff shift + sum of
// multiplicity-weighted input values is divisible by its modulus.  A SYM gate
// looks up the number of true inputs in its companion table.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace modsynth {

using GateId = std::uint32_t;

enum class GateKind : std::uint8_t {
  kInput,
  kConst0,
  kConst1,
  kNot,
  kAnd,
  kOr,
  kSym,
  kMod,
};

const char* gate_kind_name(GateKind k);

// One weighted fan-in edge of a MOD gate.
struct WireRef {
  GateId gate = 0;
  std::uint64_t mult = 1;

  friend bool operator==(const WireRef&, const WireRef&) = default;
};

struct Gate {
  GateKind kind = GateKind::kConst0;
  std::uint32_t input_index = 0;            // kInput
  std::vector<GateId> inputs;               // kNot / kAnd / kOr / kSym
  std::vector<std::uint8_t> companion;      // kSym, length inputs.size() + 1
  std::uint64_t modulus = 0;                // kMod
  std::uint64_t shift = 0;                  // kMod, in [0, modulus)
  std::vector<WireRef> wires;               // kMod, sorted by gate id

  friend bool operator==(const Gate&, const Gate&) = default;
};

// Gate ids are consecutive and topological: every referenced gate has a
// smaller id than the gate referencing it.  Exactly one output gate.
class Circuit {
 public:
  Circuit() = default;
  // Convenience: starts with INPUT gates 0..n-1 wired to variables 0..n-1.
  explicit Circuit(std::uint32_t n_inputs);

  std::uint32_t num_inputs() const { return num_inputs_; }
  // Widens the declared input count (netlists may declare unused variables).
  void set_num_inputs(std::uint32_t n);
  std::size_t size() const { return gates_.size(); }
  const Gate& gate(GateId id) const { return gates_[id]; }
  const std::vector<Gate>& gates() const { return gates_; }
  GateId output() const { return output_; }
  void set_output(GateId id);

  GateId add_input(std::uint32_t input_index);
  GateId add_const(bool value);
  GateId add_not(GateId in);
  GateId add_and(std::vector<GateId> ins);
  GateId add_or(std::vector<GateId> ins);
  GateId add_sym(std::vector<GateId> ins, std::vector<std::uint8_t> companion);
  // Merges duplicate wires, reduces multiplicities and shift mod modulus, and
  // drops wires whose reduced multiplicity is zero.
  GateId add_mod(std::uint64_t modulus, std::uint64_t shift,
                 std::vector<WireRef> wires);
  // Appends a fully-formed gate without canonicalization (netlist parsing).
  GateId add_raw(Gate g);

  // Throws StructError naming the first violated structural rule.
  void validate() const;

  bool evaluate(std::span<const std::uint8_t> x) const;
  // Value of the given MOD gate's linear form, (shift + sum mult*input)
  // reduced mod its modulus.  Throws UsageError on non-MOD gates.
  std::uint64_t evaluate_sum_at(GateId id, std::span<const std::uint8_t> x) const;

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  void eval_all(std::span<const std::uint8_t> x, std::vector<std::uint8_t>& v) const;

  std::uint32_t num_inputs_ = 0;
  std::vector<Gate> gates_;
  GateId output_ = 0;
};

struct Metrics {
  std::size_t total_gates = 0;
  std::uint64_t total_wires = 0;   // sum of MOD multiplicities plus fan-ins
  std::uint32_t depth = 0;         // counts MOD/AND/OR/SYM gates only
  std::size_t count_by_kind[8] = {};
  // Output layer first.  A layer descriptor is the sorted set of gate labels
  // occurring at that level, e.g. "MOD(15)" or "AND+MOD(2)".
  std::vector<std::string> layer_shape;
  std::vector<std::uint64_t> max_fanin_by_layer;

  std::string shape_string() const;  // layers joined with '/'
};

Metrics metrics(const Circuit& c);

// Replaces every NOT gate with MOD_2(shift=0, {input:1}), which maps
// 0 -> 1 and 1 -> 0.  Gate ids are preserved.
Circuit lower_not_gates(const Circuit& c);

// Rewrites every nonzero MOD shift into a CONST1 wire of that multiplicity,
// recovering the shift-free gate model.
Circuit lower_shifts_to_const1(const Circuit& c);

// Drops gates unreachable from the output.  INPUT gates are always retained.
Circuit prune_dead_gates(const Circuit& c);

// parents[g] lists the gates that read g, each parent once per distinct child.
std::vector<std::vector<GateId>> gate_parents(const Circuit& c);

// Copies `src` into `dst`, replacing src's INPUT gates by the given existing
// dst wires (one per variable index).  Returns the id of src's output in dst.
GateId graft(const Circuit& src, Circuit& dst, std::span<const GateId> input_wires);

// Batched evaluator: 64 assignments per call, one bit lane each.
// input_masks[i] holds variable i across lanes (bit b = lane b).
class FlatCircuit {
 public:
  explicit FlatCircuit(const Circuit& c);

  std::uint32_t num_inputs() const { return n_; }
  // Returns the output gate's value across lanes, packed as bits.
  std::uint64_t eval_batch(const std::uint64_t* input_masks) const;
  // Also reports the output MOD gate's shifted linear-form value per lane
  // (only meaningful when the output gate is a MOD gate).
  std::uint64_t eval_batch_with_sums(const std::uint64_t* input_masks,
                                     std::uint32_t* out_sums) const;

 private:
  std::uint64_t run(const std::uint64_t* input_masks, std::uint32_t* out_sums) const;

  struct Node {
    GateKind kind;
    std::uint32_t a = 0;       // input index / single child / companion offset
    std::uint64_t modulus = 0;
    std::uint64_t shift = 0;
    std::uint32_t entry_begin = 0;
    std::uint32_t entry_end = 0;
  };
  std::uint32_t n_ = 0;
  std::uint32_t output_ = 0;
  bool output_is_mod_ = false;
  std::vector<Node> nodes_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries_;  // (gate, mult)
  std::vector<std::uint8_t> companions_;
  mutable std::vector<std::uint8_t> values_;  // gates x 64 scratch
};

}  // namespace modsynth
