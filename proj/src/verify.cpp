#include "modsynth/verify.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <thread>

#include "modsynth/errors.hpp"

namespace modsynth {

namespace {

std::string bits_string(const std::vector<std::uint8_t>& x) {
  std::string s;
  s.reserve(x.size());
  for (std::uint8_t b : x) s.push_back(b ? '1' : '0');
  return s;
}

std::vector<std::uint8_t> bits_of_mask(std::uint64_t mask, std::uint32_t n) {
  std::vector<std::uint8_t> x(n);
  for (std::uint32_t i = 0; i < n; ++i) x[i] = (mask >> i) & 1;
  return x;
}

// Lane words of the 64 assignments base, base+1, ..., base+63 (base must be
// 64-aligned): variables 0..5 cycle through fixed patterns, the rest follow
// the bits of base.
void aligned_lanes(std::uint64_t base, std::uint32_t n, std::uint64_t* lanes) {
  static constexpr std::uint64_t kPattern[6] = {
      0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
      0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
  for (std::uint32_t i = 0; i < n; ++i) {
    if (i < 6)
      lanes[i] = kPattern[i];
    else
      lanes[i] = (base >> i) & 1 ? ~0ull : 0ull;
  }
}

// kWeightWord[w]: lanes L in [0,64) with popcount(L) = w.
const std::uint64_t* weight_words() {
  static const auto table = [] {
    std::array<std::uint64_t, 7> t{};
    for (std::uint64_t l = 0; l < 64; ++l)
      t[static_cast<std::size_t>(std::popcount(l))] |= 1ull << l;
    return t;
  }();
  return table.data();
}

struct ScanBlock {
  std::uint64_t mismatch_count = 0;
  std::vector<std::uint64_t> first_masks;  // up to 16
};

// Exhaustive scan of chunk indices [chunk_lo, chunk_hi); each chunk covers 64
// consecutive assignments.
ScanBlock scan_exhaustive(const Circuit& c, const SymFnSpec& spec,
                          std::uint64_t chunk_lo, std::uint64_t chunk_hi,
                          std::uint64_t total) {
  ScanBlock blk;
  const std::uint32_t n = spec.n;
  FlatCircuit flat(c);
  std::vector<std::uint64_t> lanes(std::max(1u, n));
  const std::uint64_t* ww = weight_words();
  for (std::uint64_t ch = chunk_lo; ch < chunk_hi; ++ch) {
    const std::uint64_t base = ch << 6;
    aligned_lanes(base, n, lanes.data());
    const std::uint64_t got = flat.eval_batch(lanes.data());
    const std::uint32_t pc0 = static_cast<std::uint32_t>(std::popcount(base));
    std::uint64_t want = 0;
    for (std::uint32_t w = 0; w < 7 && pc0 + w <= n; ++w)
      if (spec.eval_weight(pc0 + w)) want |= ww[w];
    std::uint64_t valid = ~0ull;
    if (total - base < 64) valid = (1ull << (total - base)) - 1;
    std::uint64_t diff = (got ^ want) & valid;
    blk.mismatch_count += std::popcount(diff);
    while (diff != 0 && blk.first_masks.size() < 16) {
      const int l = std::countr_zero(diff);
      blk.first_masks.push_back(base + static_cast<std::uint64_t>(l));
      diff &= diff - 1;
    }
  }
  return blk;
}

std::vector<std::uint64_t> sampled_masks(std::uint32_t n,
                                         const VerifyOptions& opts) {
  std::vector<std::uint64_t> masks;
  masks.reserve(n + 1 + opts.samples);
  for (std::uint32_t w = 0; w <= n; ++w)
    masks.push_back(w == 64 ? ~0ull : (1ull << w) - 1);
  std::mt19937_64 rng(opts.seed);
  const std::uint64_t cover = n >= 64 ? ~0ull : (1ull << n) - 1;
  for (std::uint64_t s = 0; s < opts.samples; ++s)
    masks.push_back(rng() & cover);
  return masks;
}

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs fn(lo, hi) over a contiguous partition of [0, total) and returns the
// per-block results in block order.
template <typename Fn>
auto run_partitioned(std::uint64_t total, unsigned threads, Fn fn)
    -> std::vector<decltype(fn(std::uint64_t{}, std::uint64_t{}))> {
  using Result = decltype(fn(std::uint64_t{}, std::uint64_t{}));
  const unsigned nblk =
      static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(total, 1)));
  std::vector<Result> results(nblk);
  if (nblk <= 1) {
    results[0] = fn(0, total);
    return results;
  }
  std::vector<std::thread> pool;
  const std::uint64_t span = (total + nblk - 1) / nblk;
  for (unsigned b = 0; b < nblk; ++b) {
    const std::uint64_t lo = span * b;
    const std::uint64_t hi = std::min(total, lo + span);
    pool.emplace_back([&, b, lo, hi] { results[b] = fn(lo, hi); });
  }
  for (auto& th : pool) th.join();
  return results;
}

}  // namespace

std::uint8_t oracle_eval(const SymFnSpec& spec,
                         const std::vector<std::uint8_t>& x) {
  if (x.size() != spec.n)
    throw UsageError("oracle_eval: assignment length does not match the spec");
  std::uint32_t w = 0;
  for (std::uint8_t b : x) w += b != 0;
  return spec.eval_weight(w) ? 1 : 0;
}

bool VerifyReport::ok() const {
  if (mismatch_count != 0) return false;
  for (const InvariantResult& r : invariants)
    if (!r.pass) return false;
  return true;
}

VerifyReport check_equiv(const Circuit& c, const SymFnSpec& spec,
                         const VerifyOptions& opts) {
  if (c.num_inputs() != spec.n)
    throw UsageError("check_equiv: circuit has " +
                     std::to_string(c.num_inputs()) + " inputs but the spec " +
                     std::to_string(spec.n));
  c.validate();
  const std::uint32_t n = spec.n;
  const auto t0 = std::chrono::steady_clock::now();
  VerifyReport rep;
  rep.mode = opts.mode;

  if (opts.mode == VerifyMode::kExhaustive) {
    if (n > kExhaustiveLimit && !opts.force)
      throw UsageError("check_equiv: exhaustive mode covers 2^" +
                       std::to_string(n) +
                       " assignments; pass force to allow n > " +
                       std::to_string(kExhaustiveLimit));
    if (n > 48)
      throw UsageError("check_equiv: exhaustive mode is limited to 48 inputs");
    const std::uint64_t total = 1ull << n;
    const std::uint64_t chunks = (total + 63) >> 6;
    auto blocks = run_partitioned(
        chunks, resolve_threads(opts.threads),
        [&](std::uint64_t lo, std::uint64_t hi) {
          return scan_exhaustive(c, spec, lo, hi, total);
        });
    rep.inputs_tested = total;
    for (const ScanBlock& blk : blocks) {
      rep.mismatch_count += blk.mismatch_count;
      for (std::uint64_t mask : blk.first_masks)
        if (rep.mismatches.size() < 16)
          rep.mismatches.push_back(bits_of_mask(mask, n));
    }
  } else {
    rep.seed = opts.seed;
    if (n > 63)
      throw UsageError("check_equiv: sampled mode is limited to 63 inputs");
    const std::vector<std::uint64_t> masks = sampled_masks(n, opts);
    FlatCircuit flat(c);
    std::vector<std::uint64_t> lanes(std::max(1u, n));
    for (std::size_t at = 0; at < masks.size(); at += 64) {
      const std::size_t cnt = std::min<std::size_t>(64, masks.size() - at);
      for (std::uint32_t i = 0; i < n; ++i) {
        std::uint64_t w = 0;
        for (std::size_t l = 0; l < cnt; ++l)
          w |= ((masks[at + l] >> i) & 1) << l;
        lanes[i] = w;
      }
      const std::uint64_t got = flat.eval_batch(lanes.data());
      for (std::size_t l = 0; l < cnt; ++l) {
        const std::uint64_t mask = masks[at + l];
        const std::uint8_t want =
            spec.eval_weight(static_cast<std::uint32_t>(std::popcount(mask)))
                ? 1
                : 0;
        if (((got >> l) & 1) != want) {
          ++rep.mismatch_count;
          if (rep.mismatches.size() < 16)
            rep.mismatches.push_back(bits_of_mask(mask, n));
        }
      }
    }
    rep.inputs_tested = masks.size();
  }
  rep.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rep;
}

namespace {

// Scans the opts-selected input set for an output linear-form value outside
// {0, 1}; returns (found, witness mask, value).
struct SumProbeResult {
  bool failed = false;
  std::uint64_t mask = 0;
  std::uint32_t sum = 0;
};

SumProbeResult probe_sums(const Circuit& c, std::uint32_t n,
                          const VerifyOptions& opts) {
  SumProbeResult res;
  FlatCircuit flat(c);
  std::vector<std::uint64_t> lanes(std::max(1u, n));
  std::uint32_t sums[64];
  auto scan_chunkwise = [&](const std::vector<std::uint64_t>& masks) {
    for (std::size_t at = 0; at < masks.size() && !res.failed; at += 64) {
      const std::size_t cnt = std::min<std::size_t>(64, masks.size() - at);
      for (std::uint32_t i = 0; i < n; ++i) {
        std::uint64_t w = 0;
        for (std::size_t l = 0; l < cnt; ++l)
          w |= ((masks[at + l] >> i) & 1) << l;
        lanes[i] = w;
      }
      flat.eval_batch_with_sums(lanes.data(), sums);
      for (std::size_t l = 0; l < cnt; ++l)
        if (sums[l] > 1) {
          res = {true, masks[at + l], sums[l]};
          break;
        }
    }
  };
  if (opts.mode == VerifyMode::kExhaustive) {
    if (n > kExhaustiveLimit && !opts.force)
      throw UsageError("output-sum-01: exhaustive probe needs force beyond n=" +
                       std::to_string(kExhaustiveLimit));
    const std::uint64_t total = 1ull << n;
    for (std::uint64_t base = 0; base < total && !res.failed; base += 64) {
      aligned_lanes(base, n, lanes.data());
      flat.eval_batch_with_sums(lanes.data(), sums);
      const std::uint64_t cnt = std::min<std::uint64_t>(64, total - base);
      for (std::uint64_t l = 0; l < cnt; ++l)
        if (sums[l] > 1) {
          res = {true, base + l, sums[l]};
          break;
        }
    }
  } else {
    scan_chunkwise(sampled_masks(n, opts));
  }
  return res;
}

}  // namespace

InvariantResult check_invariant(const Circuit& c, const std::string& probe,
                                const VerifyOptions& opts) {
  InvariantResult out;
  out.name = probe;
  const auto open = probe.find('(');
  std::string head = probe.substr(0, open);
  std::string arg;
  if (open != std::string::npos) {
    if (probe.back() != ')')
      throw UsageError("check_invariant: malformed probe " + probe);
    arg = probe.substr(open + 1, probe.size() - open - 2);
  }

  if (head == "output-sum-01") {
    const std::uint64_t p = std::stoull(arg);
    const Gate& og = c.gate(c.output());
    if (og.kind != GateKind::kMod || og.modulus != p) {
      out.pass = false;
      out.witness = "output gate is not a MOD_" + std::to_string(p) + " gate";
      return out;
    }
    const SumProbeResult res = probe_sums(c, c.num_inputs(), opts);
    out.pass = !res.failed;
    if (res.failed)
      out.witness = "x=" + bits_string(bits_of_mask(res.mask, c.num_inputs())) +
                    " sum=" + std::to_string(res.sum);
    return out;
  }
  if (head == "layer-shape") {
    const std::string got = metrics(c).shape_string();
    out.pass = got == arg;
    if (!out.pass) out.witness = "shape is " + got;
    return out;
  }
  if (head == "no-modulus-outside") {
    const std::uint64_t m = std::stoull(arg);
    out.pass = true;
    for (GateId id = 0; id < c.size(); ++id) {
      const Gate& g = c.gate(id);
      if (g.kind == GateKind::kMod && m % g.modulus != 0) {
        out.pass = false;
        out.witness = "gate " + std::to_string(id) + " has modulus " +
                      std::to_string(g.modulus);
        break;
      }
    }
    return out;
  }
  throw UsageError("check_invariant: unknown probe " + head);
}

InvariantResult check_bundle_wellformed(const ArithCircuit& arith,
                                        const BooleanBundles& bundles) {
  InvariantResult out;
  out.name = "bundle-wellformed";
  out.pass = true;
  const std::uint32_t n = arith.n;
  if (n > kExhaustiveLimit)
    throw UsageError("bundle-wellformed: too many inputs for the exhaustive "
                     "bundle sweep");
  if (bundles.bundle.size() != arith.gates.size()) {
    out.pass = false;
    out.witness = "bundle table does not cover every arithmetic gate";
    return out;
  }
  Circuit probe = bundles.circuit;
  std::vector<std::uint64_t> vals(arith.gates.size());
  for (std::uint64_t mask = 0; mask < (1ull << n) && out.pass; ++mask) {
    const auto x = bits_of_mask(mask, n);
    for (std::size_t gid = 0; gid < arith.gates.size(); ++gid) {
      const ArithGate& g = arith.gates[gid];
      switch (g.kind) {
        case ArithKind::kVar:
          vals[gid] = x[g.var_index];
          break;
        case ArithKind::kConst:
          vals[gid] = g.value;
          break;
        case ArithKind::kPlus: {
          std::uint64_t acc = 0;
          for (std::uint32_t ch : g.children) acc = (acc + vals[ch]) % arith.p;
          vals[gid] = acc;
          break;
        }
        case ArithKind::kTimes: {
          std::uint64_t acc = 1;
          for (std::uint32_t ch : g.children) acc = acc * vals[ch] % arith.p;
          vals[gid] = acc;
          break;
        }
      }
    }
    for (std::size_t gid = 0; gid < arith.gates.size() && out.pass; ++gid) {
      for (std::uint64_t i = 0; i < bundles.p; ++i) {
        probe.set_output(bundles.bundle[gid][i]);
        const bool want = i == 0 ? vals[gid] != 0 : vals[gid] == i;
        if (probe.evaluate(x) != want) {
          out.pass = false;
          out.witness = "gate " + std::to_string(gid) + " wire b_" +
                        std::to_string(i) + " x=" + bits_string(x);
          break;
        }
      }
    }
  }
  return out;
}

std::string format_report(const VerifyReport& r) {
  std::string s;
  s += "mode: ";
  s += r.mode == VerifyMode::kExhaustive ? "exhaustive" : "sampled";
  s += "\n";
  if (r.mode == VerifyMode::kSampled)
    s += "seed: " + std::to_string(r.seed) + "\n";
  s += "inputs tested: " + std::to_string(r.inputs_tested) + "\n";
  s += "mismatches: " + std::to_string(r.mismatch_count) + "\n";
  for (const auto& x : r.mismatches) s += "counterexample: " + bits_string(x) + "\n";
  for (const InvariantResult& inv : r.invariants) {
    s += "invariant " + inv.name + ": " + (inv.pass ? "pass" : "fail");
    if (!inv.pass && !inv.witness.empty()) s += " (" + inv.witness + ")";
    s += "\n";
  }
  s += std::string("result: ") + (r.ok() ? "PASS" : "FAIL") + "\n";
  return s;
}

std::string format_report_kv(const VerifyReport& r) {
  std::string s;
  s += std::string("mode=") +
       (r.mode == VerifyMode::kExhaustive ? "exhaustive" : "sampled") + "\n";
  if (r.mode == VerifyMode::kSampled)
    s += "seed=" + std::to_string(r.seed) + "\n";
  s += "inputs_tested=" + std::to_string(r.inputs_tested) + "\n";
  s += "mismatch_count=" + std::to_string(r.mismatch_count) + "\n";
  for (std::size_t i = 0; i < r.mismatches.size(); ++i)
    s += "counterexample." + std::to_string(i) + "=" +
         bits_string(r.mismatches[i]) + "\n";
  for (const InvariantResult& inv : r.invariants) {
    s += "invariant." + inv.name + "=" + (inv.pass ? "pass" : "fail") + "\n";
    if (!inv.pass && !inv.witness.empty())
      s += "witness." + inv.name + "=" + inv.witness + "\n";
  }
  s += std::string("ok=") + (r.ok() ? "1" : "0") + "\n";
  return s;
}

Circuit mutate_circuit(const Circuit& c, std::mt19937_64& rng) {
  enum EditKind { kShift, kMult, kCompanion, kConstFlip };
  std::vector<std::pair<GateId, EditKind>> menu;
  for (GateId id = 0; id < c.size(); ++id) {
    const Gate& g = c.gate(id);
    switch (g.kind) {
      case GateKind::kMod:
        menu.push_back({id, kShift});
        if (g.modulus >= 3 && !g.wires.empty()) menu.push_back({id, kMult});
        break;
      case GateKind::kSym:
        menu.push_back({id, kCompanion});
        break;
      case GateKind::kConst0:
      case GateKind::kConst1:
        menu.push_back({id, kConstFlip});
        break;
      default:
        break;
    }
  }
  if (menu.empty())
    throw UsageError("mutate_circuit: circuit has no mutable field");
  const auto [target, edit] = menu[rng() % menu.size()];

  Circuit out(c.num_inputs());
  std::vector<GateId> remap(c.size());
  for (GateId id = 0; id < c.size(); ++id) {
    const Gate& g = c.gate(id);
    if (g.kind == GateKind::kInput) {
      remap[id] = g.input_index;
      continue;
    }
    Gate ng = g;
    for (GateId& ch : ng.inputs) ch = remap[ch];
    for (WireRef& w : ng.wires) w.gate = remap[w.gate];
    if (id == target) {
      switch (edit) {
        case kShift:
          ng.shift = (ng.shift + 1 + rng() % (ng.modulus - 1)) % ng.modulus;
          break;
        case kMult: {
          WireRef& w = ng.wires[rng() % ng.wires.size()];
          std::uint64_t nm;
          do nm = 1 + rng() % (ng.modulus - 1);
          while (nm == w.mult);
          w.mult = nm;
          break;
        }
        case kCompanion: {
          std::uint8_t& b = ng.companion[rng() % ng.companion.size()];
          b ^= 1;
          break;
        }
        case kConstFlip:
          ng.kind = ng.kind == GateKind::kConst0 ? GateKind::kConst1
                                                 : GateKind::kConst0;
          break;
      }
    }
    remap[id] = out.add_raw(std::move(ng));
  }
  out.set_output(remap[c.output()]);
  out.validate();
  return out;
}

}  // namespace modsynth
