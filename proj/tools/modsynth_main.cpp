// Command-line driver: synthesis, verification, metrics, growth reports and
// SYM-substitution rewriting over MODCKT netlists.
//
// Input bitstrings are read as x0 x1 ... x_{n-1}: the first character is
// variable 0.  All randomness flows from --seed; identical invocations
// produce byte-identical stdout.  Timing goes to stderr.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "modsynth/acc0_synth.hpp"
#include "modsynth/cc0_synth.hpp"
#include "modsynth/circuit.hpp"
#include "modsynth/dryrun.hpp"
#include "modsynth/errors.hpp"
#include "modsynth/netlist.hpp"
#include "modsynth/numth.hpp"
#include "modsynth/sympoly.hpp"
#include "modsynth/verify.hpp"

namespace {

using namespace modsynth;

struct Options {
  std::string preset;
  std::string fn;
  std::string spec_file;
  std::string circuit_file;
  std::string input_bits;
  std::string out_path;
  std::string ns_list = "64,128,256,512,1024,2048,4096";
  std::uint32_t n = 0;
  std::uint64_t m = 0;
  std::uint32_t depth = 0;
  std::uint32_t k = 3;
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;
  unsigned threads = 0;
  bool dry_run = false;
  bool dump_poly = false;
  bool exhaustive = false;
  bool force = false;
  bool kv = false;
  bool share = false;
  bool acc = false;
};

SymFnSpec resolve_spec(const Options& o) {
  if (o.fn.empty() == o.spec_file.empty())
    throw UsageError("pass exactly one of --fn and --spec");
  if (!o.spec_file.empty()) return load_symfn_file(o.spec_file);
  if (o.n == 0) throw UsageError("--fn needs --n to fix the input width");
  return symfn_from_selector(o.fn, o.n);
}

void write_output(const Options& o, const std::string& text) {
  if (o.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out_path, std::ios::binary);
  if (!f) throw UsageError("cannot open output file " + o.out_path);
  f << text;
}

std::vector<std::uint64_t> first_odd_primes(std::uint32_t k) {
  std::vector<std::uint64_t> primes;
  std::uint64_t p = 3;
  for (std::uint32_t i = 0; i + 1 < k; ++i) {
    primes.push_back(p);
    do ++p;
    while (!is_prime(p));
  }
  return primes;
}

std::vector<std::pair<std::uint64_t, std::uint32_t>> prime_power_plan(
    std::uint64_t m) {
  if (m < 2) throw UsageError("--m must be at least 2");
  std::vector<std::pair<std::uint64_t, std::uint32_t>> plan;
  std::uint64_t rest = m;
  for (std::uint64_t p = 2; p * p <= rest; ++p) {
    if (rest % p != 0) continue;
    std::uint32_t s = 0;
    while (rest % p == 0) rest /= p, ++s;
    plan.push_back({p, s});
  }
  if (rest > 1) plan.push_back({rest, 1});
  return plan;
}

int cmd_synth(const Options& o) {
  if (o.preset == "modfn") {
    if (!o.fn.empty() || !o.spec_file.empty())
      throw UsageError("preset modfn derives its function from --m; drop "
                       "--fn/--spec");
    if (o.n == 0) throw UsageError("preset modfn needs --n");
    if (o.m == 0) throw UsageError("preset modfn needs --m");
    if (o.depth == 0) throw UsageError("preset modfn needs --depth");
    const Circuit c = synth_modm_function(o.n, prime_power_plan(o.m), o.depth);
    write_output(o, serialize_netlist(c));
    return 0;
  }

  const SymFnSpec spec = resolve_spec(o);
  if (o.dump_poly) {
    if (o.preset != "thm31" && o.preset != "thm11")
      throw UsageError("--dump-poly covers the depth-3 presets");
    if (o.fn.rfind("exact:", 0) != 0)
      throw UsageError("--dump-poly needs an exact:T selector: the dumped "
                       "polynomial pins a single weight");
    std::uint32_t target = 0;
    for (std::uint32_t w = 0; w <= spec.n; ++w)
      if (spec.eval_weight(w)) target = w;
    std::vector<std::uint64_t> primes = o.preset == "thm31"
                                            ? std::vector<std::uint64_t>{2, 3}
                                            : first_odd_primes(o.k);
    const EmajPlan plan = make_emaj_plan(spec.n, target, primes);
    std::cout << dump_poly(emaj_poly(plan));
    return 0;
  }
  if (o.dry_run) {
    if (o.preset != "thm31" && o.preset != "thm11")
      throw UsageError("--dry-run counting covers the depth-3 presets");
    const DryrunCount c = o.preset == "thm31" ? count_depth3_preset31(spec)
                                              : count_depth3(spec, o.k);
    write_output(o, "gates " + c.gates.str() + "\nwires " + c.wires.str() +
                        "\n");
    return 0;
  }

  Circuit c;
  if (o.preset == "thm31") {
    c = synth_depth3_preset31(spec);
  } else if (o.preset == "thm11") {
    c = synth_depth3(spec, o.k);
  } else if (o.preset == "thm12") {
    if (o.m == 0 || o.depth == 0)
      throw UsageError("preset thm12 needs --m and --depth");
    c = synth_depthd(spec, o.m, o.depth, o.share);
  } else if (o.preset == "thm14") {
    if (o.m == 0 || o.depth == 0)
      throw UsageError("preset thm14 needs --m and --depth");
    c = synth_symmetric_acc(spec, o.m, o.depth);
  } else {
    throw UsageError("unknown preset " + o.preset +
                     " (thm31|thm11|thm12|thm14|modfn)");
  }
  write_output(o, serialize_netlist(c));
  return 0;
}

int cmd_verify(const Options& o) {
  const Circuit c = load_netlist_file(o.circuit_file);
  const SymFnSpec spec = resolve_spec(o);
  VerifyOptions vo;
  vo.mode = o.samples > 0 && !o.exhaustive ? VerifyMode::kSampled
                                           : VerifyMode::kExhaustive;
  vo.seed = o.seed;
  if (o.samples > 0) vo.samples = o.samples;
  vo.force = o.force;
  vo.threads = o.threads;
  const VerifyReport rep = check_equiv(c, spec, vo);
  std::cout << (o.kv ? format_report_kv(rep) : format_report(rep));
  std::fprintf(stderr, "elapsed %.3fs\n", rep.elapsed_seconds);
  return rep.ok() ? 0 : 1;
}

int cmd_stats(const Options& o) {
  const Circuit c = load_netlist_file(o.circuit_file);
  const Metrics m = metrics(c);
  std::string s;
  s += "inputs " + std::to_string(c.num_inputs()) + "\n";
  s += "gates " + std::to_string(m.total_gates) + "\n";
  s += "wires " + std::to_string(m.total_wires) + "\n";
  s += "depth " + std::to_string(m.depth) + "\n";
  s += "shape " + m.shape_string() + "\n";
  write_output(o, s);
  return 0;
}

int cmd_eval(const Options& o) {
  const Circuit c = load_netlist_file(o.circuit_file);
  if (o.input_bits.size() != c.num_inputs())
    throw UsageError("--input length " + std::to_string(o.input_bits.size()) +
                     " does not match the circuit's " +
                     std::to_string(c.num_inputs()) + " inputs");
  std::vector<std::uint8_t> x;
  for (char ch : o.input_bits) {
    if (ch != '0' && ch != '1')
      throw UsageError("--input must be a 0/1 bitstring");
    x.push_back(ch == '1');
  }
  std::cout << (c.evaluate(x) ? "1\n" : "0\n");
  return 0;
}

int cmd_report(const Options& o) {
  std::vector<std::uint32_t> ns;
  std::size_t at = 0;
  while (at < o.ns_list.size()) {
    std::size_t next = o.ns_list.find(',', at);
    if (next == std::string::npos) next = o.ns_list.size();
    try {
      ns.push_back(std::stoul(o.ns_list.substr(at, next - at)));
    } catch (const std::exception&) {
      throw UsageError("--ns expects a comma-separated list of sizes");
    }
    at = next + 1;
  }
  const GrowthReport rep = growth_report_depth3(ns, o.k);
  write_output(o, growth_csv(rep));
  std::fprintf(stderr, "beta %.6f\n", rep.beta);
  return 0;
}

int cmd_rewrite(const Options& o) {
  if (o.m == 0 || o.depth == 0)
    throw UsageError("rewrite needs --m and --depth");
  const Circuit c = load_netlist_file(o.circuit_file);
  const Circuit out = subst_majority(c, o.m, o.depth, o.share, o.acc);
  write_output(o, serialize_netlist(out));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Synthesis and verification of constant-depth circuits with modular "
      "counting gates.\nBitstrings are x0-first: the leftmost character is "
      "variable 0."};
  app.require_subcommand(1);

  Options o;
  auto add_selector = [&](CLI::App* cmd) {
    cmd->add_option("--fn", o.fn, "maj | parity | mod:M | exact:T");
    cmd->add_option("--spec", o.spec_file, "SYMFN spec file");
    cmd->add_option("--n", o.n, "input width for --fn");
  };

  CLI::App* synth = app.add_subcommand("synth", "build a circuit");
  synth->add_option("--preset", o.preset, "thm31|thm11|thm12|thm14|modfn")
      ->required();
  add_selector(synth);
  synth->add_option("--m", o.m, "composite modulus");
  synth->add_option("--depth", o.depth, "depth bound / budget");
  synth->add_option("--k", o.k, "prime count for thm11 (default 3)");
  synth->add_flag("--dry-run", o.dry_run, "print counts, build nothing");
  synth->add_flag("--dump-poly", o.dump_poly,
                  "print the exact-weight polynomial instead");
  synth->add_flag("--share", o.share, "share identical recursive blocks");
  synth->add_option("-o", o.out_path, "output netlist path");

  CLI::App* verify = app.add_subcommand("verify", "check against the oracle");
  verify->add_option("--circuit", o.circuit_file, "MODCKT netlist")
      ->required();
  add_selector(verify);
  verify->add_flag("--exhaustive", o.exhaustive,
                   "scan all 2^n inputs (default)");
  verify->add_option("--samples", o.samples,
                     "sampled mode with this many random inputs");
  verify->add_option("--seed", o.seed, "sampling seed (default 0)");
  verify->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  verify->add_flag("--force", o.force, "allow exhaustive beyond n=24");
  verify->add_flag("--kv", o.kv, "key=value report format");

  CLI::App* stats = app.add_subcommand("stats", "print circuit metrics");
  stats->add_option("--circuit", o.circuit_file, "MODCKT netlist")->required();
  stats->add_option("-o", o.out_path, "write metrics here instead of stdout");

  CLI::App* eval = app.add_subcommand("eval", "evaluate one assignment");
  eval->add_option("--circuit", o.circuit_file, "MODCKT netlist")->required();
  eval->add_option("--input", o.input_bits, "bitstring, x0 first")->required();

  CLI::App* report = app.add_subcommand("report", "growth CSV over a ramp");
  report->add_option("--k", o.k, "prime count (default 3)");
  report->add_option("--ns", o.ns_list, "comma-separated input sizes");
  report->add_option("-o", o.out_path, "CSV path (default stdout)");

  CLI::App* rewrite =
      app.add_subcommand("rewrite", "substitute SYM gates by synthesis");
  rewrite->add_option("--circuit", o.circuit_file, "SYM/NOT netlist")
      ->required();
  rewrite->add_option("--m", o.m, "target modulus");
  rewrite->add_option("--depth", o.depth, "per-gate depth budget");
  rewrite->add_flag("--share", o.share, "share identical recursive blocks");
  rewrite->add_flag("--acc", o.acc, "use the good-modulus pipeline");
  rewrite->add_option("-o", o.out_path, "output netlist path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) return cmd_synth(o);
    if (verify->parsed()) return cmd_verify(o);
    if (stats->parsed()) return cmd_stats(o);
    if (eval->parsed()) return cmd_eval(o);
    if (report->parsed()) return cmd_report(o);
    if (rewrite->parsed()) return cmd_rewrite(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const StructError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
