#include "fermarkov/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "fermarkov/errors.hpp"
#include "fermarkov/report.hpp"
#include "fermarkov/selftest.hpp"
#include "fermarkov/state_io.hpp"
#include "fermarkov/states.hpp"

namespace fermarkov {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("FERMARKOV_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, std::string("FERMARKOV_SEED is not an integer: ") + env);
    }
  }
  return 1;
}

RegionPartition regions_for(int n, const std::string& spec) {
  if (!spec.empty()) return RegionPartition::parse(n, spec);
  if (n < 3) throw Error(ErrorKind::InvalidRegions, "need at least 3 sites");
  const int a = n / 3;
  return RegionPartition::contiguous(a, n - 2 * a, a);
}

int infer_sites(const std::string& regions) {
  // largest index mentioned, plus one
  int top = -1;
  std::string digits;
  for (char ch : regions + ",") {
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      digits += ch;
    } else if (!digits.empty()) {
      top = std::max(top, std::stoi(digits));
      digits.clear();
    }
  }
  return top + 1;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

struct Loaded {
  StateFile file;
  StateDensity state;
  std::string digest;
};

Loaded load(const std::string& path) {
  const std::string text = read_text_file(path);
  StateFile f = parse_state_file(text, path);
  StateDensity s = load_state(f, path);
  return {std::move(f), std::move(s), fnv1a_hex(text)};
}

struct Common {
  double tol_equality = kTolEquality;
  double tol_member = kTolMember;
  std::uint64_t seed = 0;
  bool seed_given = false;

  Tolerances tolerances() const {
    Tolerances t;
    t.tol_equality = tol_equality;
    t.tol_member = tol_member;
    if (seed_given) t.seed = seed;
    return t;
  }
};

void add_tolerances(CLI::App* cmd, Common& c) {
  cmd->add_option("--tol-equality", c.tol_equality, "SSA saturation tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol-member", c.tol_member, "subalgebra membership tolerance")
      ->check(CLI::PositiveNumber);
}

AnalysisDocument analyze_document(const Loaded& in, const Tolerances& tol, bool with_blocks) {
  AnalysisDocument doc;
  doc.tool_version = tool_version();
  doc.input_digest = in.digest;
  doc.n_sites = in.file.n_sites;
  doc.regions = in.file.regions.to_string();
  doc.tolerances = tol;
  auto t0 = Clock::now();
  const TripletAnalysis t = analyze_triplet(in.state, in.file.regions, tol);
  doc.timings["analyze"] = since(t0);
  doc.ssa = summarize(t.ssa);
  doc.triplet = summarize(t, tol);
  if (t.ssa.saturated) {
    t0 = Clock::now();
    try {
      doc.factorization = summarize(factorize(in.state, t, tol), tol);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::FactorizationFailed) throw;
    }
    doc.timings["factorize"] = since(t0);
  }
  if (with_blocks && t.even && t.markov) {
    t0 = Clock::now();
    doc.blocks = summarize(decompose_even(in.state, in.file.regions, tol), tol);
    doc.timings["decompose"] = since(t0);
  }
  return doc;
}

int cmd_selftest(int max_n, const std::string& convention, std::ostream& out) {
  StringConvention conv = StringConvention::JordanWigner;
  if (convention == "undressed") {
    conv = StringConvention::Undressed;
  } else if (convention != "jordan-wigner") {
    throw Error(ErrorKind::ParseError, "unknown convention '" + convention + "'");
  }
  const SelftestReport rep = run_selftest(max_n, conv);
  out << std::left;
  for (const auto& id : rep.identities) {
    out << std::setw(18) << id.name << " worst " << std::setw(13) << id.worst << " bound "
        << id.bound << "  " << (id.pass ? "ok" : "FAIL") << "\n";
  }
  for (size_t i = 0; i < rep.seconds.size(); ++i) {
    out << "n=" << i + 1 << " wall " << rep.seconds[i] << " s\n";
  }
  for (const auto& id : rep.identities) {
    if (!id.pass) out << "failing identity: " << id.name << "\n";
  }
  return rep.ok ? kExitOk : kExitVerdict;
}

struct GenOptions {
  std::string kind = "random";
  int n = 3;
  std::string regions;
  std::string out;
  double floor_fraction = 0.1;
  std::string parity = "even_even";
  int k_fixed = 1;
  int n_pairs = 0;
  double epsilon = 1e-3;
  bool break_parity = false;
};

GeneratorSpec make_spec(const GenOptions& g, std::uint64_t seed) {
  GeneratorSpec spec;
  spec.kind = parse_generator_kind(g.kind);
  spec.seed = seed;
  const int n = g.regions.empty() ? g.n : infer_sites(g.regions);
  spec.regions = regions_for(n, g.regions);
  spec.floor_fraction = g.floor_fraction;
  if (g.parity == "even_even") {
    spec.parity = ProductParity::EvenEven;
  } else if (g.parity == "even_noneven") {
    spec.parity = ProductParity::EvenNonEven;
  } else {
    throw Error(ErrorKind::ParseError, "unknown parity mode '" + g.parity + "'");
  }
  spec.k_fixed = g.k_fixed;
  spec.n_pairs = g.n_pairs;
  spec.epsilon = g.epsilon;
  spec.keep_even = !g.break_parity;
  return spec;
}

int cmd_gen(const GenOptions& g, std::uint64_t seed, std::ostream& out) {
  const GeneratorSpec spec = make_spec(g, seed);
  const StateDensity s = generate(spec);
  StateFile f;
  f.n_sites = spec.regions.n_sites();
  f.regions = spec.regions;
  f.matrix = s.rho();
  f.metadata = nlohmann::json{{"seed", seed}, {"generator", to_string(spec.kind)}};
  write_output(g.out, dump_state_file(f), out);
  return kExitOk;
}

int cmd_factorize(const std::string& in_path, const std::string& out_x, const std::string& out_y,
                  const Tolerances& tol, std::ostream& out) {
  const Loaded in = load(in_path);
  const Factorization f = factorize(in.state, in.file.regions, tol);
  auto block = [&](const Matrix& m, const char* name) {
    nlohmann::json j{{"version", 1},
                     {"n_sites", in.file.n_sites},
                     {"factor", name},
                     {"matrix", matrix_to_json(m)}};
    return j.dump() + "\n";
  };
  write_output(out_x, block(f.x, "x"), out);
  write_output(out_y, block(f.y, "y"), out);
  return kExitOk;
}

struct SweepOptions {
  std::string kind = "random";
  int count = 10;
  std::uint64_t seed0 = 0;
  bool seed0_given = false;
  int n = 3;
  std::string regions;
  std::string csv;
  int threads = 1;
};

int cmd_sweep(const SweepOptions& o, const GenOptions& g_base, const Tolerances& tol,
              std::ostream& out) {
  const std::uint64_t seed0 = o.seed0_given ? o.seed0 : default_seed();
  std::vector<std::string> rows(o.count);
  std::atomic<int> next{0};
  std::mutex err_mu;
  std::string first_error;
  auto worker = [&] {
    for (int i = next++; i < o.count; i = next++) {
      const std::uint64_t seed = seed0 + static_cast<std::uint64_t>(i);
      try {
        const auto t0 = Clock::now();
        GenOptions g = g_base;
        g.kind = o.kind;
        g.n = o.n;
        g.regions = o.regions;
        const GeneratorSpec spec = make_spec(g, seed);
        const StateDensity s = generate(spec);
        const TripletAnalysis t = analyze_triplet(s, spec.regions, tol);
        std::ostringstream row;
        row.precision(17);
        row << i << "," << seed << "," << t.ssa.gap << "," << t.ssa.saturated << "," << t.markov
            << "," << t.even << "," << t.a_in_C_residual << "," << t.parity_defect << ","
            << s.min_eig() << "," << since(t0);
        rows[i] = row.str();
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (first_error.empty()) first_error = "state " + std::to_string(i) + ": " + e.what();
      }
    }
  };
  const int threads = std::max(1, std::min(o.threads, o.count));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (!first_error.empty()) throw Error(ErrorKind::InvariantViolation, first_error);

  std::ostringstream csv;
  csv << "index,seed,gap,saturated,markov,even,a_in_c_residual,parity_defect,min_eig,seconds\n";
  for (const auto& r : rows) csv << r << "\n";
  write_output(o.csv, csv.str(), out);
  return kExitOk;
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::ParseError:
    case ErrorKind::InvalidRegions:
    case ErrorKind::DimensionTooLarge:
    case ErrorKind::RegionTooSmall:
      return kExitUsage;
    default:
      return kExitVerdict;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Markov triplet analysis of states on finite CAR chains", "fermarkov"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());

  Common common;

  int max_n = 5;
  std::string convention = "jordan-wigner";
  auto* selftest = app.add_subcommand("selftest", "check the exact algebra identities");
  selftest->add_option("--max-n", max_n, "largest chain length")->check(CLI::Range(1, 8));
  selftest->add_option("--convention", convention, "jordan-wigner or undressed (fault fixture)");

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a state file");
  gen_cmd->add_option("--kind", gen.kind,
                      "random, random_even, product_markov, block_markov or perturbed");
  gen_cmd->add_option("--n", gen.n, "number of sites")->check(CLI::Range(3, 10));
  gen_cmd->add_option("--regions", gen.regions, "e.g. A=0,1:B=2:C=3");
  gen_cmd->add_option("--seed", common.seed, "seed (default $FERMARKOV_SEED or 1)");
  gen_cmd->add_option("--out", gen.out, "output path, '-' for stdout");
  gen_cmd->add_option("--floor", gen.floor_fraction, "faithfulness floor as a fraction of 2^-n")
      ->check(CLI::Range(1e-12, 1.0));
  gen_cmd->add_option("--parity", gen.parity, "even_even or even_noneven");
  gen_cmd->add_option("--k-fixed", gen.k_fixed, "Theta-fixed blocks")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--n-pairs", gen.n_pairs, "Theta-swapped block pairs")
      ->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--epsilon", gen.epsilon, "perturbation weight")->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_flag("--break-parity", gen.break_parity, "perturb towards a non-even state");

  std::string in_path, out_path, format = "json";
  auto* analyze = app.add_subcommand("analyze", "SSA, Markov and factorization verdicts");
  analyze->add_option("--in", in_path, "state file")->required();
  analyze->add_option("--out", out_path, "output path, '-' for stdout");
  analyze->add_option("--format", format, "json or text");
  add_tolerances(analyze, common);

  std::string out_x, out_y;
  auto* fact = app.add_subcommand("factorize", "write the factors x and y of rho = x y");
  fact->add_option("--in", in_path, "state file")->required();
  fact->add_option("--out-x", out_x, "path for x")->required();
  fact->add_option("--out-y", out_y, "path for y")->required();
  add_tolerances(fact, common);

  auto* decompose = app.add_subcommand("decompose", "block decomposition of an even Markov state");
  decompose->add_option("--in", in_path, "state file")->required();
  decompose->add_option("--out", out_path, "output path, '-' for stdout");
  decompose->add_option("--format", format, "json or text");
  add_tolerances(decompose, common);

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "generate and analyze a batch of states");
  sweep_cmd->add_option("--kind", sweep.kind, "generator kind");
  sweep_cmd->add_option("--count", sweep.count, "number of states")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--seed0", sweep.seed0, "seed of the first state");
  sweep_cmd->add_option("--n", sweep.n, "number of sites")->check(CLI::Range(3, 10));
  sweep_cmd->add_option("--regions", sweep.regions, "e.g. A=0:B=1:C=2");
  sweep_cmd->add_option("--csv", sweep.csv, "output path, '-' for stdout");
  sweep_cmd->add_option("--threads", sweep.threads, "worker threads")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--k-fixed", gen.k_fixed, "Theta-fixed blocks");
  sweep_cmd->add_option("--n-pairs", gen.n_pairs, "Theta-swapped block pairs");
  sweep_cmd->add_option("--epsilon", gen.epsilon, "perturbation weight");
  sweep_cmd->add_option("--parity", gen.parity, "even_even or even_noneven");
  add_tolerances(sweep_cmd, common);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen_cmd->count("--seed")) common.seed_given = true;
    if (sweep_cmd->count("--seed0")) sweep.seed0_given = true;
    const Tolerances tol = common.tolerances();
    if (*selftest) return cmd_selftest(max_n, convention, out);
    if (*gen_cmd) return cmd_gen(gen, common.seed_given ? common.seed : default_seed(), out);
    if (*analyze) {
      const Format fmt = parse_format(format);
      const AnalysisDocument doc = analyze_document(load(in_path), tol, false);
      write_output(out_path, emit(doc, fmt), out);
      return kExitOk;
    }
    if (*fact) return cmd_factorize(in_path, out_x, out_y, tol, out);
    if (*decompose) {
      const Format fmt = parse_format(format);
      const Loaded in = load(in_path);
      AnalysisDocument doc = analyze_document(in, tol, true);
      if (!doc.triplet.even) throw Error(ErrorKind::NotEven, in_path + ": state is not even");
      if (!doc.triplet.markov) throw Error(ErrorKind::NotMarkov, in_path + ": not a Markov triplet");
      write_output(out_path, emit(doc, fmt), out);
      return kExitOk;
    }
    if (*sweep_cmd) return cmd_sweep(sweep, gen, tol, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitVerdict;
  }
  return kExitUsage;
}

}  // namespace fermarkov
