// spheremix: build vMF mixture approximations of densities on S^m and inspect
// the pieces (kernel spectra, samples, densities, partitions).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spheremix/approximator.hpp"
#include "spheremix/errors.hpp"
#include "spheremix/io.hpp"
#include "spheremix/special_functions.hpp"
#include "spheremix/spectral.hpp"
#include "spheremix/targets.hpp"
#include "spheremix/vmf.hpp"

namespace fs = std::filesystem;
using namespace spheremix;

namespace {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kBudget = 3,
  kInvalidDensity = 4,
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Manifest {
 public:
  explicit Manifest(std::string command) : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

  Json& params() { return params_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void add_output(const fs::path& p) { outputs_.push_back(p.string()); }

  void write(const fs::path& dir) {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const fs::path path = dir / "manifest.json";
    Json j{{"command", command_},
           {"params", params_},
           {"seed", seed_ ? Json(*seed_) : Json(nullptr)},
           {"version", SPHEREMIX_VERSION},
           {"outputs", outputs_},
           {"wall_time_seconds", wall}};
    write_text_file(path, j.dump(2) + "\n");
  }

 private:
  std::string command_;
  std::chrono::steady_clock::time_point start_;
  Json params_ = Json::object();
  std::optional<std::uint64_t> seed_;
  std::vector<std::string> outputs_;
};

unsigned resolve_thread_flag(int flag) {
  if (flag >= 0) return static_cast<unsigned>(flag);
  if (const char* env = std::getenv("SPHEREMIX_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("SPHEREMIX_THREADS must be a non-negative integer, got '") + env + "'");
  }
  return 0;
}

PartitionMode parse_mode(const std::string& s) {
  if (s == "uniform") return PartitionMode::kUniform;
  if (s == "balanced") return PartitionMode::kMeasureBalanced;
  if (s == "graded") return PartitionMode::kGraded;
  throw UsageError("unknown partition mode '" + s + "'");
}

void write_output(Manifest& manifest, const fs::path& path, const std::string& text) {
  write_text_file(path, text);
  manifest.add_output(path);
}

VmfMixture load_mixture(const std::string& path) {
  return mixture_from_json(read_json_file(path));
}

bool is_file_target(const std::string& s) {
  return fs::path(s).extension() == ".json" || fs::exists(s);
}

double max_on_grid(const TargetDensity& f) {
  const SupGrid grid = sup_grid(f.m, f.m == 1 ? 8192 : 20000);
  double best = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) best = std::max(best, f(grid.point(i)));
  return best;
}

struct ApproximateArgs {
  std::string target;
  int m = 2;
  double delta = 0.0;
  bool relative = false;
  double initial_n = 4.0;
  double n_growth = 2.0;
  double max_n = 512.0;
  std::vector<int> levels;
  double refinement = std::sqrt(2.0);
  std::size_t max_blocks = 20'000;
  int sup_resolution = 0;
  int max_stages = 200;
  std::string mode = "graded";
  std::string out_dir = ".";
};

int run_approximate(const ApproximateArgs& a, unsigned threads, CLI::App& cmd) {
  Manifest manifest("approximate");
  TargetDensity target = [&] {
    if (!is_file_target(a.target)) return standard_target(a.target, a.m);
    const Json j = read_json_file(a.target);
    std::optional<VmfMixture> loaded;
    try {
      loaded.emplace(mixture_from_json(j));
    } catch (const DomainError& e) {
      throw NonDensity(a.target + ": " + e.what());
    }
    const VmfMixture& mix = *loaded;
    if (cmd.count("--m") > 0 && mix.m() != a.m) {
      throw UsageError("--m " + std::to_string(a.m) + " does not match the mixture file (m = " +
                       std::to_string(mix.m()) + ")");
    }
    return mixture_target(mix, fs::path(a.target).stem().string());
  }();

  ApproximationConfig config;
  config.delta = a.relative ? a.delta * max_on_grid(target) : a.delta;
  config.initial_n = a.initial_n;
  config.n_growth = a.n_growth;
  config.max_n = a.max_n;
  config.initial_levels = a.levels;
  config.refinement = a.refinement;
  config.max_blocks = a.max_blocks;
  config.sup_resolution = a.sup_resolution;
  config.max_stages = a.max_stages;
  config.partition_mode = parse_mode(a.mode);
  config.threads = threads;
  try {
    config.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }

  manifest.params() = {{"target", a.target},
                       {"m", target.m},
                       {"delta", config.delta},
                       {"delta_relative", a.relative},
                       {"initial_n", config.initial_n},
                       {"n_growth", config.n_growth},
                       {"max_n", config.max_n},
                       {"levels", config.initial_levels},
                       {"refinement", config.refinement},
                       {"max_blocks", config.max_blocks},
                       {"sup_resolution", config.sup_resolution},
                       {"max_stages", config.max_stages},
                       {"partition_mode", a.mode},
                       {"threads", threads}};

  const ApproximationReport report = approximate(target, config);
  const fs::path dir(a.out_dir);
  write_output(manifest, dir / "report.json", report_to_json(report).dump(2) + "\n");
  write_output(manifest, dir / "mixture.json", mixture_to_json(report.mixture).dump(2) + "\n");
  write_output(manifest, dir / "history.csv", history_csv(report.history));
  manifest.write(dir);

  std::cout << (report.converged ? "converged" : "budget exhausted") << ": n=" << report.n
            << " N=" << report.mixture.size() << " sup_error=" << report.sup_error << " delta=" << config.delta
            << "\n";
  return report.converged ? kOk : kBudget;
}

struct DiagnoseArgs {
  int m = 2;
  std::vector<double> ns;
  std::vector<double> rhos{0.0};
  int kmax = 8;
  std::string out_dir = ".";
};

int run_diagnose(const DiagnoseArgs& a) {
  if (a.ns.empty()) throw UsageError("--n needs at least one value");
  Manifest manifest("diagnose");
  manifest.params() = {{"m", a.m}, {"n", a.ns}, {"rho", a.rhos}, {"kmax", a.kmax}};
  const Lemma1Report report = lemma1_report(a.m, a.ns, a.rhos, a.kmax);
  const fs::path dir(a.out_dir);
  write_output(manifest, dir / "lemma1.csv", lemma1_csv(report));
  manifest.write(dir);
  for (const auto& v : report.violations) std::cerr << "warning: " << v << "\n";
  std::cout << report.rows.size() << " kernels, " << report.violations.size() << " violations\n";
  return kOk;
}

struct SampleArgs {
  std::string mixture;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

int run_sample(const SampleArgs& a) {
  Manifest manifest("sample");
  manifest.params() = {{"mixture", a.mixture}, {"count", a.count}};
  manifest.set_seed(a.seed);
  const VmfMixture mix = load_mixture(a.mixture);
  const auto points = sample_mixture(mix, a.count, a.seed);
  const fs::path dir(a.out_dir);
  write_output(manifest, dir / "samples.csv", points_csv(mix.m(), points));
  manifest.write(dir);
  return kOk;
}

struct EvalArgs {
  std::string mixture;
  std::string points;
  std::string out_dir = ".";
};

int run_eval(const EvalArgs& a) {
  Manifest manifest("eval");
  manifest.params() = {{"mixture", a.mixture}, {"points", a.points}};
  const VmfMixture mix = load_mixture(a.mixture);
  std::ifstream in(a.points);
  if (!in) throw UsageError("cannot open " + a.points);
  const auto rows = parse_points_csv(in);
  const auto d = static_cast<std::size_t>(mix.m()) + 1;

  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < d; ++i) os << 'x' << i << ',';
  os << "density\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& x = rows[r];
    if (x.size() != d) {
      throw FormatError("points row " + std::to_string(r + 1) + " has " + std::to_string(x.size()) +
                        " coordinates, expected " + std::to_string(d));
    }
    double norm2 = 0.0;
    for (double c : x) norm2 += c * c;
    if (std::abs(norm2 - 1.0) > 1e-6) throw FormatError("points row " + std::to_string(r + 1) + " is not a unit vector");
    for (double c : x) os << c << ',';
    os << mixture_density(mix, x) << '\n';
  }
  const fs::path dir(a.out_dir);
  write_output(manifest, dir / "densities.csv", os.str());
  manifest.write(dir);
  return kOk;
}

struct PartitionArgs {
  int m = 2;
  std::vector<int> levels;
  std::string mode = "uniform";
  std::size_t max_blocks = 4'000'000;
  std::string out_dir = ".";
};

int run_partition(const PartitionArgs& a) {
  Manifest manifest("partition");
  std::vector<int> levels = a.levels;
  if (levels.size() == 1) levels.assign(static_cast<std::size_t>(a.m), levels.front());
  manifest.params() = {{"m", a.m}, {"levels", levels}, {"mode", a.mode}, {"max_blocks", a.max_blocks}};
  PartitionOptions opts;
  opts.mode = parse_mode(a.mode);
  opts.max_blocks = a.max_blocks;
  SphericalPartition p;
  try {
    p = build_partition(a.m, levels, opts);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  const fs::path dir(a.out_dir);
  write_output(manifest, dir / "partition.json", partition_to_json(p).dump() + "\n");
  manifest.write(dir);

  const double total = p.total_measure();
  const double omega = surface_measure(a.m);
  const double rel = std::abs(total - omega) / omega;
  std::cout.precision(17);
  std::cout << "blocks=" << p.size() << " measure_sum=" << total << " omega_m=" << omega << " rel_error=" << rel
            << (rel <= 1e-10 ? " ok" : " MISMATCH") << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate densities on the sphere S^m by von Mises-Fisher mixtures"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(SPHEREMIX_VERSION));
  int thread_flag = -1;
  app.add_option("--threads", thread_flag, "Worker threads, 0 = auto (default: $SPHEREMIX_THREADS or 0)")
      ->check(CLI::NonNegativeNumber);

  ApproximateArgs aa;
  auto* approx = app.add_subcommand("approximate", "Build a mixture within sup error delta of a target");
  approx->add_option("--target", aa.target, "Built-in target name or a mixture JSON file")->required();
  approx->add_option("--m", aa.m, "Sphere dimension for built-in targets")->check(CLI::PositiveNumber);
  approx->add_option("--delta", aa.delta, "Target sup error")->required()->check(CLI::PositiveNumber);
  approx->add_flag("--relative", aa.relative, "Interpret delta as a fraction of max f");
  approx->add_option("--initial-n", aa.initial_n, "First kernel concentration")->check(CLI::PositiveNumber);
  approx->add_option("--n-growth", aa.n_growth, "Concentration growth factor");
  approx->add_option("--max-n", aa.max_n, "Largest concentration")->check(CLI::PositiveNumber);
  approx->add_option("--levels", aa.levels, "Initial per-angle subdivision counts")->delimiter(',');
  approx->add_option("--refinement", aa.refinement, "Per-angle level growth per refinement step");
  approx->add_option("--max-blocks", aa.max_blocks, "Largest partition")->check(CLI::PositiveNumber);
  approx->add_option("--sup-resolution", aa.sup_resolution, "Sup-error grid size")->check(CLI::NonNegativeNumber);
  approx->add_option("--max-stages", aa.max_stages, "Stage budget")->check(CLI::PositiveNumber);
  approx->add_option("--partition-mode", aa.mode, "uniform, balanced or graded")
      ->check(CLI::IsMember({"uniform", "balanced", "graded"}));
  approx->add_option("--out-dir", aa.out_dir, "Output directory");

  DiagnoseArgs da;
  auto* diagnose = app.add_subcommand("diagnose", "Kernel spectrum and condition-2 tails for K_n");
  diagnose->add_option("--m", da.m, "Sphere dimension")->check(CLI::PositiveNumber);
  diagnose->add_option("--n", da.ns, "Concentrations, comma separated")->delimiter(',')->required();
  diagnose->add_option("--rho", da.rhos, "Tail thresholds in (-1, 1), comma separated")
      ->delimiter(',')
      ->check(CLI::Range(-1.0, 1.0));
  diagnose->add_option("--kmax", da.kmax, "Highest harmonic degree")->check(CLI::NonNegativeNumber);
  diagnose->add_option("--out-dir", da.out_dir, "Output directory");

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Draw points from a mixture");
  sample->add_option("--mixture", sa.mixture, "Mixture JSON file")->required();
  sample->add_option("--count", sa.count, "Number of points")->required();
  sample->add_option("--seed", sa.seed, "Random seed");
  sample->add_option("--out-dir", sa.out_dir, "Output directory");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Evaluate a mixture density at points");
  eval->add_option("--mixture", ea.mixture, "Mixture JSON file")->required();
  eval->add_option("--points", ea.points, "CSV of unit vectors")->required();
  eval->add_option("--out-dir", ea.out_dir, "Output directory");

  PartitionArgs pa;
  auto* partition = app.add_subcommand("partition", "Write a spherical-coordinate partition");
  partition->add_option("--m", pa.m, "Sphere dimension")->check(CLI::PositiveNumber);
  partition->add_option("--levels", pa.levels, "Per-angle subdivision counts (one value applies to all)")
      ->delimiter(',')
      ->required();
  partition->add_option("--mode", pa.mode, "uniform, balanced or graded")
      ->check(CLI::IsMember({"uniform", "balanced", "graded"}));
  partition->add_option("--max-blocks", pa.max_blocks, "Resource cap on the block count");
  partition->add_option("--out-dir", pa.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const unsigned threads = resolve_thread_flag(thread_flag);
    if (*approx) return run_approximate(aa, threads, *approx);
    if (*diagnose) return run_diagnose(da);
    if (*sample) return run_sample(sa);
    if (*eval) return run_eval(ea);
    if (*partition) return run_partition(pa);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  } catch (const NonDensity& e) {
    std::cerr << "error: invalid density: " << e.what() << "\n";
    return kInvalidDensity;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ResourceError& e) {
    std::cerr << "error: resource cap: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kUsage;
}
