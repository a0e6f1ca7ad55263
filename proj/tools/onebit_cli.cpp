// Command-line front end: build-gmra, run, validate-gmra, width.

#include "onebit/config.hpp"
#include "onebit/experiment.hpp"
#include "onebit/gmra.hpp"
#include "onebit/manifold.hpp"
#include "onebit/rng.hpp"
#include "onebit/width.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

using namespace onebit;

struct CloudOptions {
  std::string input;
  std::string manifold = "sphere:2";
  Index n = 20000;
  Index ambient = 20;
  std::uint64_t seed = 1;
  double margin = 0.05;
};

void add_cloud_options(CLI::App* cmd, CloudOptions& o) {
  auto* input = cmd->add_option("--input", o.input, "Point file, one point per line (comma or space separated)");
  cmd->add_option("--manifold", o.manifold, "sphere:<d>, circle or flat_disk:<d>")->excludes(input);
  cmd->add_option("--n", o.n, "Number of sampled points")->check(CLI::PositiveNumber);
  cmd->add_option("--N", o.ambient, "Ambient dimension")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "Sampling seed");
  cmd->add_option("--margin", o.margin, "Radius margin mu")->check(CLI::Range(0.0, 0.999));
}

PointMatrix read_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream ls(line);
    std::vector<double> row;
    for (double v; ls >> v;) row.push_back(v);
    if (!ls.eof()) throw FormatError(path + ": non-numeric entry");
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size()) throw FormatError(path + ": ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError(path + ": no points");
  PointMatrix pts(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < pts.rows(); ++i)
    for (Index c = 0; c < pts.cols(); ++c) pts(i, c) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
  return pts;
}

PointMatrix load_cloud(const CloudOptions& o) {
  if (!o.input.empty()) return read_points(o.input);
  return sample_manifold(parse_manifold(o.manifold), o.n, o.ambient, o.seed, o.margin);
}

int build_gmra_cmd(const CloudOptions& o, int d, int jmax, const std::string& out) {
  PointMatrix pts = load_cloud(o);
  if (!o.input.empty()) pts = rescale_to_ball(pts, o.margin);
  const Gmra gmra = build_gmra(pts, d, jmax, o.seed);
  save_gmra(gmra, out);
  std::cout << "levels " << gmra.j_min() << ".." << gmra.j_max() << ", " << gmra.level(gmra.j_max()).size()
            << " cells at the finest level, written to " << out << "\n";
  return 0;
}

int run_cmd(const std::string& config_path, const std::string& out, int threads) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (!out.empty()) cfg.output = out;
  if (cfg.output.empty()) {
    std::cerr << "error: no output path (use --out or the 'output' key)\n";
    return kExitUsage;
  }
  std::size_t failures = 0;
  const auto rows = run_experiment(cfg, threads, &std::cerr, &failures);
  emit_csv(rows, cfg.output);
  std::cout << rows.size() << " rows written to " << cfg.output.string() << "\n";
  return failures ? kExitRuntime : 0;
}

int validate_cmd(const std::string& gmra_path, const CloudOptions& o) {
  const Gmra gmra = load_gmra(gmra_path);
  const PointMatrix test = load_cloud(o);
  require_dims(test.cols() == gmra.ambient_dim(), "test cloud dimension differs from the GMRA");
  const GmraValidationReport report = validate_gmra(gmra, test);
  std::cout << "j,count,separation_ratio,count_ratio,parent_ratio,tube_constant,tube_fraction,mean_error,max_error,"
               "violations\n";
  std::cout << std::setprecision(6);
  for (const LevelValidation& lv : report.levels) {
    std::string flags;
    if (lv.count_violation) flags += "count ";
    if (lv.separation_violation) flags += "separation ";
    if (lv.parent_violation) flags += "parent ";
    if (!flags.empty()) flags.pop_back();
    std::cout << lv.j << "," << lv.count << "," << lv.separation_ratio << "," << lv.count_ratio << ","
              << lv.parent_ratio << "," << lv.tube_constant << "," << lv.tube_fraction << "," << lv.mean_error
              << "," << lv.max_error << "," << (flags.empty() ? "none" : flags) << "\n";
  }
  std::cout << "first reliable level: " << report.first_reliable_level << "\n";
  return 0;
}

int width_cmd(const CloudOptions& o, Index draws, std::uint64_t seed) {
  const PointMatrix pts = load_cloud(o);
  const WidthEstimate w = estimate_gaussian_width(pts, draws, seed);
  std::cout << std::setprecision(8) << "width " << w.width << "\nstd_error " << w.std_error << "\nradius "
            << w.radius << "\ndraws " << w.draws << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"One-bit noise-shaped recovery on GMRA-approximated manifolds"};
  app.require_subcommand(1);

  CloudOptions build_opts;
  int build_d = 2;
  int build_jmax = 8;
  std::string build_out;
  auto* build = app.add_subcommand("build-gmra", "Build a GMRA from a point file or a sampled manifold");
  add_cloud_options(build, build_opts);
  build->add_option("--d", build_d, "Intrinsic dimension")->check(CLI::PositiveNumber);
  build->add_option("--jmax", build_jmax, "Finest level")->check(CLI::NonNegativeNumber);
  build->add_option("--out", build_out, "Output GMRA file")->required();

  std::string run_config, run_out;
  int run_threads = 1;
  auto* run = app.add_subcommand("run", "Run an experiment sweep and write CSV");
  run->add_option("--config", run_config, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", run_out, "CSV output path (overrides 'output')");
  run->add_option("--threads", run_threads, "Worker threads")->check(CLI::PositiveNumber);

  std::string validate_gmra_path;
  CloudOptions validate_opts;
  validate_opts.n = 1000;
  validate_opts.seed = 2;
  auto* validate = app.add_subcommand("validate-gmra", "Report GMRA diagnostics against a test cloud");
  validate->add_option("--gmra", validate_gmra_path, "GMRA file")->required()->check(CLI::ExistingFile);
  add_cloud_options(validate, validate_opts);

  CloudOptions width_opts;
  Index width_draws = 2000;
  std::uint64_t width_seed = 7;
  auto* width = app.add_subcommand("width", "Monte Carlo Gaussian width of a point cloud");
  add_cloud_options(width, width_opts);
  width->add_option("--draws", width_draws, "Gaussian draws")->check(CLI::PositiveNumber);
  width->add_option("--draw-seed", width_seed, "Seed for the Gaussian draws");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*build) return build_gmra_cmd(build_opts, build_d, build_jmax, build_out);
    if (*run) return run_cmd(run_config, run_out, run_threads);
    if (*validate) return validate_cmd(validate_gmra_path, validate_opts);
    if (*width) return width_cmd(width_opts, width_draws, width_seed);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
