#include "onebit/config.hpp"
#include "onebit/experiment.hpp"
#include "onebit/manifold.hpp"
#include "onebit/width.hpp"

#include "support.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace onebit;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("onebit_harness_" + name);
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ONEBIT_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kSmallConfig = R"(# small sweep
ambient_dim = 10
manifold = sphere:2
n_train = 3000
n_test = 12
levels = 3,5
schemes = sd:2, msq, beta:1.5
p = 4
lambdas = 9,17
ensemble = gaussian
seed = 99
margin = 0.05
)";

}  // namespace

TEST_CASE("manifold samplers") {
  SUBCASE("sphere norms equal 1 - margin") {
    const PointMatrix p = sample_manifold(parse_manifold("sphere:2"), 20000, 20, 1, 0.05);
    CHECK((p.rowwise().norm().array() - 0.95).abs().maxCoeff() <= 1e-12);
  }
  SUBCASE("circle is seed-deterministic") {
    const PointMatrix a = sample_manifold(parse_manifold("circle"), 4, 3, 7, 0.05);
    CHECK(a == sample_manifold(parse_manifold("circle"), 4, 3, 7, 0.05));
    CHECK(a != sample_manifold(parse_manifold("circle"), 4, 3, 8, 0.05));
  }
  SUBCASE("flat disk lies on a 2-plane") {
    const Matrix e = random_embedding(parse_manifold("flat_disk:2"), 6, 3);
    CHECK(onebit::testing::max_abs(e.transpose() * e - Matrix::Identity(2, 2)) <= 1e-12);
    const PointMatrix p = sample_manifold(parse_manifold("flat_disk:2"), 500, e, 4, 0.05);
    const Matrix residual = p.transpose() - e * (e.transpose() * p.transpose());
    CHECK(onebit::testing::max_abs(residual) <= 1e-12);
    CHECK(p.rowwise().norm().maxCoeff() <= 0.95 + 1e-12);
  }
  SUBCASE("parsing") {
    CHECK(parse_manifold("sphere:3") == ManifoldSpec{ManifoldKind::Sphere, 3});
    CHECK(parse_manifold("circle").chart_dim() == 2);
    CHECK(to_string(parse_manifold("flat_disk:2")) == "flat_disk:2");
    CHECK_THROWS_AS(parse_manifold("torus"), InvalidArgument);
    CHECK_THROWS_AS(parse_manifold("sphere:x"), InvalidArgument);
    CHECK_THROWS_AS(sample_manifold(parse_manifold("sphere:3"), 10, 3, 1, 0.05), DimensionError);
  }
}

TEST_CASE("gaussian width") {
  SUBCASE("a single point has width zero") {
    PointMatrix p(1, 5);
    p << 0.3, -0.2, 0.5, 0.1, 0.0;
    const auto w = estimate_gaussian_width(p, 4000, 1);
    CHECK(std::abs(w.width) <= 3.0 * w.std_error);
    CHECK(w.radius == doctest::Approx(p.norm()));
  }
  SUBCASE("{0, e1} gives the half-normal mean") {
    PointMatrix p = PointMatrix::Zero(2, 4);
    p(1, 0) = 1.0;
    const auto w = estimate_gaussian_width(p, 20000, 2);
    CHECK(std::abs(w.width - 1.0 / std::sqrt(2.0 * std::numbers::pi)) <= 3.0 * w.std_error);
  }
  SUBCASE("support function of S^19 gives the chi mean") {
    const double chi20 = std::sqrt(2.0) * std::exp(std::lgamma(10.5) - std::lgamma(10.0));
    CHECK(chi20 == doctest::Approx(4.4166).epsilon(1e-4));
    const auto w = estimate_gaussian_width([](const Vector& g) { return g.norm(); }, 20, 1.0, 20000, 3);
    CHECK(std::abs(w.width - chi20) <= 3.0 * w.std_error);
  }
  SUBCASE("sphere training cloud matches the embedded 2-sphere") {
    // sup over a radius-0.95 2-sphere inside R^20 is 0.95 times a chi_3 variable.
    const PointMatrix p = sample_manifold(parse_manifold("sphere:2"), 20000, 20, 4, 0.05);
    const auto w = estimate_gaussian_width(p, 2000, 5);
    const double expected = 0.95 * 2.0 * std::sqrt(2.0 / std::numbers::pi);
    CHECK(std::abs(w.width - expected) <= 3.0 * w.std_error + 0.005);
  }
  CHECK_THROWS_AS(estimate_gaussian_width(PointMatrix(0, 3), 10, 1), InvalidArgument);
}

TEST_CASE("config") {
  const ExperimentConfig cfg = parse_config(kSmallConfig);
  CHECK(cfg.ambient_dim == 10);
  CHECK(cfg.levels == std::vector<int>{3, 5});
  CHECK(cfg.effective_jmax() == 5);
  REQUIRE(cfg.schemes.size() == 3);
  CHECK(cfg.schemes[0] == QuantizerSpec{SigmaDelta{2}});
  CHECK(cfg.schemes[1] == QuantizerSpec{Msq{}});
  CHECK(cfg.schemes[2] == QuantizerSpec{Beta{1.5, 4}});
  CHECK(cfg.seed == 99);
  CHECK_FALSE(cfg.record_timing);

  SUBCASE("round trip") { CHECK(format_config(parse_config(format_config(cfg))) == format_config(cfg)); }
  SUBCASE("defaults describe the figure sweep") {
    const ExperimentConfig d = parse_config("");
    CHECK(d.ambient_dim == 20);
    CHECK(d.n_train == 20000);
    CHECK(d.p == 10);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(parse_config("colour = blue"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("p = 3\np = 4"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("p"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("p = ten"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("schemes = sd:2\nlambdas = 8"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("schemes = beta:2.5"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("ensemble = pce"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("n_test = 0"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("record_timing = maybe"), InvalidArgument);
    CHECK_THROWS_AS(load_config(temp_path("missing.cfg")), IoError);
  }
  SUBCASE("scheme syntax") {
    CHECK(parse_scheme("sd:4:greedy", 10) == QuantizerSpec{SigmaDelta{4, SigmaDeltaRule::Greedy}});
    CHECK(format_scheme(SigmaDelta{3, SigmaDeltaRule::Filtered}) == "sd:3:filtered");
    CHECK_THROWS_AS(parse_scheme("sd:2:fast", 10), InvalidArgument);
    CHECK_THROWS_AS(parse_scheme("pcm", 10), InvalidArgument);
  }
}

TEST_CASE("experiment") {
  ExperimentConfig cfg = parse_config(kSmallConfig);
  const ExperimentData data = prepare_experiment(cfg);

  SUBCASE("one scheme, one level, one lambda gives one row") {
    ExperimentConfig one = cfg;
    one.schemes = {SigmaDelta{2}};
    one.levels = {5};
    one.lambdas = {17};
    const auto rows = run_experiment(one, data);
    REQUIRE(rows.size() == 1);
    const ResultRow& r = rows[0];
    CHECK(r.scheme == "sigma_delta");
    CHECK(r.r_or_beta == 2.0);
    CHECK(r.m == 68);
    CHECK(r.errors.size() == 12);
    CHECK(r.wall_ms == 0.0);
    for (double e : r.errors) CHECK((std::isfinite(e) && e >= 0.0));
    CHECK(r.max_rel_err >= r.median_rel_err);
    CHECK(r.median_rel_err >= 0.0);
  }
  SUBCASE("full sweep is deterministic and thread-count independent") {
    const auto a = run_experiment(cfg, data, 1);
    const auto b = run_experiment(cfg, data, 3);
    CHECK(a.size() == 12);
    CHECK(format_csv(a) == format_csv(b));
    CHECK(format_csv(a) == format_csv(run_experiment(cfg, 1)));
    for (std::size_t i = 1; i < a.size(); ++i)
      CHECK(std::tie(a[i - 1].scheme, a[i - 1].r_or_beta, a[i - 1].j, a[i - 1].lambda) <
            std::tie(a[i].scheme, a[i].r_or_beta, a[i].j, a[i].lambda));
  }
  SUBCASE("failed sweep points are skipped and reported") {
    ExperimentConfig bad = cfg;
    bad.schemes = {SigmaDelta{2}};
    bad.levels = {3};
    std::ostringstream log;
    std::size_t failures = 0;
    // Level 40 does not exist; validate() is bypassed by running on prepared data.
    bad.levels = {3, 40};
    const auto rows = run_experiment(bad, data, 1, &log, &failures);
    CHECK(rows.size() == 2);
    CHECK(failures == 2);
    CHECK(log.str().find("failed") != std::string::npos);
  }
  SUBCASE("timing is recorded only on request") {
    ExperimentConfig timed = cfg;
    timed.schemes = {Msq{}};
    timed.levels = {3};
    timed.lambdas = {9};
    timed.record_timing = true;
    CHECK(run_experiment(timed, data)[0].wall_ms > 0.0);
  }
}

TEST_CASE("csv output") {
  const auto path = temp_path("rows.csv");
  emit_csv({}, path);
  CHECK(read_file(path) == std::string(kCsvHeader) + "\n");

  ResultRow r;
  r.scheme = "sigma_delta";
  r.r_or_beta = 2;
  r.j = 6;
  r.p = 10;
  r.lambda = 5;
  r.m = 50;
  r.ensemble = "gaussian";
  r.seed = 42;
  r.mean_rel_err = 0.5;
  r.median_rel_err = 0.25;
  r.max_rel_err = 1.0;
  emit_csv({r}, path);
  const std::string once = read_file(path);
  CHECK(once == std::string(kCsvHeader) + "\nsigma_delta,2,6,10,5,50,gaussian,42,0.5,0.25,1,0\n");
  emit_csv({r}, path);
  CHECK(read_file(path) == once);
  CHECK_THROWS_AS(emit_csv({r}, std::filesystem::path("/nonexistent_dir/x.csv")), IoError);
  std::filesystem::remove(path);
}

TEST_CASE("command line") {
  const auto cfg_path = temp_path("small.cfg");
  const auto csv = temp_path("small.csv");
  const auto gmra = temp_path("small.gmra");
  write_file(cfg_path, kSmallConfig);

  CHECK(run_cli("") == 1);
  CHECK(run_cli("frobnicate") == 1);
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("run --config " + cfg_path.string()) == 1);  // no output path
  CHECK(run_cli("run --config " + cfg_path.string() + " --out " + csv.string()) == 0);
  CHECK(read_file(csv) == format_csv(run_experiment(parse_config(kSmallConfig))));

  write_file(temp_path("bad.cfg"), "p = 3\nlambdas = 8\nschemes = sd:2\n");
  CHECK(run_cli("run --config " + temp_path("bad.cfg").string() + " --out " + csv.string()) == 1);

  CHECK(run_cli("build-gmra --manifold sphere:2 --n 3000 --N 10 --d 2 --jmax 5 --seed 3 --out " + gmra.string()) == 0);
  CHECK(load_gmra(gmra).j_max() == 5);
  CHECK(run_cli("validate-gmra --gmra " + gmra.string() + " --manifold sphere:2 --n 200 --N 10") == 0);
  CHECK(run_cli("validate-gmra --gmra " + gmra.string() + " --manifold sphere:2 --n 200 --N 12") == 2);
  CHECK(run_cli("width --manifold sphere:2 --n 500 --N 10 --draws 100") == 0);
  CHECK(run_cli("build-gmra --manifold sphere:2 --n 10 --N 10 --d 2 --jmax 5 --out " + gmra.string()) == 2);

  write_file(gmra, "GMRA");
  CHECK(run_cli("validate-gmra --gmra " + gmra.string()) == 2);

  const auto pts = temp_path("points.txt");
  write_file(pts, "1 0 0\n0 1 0\n0 0 1\n-1 0 0\n0 -1 0\n0 0 -1\n0.5,0.5,0\n-0.5,0.5,0\n0.5,-0.5,0\n");
  CHECK(run_cli("build-gmra --input " + pts.string() + " --d 1 --jmax 0 --out " + gmra.string()) == 0);
  CHECK(run_cli("width --input " + pts.string()) == 0);

  for (const auto& p : {cfg_path, csv, gmra, pts, temp_path("bad.cfg")}) std::filesystem::remove(p);
}
