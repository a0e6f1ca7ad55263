#include "onebit/experiment.hpp"

#include "onebit/condenser.hpp"
#include "onebit/recovery.hpp"
#include "onebit/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace onebit {

namespace {

std::uint64_t stream(const ExperimentConfig& cfg, SeedStream s) {
  return derive_seed(cfg.seed, {static_cast<std::uint64_t>(s)});
}

struct Task {
  std::size_t scheme = 0;
  int j = 0;
  Index lambda = 0;
};

std::string scheme_name(const QuantizerSpec& spec) {
  if (std::holds_alternative<Msq>(spec)) return "msq";
  if (std::holds_alternative<SigmaDelta>(spec)) return "sigma_delta";
  return "beta";
}

double scheme_parameter(const QuantizerSpec& spec) {
  if (const auto* sd = std::get_if<SigmaDelta>(&spec)) return sd->order;
  if (const auto* b = std::get_if<Beta>(&spec)) return b->beta;
  return 0.0;
}

ResultRow run_point(const ExperimentConfig& cfg, const ExperimentData& data, const Task& task,
                    CodebookCache& cache) {
  const auto start = std::chrono::steady_clock::now();
  const QuantizerSpec& spec = cfg.schemes[task.scheme];
  const Index m = cfg.p * task.lambda;
  // One draw per (scheme, λ), shared by every level and test point.
  const std::uint64_t ens_seed =
      derive_seed(stream(cfg, SeedStream::Ensemble), {task.scheme, static_cast<std::uint64_t>(task.lambda)});
  const Ensemble ens = Ensemble::sample(cfg.ensemble, m, cfg.ambient_dim, ens_seed);

  ResultRow row;
  row.scheme = scheme_name(spec);
  row.r_or_beta = scheme_parameter(spec);
  row.j = task.j;
  row.p = cfg.p;
  row.lambda = task.lambda;
  row.m = m;
  row.ensemble = to_string(cfg.ensemble);
  row.seed = ens_seed;

  const bool msq = std::holds_alternative<Msq>(spec);
  std::optional<Condenser> cond;
  if (!msq) cond = Condenser::for_scheme(spec, m, cfg.p);
  const Matrix y = measure_columns(ens, data.test.transpose());
  row.errors.resize(static_cast<std::size_t>(data.test.rows()));
  for (Index t = 0; t < data.test.rows(); ++t) {
    const Vector q = quantize_bits(spec, y.col(t));
    const RecoveryResult rec = msq ? reconstruct_msq_baseline(data.gmra, task.j, ens, q, &cache)
                                   : reconstruct(data.gmra, task.j, ens, spec, *cond, q, &cache);
    const Vector x = data.test.row(t).transpose();
    row.errors[static_cast<std::size_t>(t)] = (rec.x_sharp - x).norm() / x.norm();
  }

  std::vector<double> sorted = row.errors;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  row.mean_rel_err = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
  row.median_rel_err = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  row.max_rel_err = sorted.back();
  if (cfg.record_timing)
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

bool row_less(const ResultRow& a, const ResultRow& b) {
  return std::tie(a.scheme, a.r_or_beta, a.j, a.lambda) < std::tie(b.scheme, b.r_or_beta, b.j, b.lambda);
}

}  // namespace

ExperimentData prepare_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentData data;
  const Matrix embedding = random_embedding(cfg.manifold, cfg.ambient_dim, stream(cfg, SeedStream::Embedding));
  data.train = sample_manifold(cfg.manifold, cfg.n_train, embedding, stream(cfg, SeedStream::Train), cfg.margin);
  data.test = sample_manifold(cfg.manifold, cfg.n_test, embedding, stream(cfg, SeedStream::Test), cfg.margin);
  if (!cfg.gmra_file.empty()) {
    data.gmra = load_gmra(cfg.gmra_file);
    if (data.gmra.ambient_dim() != cfg.ambient_dim)
      throw DimensionError("gmra file ambient dimension differs from the config");
  } else {
    data.gmra = build_gmra(data.train, cfg.manifold.dim, cfg.effective_jmax(), stream(cfg, SeedStream::Gmra));
  }
  for (int j : cfg.levels)
    if (!data.gmra.has_level(j)) throw InvalidArgument("GMRA has no level " + std::to_string(j));
  return data;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, const ExperimentData& data, int threads,
                                      std::ostream* log, std::size_t* failures) {
  std::vector<Task> tasks;
  for (std::size_t s = 0; s < cfg.schemes.size(); ++s)
    for (int j : cfg.levels)
      for (Index lam : cfg.lambdas) tasks.push_back({s, j, lam});

  std::vector<std::optional<ResultRow>> results(tasks.size());
  std::vector<std::string> errors(tasks.size());
  CodebookCache cache;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) {
      try {
        results[i] = run_point(cfg, data, tasks[i], cache);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(threads, static_cast<int>(tasks.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<ResultRow> rows;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (results[i]) {
      rows.push_back(std::move(*results[i]));
      continue;
    }
    ++failed;
    if (log)
      *log << "sweep point " << describe(cfg.schemes[tasks[i].scheme]) << " j=" << tasks[i].j
           << " lambda=" << tasks[i].lambda << " failed: " << errors[i] << "\n";
  }
  if (failures) *failures = failed;
  std::stable_sort(rows.begin(), rows.end(), row_less);
  return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, int threads, std::ostream* log,
                                      std::size_t* failures) {
  return run_experiment(cfg, prepare_experiment(cfg), threads, log, failures);
}

std::string format_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << kCsvHeader << "\n";
  os << std::setprecision(10);
  for (const ResultRow& r : rows) {
    os << r.scheme << "," << r.r_or_beta << "," << r.j << "," << r.p << "," << r.lambda << "," << r.m << ","
       << r.ensemble << "," << r.seed << "," << r.mean_rel_err << "," << r.median_rel_err << "," << r.max_rel_err
       << "," << r.wall_ms << "\n";
  }
  return os.str();
}

void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  const std::string text = format_csv(rows);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("emit_csv: cannot open " + path.string());
  out << text;
  if (!out) throw IoError("emit_csv: write failed for " + path.string());
}

}  // namespace onebit
