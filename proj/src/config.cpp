#include "onebit/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace onebit {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = s.find(sep);
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

template <typename T>
T parse_int(std::string_view key, std::string_view text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw InvalidArgument("config: '" + std::string(key) + "' expects an integer, got '" + std::string(text) + "'");
  return value;
}

double parse_real(std::string_view key, std::string_view text) {
  const std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw InvalidArgument("config: '" + std::string(key) + "' expects a number, got '" + s + "'");
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw InvalidArgument("config: '" + std::string(key) + "' expects true or false");
}

std::string format_real(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

int ExperimentConfig::effective_jmax() const {
  if (gmra_jmax >= 0) return gmra_jmax;
  return levels.empty() ? 0 : *std::max_element(levels.begin(), levels.end());
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw InvalidArgument("config: " + what); };
  if (ambient_dim < 2) fail("ambient_dim must be >= 2");
  if (manifold.chart_dim() > ambient_dim) fail("manifold does not fit in ambient_dim");
  if (n_train < 1 || n_test < 1) fail("n_train and n_test must be positive");
  if (levels.empty()) fail("levels is empty");
  for (int j : levels)
    if (j < 0) fail("levels must be non-negative");
  if (effective_jmax() < *std::max_element(levels.begin(), levels.end())) fail("gmra_jmax is below a requested level");
  if (schemes.empty()) fail("schemes is empty");
  if (p < 1) fail("p must be positive");
  if (lambdas.empty()) fail("lambdas is empty");
  for (Index lam : lambdas)
    if (lam < 1) fail("lambdas must be positive");
  if (!(margin >= 0.0 && margin < 1.0)) fail("margin must lie in [0, 1)");
  for (const QuantizerSpec& s : schemes) {
    if (const auto* sd = std::get_if<SigmaDelta>(&s)) {
      if (sd->order < 1) fail("sigma-delta order must be >= 1");
      for (Index lam : lambdas)
        if ((lam - 1) % sd->order != 0)
          fail("lambda " + std::to_string(lam) + " - 1 is not divisible by r=" + std::to_string(sd->order));
    } else if (const auto* b = std::get_if<Beta>(&s)) {
      if (!(b->beta > 1.0 && b->beta < 2.0)) fail("beta must lie in (1, 2)");
      if (b->blocks != p) fail("beta block count must equal p");
    }
  }
  if (ensemble != EnsembleKind::Gaussian)
    for (Index lam : lambdas)
      if (lam * p > ambient_dim) fail(to_string(ensemble) + " needs m = p*lambda <= ambient_dim");
}

QuantizerSpec parse_scheme(std::string_view text, Index p) {
  const auto parts = split(text, ':');
  if (parts[0] == "msq" && parts.size() == 1) return Msq{};
  if (parts[0] == "sd" && (parts.size() == 2 || parts.size() == 3)) {
    SigmaDelta sd{parse_int<int>("schemes", parts[1])};
    if (parts.size() == 3) {
      if (parts[2] == "greedy")
        sd.rule = SigmaDeltaRule::Greedy;
      else if (parts[2] == "filtered")
        sd.rule = SigmaDeltaRule::Filtered;
      else
        throw InvalidArgument("config: unknown sigma-delta rule '" + std::string(parts[2]) + "'");
    }
    return sd;
  }
  if (parts[0] == "beta" && parts.size() == 2) return Beta{parse_real("schemes", parts[1]), p};
  throw InvalidArgument("config: unknown scheme '" + std::string(text) + "'");
}

std::string format_scheme(const QuantizerSpec& spec) {
  if (std::holds_alternative<Msq>(spec)) return "msq";
  if (const auto* sd = std::get_if<SigmaDelta>(&spec)) {
    std::string s = "sd:" + std::to_string(sd->order);
    if (sd->rule == SigmaDeltaRule::Greedy) s += ":greedy";
    if (sd->rule == SigmaDeltaRule::Filtered) s += ":filtered";
    return s;
  }
  return "beta:" + format_real(std::get<Beta>(spec).beta);
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::vector<std::string_view> scheme_items;
  int line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw InvalidArgument("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw InvalidArgument("config: duplicate key '" + key + "'");
    if (key == "ambient_dim") {
      cfg.ambient_dim = parse_int<Index>(key, value);
    } else if (key == "manifold") {
      cfg.manifold = parse_manifold(value);
    } else if (key == "n_train") {
      cfg.n_train = parse_int<Index>(key, value);
    } else if (key == "n_test") {
      cfg.n_test = parse_int<Index>(key, value);
    } else if (key == "levels") {
      cfg.levels.clear();
      for (auto item : split(value, ',')) cfg.levels.push_back(parse_int<int>(key, item));
    } else if (key == "gmra_jmax") {
      cfg.gmra_jmax = parse_int<int>(key, value);
    } else if (key == "schemes") {
      scheme_items = split(value, ',');
    } else if (key == "p") {
      cfg.p = parse_int<Index>(key, value);
    } else if (key == "lambdas") {
      cfg.lambdas.clear();
      for (auto item : split(value, ',')) cfg.lambdas.push_back(parse_int<Index>(key, item));
    } else if (key == "ensemble") {
      cfg.ensemble = parse_ensemble_kind(value);
    } else if (key == "seed") {
      cfg.seed = parse_int<std::uint64_t>(key, value);
    } else if (key == "margin") {
      cfg.margin = parse_real(key, value);
    } else if (key == "output") {
      cfg.output = std::string(value);
    } else if (key == "gmra_file") {
      cfg.gmra_file = std::string(value);
    } else if (key == "record_timing") {
      cfg.record_timing = parse_bool(key, value);
    } else {
      throw InvalidArgument("config: unknown key '" + key + "'");
    }
  }
  // Schemes last: β block counts follow p wherever p appears in the file.
  if (!scheme_items.empty()) {
    cfg.schemes.clear();
    for (auto item : scheme_items) cfg.schemes.push_back(parse_scheme(item, cfg.p));
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const ExperimentConfig& cfg) {
  auto join = [](const auto& items, auto fmt) {
    std::string s;
    for (const auto& it : items) s += (s.empty() ? "" : ",") + fmt(it);
    return s;
  };
  auto num = [](auto v) { return std::to_string(v); };
  std::ostringstream os;
  os << "ambient_dim = " << cfg.ambient_dim << "\n"
     << "manifold = " << to_string(cfg.manifold) << "\n"
     << "n_train = " << cfg.n_train << "\n"
     << "n_test = " << cfg.n_test << "\n"
     << "levels = " << join(cfg.levels, num) << "\n";
  if (cfg.gmra_jmax >= 0) os << "gmra_jmax = " << cfg.gmra_jmax << "\n";
  os << "schemes = " << join(cfg.schemes, format_scheme) << "\n"
     << "p = " << cfg.p << "\n"
     << "lambdas = " << join(cfg.lambdas, num) << "\n"
     << "ensemble = " << to_string(cfg.ensemble) << "\n"
     << "seed = " << cfg.seed << "\n"
     << "margin = " << format_real(cfg.margin) << "\n";
  if (!cfg.output.empty()) os << "output = " << cfg.output.string() << "\n";
  if (!cfg.gmra_file.empty()) os << "gmra_file = " << cfg.gmra_file.string() << "\n";
  os << "record_timing = " << (cfg.record_timing ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace onebit
