#include "onebit/quantizer.hpp"

#include <cmath>
#include <sstream>

namespace onebit {

namespace {

constexpr double bit(double w) { return w >= 0.0 ? 1.0 : -1.0; }

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

void check_input(const Vector& y) {
  if (!y.allFinite()) throw InvalidArgument("quantize: non-finite measurement");
}

void check_spec(const QuantizerSpec& spec) {
  if (const auto* sd = std::get_if<SigmaDelta>(&spec)) {
    if (sd->order < 1) throw InvalidArgument("quantize: sigma-delta order must be >= 1");
  } else if (const auto* b = std::get_if<Beta>(&spec)) {
    if (!(b->beta > 1.0 && b->beta < 2.0)) throw InvalidArgument("quantize: beta must lie in (1, 2)");
    if (b->blocks < 1) throw InvalidArgument("quantize: beta block count must be >= 1");
  }
}

void check_blocks(const Beta& b, Index m) {
  if (m % b.blocks != 0)
    throw InvalidArgument("quantize: length " + std::to_string(m) + " not divisible by p=" +
                          std::to_string(b.blocks));
}

QuantizationResult greedy_sigma_delta(int r, const Vector& y) {
  const Index m = y.size();
  std::vector<double> coeff(static_cast<std::size_t>(r) + 1);
  for (int i = 1; i <= r; ++i) coeff[static_cast<std::size_t>(i)] = (i % 2 ? 1.0 : -1.0) * binomial(r, i);
  QuantizationResult res{Vector(m), Vector(m), 0.0};
  for (Index j = 0; j < m; ++j) {
    double w = y(j);
    for (int i = 1; i <= r && i <= j; ++i) w += coeff[static_cast<std::size_t>(i)] * res.u(j - i);
    res.q(j) = bit(w);
    res.u(j) = w - res.q(j);
  }
  return res;
}

// Bits plus the auxiliary state v of the filtered scheme.
void filtered_sigma_delta(const NoiseShapingFilter& f, const Vector& y, Vector& q, Vector& v) {
  const Index m = y.size();
  q.resize(m);
  v.resize(m);
  for (Index j = 0; j < m; ++j) {
    double w = y(j);
    for (std::size_t t = 0; t < f.taps.size(); ++t) {
      const Index lag = f.taps[t];
      if (lag > j) break;
      w += f.weights[t] * v(j - lag);
    }
    q(j) = bit(w);
    v(j) = w - q(j);
  }
}

QuantizationResult beta_encode(const Beta& b, const Vector& y) {
  const Index m = y.size();
  check_blocks(b, m);
  const Index len = m / b.blocks;
  QuantizationResult res{Vector(m), Vector(m), 0.0};
  for (Index blk = 0; blk < b.blocks; ++blk) {
    double prev = 0.0;
    for (Index i = blk * len; i < (blk + 1) * len; ++i) {
      const double w = b.beta * prev + y(i);
      res.q(i) = bit(w);
      res.u(i) = w - res.q(i);
      prev = res.u(i);
    }
  }
  return res;
}

}  // namespace

std::string describe(const QuantizerSpec& spec) {
  std::ostringstream os;
  if (std::holds_alternative<Msq>(spec)) {
    os << "msq";
  } else if (const auto* sd = std::get_if<SigmaDelta>(&spec)) {
    os << "sd" << sd->order;
    if (sd->rule == SigmaDeltaRule::Greedy) os << "/greedy";
    if (sd->rule == SigmaDeltaRule::Filtered) os << "/filtered";
  } else {
    const auto& b = std::get<Beta>(spec);
    os << "beta" << b.beta << "/p" << b.blocks;
  }
  return os.str();
}

double NoiseShapingFilter::l1_norm() const {
  double s = 0.0;
  for (double w : weights) s += std::abs(w);
  return s;
}

NoiseShapingFilter design_filter(int order, int spacing) {
  if (order < 1) throw InvalidArgument("design_filter: order must be >= 1");
  if (spacing < 1) throw InvalidArgument("design_filter: spacing must be >= 1");
  NoiseShapingFilter f;
  f.order = order;
  for (int i = 0; i < order; ++i) f.taps.push_back(static_cast<Index>(spacing) * i * i + 1);
  for (int j = 0; j < order; ++j) {
    long double w = 1.0L;
    for (int i = 0; i < order; ++i)
      if (i != j)
        w *= static_cast<long double>(f.taps[static_cast<std::size_t>(i)]) /
             static_cast<long double>(f.taps[static_cast<std::size_t>(i)] - f.taps[static_cast<std::size_t>(j)]);
    f.weights.push_back(static_cast<double>(w));
  }
  // g = (δ - h) / (1 - z)^r: r running sums; the quotient is a polynomial of
  // degree n_r - r because 1 - H(z) has an r-fold root at z = 1.
  const Index last = f.taps.back();
  std::vector<long double> acc(static_cast<std::size_t>(last) + 1, 0.0L);
  acc[0] = 1.0L;
  for (std::size_t t = 0; t < f.taps.size(); ++t)
    acc[static_cast<std::size_t>(f.taps[t])] -= static_cast<long double>(f.weights[t]);
  for (int pass = 0; pass < order; ++pass)
    for (std::size_t i = 1; i < acc.size(); ++i) acc[i] += acc[i - 1];
  const Index len = last - order + 1;
  f.g.resize(len);
  for (Index i = 0; i < len; ++i) f.g(i) = static_cast<double>(acc[static_cast<std::size_t>(i)]);
  return f;
}

SigmaDeltaRule resolve_rule(const SigmaDelta& sd) {
  if (sd.rule != SigmaDeltaRule::Auto) return sd.rule;
  return sd.order <= 2 ? SigmaDeltaRule::Greedy : SigmaDeltaRule::Filtered;
}

QuantizationResult quantize(const QuantizerSpec& spec, const Vector& y) {
  check_spec(spec);
  check_input(y);
  QuantizationResult res;
  if (std::holds_alternative<Msq>(spec)) {
    res.q = y.unaryExpr([](double w) { return bit(w); });
    res.u = y - res.q;
  } else if (const auto* sd = std::get_if<SigmaDelta>(&spec)) {
    if (resolve_rule(*sd) == SigmaDeltaRule::Greedy) {
      res = greedy_sigma_delta(sd->order, y);
    } else {
      const NoiseShapingFilter f = design_filter(sd->order);
      Vector v;
      filtered_sigma_delta(f, y, res.q, v);
      const Index m = y.size();
      res.u.resize(m);
      for (Index j = 0; j < m; ++j) {
        double s = 0.0;
        const Index span = std::min<Index>(f.g.size() - 1, j);
        for (Index l = 0; l <= span; ++l) s += f.g(l) * v(j - l);
        res.u(j) = s;
      }
    }
  } else {
    res = beta_encode(std::get<Beta>(spec), y);
  }
  res.stability_norm = res.u.size() == 0 ? 0.0 : res.u.cwiseAbs().maxCoeff();
  return res;
}

Vector quantize_bits(const QuantizerSpec& spec, const Vector& y) {
  if (const auto* sd = std::get_if<SigmaDelta>(&spec)) {
    check_spec(spec);
    check_input(y);
    if (resolve_rule(*sd) == SigmaDeltaRule::Filtered) {
      Vector q, v;
      filtered_sigma_delta(design_filter(sd->order), y, q, v);
      return q;
    }
  }
  return quantize(spec, y).q;
}

Matrix state_matrix(const QuantizerSpec& spec, Index m) {
  check_spec(spec);
  if (std::holds_alternative<Msq>(spec)) return Matrix::Identity(m, m);
  Matrix h = Matrix::Zero(m, m);
  if (const auto* sd = std::get_if<SigmaDelta>(&spec)) {
    for (int k = 0; k <= sd->order; ++k) {
      const double c = (k % 2 ? -1.0 : 1.0) * binomial(sd->order, k);
      for (Index i = k; i < m; ++i) h(i, i - k) = c;
    }
    return h;
  }
  const auto& b = std::get<Beta>(spec);
  check_blocks(b, m);
  const Index len = m / b.blocks;
  for (Index i = 0; i < m; ++i) {
    h(i, i) = 1.0;
    if (i % len != 0) h(i, i - 1) = -b.beta;
  }
  return h;
}

double verify_state_relation(const Vector& y, const QuantizationResult& result, const Matrix& h) {
  require_dims(y.size() == result.q.size() && y.size() == result.u.size() && h.rows() == y.size() &&
                   h.cols() == y.size(),
               "verify_state_relation: dimension mismatch");
  if (y.size() == 0) return 0.0;
  return (y - result.q - h * result.u).cwiseAbs().maxCoeff();
}

}  // namespace onebit
