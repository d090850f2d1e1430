#include "zkb/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "ygrid.hpp"
#include "zkb/kernels.hpp"

namespace zkb {

namespace {

std::vector<double> x_weights(const StripGeometry& g, double rate) {
  std::vector<double> w(g.nx());
  for (std::size_t i = 0; i < g.nx(); ++i) w[i] = g.dx() * std::exp(rate * g.x(i));
  return w;
}

bool in_tail_band(const StripGeometry& g, std::size_t i) {
  const double x = g.x(i), edge = 0.8 * g.half_length();
  return x < -edge || x >= edge;
}

// sum_j lambda_j^p (w, f_j g_j) over the profile rows
double modal_pairing(const StripGeometry& g, const std::vector<double>& w, const double* f, const double* h,
                     int lambda_power) {
  const auto& k = kernels::active();
  const std::size_t nx = g.nx();
  double total = 0.0;
  for (std::size_t j = 0; j < g.ny(); ++j) {
    const double part = k.weighted_dot(w.data(), f + j * nx, h + j * nx, nx);
    total += lambda_power == 0 ? part : std::pow(eigenvalue(static_cast<int>(j) + 1, g.width()), lambda_power) * part;
  }
  return total;
}

}  // namespace

struct NormEvaluator::Impl {
  SpectralTransform transform;
  std::vector<double> weight;   // dx e^{2bx}
  std::vector<double> sup_weight;  // e^{bx}
  std::vector<double> columns;

  explicit Impl(const StripGeometry& g)
      : transform(g), weight(x_weights(g, 2.0 * g.weight_rate())), sup_weight(g.nx()), columns(g.nx()) {
    for (std::size_t i = 0; i < g.nx(); ++i) sup_weight[i] = std::exp(g.weight_rate() * g.x(i));
  }
};

NormEvaluator::NormEvaluator(const StripGeometry& geom) : geom_(geom), impl_(std::make_unique<Impl>(geom)) {}
NormEvaluator::~NormEvaluator() = default;
NormEvaluator::NormEvaluator(NormEvaluator&&) noexcept = default;
NormEvaluator& NormEvaluator::operator=(NormEvaluator&&) noexcept = default;

WeightedNorms NormEvaluator::weighted(const SpectralField& v) {
  if (!v.geometry().same_grid(geom_)) throw ShapeError("norm evaluator grid mismatch");
  Impl& s = *impl_;
  const std::size_t nx = geom_.nx(), ny = geom_.ny();
  const std::vector<double> g0 = s.transform.profiles(v, 0);
  const std::vector<double> g1 = s.transform.profiles(v, 1);

  WeightedNorms out;
  out.u = modal_pairing(geom_, s.weight, g0.data(), g0.data(), 0);
  out.uy = modal_pairing(geom_, s.weight, g0.data(), g0.data(), 1);
  out.ux = modal_pairing(geom_, s.weight, g1.data(), g1.data(), 0);
  out.uxy = modal_pairing(geom_, s.weight, g1.data(), g1.data(), 1);

  std::fill(s.columns.begin(), s.columns.end(), 0.0);
  for (std::size_t j = 0; j < ny; ++j) {
    const double* row = g0.data() + j * nx;
    for (std::size_t i = 0; i < nx; ++i) s.columns[i] += row[i] * row[i];
  }
  out.tail = tail_mass(geom_, geom_.weight_rate(), s.columns);

  const Field u = s.transform.inverse(v);
  double sup = 0.0;
  for (std::size_t m = 0; m < ny; ++m) {
    for (std::size_t i = 0; i < nx; ++i) {
      const double a = std::fabs(u(i, m)) * s.sup_weight[i];
      if (!(a <= sup)) sup = a;
    }
  }
  out.sup = sup;
  return out;
}

NormSample NormEvaluator::sample(const SpectralField& v, double t, double diss_cum) {
  const WeightedNorms w = weighted(v);
  NormSample s;
  s.t = t;
  s.l2 = v.l2_squared();
  s.diss_cum = diss_cum;
  s.w_l2 = w.u;
  s.w_h1 = w.h1();
  s.sup_w = w.sup;
  s.tail = w.tail;
  return s;
}

double weighted_inner(double b, const Field& f, const Field& g) {
  const StripGeometry& geom = f.geometry();
  if (!geom.same_grid(g.geometry())) throw ShapeError("weighted_inner: grid mismatch");
  const auto& k = kernels::active();
  std::vector<double> w = x_weights(geom, 2.0 * b);
  for (double& v : w) v *= geom.dy();
  double total = 0.0;
  const std::size_t nx = geom.nx();
  for (std::size_t m = 0; m < geom.ny(); ++m) {
    total += k.weighted_dot(w.data(), f.values().data() + m * nx, g.values().data() + m * nx, nx);
  }
  return total;
}

WeightedNorms weighted_norms(const Field& u, double b) {
  const StripGeometry geom = u.geometry().with_weight_rate(b);
  SpectralTransform tr(geom);
  const SpectralField v = tr.forward(Field(geom, std::vector<double>(u.values().begin(), u.values().end())));
  NormEvaluator ev(geom);
  return ev.weighted(v);
}

double tail_mass(const StripGeometry& geom, double b, std::span<const double> column_sums) {
  if (column_sums.size() != geom.nx()) throw ShapeError("tail_mass: expected one sum per x point");
  double total = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < geom.nx(); ++i) {
    const double v = std::exp(2.0 * b * geom.x(i)) * column_sums[i];
    total += v;
    if (in_tail_band(geom, i)) tail += v;
  }
  return total > 0.0 ? tail / total : 0.0;
}

double tail_mass(const Field& u, double b) {
  const StripGeometry& g = u.geometry();
  std::vector<double> columns(g.nx(), 0.0);
  for (std::size_t m = 0; m < g.ny(); ++m) {
    for (std::size_t i = 0; i < g.nx(); ++i) columns[i] += u(i, m) * u(i, m);
  }
  return tail_mass(g, b, columns);
}

double energy_residual(const TimeSeries& series) {
  if (series.samples.empty()) throw DomainError("energy_residual: empty series");
  if (series.status == RunStatus::BlowUp) throw DomainError("energy_residual: series ended in blow-up");
  const double l20 = series.samples.front().l2;
  if (l20 == 0.0) return 0.0;
  double worst = 0.0;
  for (const NormSample& s : series.samples) {
    worst = std::max(worst, std::fabs(s.l2 + s.diss_cum - l20) / l20);
  }
  return worst;
}

double compute_J0(const Field& u0, double b) {
  if (!u0.all_finite()) throw NumericError("compute_J0: non-finite input");
  const StripGeometry geom = u0.geometry().with_weight_rate(b);
  const std::size_t nx = geom.nx(), ny = geom.ny();
  SpectralTransform tr(geom);
  const SpectralField v = tr.forward(Field(geom, std::vector<double>(u0.values().begin(), u0.values().end())));
  const std::vector<double> w = x_weights(geom, 2.0 * b);

  const std::vector<double> g0 = tr.profiles(v, 0);
  const std::vector<double> g1 = tr.profiles(v, 1);
  const std::vector<double> g2 = tr.profiles(v, 2);
  const std::vector<double> g3 = tr.profiles(v, 3);

  double total = v.l2_squared();
  // u^2 + |grad u|^2
  total += modal_pairing(geom, w, g0.data(), g0.data(), 0) + modal_pairing(geom, w, g1.data(), g1.data(), 0) +
           modal_pairing(geom, w, g0.data(), g0.data(), 1);
  // |grad u_x|^2
  total += modal_pairing(geom, w, g2.data(), g2.data(), 0) + modal_pairing(geom, w, g1.data(), g1.data(), 1);
  // |Laplacian u_x|^2, mode by mode: g''' - lambda g'
  {
    std::vector<double> lap(g3.size());
    for (std::size_t j = 0; j < ny; ++j) {
      const double lambda = eigenvalue(static_cast<int>(j) + 1, geom.width());
      for (std::size_t i = 0; i < nx; ++i) lap[j * nx + i] = g3[j * nx + i] - lambda * g1[j * nx + i];
    }
    total += modal_pairing(geom, w, lap.data(), lap.data(), 0);
  }
  // u^2 u_x^2 on the refined grid
  {
    detail::FineSampler fine(geom);
    const std::vector<double> u = fine.sample(v, 0);
    const std::vector<double> ux = fine.sample(v, 1);
    double quartic = 0.0;
    for (std::size_t r = 0; r < fine.rows(); ++r) {
      double row = 0.0;
      for (std::size_t i = 0; i < fine.cols(); ++i) {
        const std::size_t at = r * fine.cols() + i;
        const double p = u[at] * ux[at];
        row += std::exp(2.0 * b * fine.x(i)) * p * p;
      }
      quartic += row;
    }
    total += quartic * fine.dx() * fine.dy();
  }
  if (!std::isfinite(total)) throw NumericError("compute_J0: non-finite result");
  return total;
}

std::string_view to_string(NormId id) {
  switch (id) {
    case NormId::L2: return "l2";
    case NormId::WeightedL2: return "w_l2";
    case NormId::WeightedH1: return "w_h1";
    default: return "sup_w";
  }
}

NormId parse_norm_id(std::string_view name) {
  if (name == "l2") return NormId::L2;
  if (name == "w_l2") return NormId::WeightedL2;
  if (name == "w_h1") return NormId::WeightedH1;
  if (name == "sup_w") return NormId::WeightedSup;
  throw ConfigError("unknown norm: " + std::string(name));
}

double norm_value(const NormSample& s, NormId id) {
  switch (id) {
    case NormId::L2: return s.l2;
    case NormId::WeightedL2: return s.w_l2;
    case NormId::WeightedH1: return s.w_h1;
    default: return s.sup_w;
  }
}

DecayFit fit_decay_rate(std::span<const double> t, std::span<const double> values) {
  if (t.size() != values.size()) throw ShapeError("fit_decay_rate: length mismatch");
  if (t.size() < 10) throw FitError("fit_decay_rate: need at least 10 samples in the window");
  const double n = static_cast<double>(t.size());
  double tm = 0.0, ym = 0.0;
  std::vector<double> y(values.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw FitError("fit_decay_rate: nonpositive norm value in window");
    }
    y[i] = -std::log(values[i]);
    tm += t[i];
    ym += y[i];
  }
  tm /= n;
  ym /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    sxx += (t[i] - tm) * (t[i] - tm);
    sxy += (t[i] - tm) * (y[i] - ym);
  }
  if (!(sxx > 0.0)) throw FitError("fit_decay_rate: degenerate time window");
  DecayFit fit;
  fit.rate = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = y[i] - (ym + fit.rate * (t[i] - tm));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.t0 = t.front();
  fit.t1 = t.back();
  fit.count = t.size();
  return fit;
}

DecayFit fit_decay_rate(const TimeSeries& series, NormId norm, double t0, double t1) {
  if (series.samples.empty()) throw FitError("fit_decay_rate: empty series");
  if (!(t0 < t1)) throw FitError("fit_decay_rate: window requires t0 < t1");
  const double first = series.samples.front().t, last = series.samples.back().t;
  const double slack = 1e-9 * std::max(1.0, std::fabs(last));
  if (t0 < first - slack || t1 > last + slack) throw FitError("fit_decay_rate: window outside series range");
  std::vector<double> ts, vs;
  for (const NormSample& s : series.samples) {
    if (s.t >= t0 - slack && s.t <= t1 + slack) {
      ts.push_back(s.t);
      vs.push_back(norm_value(s, norm));
    }
  }
  DecayFit fit = fit_decay_rate(ts, vs);
  fit.t0 = t0;
  fit.t1 = t1;
  fit.norm = norm;
  return fit;
}

DecayFit fit_decay_rate(const TimeSeries& series, NormId norm) {
  if (series.samples.size() < 2) throw FitError("fit_decay_rate: series too short");
  const double t1 = series.samples.back().t;
  const double t0 = series.samples.front().t + 0.5 * (t1 - series.samples.front().t);
  return fit_decay_rate(series, norm, t0, t1);
}

}  // namespace zkb
