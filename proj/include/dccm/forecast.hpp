// Seasonal ARMA modeling of property series and construction of per-step
// property distributions for the sampler.
//
// Model form (all polynomials use the minus convention):
//
//   Phi(B^s) phi(B) (Y_t - mu) = Theta(B^s) theta(B) W_t,   W_t ~ N(0, sigma^2)
//   phi(B)   = 1 - sum_{j<=p} phi_j B^j        Phi(B^s)   = 1 - sum_{j<=P} Phi_j B^{js}
//   theta(B) = 1 - sum_{j<=q} theta_j B^j      Theta(B^s) = 1 - sum_{j<=Q} Theta_j B^{js}
//
// Estimation is by conditional sum of squares: residuals are generated
// recursively with presample terms set to zero, and a residual enters the
// objective only when its own value and every structurally required AR lag
// are observed. Masked points feed zero into the MA recursion and their
// slots carry the model's one-step prediction for later AR lags.
#pragma once

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dccm/nelder_mead.hpp"
#include "dccm/sampler.hpp"

namespace dccm {

/// Inverse standard normal CDF (Acklam's rational approximation, |err| < 1.2e-9).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile requires p in (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1 - plow;
  double x;
  if (p < plow) {
    double u = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1);
  } else if (p <= phigh) {
    double u = p - 0.5, r = u * u;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    double u = std::sqrt(-2 * std::log(1 - p));
    x = -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1);
  }
  return x;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

struct SeasonalArmaOrder {
  int p = 0, q = 0, P = 0, Q = 0, s = 1;

  int ar_span() const { return p + P * s; }
  int ma_span() const { return q + Q * s; }
  int n_params() const { return 1 + p + q + P + Q; }  // mean offset included
};

struct SeasonalArmaModel {
  SeasonalArmaOrder order;
  double mean_offset = 0;
  std::vector<double> phi, theta;            // nonseasonal
  std::vector<double> seasonal_phi, seasonal_theta;
  double sigma2 = 0;
  long long n_residuals = 0;                  // terms in the CSS objective
};

/// Value/mask series; mask[i] != 0 means missing.
struct MaskedSeries {
  std::vector<double> values;
  std::vector<std::uint8_t> mask;

  MaskedSeries() = default;
  explicit MaskedSeries(std::vector<double> v)
      : values(std::move(v)), mask(values.size(), 0) {}
  MaskedSeries(std::vector<double> v, std::vector<std::uint8_t> m)
      : values(std::move(v)), mask(std::move(m)) {
    if (values.size() != mask.size()) throw std::invalid_argument("values/mask size mismatch");
  }
  std::size_t size() const { return values.size(); }
  bool observed(std::size_t i) const { return mask[i] == 0; }
};

struct ForecastResult {
  std::vector<double> means;
  std::vector<double> variances;

  std::size_t horizon() const { return means.size(); }
};

class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, std::vector<double> best, double objective)
      : std::runtime_error(what), best_parameters(std::move(best)), best_objective(objective) {}
  std::vector<double> best_parameters;
  double best_objective = 0;
};

namespace detail {

/// (1 - sum a_j B^j)(1 - sum b_k B^{ks}) expanded; coefficient of B^0 is 1.
inline std::vector<double> expand_poly(const std::vector<double>& nonseasonal,
                                       const std::vector<double>& seasonal, int s) {
  std::vector<double> u(nonseasonal.size() + 1, 0.0);
  u[0] = 1;
  for (std::size_t j = 0; j < nonseasonal.size(); ++j) u[j + 1] = -nonseasonal[j];
  std::vector<double> v(seasonal.size() * s + 1, 0.0);
  v[0] = 1;
  for (std::size_t k = 0; k < seasonal.size(); ++k) v[(k + 1) * s] = -seasonal[k];
  std::vector<double> out(u.size() + v.size() - 1, 0.0);
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i + j] += u[i] * v[j];
  return out;
}

/// Lags that are structurally present in the expanded AR polynomial.
inline std::vector<int> structural_ar_lags(const SeasonalArmaOrder& ord) {
  std::set<int> lags;
  for (int j = 0; j <= ord.p; ++j)
    for (int k = 0; k <= ord.P; ++k)
      if (j + k * ord.s > 0) lags.insert(j + k * ord.s);
  return {lags.begin(), lags.end()};
}

/// Spectral radius of the AR companion matrix; < 1 means stationary.
inline double ar_spectral_radius(const std::vector<double>& c_ar) {
  const int m = static_cast<int>(c_ar.size()) - 1;
  if (m == 0) return 0.0;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) companion(0, i) = -c_ar[i + 1];  // a_i = -c_ar[i]
  for (int i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
  return companion.eigenvalues().cwiseAbs().maxCoeff();
}

struct CssPass {
  double sse = 0;
  long long n_terms = 0;
  std::vector<double> x;  // centered effective values (predictions fill gaps)
  std::vector<double> w;  // residuals; excluded slots hold zero
};

inline CssPass css_pass(const MaskedSeries& y, const SeasonalArmaOrder& ord, double mu,
                        const std::vector<double>& c_ar, const std::vector<double>& c_ma,
                        const std::vector<int>& ar_lags) {
  const long long T = static_cast<long long>(y.size());
  const long long na = static_cast<long long>(c_ar.size()) - 1;
  const long long nc = static_cast<long long>(c_ma.size()) - 1;
  CssPass out;
  out.x.assign(T, 0.0);
  out.w.assign(T, 0.0);
  for (long long t = 0; t < T; ++t) {
    double pred = 0;
    for (long long i = 1; i <= na; ++i)
      if (t - i >= 0) pred -= c_ar[i] * out.x[t - i];
    for (long long j = 1; j <= nc; ++j)
      if (t - j >= 0) pred += c_ma[j] * out.w[t - j];
    if (!y.observed(t)) {
      out.x[t] = pred;
      continue;
    }
    out.x[t] = y.values[t] - mu;
    bool valid = t >= na;
    for (int lag : ar_lags)
      if (valid && (t - lag < 0 || !y.observed(t - lag))) valid = false;
    if (valid) {
      out.w[t] = out.x[t] - pred;
      out.sse += out.w[t] * out.w[t];
      ++out.n_terms;
    }
  }
  (void)ord;
  return out;
}

inline SeasonalArmaModel unpack_params(const SeasonalArmaOrder& ord,
                                       const std::vector<double>& v) {
  SeasonalArmaModel m;
  m.order = ord;
  std::size_t i = 0;
  m.mean_offset = v[i++];
  m.phi.assign(v.begin() + i, v.begin() + i + ord.p); i += ord.p;
  m.theta.assign(v.begin() + i, v.begin() + i + ord.q); i += ord.q;
  m.seasonal_phi.assign(v.begin() + i, v.begin() + i + ord.P); i += ord.P;
  m.seasonal_theta.assign(v.begin() + i, v.begin() + i + ord.Q); i += ord.Q;
  return m;
}

}  // namespace detail

struct FitOptions {
  long long max_evaluations = 400000;
  int restarts = 2;
  double stationarity_edge = 0.995;  // soft barrier inside the objective
};

/// CSS objective for explicit parameter values; exposed for oracle tests.
inline std::pair<double, long long> css_objective(const MaskedSeries& y,
                                                  const SeasonalArmaModel& m) {
  auto c_ar = detail::expand_poly(m.phi, m.seasonal_phi, m.order.s);
  auto c_ma = detail::expand_poly(m.theta, m.seasonal_theta, m.order.s);
  auto lags = detail::structural_ar_lags(m.order);
  auto pass = detail::css_pass(y, m.order, m.mean_offset, c_ar, c_ma, lags);
  return {pass.sse, pass.n_terms};
}

inline SeasonalArmaModel fit_seasonal_arma(const MaskedSeries& series,
                                           const SeasonalArmaOrder& order,
                                           const FitOptions& options = {}) {
  if (order.p < 0 || order.q < 0 || order.P < 0 || order.Q < 0 || order.s < 1)
    throw std::invalid_argument("bad seasonal ARMA order");
  if (order.p > 3 || order.q > 3 || order.P > 3 || order.Q > 3)
    throw std::invalid_argument("order components above 3 are not supported");
  if (static_cast<int>(series.size()) < 3 * order.s)
    throw std::invalid_argument("series shorter than three seasonal periods");

  double mean = 0, ss = 0;
  long long n_obs = 0;
  for (std::size_t i = 0; i < series.size(); ++i)
    if (series.observed(i)) { mean += series.values[i]; ++n_obs; }
  if (n_obs < order.n_params() + 2)
    throw std::invalid_argument("too few observed points for the requested order");
  mean /= static_cast<double>(n_obs);
  for (std::size_t i = 0; i < series.size(); ++i)
    if (series.observed(i)) ss += (series.values[i] - mean) * (series.values[i] - mean);

  const auto ar_lags = detail::structural_ar_lags(order);
  const double barrier_scale = (ss + 1.0) * 1e4;
  long long valid_terms = 0;

  auto objective = [&](const std::vector<double>& v) {
    auto m = detail::unpack_params(order, v);
    auto c_ar = detail::expand_poly(m.phi, m.seasonal_phi, order.s);
    auto c_ma = detail::expand_poly(m.theta, m.seasonal_theta, order.s);
    auto pass = detail::css_pass(series, order, m.mean_offset, c_ar, c_ma, ar_lags);
    valid_terms = pass.n_terms;
    double obj = pass.sse;
    if (!std::isfinite(obj)) return 1e300;
    if (order.p + order.P > 0) {
      double rho = detail::ar_spectral_radius(c_ar);
      if (rho > options.stationarity_edge) {
        double over = rho - options.stationarity_edge;
        obj += barrier_scale * over * over;
      }
    }
    return obj;
  };

  std::vector<double> start(order.n_params(), 0.0);
  start[0] = mean;
  NelderMeadOptions nm;
  nm.max_evaluations = options.max_evaluations;
  nm.restarts = options.restarts;
  auto result = nelder_mead(objective, start, nm);
  if (!result.converged) {
    std::ostringstream msg;
    msg << "seasonal ARMA fit did not converge after " << result.evaluations
        << " evaluations (best objective " << result.value << ")";
    throw FitError(msg.str(), result.x, result.value);
  }

  SeasonalArmaModel model = detail::unpack_params(order, result.x);
  auto c_ar = detail::expand_poly(model.phi, model.seasonal_phi, order.s);
  double rho = detail::ar_spectral_radius(c_ar);
  if (rho >= 1.0 - 1e-6) {
    std::ostringstream msg;
    msg << "fitted AR polynomial is non-stationary (spectral radius " << rho << ")";
    throw FitError(msg.str(), result.x, result.value);
  }
  auto [sse, n_terms] = css_objective(series, model);
  if (n_terms == 0) throw FitError("no usable residual terms after masking", result.x, 0);
  model.sigma2 = std::max(sse / static_cast<double>(n_terms), 1e-12);
  model.n_residuals = n_terms;
  (void)valid_terms;
  return model;
}

/// Point forecasts by recursion; variances from the psi-weight expansion of
/// C(B)/A(B), truncated at 10 * (s * max(P,Q) + max(p,q)) terms.
inline ForecastResult forecast(const SeasonalArmaModel& model, const MaskedSeries& history,
                               int horizon) {
  if (horizon <= 0) throw std::invalid_argument("horizon must be positive");
  const auto& ord = model.order;
  auto c_ar = detail::expand_poly(model.phi, model.seasonal_phi, ord.s);
  auto c_ma = detail::expand_poly(model.theta, model.seasonal_theta, ord.s);
  const long long na = static_cast<long long>(c_ar.size()) - 1;
  const long long nc = static_cast<long long>(c_ma.size()) - 1;
  const long long T = static_cast<long long>(history.size());
  if (T < std::max(na, nc))
    throw std::invalid_argument("history too short to seed the forecast lags");

  auto pass = detail::css_pass(history, ord, model.mean_offset, c_ar, c_ma,
                               detail::structural_ar_lags(ord));
  std::vector<double> x = pass.x, w = pass.w;
  x.resize(T + horizon, 0.0);
  w.resize(T + horizon, 0.0);
  ForecastResult out;
  out.means.resize(horizon);
  for (long long t = T; t < T + horizon; ++t) {
    double pred = 0;
    for (long long i = 1; i <= na; ++i)
      if (t - i >= 0) pred -= c_ar[i] * x[t - i];
    for (long long j = 1; j <= nc; ++j)
      if (t - j >= 0) pred += c_ma[j] * w[t - j];
    x[t] = pred;
    out.means[t - T] = model.mean_offset + pred;
  }

  const int cap = std::max(1, 10 * (ord.s * std::max(ord.P, ord.Q) + std::max(ord.p, ord.q)));
  const int n_psi = std::min(horizon, cap);
  std::vector<double> psi(n_psi, 0.0);
  psi[0] = 1.0;
  for (int j = 1; j < n_psi; ++j) {
    double v = j <= nc ? c_ma[j] : 0.0;
    for (long long i = 1; i <= std::min<long long>(j, na); ++i) v -= c_ar[i] * psi[j - i];
    psi[j] = v;
  }
  out.variances.resize(horizon);
  double acc = 0;
  for (int h = 0; h < horizon; ++h) {
    if (h < n_psi) acc += psi[h] * psi[h];
    out.variances[h] = model.sigma2 * acc;
  }
  return out;
}

/// Per-step distributions assembled from per-component forecasts, with the
/// prediction-interval rescale: the target sigma is chosen so that 2 sigma
/// equals the half-width of the central `coverage` interval of the forecast
/// Gaussian, i.e. sigma_target = z_{(1+coverage)/2} * sigma_forecast / 2.
inline std::vector<PropertyDistribution> build_property_distributions(
    const std::vector<ForecastResult>& static_components,
    const std::vector<ForecastResult>& dynamic_components, double coverage_fraction,
    const std::set<int>& term_start_steps = {0}, double variance_floor = 1e-8) {
  if (!(coverage_fraction > 0 && coverage_fraction < 1))
    throw std::invalid_argument("coverage fraction must lie in (0,1)");
  if (static_components.empty()) throw std::invalid_argument("no static components");
  if (dynamic_components.size() != static_components.size())
    throw std::invalid_argument("static/dynamic component count mismatch");
  const std::size_t horizon = static_components[0].horizon();
  for (const auto& fr : static_components)
    if (fr.horizon() != horizon || fr.variances.size() != horizon)
      throw std::invalid_argument("mismatched forecast horizons");
  for (const auto& fr : dynamic_components)
    if (fr.horizon() != horizon || fr.variances.size() != horizon)
      throw std::invalid_argument("mismatched forecast horizons");

  const double z = normal_quantile(0.5 + coverage_fraction / 2.0);
  const double factor = (z / 2.0) * (z / 2.0);

  std::vector<PropertyDistribution> out(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    PropertyDistribution& d = out[t];
    d.has_dynamic = term_start_steps.count(static_cast<int>(t)) == 0;
    for (const auto& fr : static_components) {
      d.mean.push_back(fr.means[t]);
      d.variance.push_back(std::max(factor * fr.variances[t], variance_floor));
    }
    if (d.has_dynamic)
      for (const auto& fr : dynamic_components) {
        d.mean.push_back(fr.means[t]);
        d.variance.push_back(std::max(factor * fr.variances[t], variance_floor));
      }
  }
  return out;
}

/// Fallback forecaster: means and variances by seasonal phase (month of
/// term). Requires every forecast phase to have been observed.
inline ForecastResult empirical_forecast(const MaskedSeries& history,
                                         const std::vector<int>& history_phases,
                                         const std::vector<int>& horizon_phases,
                                         double variance_floor = 1e-8) {
  if (history.size() != history_phases.size())
    throw std::invalid_argument("history/phase size mismatch");
  if (history.size() < 2) throw std::invalid_argument("too little history");
  std::map<int, std::pair<double, long long>> sums;
  for (std::size_t i = 0; i < history.size(); ++i)
    if (history.observed(i)) {
      auto& [sum, n] = sums[history_phases[i]];
      sum += history.values[i];
      ++n;
    }
  std::map<int, double> means, vars;
  for (auto& [phase, sn] : sums) means[phase] = sn.first / static_cast<double>(sn.second);
  std::map<int, std::pair<double, long long>> sq;
  for (std::size_t i = 0; i < history.size(); ++i)
    if (history.observed(i)) {
      double d = history.values[i] - means[history_phases[i]];
      auto& [sum, n] = sq[history_phases[i]];
      sum += d * d;
      ++n;
    }
  for (auto& [phase, sn] : sq)
    vars[phase] = sn.second >= 2 ? sn.first / static_cast<double>(sn.second - 1) : 0.0;

  ForecastResult out;
  for (int phase : horizon_phases) {
    auto it = means.find(phase);
    if (it == means.end())
      throw std::invalid_argument("no history observed for seasonal phase " +
                                  std::to_string(phase));
    out.means.push_back(it->second);
    out.variances.push_back(std::max(vars[phase], variance_floor));
  }
  return out;
}

}  // namespace dccm
