#include "gdf/domain.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "gdf/errors.hpp"

namespace gdf {

double predict_power(const PowerModel& model, const Utilization& u) {
  double w = model.intercept;
  auto f = u.features();
  for (int i = 0; i < Utilization::kFeatures; ++i) w += model.coefficients[i] * f[i];
  return std::max(0.0, w);
}

PowerModel fit_power_model(const std::vector<std::pair<Utilization, double>>& samples) {
  constexpr int k = Utilization::kFeatures;
  const auto n = static_cast<Eigen::Index>(samples.size());
  if (n < k + 2) throw DegenerateDesign("need at least 12 samples, got " + std::to_string(n));

  Eigen::MatrixXd X(n, k + 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    auto f = samples[r].first.features();
    for (int c = 0; c < k; ++c) X(r, c) = f[c];
    X(r, k) = 1.0;
    y(r) = samples[r].second;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < k + 1) throw DegenerateDesign("feature matrix is rank-deficient");

  Eigen::VectorXd beta = qr.solve(y);
  PowerModel m;
  for (int c = 0; c < k; ++c) m.coefficients[c] = beta(c);
  m.intercept = beta(k);
  return m;
}

double integrate_watts(const std::vector<std::pair<double, double>>& samples) {
  double joules = 0;
  for (size_t i = 1; i < samples.size(); ++i) {
    const double dt = samples[i].first - samples[i - 1].first;
    joules += 0.5 * (samples[i].second + samples[i - 1].second) * dt;
  }
  return joules;
}

EnergyAccount total_energy(const std::vector<std::vector<Utilization>>& processes,
                           const PowerModel& model, double dt) {
  EnergyAccount acct;
  if (processes.empty()) return acct;
  const size_t len = processes.front().size();
  for (const auto& series : processes)
    if (series.size() != len) throw GridMismatch("process series lengths differ");

  // Intercept counted once per end system; per-process feature terms summed.
  PowerModel no_intercept = model;
  no_intercept.intercept = 0;
  acct.watt_samples.reserve(len);
  std::vector<double> bytes_rate(len, 0.0);
  for (size_t t = 0; t < len; ++t) {
    double watts = model.intercept;
    for (const auto& series : processes) {
      watts += predict_power(no_intercept, series[t]);
      bytes_rate[t] += series[t].net_bytes_sent;
    }
    acct.watt_samples.emplace_back(static_cast<double>(t) * dt, watts);
    if (t > 0) acct.data_bytes += 0.5 * (bytes_rate[t] + bytes_rate[t - 1]) * dt;
  }
  acct.joules_total = integrate_watts(acct.watt_samples);
  return acct;
}

void PowerModel::save(std::ostream& os) const {
  os.precision(17);
  for (double c : coefficients) os << c << '\n';
  os << intercept << '\n';
}

PowerModel PowerModel::load(std::istream& is) {
  PowerModel m;
  for (double& c : m.coefficients)
    if (!(is >> c)) throw ParseError(0, "truncated power model");
  if (!(is >> m.intercept)) throw ParseError(0, "truncated power model");
  return m;
}

char sla_kind_char(SlaKind kind) {
  switch (kind) {
    case SlaKind::ThroughputGuarantee: return 'T';
    case SlaKind::TotalEnergyCap: return 'E';
    case SlaKind::InstantPowerCap: return 'P';
  }
  return '?';
}

SlaKind sla_kind_from_char(char c) {
  switch (c) {
    case 'T': return SlaKind::ThroughputGuarantee;
    case 'E': return SlaKind::TotalEnergyCap;
    case 'P': return SlaKind::InstantPowerCap;
  }
  throw ConfigError(std::string("unknown SLA kind '") + c + "'");
}

}  // namespace gdf
