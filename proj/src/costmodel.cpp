#include "sfsim/costmodel.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "sfsim/types.hpp"

namespace sfsim {

namespace {

struct Regressors {
  double prefix, branch, amps;
};

Regressors regressors(const ForecastInput& in) {
  const double s = in.q1 * std::ldexp(1.0, in.q1) + in.q2 * std::ldexp(1.0, in.q2);
  const double jobs = in.f * std::ldexp(1.0, in.x_p);
  return {jobs * s * in.d_p, jobs * s * std::ldexp(1.0, in.x_b) * in.d_b, std::ldexp(1.0, in.x_p + in.x_b) * in.n_a};
}

void check_input(const ForecastInput& in) {
  if (!(in.f > 0 && in.f <= 1)) throw Error("f must lie in (0, 1]");
  if (in.q1 < 0 || in.q2 < 0 || in.d_p < 0 || in.d_b < 0 || in.x_p < 0 || in.x_b < 0 || in.n_a < 0)
    throw Error("forecast arguments must be nonnegative");
  if (in.p < 1 || in.N < 1) throw Error("need at least one process and one node");
}

}  // namespace

double CostParams::omega_at(int p) const {
  if (omega.empty()) return 1.0;
  if (p <= omega.front().first) return omega.front().second;
  for (std::size_t i = 1; i < omega.size(); ++i)
    if (p <= omega[i].first) {
      const auto [p0, w0] = omega[i - 1];
      const auto [p1, w1] = omega[i];
      return w0 + (w1 - w0) * (p - p0) / static_cast<double>(p1 - p0);
    }
  return omega.back().second;
}

void CostParams::validate() const {
  if (omega.empty() || omega.front().first != 1 || omega.front().second != 1.0) throw Error("omega table must start at omega(1) = 1");
  for (std::size_t i = 1; i < omega.size(); ++i)
    if (omega[i].first <= omega[i - 1].first || omega[i].second < omega[i - 1].second)
      throw Error("omega table must be increasing in p and non-decreasing in value");
  if (c1 <= 0 || c2 <= 0 || c3 < 0 || c4 < 1 || bytes_per_amplitude <= 0) throw Error("cost constants out of range");
}

double total_seconds(const CostParams& params, const ForecastInput& in) {
  check_input(in);
  const Regressors r = regressors(in);
  return params.c1 * r.prefix + params.c1 * params.c2 * r.branch + params.c3 * r.amps;
}

Forecast forecast(const CostParams& params, const ForecastInput& in) {
  Forecast f;
  f.T_tot = total_seconds(params, in) / 3600.0;
  f.T_bill = params.omega_at(in.p) * f.T_tot / in.p;
  f.T_clock = f.T_bill / in.N;
  f.M_proc = (params.c4 * (std::ldexp(1.0, in.q1) + std::ldexp(1.0, in.q2)) + in.n_a) * params.bytes_per_amplitude;
  f.M_node = in.p * f.M_proc;
  f.M_cluster = in.p * static_cast<double>(in.N) * f.M_proc;
  if (!in.machine.empty()) {
    auto it = params.rate_card.find(in.machine);
    if (it == params.rate_card.end()) throw Error("unknown machine type `" + in.machine + "` in rate card");
    f.cost = f.T_bill * it->second.price_per_hour;
  }
  return f;
}

Calibration calibrate(const std::vector<BenchRun>& runs, const CostParams& base) {
  if (runs.size() < 3) throw Error("calibration needs at least 3 measured runs");
  const Eigen::Index m = static_cast<Eigen::Index>(runs.size());
  Eigen::MatrixXd A(m, 3);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    check_input(runs[i].shape);
    const Regressors r = regressors(runs[i].shape);
    A.row(i) << r.prefix, r.branch, r.amps;
    y(i) = runs[i].seconds;
  }
  // Relative weighting: every run counts by its relative error.
  for (Eigen::Index i = 0; i < m; ++i) {
    if (y(i) <= 0) throw Error("measured times must be positive");
    A.row(i) /= y(i);
    y(i) = 1;
  }
  Eigen::VectorXd scale = A.colwise().norm();
  for (int j = 0; j < 3; ++j)
    if (scale(j) == 0) throw Error("rank-deficient calibration: a term of the model is never exercised");
  Eigen::MatrixXd As = A * scale.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(As);
  qr.setThreshold(1e-10);
  if (qr.rank() < 3)
    throw Error("rank-deficient calibration: runs do not separate the three terms (rank " + std::to_string(qr.rank()) + ")");
  Eigen::VectorXd z = qr.solve(y);
  Eigen::VectorXd coef = z.cwiseQuotient(scale);
  if (coef(0) <= 0) throw Error("calibration produced a non-positive C1");
  Calibration c;
  c.params = base;
  c.params.c1 = coef(0);
  c.params.c2 = coef(1) / coef(0);
  c.params.c3 = std::max(0.0, coef(2));
  c.relative_residual = (As * z - y).norm() / y.norm();
  return c;
}

std::map<std::string, MachineType> load_rate_card(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open rate card " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  std::map<std::string, MachineType> out;
  for (const auto& [name, v] : j.at("machines").items())
    out[name] = {v.at("vcpus").get<int>(), v.at("ram_gib").get<double>(), v.at("price_per_hour").get<double>()};
  return out;
}

CostParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open cost parameters " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  CostParams p;
  p.c1 = j.at("c1");
  p.c2 = j.at("c2");
  p.c3 = j.at("c3");
  p.c4 = j.value("c4", 2.0);
  p.bytes_per_amplitude = j.value("bytes_per_amplitude", 8.0);
  if (j.contains("omega")) {
    p.omega.clear();
    for (const auto& e : j["omega"]) p.omega.emplace_back(e.at(0).get<int>(), e.at(1).get<double>());
  }
  p.validate();
  return p;
}

void save_params(const CostParams& p, const std::string& path) {
  nlohmann::json j{{"c1", p.c1}, {"c2", p.c2}, {"c3", p.c3}, {"c4", p.c4}, {"bytes_per_amplitude", p.bytes_per_amplitude}};
  j["omega"] = nlohmann::json::array();
  for (auto [q, w] : p.omega) j["omega"].push_back({q, w});
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace sfsim
