#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "sfsim/costmodel.hpp"

using namespace sfsim;

namespace {

ForecastInput shape(int q1, int q2, double dp, double db, int xp, int xb, double na, double f = 1.0) {
  ForecastInput in;
  in.q1 = q1;
  in.q2 = q2;
  in.d_p = dp;
  in.d_b = db;
  in.x_p = xp;
  in.x_b = xb;
  in.n_a = na;
  in.f = f;
  return in;
}

// Runtime formula written out directly.
double model(double c1, double c2, double c3, const ForecastInput& in) {
  const double s = in.q1 * std::pow(2.0, in.q1) + in.q2 * std::pow(2.0, in.q2);
  return c1 * in.f * std::pow(2.0, in.x_p) * s * (in.d_p + c2 * std::pow(2.0, in.x_b) * in.d_b) +
         c3 * std::pow(2.0, in.x_p + in.x_b) * in.n_a;
}

}  // namespace

TEST_CASE("forecast evaluates the runtime model") {
  CostParams p;
  p.c1 = 2e-9;
  p.c2 = 0.7;
  p.c3 = 5e-8;
  ForecastInput in = shape(10, 12, 20, 6, 5, 3, 1000);
  CHECK(total_seconds(p, in) == doctest::Approx(model(2e-9, 0.7, 5e-8, in)).epsilon(1e-12));
}

TEST_CASE("synthetic timings recover the constants") {
  const double c1 = 3.3e-9, c2 = 0.45, c3 = 2.1e-8;
  std::vector<BenchRun> runs;
  for (int q : {8, 10, 12})
    for (int xb : {1, 3})
      for (double na : {1.0, 1e4, 1e5}) {
        ForecastInput in = shape(q, q + 1, 12, 5, 4, xb, na);
        runs.push_back({in, model(c1, c2, c3, in)});
      }
  Calibration cal = calibrate(runs);
  CHECK(cal.params.c1 == doctest::Approx(c1).epsilon(0.01));
  CHECK(cal.params.c2 == doctest::Approx(c2).epsilon(0.01));
  CHECK(cal.params.c3 == doctest::Approx(c3).epsilon(0.01));
  CHECK(cal.relative_residual < 1e-6);
}

TEST_CASE("rank deficient calibration rejected") {
  ForecastInput in = shape(10, 10, 10, 5, 3, 2, 100);
  std::vector<BenchRun> same{{in, 1.0}, {in, 1.0}, {in, 1.0}};
  CHECK_THROWS_AS(calibrate(same), Error);
  CHECK_THROWS_AS(calibrate({{in, 1.0}, {in, 1.0}}), Error);
}

TEST_CASE("linearity in f and monotonicity") {
  CostParams p;
  p.c3 = 0;
  ForecastInput a = shape(10, 11, 20, 6, 5, 3, 100, 0.5);
  ForecastInput b = a;
  b.f = 0.25;
  CHECK(total_seconds(p, b) == doctest::Approx(total_seconds(p, a) / 2));
  p.c3 = 1e-8;
  ForecastInput c = a;
  c.n_a *= 2;
  CHECK(total_seconds(p, c) >= total_seconds(p, a));
  c = a;
  c.d_b += 1;
  CHECK(total_seconds(p, c) >= total_seconds(p, a));
}

TEST_CASE("billing, wallclock and memory") {
  CostParams p;
  p.omega = {{1, 1.0}, {16, 1.5}, {32, 2.0}};
  p.rate_card["box"] = MachineType{96, 86.4, 0.72};
  ForecastInput in = shape(20, 21, 30, 10, 8, 4, 1e6);
  in.p = 24;
  in.N = 10;
  in.machine = "box";
  Forecast f = forecast(p, in);
  CHECK(f.T_bill == doctest::Approx(1.75 * f.T_tot / 24));
  CHECK(f.T_clock == doctest::Approx(f.T_bill / 10));
  CHECK(f.M_cluster == doctest::Approx(24 * 10 * f.M_proc));
  CHECK(f.M_proc == doctest::Approx((2 * (std::pow(2.0, 20) + std::pow(2.0, 21)) + 1e6) * 8));
  CHECK(f.cost == doctest::Approx(f.T_bill * 0.72));
  ForecastInput deeper = in;
  deeper.d_p *= 2;
  CHECK(forecast(p, deeper).M_proc == f.M_proc);
  in.machine = "nope";
  CHECK_THROWS_AS(forecast(p, in), Error);
}

TEST_CASE("omega table validation") {
  CostParams p;
  p.omega = {{1, 1.0}, {8, 0.9}};
  CHECK_THROWS_AS(p.validate(), Error);
  p.omega = {{1, 1.0}, {8, 1.4}};
  CHECK(p.omega_at(4) == doctest::Approx(1.0 + 0.4 * 3 / 7));
}

TEST_CASE("shipped rate card loads") {
  auto card = load_rate_card(std::string(SFSIM_DATA_DIR) + "/rate_card_2018-06.json");
  REQUIRE(card.count("n1-highcpu-96"));
  CHECK(card["n1-highcpu-96"].price_per_hour == doctest::Approx(0.72));
  CHECK(card["n1-highcpu-32"].price_per_hour == doctest::Approx(0.24));
}

TEST_CASE("params round trip") {
  CostParams p;
  p.c1 = 1.5e-9;
  p.c2 = 0.3;
  p.c3 = 4e-8;
  p.omega = {{1, 1.0}, {4, 1.2}};
  auto path = (std::filesystem::temp_directory_path() / "sfsim_params_test.json").string();
  save_params(p, path);
  CostParams q = load_params(path);
  CHECK(q.c1 == p.c1);
  CHECK(q.c2 == p.c2);
  CHECK(q.c3 == p.c3);
  CHECK(q.omega == p.omega);
  std::filesystem::remove(path);
}
