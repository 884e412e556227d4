#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sfsim/types.hpp"

namespace sfsim {

struct MachineType {
  int vcpus = 0;
  double ram_gib = 0;
  double price_per_hour = 0;
};

struct CostParams {
  double c1 = 1e-9;  // seconds per amplitude update
  double c2 = 1.0;
  double c3 = 1e-9;  // seconds per accumulated amplitude
  double c4 = 2;     // state copies held per process
  std::vector<std::pair<int, double>> omega{{1, 1.0}};
  std::map<std::string, MachineType> rate_card;
  double bytes_per_amplitude = 8;

  double omega_at(int p) const;
  void validate() const;
};

struct ForecastInput {
  double f = 1;
  int q1 = 0, q2 = 0;
  double d_p = 0, d_b = 0;
  int x_p = 0, x_b = 0;
  double n_a = 0;
  int p = 1;  // processes per node
  int N = 1;  // nodes
  std::string machine;
};

struct Forecast {
  double T_tot = 0, T_bill = 0, T_clock = 0;  // hours
  double M_proc = 0, M_node = 0, M_cluster = 0;  // bytes
  double cost = 0;
};

Forecast forecast(const CostParams& params, const ForecastInput& in);

// Seconds predicted for the whole run (all processes), before contention.
double total_seconds(const CostParams& params, const ForecastInput& in);

struct BenchRun {
  ForecastInput shape;
  double seconds = 0;  // measured total process time
};

struct Calibration {
  CostParams params;
  double relative_residual = 0;
};

Calibration calibrate(const std::vector<BenchRun>& runs, const CostParams& base = {});

std::map<std::string, MachineType> load_rate_card(const std::string& path);
CostParams load_params(const std::string& path);
void save_params(const CostParams& p, const std::string& path);

}  // namespace sfsim
