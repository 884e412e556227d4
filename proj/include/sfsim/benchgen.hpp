#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfsim/circuit.hpp"

namespace sfsim {

enum class BenchVersion { V1, V2 };

struct GenSpec {
  int rows = 4;
  int cols = 4;
  int depth = 10;  // working cycles d
  bool include_final_h = true;
  GateKind two_qubit = GateKind::CZ;
  std::uint64_t seed = 0;
  BenchVersion version = BenchVersion::V2;
};

Circuit generate(const GenSpec& spec);
std::string instance_filename(const GenSpec& spec);

// Nearest-neighbour pairs of one of the eight layout patterns (0-3 horizontal,
// 4-7 vertical), ascending by first qubit.
std::vector<std::pair<int, int>> layout_pattern(int rows, int cols, int pattern);
// Pattern used by working cycle t (1-based).
int pattern_for_cycle(BenchVersion v, int t);

struct CutReport {
  Cut cut;
  int cross_gates = 0;
  double path_space_log2 = 0;
};

struct HardnessReport {
  std::string depth_label;
  int total_gates = 0;
  int two_qubit_gates = 0;
  int t_count = 0;
  int diagonal_runs = 0;
  std::vector<int> diagonal_runs_per_qubit;
  bool final_h = false;
  int t_after_cz = 0;
  int repeat_violations = 0;
  bool no_repeat_rule_assumed = true;
  std::vector<CutReport> cuts;
  CutReport best;
};

HardnessReport audit(const Circuit& c);
std::string audit_json(const HardnessReport& r);

}  // namespace sfsim
