#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sfsim/types.hpp"

namespace sfsim {

enum class GateKind { H, T, X_HALF, Y_HALF, CZ, ISWAP, GENERIC_2Q };

const char* gate_name(GateKind k);
std::optional<GateKind> gate_kind_from_name(std::string_view name);

struct Gate {
  int cycle = 0;
  GateKind kind = GateKind::H;
  std::array<int, 2> q{0, -1};
  // Only set for GENERIC_2Q. Basis index is 2*bit(q[0]) + bit(q[1]).
  std::shared_ptr<const Mat4> matrix;

  static Gate one(int cycle, GateKind kind, int q0);
  static Gate two(int cycle, GateKind kind, int q0, int q1);
  static Gate generic(int cycle, int q0, int q1, const Mat4& m);

  int arity() const { return q[1] < 0 ? 1 : 2; }
  bool is_diagonal() const { return kind == GateKind::T || kind == GateKind::CZ; }
  bool operator==(const Gate& o) const;
};

Mat2 gate_matrix_1q(GateKind k);
Mat4 gate_matrix_2q(const Gate& g);

struct GridShape {
  int rows = 0;
  int cols = 0;
};

class Circuit {
 public:
  Circuit() = default;
  // Validates and stable-sorts gates by cycle. Throws Error on invalid input.
  Circuit(int rows, int cols, std::vector<Gate> gates);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int num_qubits() const { return rows_ * cols_; }
  const std::vector<Gate>& gates() const { return gates_; }
  int num_cycles() const { return num_cycles_; }
  std::string depth_label() const { return depth_label_; }
  bool nearest_neighbor() const { return nearest_neighbor_; }
  bool adjacent(int a, int b) const;
  std::uint64_t hash() const;

  bool operator==(const Circuit& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && gates_ == o.gates_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  int num_cycles_ = 0;
  bool nearest_neighbor_ = true;
  std::string depth_label_ = "0";
  std::vector<Gate> gates_;
};

// Grid comes from `grid` if given, else inferred from the two-qubit gate adjacency.
Circuit parse_circuit(std::string_view text, std::optional<GridShape> grid = std::nullopt);
std::string serialize_circuit(const Circuit& c);

// "inst_7x6_26_0.txt" -> 7x6.
std::optional<GridShape> grid_from_filename(const std::string& path);
Circuit load_circuit(const std::string& path, std::optional<GridShape> grid = std::nullopt);
void save_circuit(const Circuit& c, const std::string& path);

enum class Orientation { Horizontal, Vertical };

struct Cut {
  Orientation orientation = Orientation::Horizontal;
  int position = 1;  // first row (horizontal) or column (vertical) of block_b
  std::vector<int> block_a;
  std::vector<int> block_b;
};

Cut make_cut(const Circuit& c, Orientation o, int position);
std::vector<Cut> all_cuts(const Circuit& c);
Cut choose_cut(const Circuit& c);
int count_cross_gates(const Circuit& c, const Cut& cut);
std::string describe_cut(const Cut& cut);

}  // namespace sfsim
