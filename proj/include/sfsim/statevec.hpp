#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "sfsim/amplitudes.hpp"
#include "sfsim/circuit.hpp"
#include "sfsim/types.hpp"

namespace sfsim {

// Basis index convention: local qubit j lives at bit (n_qubits - 1 - j) unless a
// caller supplies an explicit position map.
struct StateBlock {
  int n_qubits = 0;
  std::vector<cfloat> amps;

  static StateBlock basis(int n, std::uint64_t index = 0);
  double norm2() const;
};

enum class ClusterKind { DIAGONAL, X_HALF, Y_HALF, H, GENERIC };

struct GateCluster {
  ClusterKind kind = ClusterKind::DIAGONAL;
  // One-qubit kinds: bit positions acted on.
  std::uint64_t mask = 0;
  // DIAGONAL: per-position T count mod 8, stored as three bit planes, and for each
  // position a the mask of positions b < a paired with it by a CZ.
  std::uint64_t t_planes[3] = {0, 0, 0};
  std::vector<std::uint64_t> cz_partner;
  // GENERIC: (pos0, pos1, matrix) applied in order; supports are disjoint.
  struct Op2 {
    int p0, p1;
    Mat4 m;
  };
  std::vector<Op2> generic;
  // Indices into the gate list that produced the cluster.
  std::vector<int> gates;
  // Every bit position touched.
  std::uint64_t support = 0;

  int t_count(int pos) const;
};

// Per-position zero flags over fixed-size chunks of a StateBlock. A set flag means
// the chunk is known to be exactly zero.
struct ZeroMask {
  int chunk_bits = 0;
  std::vector<std::uint8_t> zero;

  static ZeroMask none(int n_qubits, int chunk_bits);
  std::size_t zero_count() const;
};

struct RunOptions {
  std::size_t slice_bytes = 256 * 1024;
  // 0 = use physical memory.
  std::uint64_t max_bytes = 0;
};

void apply_gate(StateBlock& s, const Gate& g);
void apply_matrix_1q(StateBlock& s, int pos, const Mat2& m);
void apply_matrix_2q(StateBlock& s, int pos0, int pos1, const Mat4& m);

// `position[q]` gives the bit position of gate qubit q.
std::vector<GateCluster> cluster_gate_list(const std::vector<Gate>& gates, const std::vector<int>& position);
std::vector<GateCluster> cluster_gates(const Circuit& c);

void apply_diagonal_cluster(StateBlock& s, const GateCluster& cl);
void apply_cluster(StateBlock& s, const GateCluster& cl);

// Streams each slice of the array through every consecutive slice-local operation
// before moving on. `zeros` (optional) lets the kernels skip known-zero chunks.
void run_clusters(StateBlock& s, const std::vector<GateCluster>& clusters, std::size_t slice_bytes,
                  ZeroMask* zeros = nullptr);

struct CompiledOps;

// Clusters lowered to kernel operations once, for blocks that replay the same
// segment many times.
class CompiledClusters {
 public:
  CompiledClusters() = default;
  CompiledClusters(const std::vector<GateCluster>& clusters, int n_qubits);
  int n_qubits() const { return n_qubits_; }

 private:
  friend void run_clusters(StateBlock&, const CompiledClusters&, std::size_t, ZeroMask*);
  int n_qubits_ = 0;
  std::shared_ptr<const CompiledOps> ops_;
};

void run_clusters(StateBlock& s, const CompiledClusters& compiled, std::size_t slice_bytes, ZeroMask* zeros = nullptr);

// Applies a 2x2 operator (not necessarily unitary) and updates the zero mask when it
// annihilates whole chunks.
void apply_operator_1q(StateBlock& s, int pos, const Mat2& m, ZeroMask* zeros = nullptr);

StateBlock run_full(const Circuit& c, const RunOptions& opt = {});
std::uint64_t state_bytes(int n_qubits);

AmplitudeBatch fetch_amplitudes(const StateBlock& s, const std::vector<std::uint64_t>& indices);

// Chunks of 2^chunk_bits amplitudes that are exactly zero.
ZeroMask scan_zero_chunks(const StateBlock& s, int chunk_bits);

}  // namespace sfsim
