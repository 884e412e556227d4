#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "sfsim/amplitudes.hpp"
#include "sfsim/circuit.hpp"
#include "sfsim/statevec.hpp"

namespace sfsim {

struct Term {
  Mat2 left;   // acts on the gate's first qubit, weight folded in
  Mat2 right;  // acts on the gate's second qubit
};

struct TermDecomposition {
  GateKind gate = GateKind::CZ;
  std::vector<Term> terms;
  int rank = 0;
  std::vector<double> singular_values;
};

TermDecomposition schmidt_decompose(const Mat4& u);
TermDecomposition schmidt_decompose(const Gate& g);
Mat4 reconstruct(const TermDecomposition& d);

// Mixed-radix path label: digit k selects the term of cross gate k. Digit 0 is the
// most significant.
struct PathId {
  std::vector<int> digits;
  std::uint64_t encode(const std::vector<int>& radix) const;
  static PathId decode(std::uint64_t value, const std::vector<int>& radix);
};

struct SimPlan {
  Cut cut;
  int x = 0;
  std::vector<int> branch;  // B_k per cross gate
  int x_p = 0;
  int x_b = 0;
  int d_p = 0;
  int d_b = 0;
  double fidelity = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t prefix_space = 1;
  std::uint64_t branch_space = 1;
  std::vector<std::uint64_t> retained;  // ascending prefix ids
  std::uint64_t n_a = 0;
  std::uint64_t circuit_hash = 0;

  double path_space_log2() const;
  std::uint64_t hash(std::uint64_t request_hash) const;
};

struct PlanOptions {
  std::optional<Cut> cut;
  double fidelity = 1.0;
  std::optional<int> x_p;
  std::optional<int> x_b;
  std::uint64_t seed = 0;
  int workers = 1;
  std::uint64_t n_a = 1;
};

SimPlan make_plan(const Circuit& c, const PlanOptions& opt = {});
std::uint64_t retained_count(double fidelity, std::uint64_t prefix_space);
std::uint64_t request_hash(const std::vector<std::uint64_t>& requests);

struct EngineOptions {
  bool skip_zeros = true;
  std::size_t slice_bytes = 256 * 1024;
};

// Block programs, term operators and request maps are built once per (circuit, plan,
// requests); all run_* methods are const and share no mutable state.
class HybridEngine {
 public:
  HybridEngine(const Circuit& c, const SimPlan& plan, std::vector<std::uint64_t> requests,
               EngineOptions opt = {});
  ~HybridEngine();
  HybridEngine(HybridEngine&&) noexcept;

  const SimPlan& plan() const;
  const std::vector<std::uint64_t>& requests() const;
  int block_qubits(int block) const;

  AmplitudeBatch run_path(std::uint64_t path) const;
  AmplitudeBatch run_prefix_tree(std::uint64_t prefix) const;
  AmplitudeBatch run_approx() const;
  // Squared norm of every path contribution over the whole space.
  std::vector<double> path_norms() const;
  // Calls `fn(path, a, b)` for every completion of `prefix`; a and b are the final
  // block states.
  void for_each_leaf(std::uint64_t prefix,
                     const std::function<void(std::uint64_t, const StateBlock&, const StateBlock&)>& fn) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

AmplitudeBatch run_path(const Circuit& c, const SimPlan& plan, const PathId& path,
                        const std::vector<std::uint64_t>& requests);
AmplitudeBatch run_prefix_tree(const Circuit& c, const SimPlan& plan, std::uint64_t prefix,
                               const std::vector<std::uint64_t>& requests);
AmplitudeBatch run_approx(const Circuit& c, const SimPlan& plan, const std::vector<std::uint64_t>& requests);

// Chunks of a block state that are exactly zero; chunk size fixed per block size.
ZeroMask skip_zero_blocks(const StateBlock& s);
int default_chunk_bits(int n_qubits);

double estimate_fidelity(const AmplitudeBatch& reference, const AmplitudeBatch& candidate);

}  // namespace sfsim
