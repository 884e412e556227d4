#include <cmath>

#include "doctest.h"
#include "oracle.hpp"
#include "sfsim/benchgen.hpp"
#include "sfsim/statevec.hpp"

using namespace sfsim;

namespace {

double max_diff(const StateBlock& s, const std::vector<oracle::cd>& ref) {
  double d = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) d = std::max(d, std::abs(cdouble(s.amps[i]) - ref[i]));
  return d;
}

}  // namespace

TEST_CASE("clustered run matches naive replay") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    GenSpec g;
    g.rows = 3;
    g.cols = 3 + static_cast<int>(seed % 2);
    g.depth = 10 + static_cast<int>(seed);
    g.seed = seed;
    g.version = seed % 3 == 0 ? BenchVersion::V1 : BenchVersion::V2;
    g.two_qubit = seed == 4 ? GateKind::ISWAP : GateKind::CZ;
    Circuit c = generate(g);
    CHECK(max_diff(run_full(c), oracle::simulate(c)) < 1e-5);
  }
}

TEST_CASE("norm preserved") {
  GenSpec g;
  g.rows = 4;
  g.cols = 4;
  g.depth = 26;
  StateBlock s = run_full(generate(g));
  CHECK(std::abs(s.norm2() - 1.0) < 1e-4);
}

TEST_CASE("slice size does not change results") {
  GenSpec g;
  g.rows = 3;
  g.cols = 4;
  g.depth = 14;
  Circuit c = generate(g);
  StateBlock a = run_full(c, RunOptions{1 << 20, 0});
  StateBlock b = run_full(c, RunOptions{256, 0});
  CHECK(a.amps == b.amps);
}

TEST_CASE("single gates against explicit matrices") {
  StateBlock s = StateBlock::basis(2, 0);
  apply_gate(s, Gate::one(0, GateKind::H, 0));
  apply_gate(s, Gate::one(0, GateKind::H, 1));
  apply_gate(s, Gate::two(1, GateKind::CZ, 0, 1));
  CHECK(std::abs(s.amps[3] - cfloat(-0.5f, 0)) < 1e-6);
  CHECK(std::abs(s.amps[1] - cfloat(0.5f, 0)) < 1e-6);

  StateBlock t = StateBlock::basis(2, 1);  // |01>: qubit 1 set
  apply_gate(t, Gate::two(0, GateKind::ISWAP, 0, 1));
  CHECK(std::abs(t.amps[2] - cfloat(0, 1)) < 1e-6);
  CHECK(std::abs(t.amps[1]) < 1e-6);
}

TEST_CASE("diagonal gates merge into one cluster") {
  std::vector<Gate> gates{Gate::one(0, GateKind::T, 0), Gate::two(1, GateKind::CZ, 0, 1),
                          Gate::one(2, GateKind::T, 1), Gate::one(3, GateKind::H, 0)};
  Circuit c(1, 2, gates);
  auto cl = cluster_gates(c);
  REQUIRE(cl.size() == 2);
  CHECK(cl[0].kind == ClusterKind::DIAGONAL);
  CHECK(cl[0].gates.size() == 3);
  CHECK(cl[1].kind == ClusterKind::H);
}

TEST_CASE("zero chunks tracked through projectors") {
  StateBlock s = StateBlock::basis(4, 0);
  for (int q = 0; q < 4; ++q) apply_gate(s, Gate::one(0, GateKind::H, q));
  ZeroMask z = ZeroMask::none(4, 2);
  apply_operator_1q(s, 3, Mat2{1, 0, 0, 0}, &z);  // project the top bit onto 0
  ZeroMask scan = scan_zero_chunks(s, 2);
  CHECK(scan.zero_count() == 2);
  for (std::size_t i = 0; i < scan.zero.size(); ++i)
    if (z.zero[i]) CHECK(scan.zero[i]);
  CHECK(std::abs(s.norm2() - 0.5) < 1e-6);
}

TEST_CASE("memory budget enforced") {
  GenSpec g;
  g.rows = 4;
  g.cols = 4;
  g.depth = 4;
  CHECK_THROWS_AS(run_full(generate(g), RunOptions{1 << 16, 1024}), MemoryBudgetError);
  CHECK(state_bytes(10) == 8192);
}

TEST_CASE("fetch amplitudes by index") {
  StateBlock s = StateBlock::basis(3, 5);
  AmplitudeBatch b = fetch_amplitudes(s, {5, 0});
  CHECK(b.amps[0] == cdouble(1, 0));
  CHECK(b.amps[1] == cdouble(0, 0));
}
