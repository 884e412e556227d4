#include "sfsim/benchgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "json.hpp"

#include "sfsim/pathsum.hpp"
#include "sfsim/rng.hpp"

namespace sfsim {

namespace {

int mod4(int v) { return ((v % 4) + 4) % 4; }

// Horizontal patterns are 0..3, vertical 4..7.
constexpr int kOrderV1[8] = {4, 6, 0, 2, 5, 7, 1, 3};
constexpr int kOrderV2[8] = {0, 4, 1, 6, 2, 5, 3, 7};

bool is_non_diagonal_1q(GateKind k) { return k == GateKind::X_HALF || k == GateKind::Y_HALF; }

}  // namespace

std::vector<std::pair<int, int>> layout_pattern(int rows, int cols, int pattern) {
  std::vector<std::pair<int, int>> out;
  const int k = pattern % 4;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (pattern < 4) {
        if (c + 1 < cols && mod4(c - 2 * r - k) == 0) out.emplace_back(r * cols + c, r * cols + c + 1);
      } else {
        if (r + 1 < rows && mod4(r - 2 * c - k) == 0) out.emplace_back(r * cols + c, (r + 1) * cols + c);
      }
    }
  return out;
}

int pattern_for_cycle(BenchVersion v, int t) {
  const int* order = v == BenchVersion::V1 ? kOrderV1 : kOrderV2;
  return order[(t - 1) % 8];
}

Circuit generate(const GenSpec& spec) {
  if (spec.rows < 1 || spec.cols < 1 || spec.rows * spec.cols < 2) throw Error("grid must hold at least 1x2 qubits");
  if (spec.depth < 1) throw Error("depth must be at least 1");
  if (spec.version == BenchVersion::V2 && !spec.include_final_h) throw Error("v2 circuits always end with a Hadamard layer");
  if (spec.two_qubit != GateKind::CZ && spec.two_qubit != GateKind::ISWAP) throw Error("two-qubit kind must be cz or is");
  const int n = spec.rows * spec.cols;
  const int d = spec.depth;
  const bool v2 = spec.version == BenchVersion::V2;
  CounterRng rng(spec.seed);

  std::vector<Gate> gates;
  for (int q = 0; q < n; ++q) gates.push_back(Gate::one(0, GateKind::H, q));

  // What each qubit did in the previous cycle: 0 idle/H, 1 two-qubit, else the 1q kind.
  std::vector<int> prev_two(n, 0);
  std::vector<int> prev_kind(n, -1);
  std::vector<int> last_1q(n, -1);
  const GateKind choices[3] = {GateKind::X_HALF, GateKind::Y_HALF, GateKind::T};

  for (int t = 1; t <= d; ++t) {
    std::vector<int> busy(n, 0);
    auto pairs = layout_pattern(spec.rows, spec.cols, pattern_for_cycle(spec.version, t));
    std::vector<Gate> cycle_gates;
    for (auto [a, b] : pairs) {
      cycle_gates.push_back(Gate::two(t, spec.two_qubit, a, b));
      busy[a] = busy[b] = 1;
    }
    std::vector<int> now_kind(n, -1);
    for (int q = 0; q < n; ++q) {
      if (busy[q]) continue;
      std::optional<GateKind> g;
      if (prev_two[q]) {
        if (last_1q[q] < 0) {
          g = GateKind::T;
        } else {
          std::vector<GateKind> opts;
          for (GateKind k : choices)
            if (static_cast<int>(k) != last_1q[q]) opts.push_back(k);
          g = opts[rng() % opts.size()];
        }
        if (v2 && *g == GateKind::T) {
          std::vector<GateKind> opts;
          for (GateKind k : {GateKind::X_HALF, GateKind::Y_HALF})
            if (static_cast<int>(k) != last_1q[q]) opts.push_back(k);
          g = opts[rng() % opts.size()];
        }
      } else if (v2 && prev_kind[q] >= 0 && is_non_diagonal_1q(static_cast<GateKind>(prev_kind[q])) && t < d) {
        g = GateKind::T;
      }
      if (g) {
        cycle_gates.push_back(Gate::one(t, *g, q));
        last_1q[q] = static_cast<int>(*g);
        now_kind[q] = static_cast<int>(*g);
      }
    }
    std::sort(cycle_gates.begin(), cycle_gates.end(), [](const Gate& a, const Gate& b) { return a.q[0] < b.q[0]; });
    gates.insert(gates.end(), cycle_gates.begin(), cycle_gates.end());
    prev_two = busy;
    prev_kind = now_kind;
  }
  if (spec.include_final_h)
    for (int q = 0; q < n; ++q) gates.push_back(Gate::one(d + 1, GateKind::H, q));
  return Circuit(spec.rows, spec.cols, std::move(gates));
}

std::string instance_filename(const GenSpec& spec) {
  return "inst_" + std::to_string(spec.rows) + "x" + std::to_string(spec.cols) + "_" + std::to_string(spec.depth + 1) +
         "_" + std::to_string(spec.seed) + ".txt";
}

HardnessReport audit(const Circuit& c) {
  HardnessReport r;
  const int n = c.num_qubits();
  r.depth_label = c.depth_label();
  r.total_gates = static_cast<int>(c.gates().size());
  r.diagonal_runs_per_qubit.assign(n, 0);

  std::vector<std::vector<const Gate*>> line(n);
  for (const Gate& g : c.gates()) {
    if (g.arity() == 2) ++r.two_qubit_gates;
    if (g.kind == GateKind::T) ++r.t_count;
    for (int k = 0; k < g.arity(); ++k) line[g.q[k]].push_back(&g);
  }
  for (int q = 0; q < n; ++q) {
    // Diagonal run: CZ, one or more T, CZ with nothing else between.
    bool after_cz = false;
    int ts = 0;
    int last_1q = -1;
    const Gate* prev = nullptr;
    for (const Gate* g : line[q]) {
      if (g->kind == GateKind::CZ) {
        if (after_cz && ts > 0) ++r.diagonal_runs_per_qubit[q];
        after_cz = true;
        ts = 0;
      } else if (g->kind == GateKind::T) {
        ++ts;
      } else {
        after_cz = false;
        ts = 0;
      }
      if (g->kind == GateKind::T && prev && prev->kind == GateKind::CZ && prev->cycle == g->cycle - 1) ++r.t_after_cz;
      if (g->arity() == 1 && g->kind != GateKind::H) {
        if (static_cast<int>(g->kind) == last_1q) ++r.repeat_violations;
        last_1q = static_cast<int>(g->kind);
      }
      prev = g;
    }
    r.diagonal_runs += r.diagonal_runs_per_qubit[q];
  }

  if (c.num_cycles() > 1) {
    int h = 0, other = 0;
    for (const Gate& g : c.gates())
      if (g.cycle == c.num_cycles() - 1) (g.kind == GateKind::H ? h : other)++;
    r.final_h = h == n && other == 0;
  }

  if (n >= 2) {
    std::map<GateKind, double> rank_log2;
    for (const Cut& cut : all_cuts(c)) {
      CutReport cr;
      cr.cut = cut;
      std::vector<char> in_a(n, 0);
      for (int q : cut.block_a) in_a[q] = 1;
      for (const Gate& g : c.gates()) {
        if (g.arity() != 2 || in_a[g.q[0]] == in_a[g.q[1]]) continue;
        ++cr.cross_gates;
        if (g.kind == GateKind::GENERIC_2Q) {
          cr.path_space_log2 += std::log2(static_cast<double>(schmidt_decompose(g).terms.size()));
        } else {
          if (!rank_log2.count(g.kind)) rank_log2[g.kind] = std::log2(static_cast<double>(schmidt_decompose(g).terms.size()));
          cr.path_space_log2 += rank_log2[g.kind];
        }
      }
      r.cuts.push_back(cr);
    }
    const Cut best = choose_cut(c);
    for (const CutReport& cr : r.cuts)
      if (cr.cut.orientation == best.orientation && cr.cut.position == best.position) r.best = cr;
  }
  return r;
}

std::string audit_json(const HardnessReport& r) {
  using nlohmann::json;
  auto cut_json = [](const CutReport& c) {
    return json{{"cut", describe_cut(c.cut)},
                {"orientation", c.cut.orientation == Orientation::Horizontal ? "horizontal" : "vertical"},
                {"position", c.cut.position},
                {"block_a", c.cut.block_a.size()},
                {"block_b", c.cut.block_b.size()},
                {"cross_gates", c.cross_gates},
                {"path_space_log2", c.path_space_log2}};
  };
  json j;
  j["depth_label"] = r.depth_label;
  j["total_gates"] = r.total_gates;
  j["two_qubit_gates"] = r.two_qubit_gates;
  j["t_count"] = r.t_count;
  j["diagonal_runs"] = r.diagonal_runs;
  j["diagonal_runs_per_qubit"] = r.diagonal_runs_per_qubit;
  j["final_h"] = r.final_h;
  j["t_after_cz"] = r.t_after_cz;
  j["repeat_violations"] = r.repeat_violations;
  j["no_repeat_rule_assumed"] = r.no_repeat_rule_assumed;
  j["best_cut"] = cut_json(r.best);
  j["cuts"] = json::array();
  for (const auto& c : r.cuts) j["cuts"].push_back(cut_json(c));
  return j.dump(2);
}

}  // namespace sfsim
