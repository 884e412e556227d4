#include "sfsim/pathsum.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>

#include "sfsim/hash.hpp"
#include "sfsim/rng.hpp"

namespace sfsim {

namespace {

constexpr double kSingularTol = 1e-9;

bool block_nonzero(const Mat2& m) {
  return std::any_of(m.begin(), m.end(), [](const cdouble& v) { return std::abs(v) > 1e-12; });
}

Mat2 unit(int i, int j) {
  Mat2 m{};
  m[i * 2 + j] = 1;
  return m;
}

bool lex_less(const Mat2& a, const Mat2& b) {
  for (int k = 0; k < 4; ++k) {
    if (a[k].real() != b[k].real()) return a[k].real() < b[k].real();
    if (a[k].imag() != b[k].imag()) return a[k].imag() < b[k].imag();
  }
  return false;
}

std::vector<Gate> ordered_gates(const Circuit& c) {
  std::vector<Gate> g = c.gates();
  auto lead = [](const Gate& x) { return x.arity() == 2 ? std::min(x.q[0], x.q[1]) : x.q[0]; };
  std::stable_sort(g.begin(), g.end(), [&](const Gate& a, const Gate& b) {
    if (a.cycle != b.cycle) return a.cycle < b.cycle;
    return lead(a) < lead(b);
  });
  return g;
}

std::vector<int> side_of(const Circuit& c, const Cut& cut) {
  std::vector<int> side(c.num_qubits(), -1);
  for (int q : cut.block_a) side.at(q) = 0;
  for (int q : cut.block_b) side.at(q) = 1;
  if (std::count(side.begin(), side.end(), -1)) throw Error("cut does not cover every qubit");
  return side;
}

bool is_cross(const Gate& g, const std::vector<int>& side) {
  return g.arity() == 2 && side[g.q[0]] != side[g.q[1]];
}

std::uint64_t checked_product(const std::vector<int>& radix, int from, int to) {
  std::uint64_t p = 1;
  for (int k = from; k < to; ++k) {
    if (p > (std::uint64_t{1} << 62) / radix[k]) throw Error("path space exceeds 2^62; raise x_p or x_b balance");
    p *= radix[k];
  }
  return p;
}

// Local bit layout: qubits nearest the cut take the highest bit positions so that
// projectors on them zero whole chunks.
std::vector<int> block_positions(const Circuit& c, const Cut& cut, int block) {
  const auto& qs = block == 0 ? cut.block_a : cut.block_b;
  std::vector<int> order(qs.begin(), qs.end());
  auto dist = [&](int q) {
    int coord = cut.orientation == Orientation::Horizontal ? q / c.cols() : q % c.cols();
    return block == 0 ? cut.position - 1 - coord : coord - cut.position;
  };
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (dist(a) != dist(b)) return dist(a) < dist(b);
    return a < b;
  });
  std::vector<int> pos(c.num_qubits(), -1);
  const int n = static_cast<int>(order.size());
  for (int j = 0; j < n; ++j) pos[order[j]] = n - 1 - j;
  return pos;
}

}  // namespace

TermDecomposition schmidt_decompose(const Mat4& u) {
  Eigen::Matrix4cd r;
  for (int i1 = 0; i1 < 2; ++i1)
    for (int i2 = 0; i2 < 2; ++i2)
      for (int j1 = 0; j1 < 2; ++j1)
        for (int j2 = 0; j2 < 2; ++j2) r(2 * i1 + j1, 2 * i2 + j2) = u[(2 * i1 + i2) * 4 + 2 * j1 + j2];
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  TermDecomposition d;
  d.gate = GateKind::GENERIC_2Q;
  for (int k = 0; k < 4; ++k) d.singular_values.push_back(svd.singularValues()(k));
  d.rank = static_cast<int>(std::count_if(d.singular_values.begin(), d.singular_values.end(),
                                          [](double s) { return s > kSingularTol; }));

  // Projector form first: |i><j| on one side whenever that is already minimal.
  const int order[4][2] = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  for (int side = 0; side < 2; ++side) {
    std::vector<Term> terms;
    for (auto [i, j] : order) {
      Mat2 blk;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          blk[a * 2 + b] = side == 0 ? u[(2 * i + a) * 4 + 2 * j + b] : u[(2 * a + i) * 4 + 2 * b + j];
      if (!block_nonzero(blk)) continue;
      terms.push_back(side == 0 ? Term{unit(i, j), blk} : Term{blk, unit(i, j)});
    }
    if (static_cast<int>(terms.size()) == d.rank) {
      d.terms = std::move(terms);
      return d;
    }
  }

  std::vector<std::pair<double, Term>> svd_terms;
  for (int k = 0; k < d.rank; ++k) {
    const double s = svd.singularValues()(k);
    Term t;
    for (int a = 0; a < 4; ++a) {
      t.left[a] = s * svd.matrixU()(a, k);
      t.right[a] = std::conj(svd.matrixV()(a, k));
    }
    svd_terms.emplace_back(s, t);
  }
  std::stable_sort(svd_terms.begin(), svd_terms.end(), [](const auto& a, const auto& b) {
    if (std::abs(a.first - b.first) > kSingularTol) return a.first > b.first;
    if (lex_less(a.second.left, b.second.left)) return true;
    if (lex_less(b.second.left, a.second.left)) return false;
    return lex_less(a.second.right, b.second.right);
  });
  for (auto& [s, t] : svd_terms) d.terms.push_back(t);
  return d;
}

TermDecomposition schmidt_decompose(const Gate& g) {
  if (g.arity() != 2) throw Error(std::string("schmidt_decompose needs a two-qubit gate, got ") + gate_name(g.kind));
  TermDecomposition d = schmidt_decompose(gate_matrix_2q(g));
  d.gate = g.kind;
  return d;
}

Mat4 reconstruct(const TermDecomposition& d) {
  Mat4 m{};
  for (const Term& t : d.terms)
    for (int i1 = 0; i1 < 2; ++i1)
      for (int i2 = 0; i2 < 2; ++i2)
        for (int j1 = 0; j1 < 2; ++j1)
          for (int j2 = 0; j2 < 2; ++j2)
            m[(2 * i1 + i2) * 4 + 2 * j1 + j2] += t.left[i1 * 2 + j1] * t.right[i2 * 2 + j2];
  return m;
}

std::uint64_t PathId::encode(const std::vector<int>& radix) const {
  if (digits.size() != radix.size()) throw Error("path digit count does not match cross-gate count");
  std::uint64_t v = 0;
  for (std::size_t k = 0; k < digits.size(); ++k) {
    if (digits[k] < 0 || digits[k] >= radix[k]) throw Error("path digit out of range");
    v = v * radix[k] + digits[k];
  }
  return v;
}

PathId PathId::decode(std::uint64_t value, const std::vector<int>& radix) {
  PathId p;
  p.digits.resize(radix.size());
  for (int k = static_cast<int>(radix.size()) - 1; k >= 0; --k) {
    p.digits[k] = static_cast<int>(value % radix[k]);
    value /= radix[k];
  }
  if (value) throw Error("path id outside the path space");
  return p;
}

double SimPlan::path_space_log2() const {
  double s = 0;
  for (int b : branch) s += std::log2(static_cast<double>(b));
  return s;
}

std::uint64_t SimPlan::hash(std::uint64_t req_hash) const {
  std::uint64_t h = fnv1a("sfsim-plan");
  h = fnv1a_u64(circuit_hash, h);
  h = fnv1a_u64(static_cast<std::uint64_t>(cut.orientation == Orientation::Horizontal ? 0 : 1), h);
  h = fnv1a_u64(static_cast<std::uint64_t>(cut.position), h);
  h = fnv1a_u64(static_cast<std::uint64_t>(x_p), h);
  h = fnv1a_u64(static_cast<std::uint64_t>(x_b), h);
  h = fnv1a_u64(std::bit_cast<std::uint64_t>(fidelity), h);
  h = fnv1a_u64(seed, h);
  return fnv1a_u64(req_hash, h);
}

std::uint64_t retained_count(double fidelity, std::uint64_t prefix_space) {
  const double want = std::round(fidelity * static_cast<double>(prefix_space));
  return std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::max(want, 1.0)), 1, prefix_space);
}

std::uint64_t request_hash(const std::vector<std::uint64_t>& requests) {
  std::uint64_t h = fnv1a("sfsim-requests");
  for (std::uint64_t r : requests) h = fnv1a_u64(r, h);
  return h;
}

SimPlan make_plan(const Circuit& c, const PlanOptions& opt) {
  if (!(opt.fidelity > 0 && opt.fidelity <= 1)) throw Error("fidelity must lie in (0, 1]");
  SimPlan p;
  p.cut = opt.cut ? *opt.cut : choose_cut(c);
  p.fidelity = opt.fidelity;
  p.seed = opt.seed;
  p.n_a = opt.n_a;
  p.circuit_hash = c.hash();
  const auto side = side_of(c, p.cut);
  const auto gates = ordered_gates(c);
  std::vector<int> cross_at;  // index into `gates`
  for (int i = 0; i < static_cast<int>(gates.size()); ++i)
    if (is_cross(gates[i], side)) {
      cross_at.push_back(i);
      p.branch.push_back(static_cast<int>(schmidt_decompose(gates[i]).terms.size()));
    }
  p.x = static_cast<int>(p.branch.size());

  if (opt.x_p && opt.x_b && *opt.x_p + *opt.x_b != p.x)
    throw Error("x_p + x_b must equal the cross-gate count " + std::to_string(p.x));
  if ((opt.x_p && (*opt.x_p < 0 || *opt.x_p > p.x)) || (opt.x_b && (*opt.x_b < 0 || *opt.x_b > p.x)))
    throw Error("x_p/x_b out of range for " + std::to_string(p.x) + " cross gates");
  if (opt.x_p) {
    p.x_p = *opt.x_p;
  } else if (opt.x_b) {
    p.x_p = p.x - *opt.x_b;
  } else {
    // Smallest modeled work, with enough prefixes for the worker count and for the
    // retained fraction to resolve f.
    int min_xp = static_cast<int>(std::ceil(std::log2(std::max(1, opt.workers))));
    if (opt.fidelity < 1) min_xp = std::max(min_xp, static_cast<int>(std::ceil(std::log2(1 / opt.fidelity))) + 3);
    min_xp = std::min(min_xp, p.x);
    const double na = std::ldexp(1.0, static_cast<int>(p.cut.block_a.size()));
    const double nb = std::ldexp(1.0, static_cast<int>(p.cut.block_b.size()));
    auto gate_work = [&](const Gate& g) {
      if (is_cross(g, side)) return na + nb;
      return side[g.q[0]] == 0 ? na : nb;
    };
    std::vector<double> suffix(gates.size() + 1, 0);
    for (int i = static_cast<int>(gates.size()) - 1; i >= 0; --i) suffix[i] = suffix[i + 1] + gate_work(gates[i]);
    double best = 0;
    int best_xb = 0;
    for (int xb = 0; xb <= p.x - min_xp; ++xb) {
      const int xp = p.x - xb;
      const double split = xb == 0 ? suffix[gates.size()] : suffix[cross_at[xp]];
      double prefix_space = 1, branches = 1;
      for (int k = 0; k < p.x; ++k) (k < xp ? prefix_space : branches) *= p.branch[k];
      const double jobs = std::max(1.0, std::round(opt.fidelity * prefix_space));
      const double w = jobs * ((suffix[0] - split) + (xb ? na + nb : 0) + branches * split);
      if (xb == 0 || w <= best) {
        best = w;
        best_xb = xb;
      }
    }
    p.x_p = p.x - best_xb;
  }
  p.x_b = p.x - p.x_p;
  p.prefix_space = checked_product(p.branch, 0, p.x_p);
  p.branch_space = checked_product(p.branch, p.x_p, p.x);
  p.d_p = p.x_b > 0 ? gates[cross_at[p.x_p]].cycle : c.num_cycles();
  p.d_b = c.num_cycles() - p.d_p;
  p.retained = select_subset(p.prefix_space, retained_count(p.fidelity, p.prefix_space), p.seed);
  return p;
}

int default_chunk_bits(int n_qubits) { return std::clamp(n_qubits / 2, 0, 12); }

ZeroMask skip_zero_blocks(const StateBlock& s) { return scan_zero_chunks(s, default_chunk_bits(s.n_qubits)); }

struct HybridEngine::Impl {
  struct Block {
    int n = 0;
    int chunk_bits = 0;
    std::vector<int> position;
    std::vector<CompiledClusters> segs;  // x + 1 segments
    std::vector<int> cross_pos;
    std::vector<std::vector<Mat2>> ops;  // [k][digit]
  };

  SimPlan plan;
  std::vector<std::uint64_t> requests;
  EngineOptions opt;
  Block blk[2];
  std::vector<std::uint64_t> ia, ib;

  struct Work {
    StateBlock s[2];
    ZeroMask z[2];
  };

  ZeroMask* zmask(Work& w, int b) const { return opt.skip_zeros ? &w.z[b] : nullptr; }

  void init(Work& w) const {
    for (int b = 0; b < 2; ++b) {
      w.s[b] = StateBlock::basis(blk[b].n);
      w.z[b] = ZeroMask::none(blk[b].n, blk[b].chunk_bits);
    }
  }

  void run_seg(Work& w, int k) const {
    for (int b = 0; b < 2; ++b) run_clusters(w.s[b], blk[b].segs[k], opt.slice_bytes, zmask(w, b));
  }

  void cross(Work& w, int k, int digit) const {
    for (int b = 0; b < 2; ++b) apply_operator_1q(w.s[b], blk[b].cross_pos[k], blk[b].ops[k][digit], zmask(w, b));
  }

  // Runs the prefix part: cross gates [0, x_p) and the local gates before cross gate x_p.
  void run_prefix(Work& w, const PathId& p) const {
    init(w);
    for (int k = 0; k < plan.x_p; ++k) {
      run_seg(w, k);
      cross(w, k, p.digits[k]);
    }
    run_seg(w, plan.x_p);
  }

  void run_branch(Work& w, const PathId& p) const {
    for (int k = plan.x_p; k < plan.x; ++k) {
      cross(w, k, p.digits[k]);
      run_seg(w, k + 1);
    }
  }

  // Leaf states waiting to be accumulated. Flushing walks the requests in tiles
  // and adds every buffered leaf per tile, so the request arrays are streamed once
  // per flush instead of once per leaf. Per-request summation order is leaf order.
  struct LeafBuffer {
    std::vector<cfloat> a, b;
    std::size_t cap = 1, count = 0;
  };

  LeafBuffer make_buffer() const {
    LeafBuffer lb;
    const std::size_t na = std::size_t{1} << blk[0].n, nb = std::size_t{1} << blk[1].n;
    constexpr std::size_t kBudget = 1 << 20;  // bytes of buffered leaf state
    if (ia.size() >= 4 * (na + nb)) lb.cap = std::clamp<std::size_t>(kBudget / ((na + nb) * sizeof(cfloat)), 1, 64);
    lb.a.resize(lb.cap * na);
    lb.b.resize(lb.cap * nb);
    return lb;
  }

  void push(LeafBuffer& lb, const Work& w, std::vector<cdouble>& acc) const {
    std::copy(w.s[0].amps.begin(), w.s[0].amps.end(), lb.a.begin() + lb.count * w.s[0].amps.size());
    std::copy(w.s[1].amps.begin(), w.s[1].amps.end(), lb.b.begin() + lb.count * w.s[1].amps.size());
    if (++lb.count == lb.cap) flush(lb, acc);
  }

  void flush(LeafBuffer& lb, std::vector<cdouble>& acc) const {
    if (lb.count == 0) return;
    const std::size_t na = std::size_t{1} << blk[0].n, nb = std::size_t{1} << blk[1].n;
    double* out = reinterpret_cast<double*>(acc.data());
    constexpr std::size_t kTile = 2048;
    for (std::size_t t0 = 0; t0 < ia.size(); t0 += kTile) {
      const std::size_t t1 = std::min(ia.size(), t0 + kTile);
      for (std::size_t l = 0; l < lb.count; ++l) {
        const cfloat* A = lb.a.data() + l * na;
        const cfloat* B = lb.b.data() + l * nb;
        for (std::size_t r = t0; r < t1; ++r) {
          const double xr = A[ia[r]].real(), xi = A[ia[r]].imag();
          const double yr = B[ib[r]].real(), yi = B[ib[r]].imag();
          out[2 * r] += xr * yr - xi * yi;
          out[2 * r + 1] += xr * yi + xi * yr;
        }
      }
    }
    lb.count = 0;
  }

  void prefix_tree_into(std::uint64_t prefix, std::vector<cdouble>& acc, LeafBuffer& lb) const;
};

HybridEngine::HybridEngine(const Circuit& c, const SimPlan& plan, std::vector<std::uint64_t> requests, EngineOptions opt)
    : impl_(std::make_unique<Impl>()) {
  Impl& m = *impl_;
  m.plan = plan;
  m.requests = std::move(requests);
  m.opt = opt;
  if (plan.circuit_hash != c.hash()) throw Error("plan was made for a different circuit");
  const int n = c.num_qubits();
  const auto side = side_of(c, plan.cut);
  const auto gates = ordered_gates(c);

  const int adjacent = plan.cut.orientation == Orientation::Horizontal ? c.cols() : c.rows();
  for (int b = 0; b < 2; ++b) {
    auto& B = m.blk[b];
    B.position = block_positions(c, plan.cut, b);
    B.n = static_cast<int>((b == 0 ? plan.cut.block_a : plan.cut.block_b).size());
    B.chunk_bits = std::min(default_chunk_bits(B.n), std::max(0, B.n - adjacent));
    B.segs.emplace_back();
  }
  std::vector<Gate> pending[2];
  auto flush = [&]() {
    for (int b = 0; b < 2; ++b) {
      m.blk[b].segs.back() = CompiledClusters(cluster_gate_list(pending[b], m.blk[b].position), m.blk[b].n);
      pending[b].clear();
    }
  };
  int k = 0;
  for (const Gate& g : gates) {
    if (!is_cross(g, side)) {
      pending[side[g.q[0]]].push_back(g);
      continue;
    }
    if (k >= plan.x) throw Error("circuit has more cross gates than the plan");
    flush();
    const TermDecomposition d = schmidt_decompose(g);
    if (static_cast<int>(d.terms.size()) != plan.branch[k]) throw Error("plan branch factors do not match circuit");
    for (int b = 0; b < 2; ++b) {
      const int which = side[g.q[0]] == b ? 0 : 1;  // gate endpoint living in block b
      auto& B = m.blk[b];
      B.cross_pos.push_back(B.position[g.q[which]]);
      std::vector<Mat2> ops;
      for (const Term& t : d.terms) ops.push_back(which == 0 ? t.left : t.right);
      B.ops.push_back(std::move(ops));
      B.segs.emplace_back();
    }
    ++k;
  }
  flush();
  if (k != plan.x) throw Error("plan cross-gate count does not match circuit");

  const std::uint64_t N = n >= 64 ? 0 : std::uint64_t{1} << n;
  m.ia.reserve(m.requests.size());
  m.ib.reserve(m.requests.size());
  for (std::uint64_t r : m.requests) {
    if (n < 64 && r >= N) throw Error("requested index " + std::to_string(r) + " out of range");
    std::uint64_t a = 0, bb = 0;
    for (int q = 0; q < n; ++q) {
      const std::uint64_t bit = (r >> (n - 1 - q)) & 1;
      if (side[q] == 0)
        a |= bit << m.blk[0].position[q];
      else
        bb |= bit << m.blk[1].position[q];
    }
    m.ia.push_back(a);
    m.ib.push_back(bb);
  }
}

HybridEngine::~HybridEngine() = default;
HybridEngine::HybridEngine(HybridEngine&&) noexcept = default;

const SimPlan& HybridEngine::plan() const { return impl_->plan; }
const std::vector<std::uint64_t>& HybridEngine::requests() const { return impl_->requests; }
int HybridEngine::block_qubits(int block) const { return impl_->blk[block].n; }

AmplitudeBatch HybridEngine::run_path(std::uint64_t path) const {
  const Impl& m = *impl_;
  const PathId p = PathId::decode(path, m.plan.branch);
  Impl::Work w;
  m.run_prefix(w, p);
  m.run_branch(w, p);
  AmplitudeBatch out = AmplitudeBatch::zeros(m.requests);
  auto lb = m.make_buffer();
  m.push(lb, w, out.amps);
  m.flush(lb, out.amps);
  return out;
}

void HybridEngine::for_each_leaf(
    std::uint64_t prefix, const std::function<void(std::uint64_t, const StateBlock&, const StateBlock&)>& fn) const {
  const Impl& m = *impl_;
  if (prefix >= m.plan.prefix_space) throw Error("prefix outside the prefix space");
  const std::uint64_t first = prefix * m.plan.branch_space;
  PathId p = PathId::decode(first, m.plan.branch);
  Impl::Work ck;
  m.run_prefix(ck, p);
  if (m.plan.x_b == 0) {
    fn(first, ck.s[0], ck.s[1]);
    return;
  }
  Impl::Work w = ck;  // the one checkpoint copy; `ck` stays untouched
  for (std::uint64_t br = 0; br < m.plan.branch_space; ++br) {
    if (br) {
      for (int b = 0; b < 2; ++b) {
        std::memcpy(w.s[b].amps.data(), ck.s[b].amps.data(), ck.s[b].amps.size() * sizeof(cfloat));
        w.z[b].zero = ck.z[b].zero;
      }
    }
    p = PathId::decode(first + br, m.plan.branch);
    m.run_branch(w, p);
    fn(first + br, w.s[0], w.s[1]);
  }
}

void HybridEngine::Impl::prefix_tree_into(std::uint64_t prefix, std::vector<cdouble>& acc, LeafBuffer& lb) const {
  if (prefix >= plan.prefix_space) throw Error("prefix outside the prefix space");
  const std::uint64_t first = prefix * plan.branch_space;
  PathId p = PathId::decode(first, plan.branch);
  Work ck;
  run_prefix(ck, p);
  if (plan.x_b == 0) {
    push(lb, ck, acc);
    return;
  }
  Work w = ck;
  for (std::uint64_t br = 0; br < plan.branch_space; ++br) {
    if (br) {
      for (int b = 0; b < 2; ++b) {
        std::memcpy(w.s[b].amps.data(), ck.s[b].amps.data(), ck.s[b].amps.size() * sizeof(cfloat));
        w.z[b].zero = ck.z[b].zero;
      }
    }
    p = PathId::decode(first + br, plan.branch);
    run_branch(w, p);
    push(lb, w, acc);
  }
}

AmplitudeBatch HybridEngine::run_prefix_tree(std::uint64_t prefix) const {
  AmplitudeBatch out = AmplitudeBatch::zeros(impl_->requests);
  auto lb = impl_->make_buffer();
  impl_->prefix_tree_into(prefix, out.amps, lb);
  impl_->flush(lb, out.amps);
  return out;
}

AmplitudeBatch HybridEngine::run_approx() const {
  const Impl& m = *impl_;
  if (m.plan.retained.empty()) throw Error("plan retains no prefixes");
  AmplitudeBatch out = AmplitudeBatch::zeros(m.requests);
  // Same arithmetic as summing run_prefix_tree batches in ascending prefix order.
  if (m.plan.x_b == 0) {
    // One path per prefix: 0 + v == v, so accumulating in place is bit-identical.
    auto lb = m.make_buffer();
    for (std::uint64_t prefix : m.plan.retained) m.prefix_tree_into(prefix, out.amps, lb);
    m.flush(lb, out.amps);
    return out;
  }
  std::vector<cdouble> part(m.requests.size());
  auto lb = m.make_buffer();
  for (std::uint64_t prefix : m.plan.retained) {
    std::fill(part.begin(), part.end(), cdouble(0));
    m.prefix_tree_into(prefix, part, lb);
    m.flush(lb, part);
    for (std::size_t i = 0; i < part.size(); ++i) out.amps[i] += part[i];
  }
  return out;
}

std::vector<double> HybridEngine::path_norms() const {
  std::vector<double> out;
  for (std::uint64_t pre = 0; pre < impl_->plan.prefix_space; ++pre)
    for_each_leaf(pre, [&](std::uint64_t, const StateBlock& a, const StateBlock& b) {
      out.push_back(a.norm2() * b.norm2());
    });
  return out;
}

AmplitudeBatch run_path(const Circuit& c, const SimPlan& plan, const PathId& path, const std::vector<std::uint64_t>& requests) {
  return HybridEngine(c, plan, requests).run_path(path.encode(plan.branch));
}

AmplitudeBatch run_prefix_tree(const Circuit& c, const SimPlan& plan, std::uint64_t prefix,
                               const std::vector<std::uint64_t>& requests) {
  return HybridEngine(c, plan, requests).run_prefix_tree(prefix);
}

AmplitudeBatch run_approx(const Circuit& c, const SimPlan& plan, const std::vector<std::uint64_t>& requests) {
  return HybridEngine(c, plan, requests).run_approx();
}

double estimate_fidelity(const AmplitudeBatch& reference, const AmplitudeBatch& candidate) {
  if (reference.size() == 0) throw Error("estimate_fidelity needs at least one amplitude");
  if (reference.indices != candidate.indices) throw Error("reference and candidate cover different indices");
  cdouble dot = 0;
  double nr = 0, nc = 0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    dot += std::conj(reference.amps[i]) * candidate.amps[i];
    nr += std::norm(reference.amps[i]);
    nc += std::norm(candidate.amps[i]);
  }
  if (nr == 0 || nc == 0) return 0.0;
  return std::norm(dot) / (nr * nc);
}

}  // namespace sfsim
