#include "sfsim/statevec.hpp"

#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace sfsim {

namespace {

struct M2f {
  float r[4], i[4];
};

M2f to_f(const Mat2& m) {
  M2f f;
  for (int k = 0; k < 4; ++k) {
    f.r[k] = static_cast<float>(m[k].real());
    f.i[k] = static_cast<float>(m[k].imag());
  }
  return f;
}

inline void pair_kernel(cfloat* x, cfloat* y, std::size_t len, const M2f& m) {
  float* xf = reinterpret_cast<float*>(x);
  float* yf = reinterpret_cast<float*>(y);
  for (std::size_t j = 0; j < len; ++j) {
    const float xr = xf[2 * j], xi = xf[2 * j + 1], yr = yf[2 * j], yi = yf[2 * j + 1];
    xf[2 * j] = m.r[0] * xr - m.i[0] * xi + m.r[1] * yr - m.i[1] * yi;
    xf[2 * j + 1] = m.r[0] * xi + m.i[0] * xr + m.r[1] * yi + m.i[1] * yr;
    yf[2 * j] = m.r[2] * xr - m.i[2] * xi + m.r[3] * yr - m.i[3] * yi;
    yf[2 * j + 1] = m.r[2] * xi + m.i[2] * xr + m.r[3] * yi + m.i[3] * yr;
  }
}

inline void scale_kernel(cfloat* x, std::size_t len, float re, float im) {
  float* xf = reinterpret_cast<float*>(x);
  for (std::size_t j = 0; j < len; ++j) {
    const float a = xf[2 * j], b = xf[2 * j + 1];
    xf[2 * j] = re * a - im * b;
    xf[2 * j + 1] = re * b + im * a;
  }
}

// Pairs (i, i | 2^pos) for i in [begin, end); range aligned to 2^(pos+1).
void one_qubit_range(cfloat* a, std::uint64_t begin, std::uint64_t end, int pos, const M2f& m) {
  const std::uint64_t s = std::uint64_t{1} << pos;
  for (std::uint64_t base = begin; base < end; base += 2 * s) pair_kernel(a + base, a + base + s, s, m);
}

inline std::uint64_t insert_zero(std::uint64_t v, int pos) {
  const std::uint64_t low = v & ((std::uint64_t{1} << pos) - 1);
  return ((v >> pos) << (pos + 1)) | low;
}

void two_qubit_range(cfloat* a, std::uint64_t begin, std::uint64_t end, int p0, int p1, const Mat4& m) {
  const int lo = std::min(p0, p1), hi = std::max(p0, p1);
  const std::uint64_t b0 = std::uint64_t{1} << p0, b1 = std::uint64_t{1} << p1;
  std::complex<float> mf[16];
  for (int k = 0; k < 16; ++k) mf[k] = cfloat(static_cast<float>(m[k].real()), static_cast<float>(m[k].imag()));
  for (std::uint64_t j = begin >> 2; j < end >> 2; ++j) {
    const std::uint64_t i = insert_zero(insert_zero(j, lo), hi);
    const std::uint64_t idx[4] = {i, i | b1, i | b0, i | b0 | b1};
    float in_r[4], in_i[4];
    for (int k = 0; k < 4; ++k) {
      in_r[k] = a[idx[k]].real();
      in_i[k] = a[idx[k]].imag();
    }
    for (int r = 0; r < 4; ++r) {
      float sr = 0, si = 0;
      for (int k = 0; k < 4; ++k) {
        sr += mf[r * 4 + k].real() * in_r[k] - mf[r * 4 + k].imag() * in_i[k];
        si += mf[r * 4 + k].real() * in_i[k] + mf[r * 4 + k].imag() * in_r[k];
      }
      a[idx[r]] = cfloat(sr, si);
    }
  }
}

struct DiagTables {
  int n = 0;
  int lo_bits = 0;
  std::uint64_t t_planes[3] = {0, 0, 0};
  std::vector<std::uint64_t> partner;
  std::vector<std::uint8_t> lo_table;
  float ph_r[8], ph_i[8];
};

int t_phase(std::uint64_t i, const std::uint64_t* planes) {
  return std::popcount(i & planes[0]) + 2 * std::popcount(i & planes[1]) + 4 * std::popcount(i & planes[2]);
}

DiagTables make_diag_tables(const GateCluster& cl, int n) {
  DiagTables t;
  t.n = n;
  t.lo_bits = std::min(n, 10);
  std::copy(cl.t_planes, cl.t_planes + 3, t.t_planes);
  t.partner = cl.cz_partner;
  t.partner.resize(n, 0);
  const std::uint64_t lo_size = std::uint64_t{1} << t.lo_bits;
  t.lo_table.resize(lo_size);
  for (std::uint64_t l = 0; l < lo_size; ++l) {
    int par = 0;
    for (int a = 0; a < t.lo_bits; ++a)
      if ((l >> a) & 1) par ^= std::popcount(l & t.partner[a]) & 1;
    t.lo_table[l] = static_cast<std::uint8_t>((t_phase(l, t.t_planes) + 4 * par) & 7);
  }
  for (int k = 0; k < 8; ++k) {
    t.ph_r[k] = static_cast<float>(std::cos(M_PI * k / 4));
    t.ph_i[k] = static_cast<float>(std::sin(M_PI * k / 4));
  }
  t.ph_r[2] = t.ph_r[6] = 0;
  t.ph_i[0] = t.ph_i[4] = 0;
  return t;
}

void diagonal_range(cfloat* a, std::uint64_t begin, std::uint64_t end, const DiagTables& t) {
  const std::uint64_t lo_mask = (std::uint64_t{1} << t.lo_bits) - 1;
  float* f = reinterpret_cast<float*>(a);
  std::uint64_t i = begin;
  while (i < end) {
    const std::uint64_t hi_part = i & ~lo_mask;
    const std::uint64_t block_end = std::min(end, hi_part + lo_mask + 1);
    int par = 0;
    std::uint64_t cross = 0;
    for (std::uint64_t bits = hi_part; bits; bits &= bits - 1) {
      const int pos = std::countr_zero(bits);
      par ^= std::popcount(hi_part & t.partner[pos]) & 1;
      cross ^= t.partner[pos] & lo_mask;
    }
    const int base = t_phase(hi_part, t.t_planes) + 4 * par;
    for (; i < block_end; ++i) {
      const std::uint64_t l = i & lo_mask;
      const int k = (base + t.lo_table[l] + 4 * (std::popcount(l & cross) & 1)) & 7;
      if (k == 0) continue;
      const float re = f[2 * i], im = f[2 * i + 1];
      f[2 * i] = t.ph_r[k] * re - t.ph_i[k] * im;
      f[2 * i + 1] = t.ph_r[k] * im + t.ph_i[k] * re;
    }
  }
}

struct Op {
  enum Type { Diag, One, Two } type;
  explicit Op(Type t) : type(t) {}
  int p0 = -1, p1 = -1;
  M2f m2{};
  std::shared_ptr<const Mat4> m4;
  std::shared_ptr<DiagTables> diag;
};

Mat2 cluster_matrix(ClusterKind k) {
  switch (k) {
    case ClusterKind::H: return gate_matrix_1q(GateKind::H);
    case ClusterKind::X_HALF: return gate_matrix_1q(GateKind::X_HALF);
    case ClusterKind::Y_HALF: return gate_matrix_1q(GateKind::Y_HALF);
    default: throw Error("cluster kind has no single 2x2 matrix");
  }
}

std::vector<Op> flatten(const std::vector<GateCluster>& clusters, int n) {
  std::vector<Op> ops;
  for (const GateCluster& cl : clusters) {
    switch (cl.kind) {
      case ClusterKind::DIAGONAL: {
        Op op(Op::Diag);
        op.diag = std::make_shared<DiagTables>(make_diag_tables(cl, n));
        ops.push_back(std::move(op));
        break;
      }
      case ClusterKind::GENERIC:
        for (const auto& g : cl.generic) {
          Op op(Op::Two);
          op.p0 = g.p0;
          op.p1 = g.p1;
          op.m4 = std::make_shared<const Mat4>(g.m);
          ops.push_back(op);
        }
        break;
      default: {
        const M2f m = to_f(cluster_matrix(cl.kind));
        for (int pos = 63; pos >= 0; --pos)
          if ((cl.mask >> pos) & 1) {
            Op op(Op::One);
            op.p0 = pos;
            op.m2 = m;
            ops.push_back(op);
          }
      }
    }
  }
  return ops;
}

void apply_op_range(StateBlock& s, const Op& op, std::uint64_t begin, std::uint64_t end, ZeroMask* z) {
  cfloat* a = s.amps.data();
  if (!z) {
    switch (op.type) {
      case Op::Diag: diagonal_range(a, begin, end, *op.diag); break;
      case Op::One: one_qubit_range(a, begin, end, op.p0, op.m2); break;
      case Op::Two: two_qubit_range(a, begin, end, op.p0, op.p1, *op.m4); break;
    }
    return;
  }
  const int cb = z->chunk_bits;
  const std::uint64_t U = std::uint64_t{1} << cb;
  const std::uint64_t c_begin = begin >> cb, c_end = end >> cb;
  switch (op.type) {
    case Op::Diag:
      for (std::uint64_t c = c_begin; c < c_end; ++c)
        if (!z->zero[c]) diagonal_range(a, c * U, (c + 1) * U, *op.diag);
      break;
    case Op::One:
      if (op.p0 < cb) {
        for (std::uint64_t c = c_begin; c < c_end; ++c)
          if (!z->zero[c]) one_qubit_range(a, c * U, (c + 1) * U, op.p0, op.m2);
      } else {
        const std::uint64_t sc = std::uint64_t{1} << (op.p0 - cb);
        for (std::uint64_t c = c_begin; c < c_end; ++c) {
          if (c & sc) continue;
          if (z->zero[c] && z->zero[c + sc]) continue;
          pair_kernel(a + c * U, a + (c + sc) * U, U, op.m2);
          z->zero[c] = z->zero[c + sc] = 0;
        }
      }
      break;
    case Op::Two:
      two_qubit_range(a, begin, end, op.p0, op.p1, *op.m4);
      std::fill(z->zero.begin() + c_begin, z->zero.begin() + c_end, 0);
      break;
  }
}

void check_pos(const StateBlock& s, int pos) {
  if (pos < 0 || pos >= s.n_qubits) throw Error("qubit position " + std::to_string(pos) + " out of range");
}

}  // namespace

StateBlock StateBlock::basis(int n, std::uint64_t index) {
  if (n < 0 || n > 40) throw Error("unsupported block size " + std::to_string(n));
  StateBlock s;
  s.n_qubits = n;
  s.amps.assign(std::size_t{1} << n, cfloat(0, 0));
  if (index >= s.amps.size()) throw Error("basis index out of range");
  s.amps[index] = 1;
  return s;
}

double StateBlock::norm2() const {
  double acc = 0;
  for (const cfloat& a : amps) acc += static_cast<double>(a.real()) * a.real() + static_cast<double>(a.imag()) * a.imag();
  return acc;
}

int GateCluster::t_count(int pos) const {
  return static_cast<int>(((t_planes[0] >> pos) & 1) + 2 * ((t_planes[1] >> pos) & 1) + 4 * ((t_planes[2] >> pos) & 1));
}

ZeroMask ZeroMask::none(int n_qubits, int chunk_bits) {
  ZeroMask z;
  z.chunk_bits = std::clamp(chunk_bits, 0, n_qubits);
  z.zero.assign(std::size_t{1} << (n_qubits - z.chunk_bits), 0);
  return z;
}

std::size_t ZeroMask::zero_count() const { return static_cast<std::size_t>(std::count(zero.begin(), zero.end(), 1)); }

void apply_matrix_1q(StateBlock& s, int pos, const Mat2& m) {
  check_pos(s, pos);
  one_qubit_range(s.amps.data(), 0, s.amps.size(), pos, to_f(m));
}

void apply_matrix_2q(StateBlock& s, int pos0, int pos1, const Mat4& m) {
  check_pos(s, pos0);
  check_pos(s, pos1);
  if (pos0 == pos1) throw Error("two-qubit operator on one position");
  two_qubit_range(s.amps.data(), 0, s.amps.size(), pos0, pos1, m);
}

void apply_gate(StateBlock& s, const Gate& g) {
  for (int k = 0; k < g.arity(); ++k)
    if (g.q[k] < 0 || g.q[k] >= s.n_qubits) throw Error("gate qubit " + std::to_string(g.q[k]) + " out of range");
  if (g.arity() == 1)
    apply_matrix_1q(s, s.n_qubits - 1 - g.q[0], gate_matrix_1q(g.kind));
  else
    apply_matrix_2q(s, s.n_qubits - 1 - g.q[0], s.n_qubits - 1 - g.q[1], gate_matrix_2q(g));
}

std::vector<GateCluster> cluster_gate_list(const std::vector<Gate>& gates, const std::vector<int>& position) {
  std::vector<GateCluster> out;
  auto kind_of = [](GateKind k) {
    switch (k) {
      case GateKind::T:
      case GateKind::CZ: return ClusterKind::DIAGONAL;
      case GateKind::H: return ClusterKind::H;
      case GateKind::X_HALF: return ClusterKind::X_HALF;
      case GateKind::Y_HALF: return ClusterKind::Y_HALF;
      default: return ClusterKind::GENERIC;
    }
  };
  for (int gi = 0; gi < static_cast<int>(gates.size()); ++gi) {
    const Gate& g = gates[gi];
    const ClusterKind kind = kind_of(g.kind);
    std::uint64_t touch = 0;
    for (int k = 0; k < g.arity(); ++k) touch |= std::uint64_t{1} << position.at(g.q[k]);
    auto accepts = [&](const GateCluster& c) {
      if (c.kind != kind) return false;
      if (kind == ClusterKind::DIAGONAL) return true;
      return (c.support & touch) == 0;
    };
    GateCluster* target = nullptr;
    for (int ci = static_cast<int>(out.size()) - 1; ci >= 0; --ci) {
      if (accepts(out[ci])) {
        target = &out[ci];
        break;
      }
      if (out[ci].support & touch) break;
    }
    if (!target) {
      out.emplace_back();
      target = &out.back();
      target->kind = kind;
    }
    GateCluster& c = *target;
    c.gates.push_back(gi);
    c.support |= touch;
    const int p0 = position[g.q[0]];
    switch (kind) {
      case ClusterKind::DIAGONAL:
        if (g.kind == GateKind::T) {
          int t = (c.t_count(p0) + 1) & 7;
          for (int b = 0; b < 3; ++b) {
            c.t_planes[b] &= ~(std::uint64_t{1} << p0);
            c.t_planes[b] |= static_cast<std::uint64_t>((t >> b) & 1) << p0;
          }
        } else {
          const int p1 = position[g.q[1]];
          const int hi = std::max(p0, p1), lo = std::min(p0, p1);
          if (static_cast<int>(c.cz_partner.size()) <= hi) c.cz_partner.resize(hi + 1, 0);
          c.cz_partner[hi] ^= std::uint64_t{1} << lo;
        }
        break;
      case ClusterKind::GENERIC:
        c.generic.push_back({p0, position[g.q[1]], gate_matrix_2q(g)});
        break;
      default:
        c.mask |= std::uint64_t{1} << p0;
    }
  }
  return out;
}

std::vector<GateCluster> cluster_gates(const Circuit& c) {
  const int n = c.num_qubits();
  std::vector<Gate> ordered = c.gates();
  std::stable_sort(ordered.begin(), ordered.end(), [](const Gate& a, const Gate& b) {
    if (a.cycle != b.cycle) return a.cycle < b.cycle;
    return std::min(a.q[0], a.arity() == 2 ? a.q[1] : a.q[0]) < std::min(b.q[0], b.arity() == 2 ? b.q[1] : b.q[0]);
  });
  std::vector<int> position(n);
  for (int q = 0; q < n; ++q) position[q] = n - 1 - q;
  return cluster_gate_list(ordered, position);
}

void apply_diagonal_cluster(StateBlock& s, const GateCluster& cl) {
  if (cl.kind != ClusterKind::DIAGONAL) throw Error("apply_diagonal_cluster needs a DIAGONAL cluster");
  if (cl.support >> s.n_qubits) throw Error("cluster touches positions beyond the block");
  DiagTables t = make_diag_tables(cl, s.n_qubits);
  diagonal_range(s.amps.data(), 0, s.amps.size(), t);
}

void apply_cluster(StateBlock& s, const GateCluster& cl) {
  run_clusters(s, {cl}, s.amps.size() * sizeof(cfloat));
}

struct CompiledOps {
  std::vector<Op> ops;
};

CompiledClusters::CompiledClusters(const std::vector<GateCluster>& clusters, int n_qubits) : n_qubits_(n_qubits) {
  for (const GateCluster& cl : clusters)
    if (n_qubits < 64 && (cl.support >> n_qubits)) throw Error("cluster touches positions beyond the block");
  auto c = std::make_shared<CompiledOps>();
  c->ops = flatten(clusters, n_qubits);
  ops_ = std::move(c);
}

void run_clusters(StateBlock& s, const std::vector<GateCluster>& clusters, std::size_t slice_bytes, ZeroMask* zeros) {
  run_clusters(s, CompiledClusters(clusters, s.n_qubits), slice_bytes, zeros);
}

void run_clusters(StateBlock& s, const CompiledClusters& compiled, std::size_t slice_bytes, ZeroMask* zeros) {
  const int n = s.n_qubits;
  if (n != compiled.n_qubits()) throw Error("compiled clusters are for a different block size");
  if (!compiled.ops_) return;
  const std::vector<Op>& ops = compiled.ops_->ops;
  int slice_bits = 0;
  while (slice_bits < n && (sizeof(cfloat) << (slice_bits + 1)) <= slice_bytes) ++slice_bits;
  if (zeros) slice_bits = std::max(slice_bits, zeros->chunk_bits);
  auto local = [&](const Op& op) {
    switch (op.type) {
      case Op::Diag: return true;
      case Op::One: return op.p0 < slice_bits;
      default: return std::max(op.p0, op.p1) < slice_bits;
    }
  };
  const std::uint64_t N = s.amps.size();
  const std::uint64_t S = std::uint64_t{1} << slice_bits;
  std::size_t i = 0;
  while (i < ops.size()) {
    if (!local(ops[i])) {
      apply_op_range(s, ops[i], 0, N, zeros);
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < ops.size() && local(ops[j])) ++j;
    for (std::uint64_t b = 0; b < N; b += S)
      for (std::size_t k = i; k < j; ++k) apply_op_range(s, ops[k], b, b + S, zeros);
    i = j;
  }
}

void apply_operator_1q(StateBlock& s, int pos, const Mat2& m, ZeroMask* zeros) {
  check_pos(s, pos);
  const bool diag = m[1] == cdouble(0) && m[2] == cdouble(0);
  const bool anti = m[0] == cdouble(0) && m[3] == cdouble(0);
  const std::uint64_t N = s.amps.size();
  const std::uint64_t st = std::uint64_t{1} << pos;
  cfloat* a = s.amps.data();
  if (diag && m[0] == cdouble(1) && m[3] == cdouble(1)) return;
  if (!diag && !anti) {
    if (zeros) {
      Op op(Op::One);
      op.p0 = pos;
      op.m2 = to_f(m);
      apply_op_range(s, op, 0, N, zeros);
    } else {
      one_qubit_range(a, 0, N, pos, to_f(m));
    }
    return;
  }
  const int cb = zeros ? zeros->chunk_bits : 0;
  const bool chunked = zeros && pos >= cb;
  const std::uint64_t U = std::uint64_t{1} << cb;
  auto is_zero = [&](std::uint64_t i) { return zeros && zeros->zero[i >> cb]; };
  auto mark = [&](std::uint64_t i, bool z) {
    if (chunked) zeros->zero[i >> cb] = z ? 1 : 0;
  };
  // Walk pairs of runs: [base, base+st) has the bit clear, [base+st, base+2st) set.
  const std::uint64_t run = chunked ? U : st;
  for (std::uint64_t base = 0; base < N; base += 2 * st) {
    for (std::uint64_t off = 0; off < st; off += run) {
      const std::uint64_t i0 = base + off, i1 = i0 + st;
      const std::uint64_t len = std::min(run, st);
      if (diag) {
        const cdouble d[2] = {m[0], m[3]};
        const std::uint64_t at[2] = {i0, i1};
        for (int h = 0; h < 2; ++h) {
          if (d[h] == cdouble(0)) {
            std::fill(a + at[h], a + at[h] + len, cfloat(0, 0));
            mark(at[h], true);
          } else if (!is_zero(at[h]) && d[h] != cdouble(1)) {
            scale_kernel(a + at[h], len, static_cast<float>(d[h].real()), static_cast<float>(d[h].imag()));
          }
        }
      } else {
        // x' = m01 y, y' = m10 x
        const bool zx = is_zero(i0), zy = is_zero(i1);
        if (zx && zy) continue;
        for (std::uint64_t j = 0; j < len; ++j) std::swap(a[i0 + j], a[i1 + j]);
        const cdouble c[2] = {m[1], m[2]};
        const std::uint64_t at[2] = {i0, i1};
        const bool was_zero[2] = {zy, zx};
        for (int h = 0; h < 2; ++h) {
          if (c[h] == cdouble(0) || was_zero[h]) {
            std::fill(a + at[h], a + at[h] + len, cfloat(0, 0));
            mark(at[h], true);
          } else {
            scale_kernel(a + at[h], len, static_cast<float>(c[h].real()), static_cast<float>(c[h].imag()));
            mark(at[h], false);
          }
        }
      }
    }
  }
}

std::uint64_t state_bytes(int n_qubits) { return sizeof(cfloat) * (std::uint64_t{1} << n_qubits); }

StateBlock run_full(const Circuit& c, const RunOptions& opt) {
  std::uint64_t budget = opt.max_bytes;
  if (budget == 0) {
    long pages = sysconf(_SC_PHYS_PAGES), page = sysconf(_SC_PAGE_SIZE);
    budget = pages > 0 && page > 0 ? static_cast<std::uint64_t>(pages) * page / 10 * 8 : (std::uint64_t{1} << 34);
  }
  const std::uint64_t need = c.num_qubits() > 40 ? ~std::uint64_t{0} : state_bytes(c.num_qubits());
  if (need > budget) throw MemoryBudgetError(need, budget);
  StateBlock s = StateBlock::basis(c.num_qubits());
  run_clusters(s, cluster_gates(c), opt.slice_bytes);
  return s;
}

AmplitudeBatch fetch_amplitudes(const StateBlock& s, const std::vector<std::uint64_t>& indices) {
  AmplitudeBatch b;
  b.indices = indices;
  b.amps.reserve(indices.size());
  for (std::uint64_t i : indices) {
    if (i >= s.amps.size()) throw Error("amplitude index " + std::to_string(i) + " out of range");
    b.amps.emplace_back(s.amps[i].real(), s.amps[i].imag());
  }
  return b;
}

ZeroMask scan_zero_chunks(const StateBlock& s, int chunk_bits) {
  ZeroMask z = ZeroMask::none(s.n_qubits, chunk_bits);
  const std::uint64_t U = std::uint64_t{1} << z.chunk_bits;
  for (std::size_t c = 0; c < z.zero.size(); ++c)
    z.zero[c] = std::all_of(s.amps.begin() + c * U, s.amps.begin() + (c + 1) * U,
                            [](const cfloat& v) { return v.real() == 0 && v.imag() == 0; });
  return z;
}

}  // namespace sfsim
