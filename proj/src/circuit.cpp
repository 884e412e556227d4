#include "sfsim/circuit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

#include "sfsim/hash.hpp"

namespace sfsim {

namespace {

struct NameEntry {
  GateKind kind;
  const char* name;
};

constexpr NameEntry kNames[] = {
    {GateKind::H, "h"},       {GateKind::T, "t"},   {GateKind::X_HALF, "x_1_2"},
    {GateKind::Y_HALF, "y_1_2"}, {GateKind::CZ, "cz"}, {GateKind::ISWAP, "is"},
    {GateKind::GENERIC_2Q, "g2"},
};

bool is_two_qubit_kind(GateKind k) {
  return k == GateKind::CZ || k == GateKind::ISWAP || k == GateKind::GENERIC_2Q;
}

void check_unitary(const Mat4& u) {
  double worst = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      cdouble s = 0;
      for (int k = 0; k < 4; ++k) s += std::conj(u[k * 4 + i]) * u[k * 4 + j];
      worst = std::max(worst, std::abs(s - cdouble(i == j ? 1.0 : 0.0)));
    }
  if (worst > 1e-6) throw Error("g2 matrix is not unitary (max |U^dagger U - I| = " + std::to_string(worst) + ")");
}

template <typename T>
bool parse_number(std::string_view tok, T& out) {
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool grid_adjacent(int cols, int a, int b) {
  int ra = a / cols, ca = a % cols, rb = b / cols, cb = b % cols;
  return (ra == rb && std::abs(ca - cb) == 1) || (ca == cb && std::abs(ra - rb) == 1);
}

GridShape infer_grid(int n, const std::vector<Gate>& gates) {
  std::optional<GridShape> best;
  bool best_ok = false;
  for (int cols = 1; cols <= n; ++cols) {
    if (n % cols) continue;
    GridShape g{n / cols, cols};
    bool ok = std::all_of(gates.begin(), gates.end(), [&](const Gate& x) {
      return x.arity() == 1 || grid_adjacent(cols, x.q[0], x.q[1]);
    });
    auto squareness = [](GridShape s) { return std::abs(s.rows - s.cols); };
    bool better = !best || (ok && !best_ok) ||
                  (ok == best_ok && (squareness(g) < squareness(*best) ||
                                     (squareness(g) == squareness(*best) && g.rows < best->rows)));
    if (better) {
      best = g;
      best_ok = ok;
    }
  }
  return *best;
}

}  // namespace

const char* gate_name(GateKind k) {
  for (auto& e : kNames)
    if (e.kind == k) return e.name;
  return "?";
}

std::optional<GateKind> gate_kind_from_name(std::string_view name) {
  for (auto& e : kNames)
    if (name == e.name) return e.kind;
  return std::nullopt;
}

Gate Gate::one(int cycle, GateKind kind, int q0) {
  if (is_two_qubit_kind(kind)) throw Error(std::string("gate ") + gate_name(kind) + " needs two qubits");
  Gate g;
  g.cycle = cycle;
  g.kind = kind;
  g.q = {q0, -1};
  return g;
}

Gate Gate::two(int cycle, GateKind kind, int q0, int q1) {
  if (!is_two_qubit_kind(kind) || kind == GateKind::GENERIC_2Q)
    throw Error(std::string("gate ") + gate_name(kind) + " is not a fixed two-qubit gate");
  Gate g;
  g.cycle = cycle;
  g.kind = kind;
  g.q = {q0, q1};
  return g;
}

Gate Gate::generic(int cycle, int q0, int q1, const Mat4& m) {
  check_unitary(m);
  Gate g;
  g.cycle = cycle;
  g.kind = GateKind::GENERIC_2Q;
  g.q = {q0, q1};
  g.matrix = std::make_shared<const Mat4>(m);
  return g;
}

bool Gate::operator==(const Gate& o) const {
  if (cycle != o.cycle || kind != o.kind || q != o.q) return false;
  if (kind != GateKind::GENERIC_2Q) return true;
  return *matrix == *o.matrix;
}

Mat2 gate_matrix_1q(GateKind k) {
  const double r = 1.0 / std::sqrt(2.0);
  using C = cdouble;
  switch (k) {
    case GateKind::H:
      return {C(r), C(r), C(r), C(-r)};
    case GateKind::T:
      return {C(1), C(0), C(0), std::polar(1.0, M_PI / 4)};
    case GateKind::X_HALF:
      return {C(0.5, 0.5), C(0.5, -0.5), C(0.5, -0.5), C(0.5, 0.5)};
    case GateKind::Y_HALF:
      return {C(0.5, 0.5), C(-0.5, -0.5), C(0.5, 0.5), C(0.5, 0.5)};
    default:
      throw Error(std::string("not a one-qubit gate: ") + gate_name(k));
  }
}

Mat4 gate_matrix_2q(const Gate& g) {
  Mat4 m{};
  switch (g.kind) {
    case GateKind::CZ:
      m[0] = m[5] = m[10] = 1;
      m[15] = -1;
      return m;
    case GateKind::ISWAP:
      m[0] = m[15] = 1;
      m[1 * 4 + 2] = m[2 * 4 + 1] = cdouble(0, 1);
      return m;
    case GateKind::GENERIC_2Q:
      return *g.matrix;
    default:
      throw Error(std::string("not a two-qubit gate: ") + gate_name(g.kind));
  }
}

Circuit::Circuit(int rows, int cols, std::vector<Gate> gates)
    : rows_(rows), cols_(cols), gates_(std::move(gates)) {
  if (rows < 1 || cols < 1) throw Error("grid must be at least 1x1");
  const int n = rows * cols;
  std::stable_sort(gates_.begin(), gates_.end(),
                   [](const Gate& a, const Gate& b) { return a.cycle < b.cycle; });
  std::vector<int> seen(n, -1);
  int max_cycle = -1;
  for (const Gate& g : gates_) {
    if (g.cycle < 0) throw Error("negative cycle index");
    if (is_two_qubit_kind(g.kind) != (g.arity() == 2))
      throw Error(std::string("wrong qubit count for gate ") + gate_name(g.kind));
    if (g.kind == GateKind::GENERIC_2Q && !g.matrix) throw Error("g2 gate without matrix");
    for (int i = 0; i < g.arity(); ++i) {
      int q = g.q[i];
      if (q < 0 || q >= n)
        throw Error("qubit " + std::to_string(q) + " out of range for " + std::to_string(n) + " qubits");
      if (seen[q] == g.cycle)
        throw Error("qubit " + std::to_string(q) + " used twice in cycle " + std::to_string(g.cycle));
      seen[q] = g.cycle;
    }
    if (g.arity() == 2) {
      if (g.q[0] == g.q[1]) throw Error("two-qubit gate on a single qubit");
      if (!grid_adjacent(cols, g.q[0], g.q[1])) nearest_neighbor_ = false;
    }
    max_cycle = std::max(max_cycle, g.cycle);
  }
  num_cycles_ = max_cycle + 1;

  auto all_h = [&](int cycle) {
    int count = 0;
    for (const Gate& g : gates_)
      if (g.cycle == cycle) {
        if (g.kind != GateKind::H) return false;
        ++count;
      }
    return count == n;
  };
  if (num_cycles_ == 0) {
    depth_label_ = "0";
  } else if (all_h(0)) {
    bool final_h = num_cycles_ > 1 && all_h(num_cycles_ - 1);
    int d = num_cycles_ - 1 - (final_h ? 1 : 0);
    depth_label_ = "1+" + std::to_string(d) + (final_h ? "+1" : "");
  } else {
    depth_label_ = std::to_string(num_cycles_);
  }
}

bool Circuit::adjacent(int a, int b) const { return grid_adjacent(cols_, a, b); }

std::uint64_t Circuit::hash() const {
  std::string grid = std::to_string(rows_) + "x" + std::to_string(cols_) + "\n";
  return fnv1a(serialize_circuit(*this), fnv1a(grid));
}

Circuit parse_circuit(std::string_view text, std::optional<GridShape> grid) {
  std::vector<Gate> gates;
  int n = -1;
  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    auto toks = split_ws(line);
    if (toks.empty() || toks[0][0] == '#') {
      if (end == text.size()) break;
      continue;
    }
    if (n < 0) {
      if (toks.size() != 1 || !parse_number(toks[0], n) || n < 1)
        throw ParseError(line_no, "expected a positive qubit count");
      continue;
    }
    if (toks.size() < 3) throw ParseError(line_no, "expected `cycle name q [q2]`");
    int cycle = 0;
    if (!parse_number(toks[0], cycle) || cycle < 0) throw ParseError(line_no, "bad cycle index");
    auto kind = gate_kind_from_name(toks[1]);
    if (!kind) throw ParseError(line_no, "unknown gate `" + std::string(toks[1]) + "`");
    bool two = is_two_qubit_kind(*kind);
    size_t expect = 3 + (two ? 1 : 0) + (*kind == GateKind::GENERIC_2Q ? 32 : 0);
    if (toks.size() != expect)
      throw ParseError(line_no, "expected " + std::to_string(expect) + " fields, got " + std::to_string(toks.size()));
    int q[2] = {-1, -1};
    for (int i = 0; i < (two ? 2 : 1); ++i) {
      if (!parse_number(toks[2 + i], q[i]) || q[i] < 0) throw ParseError(line_no, "bad qubit index");
      if (q[i] >= n)
        throw ParseError(line_no, "qubit " + std::to_string(q[i]) + " >= declared count " + std::to_string(n));
    }
    try {
      if (*kind == GateKind::GENERIC_2Q) {
        Mat4 m;
        for (int i = 0; i < 16; ++i) {
          double re, im;
          if (!parse_number(toks[4 + 2 * i], re) || !parse_number(toks[5 + 2 * i], im))
            throw ParseError(line_no, "bad matrix entry");
          m[i] = cdouble(re, im);
        }
        gates.push_back(Gate::generic(cycle, q[0], q[1], m));
      } else if (two) {
        gates.push_back(Gate::two(cycle, *kind, q[0], q[1]));
      } else {
        gates.push_back(Gate::one(cycle, *kind, q[0]));
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
    if (end == text.size()) break;
  }
  if (n < 0) throw ParseError(line_no, "missing qubit count");
  GridShape g = grid ? *grid : infer_grid(n, gates);
  if (g.rows * g.cols != n)
    throw Error("grid " + std::to_string(g.rows) + "x" + std::to_string(g.cols) + " does not hold " +
                std::to_string(n) + " qubits");
  return Circuit(g.rows, g.cols, std::move(gates));
}

std::string serialize_circuit(const Circuit& c) {
  std::string out = std::to_string(c.num_qubits()) + "\n";
  char buf[64];
  for (const Gate& g : c.gates()) {
    out += std::to_string(g.cycle);
    out += ' ';
    out += gate_name(g.kind);
    out += ' ';
    out += std::to_string(g.q[0]);
    if (g.arity() == 2) {
      out += ' ';
      out += std::to_string(g.q[1]);
    }
    if (g.kind == GateKind::GENERIC_2Q) {
      for (const cdouble& v : *g.matrix) {
        std::snprintf(buf, sizeof buf, " %.17g %.17g", v.real(), v.imag());
        out += buf;
      }
    }
    out += '\n';
  }
  return out;
}

std::optional<GridShape> grid_from_filename(const std::string& path) {
  static const std::regex re(R"(inst_(\d+)x(\d+)_)");
  std::smatch m;
  std::string base = path.substr(path.find_last_of('/') == std::string::npos ? 0 : path.find_last_of('/') + 1);
  if (!std::regex_search(base, m, re)) return std::nullopt;
  return GridShape{std::stoi(m[1]), std::stoi(m[2])};
}

Circuit load_circuit(const std::string& path, std::optional<GridShape> grid) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open circuit file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  if (!grid) grid = grid_from_filename(path);
  return parse_circuit(ss.str(), grid);
}

void save_circuit(const Circuit& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << serialize_circuit(c);
}

Cut make_cut(const Circuit& c, Orientation o, int position) {
  int limit = o == Orientation::Horizontal ? c.rows() : c.cols();
  if (position < 1 || position >= limit) throw Error("cut position out of range");
  Cut cut;
  cut.orientation = o;
  cut.position = position;
  for (int q = 0; q < c.num_qubits(); ++q) {
    int coord = o == Orientation::Horizontal ? q / c.cols() : q % c.cols();
    (coord < position ? cut.block_a : cut.block_b).push_back(q);
  }
  return cut;
}

std::vector<Cut> all_cuts(const Circuit& c) {
  std::vector<Cut> out;
  for (int r = 1; r < c.rows(); ++r) out.push_back(make_cut(c, Orientation::Horizontal, r));
  for (int col = 1; col < c.cols(); ++col) out.push_back(make_cut(c, Orientation::Vertical, col));
  return out;
}

Cut choose_cut(const Circuit& c) {
  if (c.num_qubits() < 2) throw Error("need at least two qubits to cut");
  auto cuts = all_cuts(c);
  auto key = [&](const Cut& k) {
    return std::make_tuple(std::max(k.block_a.size(), k.block_b.size()), count_cross_gates(c, k),
                           k.position, k.orientation == Orientation::Horizontal ? 0 : 1);
  };
  return *std::min_element(cuts.begin(), cuts.end(),
                           [&](const Cut& a, const Cut& b) { return key(a) < key(b); });
}

int count_cross_gates(const Circuit& c, const Cut& cut) {
  std::vector<char> in_a(c.num_qubits(), 0);
  for (int q : cut.block_a) in_a[q] = 1;
  int x = 0;
  for (const Gate& g : c.gates())
    if (g.arity() == 2 && in_a[g.q[0]] != in_a[g.q[1]]) ++x;
  return x;
}

std::string describe_cut(const Cut& cut) {
  return std::string(cut.orientation == Orientation::Horizontal ? "horizontal" : "vertical") + "@" +
         std::to_string(cut.position) + " (" + std::to_string(cut.block_a.size()) + "q + " +
         std::to_string(cut.block_b.size()) + "q)";
}

}  // namespace sfsim
