#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sfsim/benchgen.hpp"
#include "sfsim/costmodel.hpp"
#include "sfsim/orchestrator.hpp"
#include "sfsim/pathsum.hpp"
#include "sfsim/rng.hpp"
#include "sfsim/sampler.hpp"
#include "sfsim/statevec.hpp"
#include "sfsim/validate.hpp"

namespace py = pybind11;
using namespace sfsim;

namespace {

py::array_t<std::complex<double>> to_numpy(const std::vector<cdouble>& v) {
  py::array_t<std::complex<double>> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::tuple batch_tuple(const AmplitudeBatch& b) {
  py::array_t<std::uint64_t> idx(static_cast<py::ssize_t>(b.indices.size()));
  std::copy(b.indices.begin(), b.indices.end(), idx.mutable_data());
  return py::make_tuple(idx, to_numpy(b.amps));
}

AmplitudeBatch batch_from(const std::vector<std::uint64_t>& idx, const std::vector<cdouble>& amps) {
  if (idx.size() != amps.size()) throw Error("indices and amplitudes differ in length");
  return {idx, amps};
}

PlanOptions plan_options(double fidelity, std::optional<int> x_p, std::optional<int> x_b, std::uint64_t seed,
                         std::uint64_t n_a, int workers, std::optional<std::string> cut, const Circuit& c) {
  PlanOptions po;
  po.fidelity = fidelity;
  po.x_p = x_p;
  po.x_b = x_b;
  po.seed = seed;
  po.n_a = n_a;
  po.workers = workers;
  if (cut) {
    if (cut->size() < 2 || ((*cut)[0] != 'h' && (*cut)[0] != 'v')) throw Error("cut must be h<row> or v<col>");
    po.cut = make_cut(c, (*cut)[0] == 'h' ? Orientation::Horizontal : Orientation::Vertical, std::stoi(cut->substr(1)));
  }
  return po;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hybrid Schrodinger-Feynman simulation of grid circuits";

  py::register_exception<Error>(m, "SfsimError", PyExc_ValueError);

  py::enum_<BenchVersion>(m, "BenchVersion").value("V1", BenchVersion::V1).value("V2", BenchVersion::V2);
  py::enum_<GateKind>(m, "GateKind")
      .value("H", GateKind::H)
      .value("T", GateKind::T)
      .value("X_HALF", GateKind::X_HALF)
      .value("Y_HALF", GateKind::Y_HALF)
      .value("CZ", GateKind::CZ)
      .value("ISWAP", GateKind::ISWAP)
      .value("GENERIC_2Q", GateKind::GENERIC_2Q);
  py::enum_<ClaimantEngine>(m, "ClaimantEngine")
      .value("Exact", ClaimantEngine::Exact)
      .value("Approx", ClaimantEngine::Approx)
      .value("Random", ClaimantEngine::Random);

  // circuit
  py::class_<Circuit>(m, "Circuit")
      .def_property_readonly("rows", &Circuit::rows)
      .def_property_readonly("cols", &Circuit::cols)
      .def_property_readonly("num_qubits", &Circuit::num_qubits)
      .def_property_readonly("num_cycles", &Circuit::num_cycles)
      .def_property_readonly("depth_label", &Circuit::depth_label)
      .def_property_readonly("num_gates", [](const Circuit& c) { return c.gates().size(); })
      .def_property_readonly("nearest_neighbor", &Circuit::nearest_neighbor)
      .def("hash", &Circuit::hash)
      .def("serialize", &serialize_circuit)
      .def("__eq__", &Circuit::operator==)
      .def("__repr__", [](const Circuit& c) {
        return "<Circuit " + std::to_string(c.rows()) + "x" + std::to_string(c.cols()) + " " + c.depth_label() + ">";
      });

  m.def(
      "parse_circuit",
      [](const std::string& text, std::optional<std::pair<int, int>> grid) {
        std::optional<GridShape> g;
        if (grid) g = GridShape{grid->first, grid->second};
        return parse_circuit(text, g);
      },
      py::arg("text"), py::arg("grid") = py::none());
  m.def(
      "load_circuit",
      [](const std::string& path, std::optional<std::pair<int, int>> grid) {
        std::optional<GridShape> g;
        if (grid) g = GridShape{grid->first, grid->second};
        return load_circuit(path, g);
      },
      py::arg("path"), py::arg("grid") = py::none());
  m.def("save_circuit", &save_circuit, py::arg("circuit"), py::arg("path"));

  // benchgen
  m.def(
      "generate",
      [](int rows, int cols, int depth, std::uint64_t seed, BenchVersion version, GateKind two_qubit, bool final_h) {
        GenSpec g;
        g.rows = rows;
        g.cols = cols;
        g.depth = depth;
        g.seed = seed;
        g.version = version;
        g.two_qubit = two_qubit;
        g.include_final_h = final_h;
        return generate(g);
      },
      py::arg("rows"), py::arg("cols"), py::arg("depth"), py::arg("seed") = 0, py::arg("version") = BenchVersion::V2,
      py::arg("two_qubit") = GateKind::CZ, py::arg("final_h") = true);
  m.def("audit", [](const Circuit& c) {
    const HardnessReport r = audit(c);
    py::dict d;
    d["depth_label"] = r.depth_label;
    d["total_gates"] = r.total_gates;
    d["two_qubit_gates"] = r.two_qubit_gates;
    d["t_count"] = r.t_count;
    d["diagonal_runs"] = r.diagonal_runs;
    d["final_h"] = r.final_h;
    d["best_cut"] = describe_cut(r.best.cut);
    d["cross_gates"] = r.best.cross_gates;
    d["path_space_log2"] = r.best.path_space_log2;
    return d;
  });

  // statevec
  m.def(
      "simulate",
      [](const Circuit& c) {
        StateBlock s;
        {
          py::gil_scoped_release release;
          s = run_full(c);
        }
        py::array_t<std::complex<float>> out(static_cast<py::ssize_t>(s.amps.size()));
        std::copy(s.amps.begin(), s.amps.end(), out.mutable_data());
        return out;
      },
      py::arg("circuit"), "Full state vector as complex64 (qubit 0 is the most significant bit).");

  // pathsum
  py::class_<SimPlan>(m, "SimPlan")
      .def_readonly("x", &SimPlan::x)
      .def_readonly("x_p", &SimPlan::x_p)
      .def_readonly("x_b", &SimPlan::x_b)
      .def_readonly("d_p", &SimPlan::d_p)
      .def_readonly("d_b", &SimPlan::d_b)
      .def_readonly("fidelity", &SimPlan::fidelity)
      .def_readonly("seed", &SimPlan::seed)
      .def_readonly("retained", &SimPlan::retained)
      .def_readonly("branch", &SimPlan::branch)
      .def_property_readonly("cut", [](const SimPlan& p) { return describe_cut(p.cut); })
      .def_property_readonly("block_sizes",
                             [](const SimPlan& p) { return std::make_pair(p.cut.block_a.size(), p.cut.block_b.size()); })
      .def("path_space_log2", &SimPlan::path_space_log2);

  m.def(
      "make_plan",
      [](const Circuit& c, double fidelity, std::optional<int> x_p, std::optional<int> x_b, std::uint64_t seed,
         std::uint64_t n_a, int workers, std::optional<std::string> cut) {
        return make_plan(c, plan_options(fidelity, x_p, x_b, seed, n_a, workers, cut, c));
      },
      py::arg("circuit"), py::arg("fidelity") = 1.0, py::arg("x_p") = py::none(), py::arg("x_b") = py::none(),
      py::arg("seed") = 0, py::arg("n_a") = 1, py::arg("workers") = 1, py::arg("cut") = py::none());

  m.def(
      "run_approx",
      [](const Circuit& c, const SimPlan& plan, const std::vector<std::uint64_t>& indices) {
        AmplitudeBatch b;
        {
          py::gil_scoped_release release;
          b = run_approx(c, plan, indices);
        }
        return to_numpy(b.amps);
      },
      py::arg("circuit"), py::arg("plan"), py::arg("indices"));

  m.def("select_indices", &select_indices, py::arg("n"), py::arg("count"), py::arg("seed"));

  m.def(
      "estimate_fidelity",
      [](const std::vector<cdouble>& reference, const std::vector<cdouble>& candidate) {
        std::vector<std::uint64_t> idx(reference.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        return estimate_fidelity(batch_from(idx, reference), batch_from(idx, candidate));
      },
      py::arg("reference"), py::arg("candidate"));

  m.def(
      "schmidt_rank", [](GateKind k) { return schmidt_decompose(Gate::two(0, k, 0, 1)).rank; }, py::arg("gate"));

  // sampler
  m.def("plan_basic", &plan_basic, py::arg("n"), py::arg("epsilon"));
  m.def(
      "sample_frugal",
      [](int n, const std::vector<std::uint64_t>& indices, const std::vector<double>& probs, double m_prime,
         std::uint64_t seed) {
        if (indices.size() != probs.size()) throw Error("indices and probabilities differ in length");
        std::vector<Probability> cand(indices.size());
        for (std::size_t i = 0; i < cand.size(); ++i) cand[i] = {indices[i], probs[i]};
        SampleRequest req;
        req.n = n;
        req.m_prime = m_prime;
        req.seed = seed;
        req.ell = static_cast<std::uint64_t>(cand.size() / m_prime);
        return sample_frugal(req, cand).bitstrings;
      },
      py::arg("n"), py::arg("indices"), py::arg("probs"), py::arg("m_prime") = 10.0, py::arg("seed") = 0);
  m.def(
      "porter_thomas_ks",
      [](const std::vector<double>& probs, int n, bool renormalize) {
        return porter_thomas_fit(probs, n, renormalize).ks;
      },
      py::arg("probs"), py::arg("n"), py::arg("renormalize") = false);
  m.def("total_variation", &total_variation, py::arg("p"), py::arg("q"));
  m.def("frugal_induced_tv", &frugal_induced_tv, py::arg("p"), py::arg("m_prime"));

  // costmodel
  m.def(
      "forecast_seconds",
      [](double f, int q1, int q2, double d_p, double d_b, int x_p, int x_b, double n_a, double c1, double c2,
         double c3) {
        CostParams p;
        p.c1 = c1;
        p.c2 = c2;
        p.c3 = c3;
        ForecastInput in;
        in.f = f;
        in.q1 = q1;
        in.q2 = q2;
        in.d_p = d_p;
        in.d_b = d_b;
        in.x_p = x_p;
        in.x_b = x_b;
        in.n_a = n_a;
        return total_seconds(p, in);
      },
      py::arg("f"), py::arg("q1"), py::arg("q2"), py::arg("d_p"), py::arg("d_b"), py::arg("x_p"), py::arg("x_b"),
      py::arg("n_a"), py::arg("c1"), py::arg("c2"), py::arg("c3"));

  // orchestrator
  m.def(
      "run_campaign",
      [](const Circuit& c, const std::string& shard_dir, std::uint64_t n_a, std::uint64_t request_seed, double fidelity,
         std::optional<int> x_p, std::uint64_t seed, int workers) {
        const Campaign k =
            create_campaign(c, plan_options(fidelity, x_p, std::nullopt, seed, n_a, workers, std::nullopt, c), n_a,
                            request_seed, shard_dir, workers);
        CampaignResult r;
        {
          py::gil_scoped_release release;
          r = run_campaign(k);
        }
        return batch_tuple(r.merged);
      },
      py::arg("circuit"), py::arg("shard_dir"), py::arg("n_a"), py::arg("request_seed") = 0, py::arg("fidelity") = 1.0,
      py::arg("x_p") = py::none(), py::arg("seed") = 0, py::arg("workers") = 1,
      "Runs a sharded campaign and returns (indices, amplitudes) of the merged batch.");
  m.def(
      "merge_shards", [](const std::vector<std::string>& files) { return batch_tuple(merge(files).batch); },
      py::arg("files"));

  // validate
  py::class_<Challenge>(m, "Challenge")
      .def_readonly("k", &Challenge::k)
      .def_readonly("n_qubits", &Challenge::n_qubits)
      .def_readonly("delta", &Challenge::delta)
      .def("indices", &Challenge::indices);
  m.def("issue_challenge", &issue_challenge, py::arg("circuit"), py::arg("k"), py::arg("delta"), py::arg("seed"));
  m.def(
      "claimant_round",
      [](const Circuit& c, const Challenge& ch, ClaimantEngine e, double fidelity, std::uint64_t seed) {
        return to_numpy(claimant_round(c, ch, e, fidelity, seed).amps);
      },
      py::arg("circuit"), py::arg("challenge"), py::arg("engine") = ClaimantEngine::Exact, py::arg("fidelity") = 1.0,
      py::arg("seed") = 0);
  m.def(
      "verifier_round",
      [](const Circuit& c, const Challenge& ch, double f1, std::uint64_t path_seed, const std::vector<cdouble>& amps) {
        const VerifierResult r = verifier_round(c, ch, VerifierSecret{f1, path_seed}, batch_from(ch.indices(), amps));
        return py::make_tuple(r.pass, r.f_e);
      },
      py::arg("circuit"), py::arg("challenge"), py::arg("f1"), py::arg("path_seed"), py::arg("amplitudes"),
      "Returns (passed, estimated fidelity).");
}
