#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sfsim/benchgen.hpp"
#include "sfsim/circuit.hpp"
#include "sfsim/costmodel.hpp"
#include "sfsim/hash.hpp"
#include "sfsim/orchestrator.hpp"
#include "sfsim/pathsum.hpp"
#include "sfsim/rng.hpp"
#include "sfsim/sampler.hpp"
#include "sfsim/statevec.hpp"
#include "sfsim/validate.hpp"

using namespace sfsim;
using nlohmann::json;

namespace {

struct CircuitArgs {
  std::string path;
  std::string grid;  // RxC

  void add(CLI::App* app) {
    app->add_option("circuit,--circuit", path, "Circuit file")->required()->check(CLI::ExistingFile);
    app->add_option("--grid", grid, "Grid shape RxC when it cannot be inferred");
  }
  Circuit load() const {
    std::optional<GridShape> g;
    if (!grid.empty()) {
      GridShape s;
      if (std::sscanf(grid.c_str(), "%dx%d", &s.rows, &s.cols) != 2) throw Error("bad --grid, expected RxC");
      g = s;
    }
    return load_circuit(path, g);
  }
};

struct PlanArgs {
  double fidelity = 1.0;
  int x_p = -1;
  int x_b = -1;
  std::uint64_t seed = 0;
  std::string cut;

  void add(CLI::App* app) {
    app->add_option("--fidelity", fidelity, "Fraction of paths kept")->check(CLI::Range(0.0, 1.0));
    app->add_option("--xp", x_p, "Cross gates in the prefix");
    app->add_option("--xb", x_b, "Cross gates in the branch");
    app->add_option("--seed", seed, "Retained-prefix seed");
    app->add_option("--cut", cut, "Cut as h<row> or v<col>; default picks the best");
  }
  PlanOptions options(const Circuit& c, std::uint64_t n_a, int workers = 1) const {
    PlanOptions po;
    po.fidelity = fidelity;
    po.seed = seed;
    po.n_a = n_a;
    po.workers = workers;
    if (x_p >= 0) po.x_p = x_p;
    if (x_b >= 0) po.x_b = x_b;
    if (!cut.empty()) {
      if (cut[0] != 'h' && cut[0] != 'v') throw Error("bad --cut, expected h<row> or v<col>");
      po.cut = make_cut(c, cut[0] == 'h' ? Orientation::Horizontal : Orientation::Vertical, std::stoi(cut.substr(1)));
    }
    return po;
  }
};

// "all" or a count.
std::uint64_t parse_amps(const std::string& s, int n) {
  if (s == "all") return std::uint64_t{1} << n;
  const double v = std::stod(s);
  if (!(v >= 1)) throw Error("--amps must be >= 1");
  return static_cast<std::uint64_t>(std::llround(v));
}

void emit_amplitudes(const std::string& out, const AmplitudeBatch& b, const std::map<std::string, std::string>& hdr) {
  if (out.empty() || out == "-")
    write_amplitudes(std::cout, b, 9, hdr);
  else
    write_amplitudes_file(out, b, 9, hdr);
}

json plan_to_json(const SimPlan& p) {
  return json{{"cut", describe_cut(p.cut)},
              {"x", p.x},
              {"x_p", p.x_p},
              {"x_b", p.x_b},
              {"d_p", p.d_p},
              {"d_b", p.d_b},
              {"path_space_log2", p.path_space_log2()},
              {"prefix_space", p.prefix_space},
              {"branch_space", p.branch_space},
              {"retained_prefixes", p.retained.size()},
              {"fidelity", p.fidelity}};
}

ForecastInput forecast_input(const SimPlan& p, std::uint64_t n_a, int workers, int nodes, const std::string& machine) {
  ForecastInput in;
  in.f = p.fidelity;
  in.q1 = static_cast<int>(p.cut.block_a.size());
  in.q2 = static_cast<int>(p.cut.block_b.size());
  in.d_p = p.d_p;
  in.d_b = p.d_b;
  in.x_p = p.x_p;
  in.x_b = p.x_b;
  in.n_a = static_cast<double>(n_a);
  in.p = workers;
  in.N = nodes;
  in.machine = machine;
  return in;
}

void print_status(const Campaign& k) {
  auto st = campaign_status(k);
  int done = 0, failed = 0, pending = 0;
  for (auto& [p, s] : st) {
    if (s == PrefixStatus::Done) ++done;
    else if (s == PrefixStatus::Failed) ++failed;
    else ++pending;
  }
  std::cout << "plan " << hex64(k.plan_hash) << "  jobs " << st.size() << "  done " << done << "  pending " << pending
            << "  failed " << failed << "\n";
  for (auto& [p, s] : st)
    if (s != PrefixStatus::Done) std::cout << "  prefix " << p << (s == PrefixStatus::Failed ? " failed" : " pending") << "\n";
}

int finish_campaign(const Campaign& k, const CampaignOptions& co, const std::string& out) {
  try {
    CampaignResult r = run_campaign(k, co);
    std::map<std::string, std::string> hdr{{"circuit_hash", hex64(k.circuit.hash())}, {"plan_hash", hex64(k.plan_hash)}};
    if (!out.empty()) write_amplitudes_file(out, r.merged, 9, hdr);
    std::printf("campaign complete: %zu jobs, wall %.3f s, max job %.3f s, cpu %.3f s, report %s\n", r.jobs.size(),
                r.wall_seconds, r.max_job_seconds, r.total_cpu_seconds, r.report_path.c_str());
    return 0;
  } catch (const CampaignFailed& e) {
    std::cerr << "campaign aborted: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid Schrodinger-Feynman circuit simulator"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Exact state-vector simulation");
  CircuitArgs sim_c;
  std::string sim_amps = "all", sim_out;
  std::uint64_t sim_req_seed = 0;
  sim_c.add(sim);
  sim->add_option("--amps", sim_amps, "Amplitude count or 'all'");
  sim->add_option("--request-seed", sim_req_seed, "Seed for the amplitude indices");
  sim->add_option("-o,--out", sim_out, "Output amplitude file");

  // pathsim
  auto* ps = app.add_subcommand("pathsim", "Hybrid path-sum simulation");
  CircuitArgs ps_c;
  PlanArgs ps_p;
  std::string ps_amps = "1000", ps_out;
  std::uint64_t ps_req_seed = 0;
  ps_c.add(ps);
  ps_p.add(ps);
  ps->add_option("--amps", ps_amps, "Amplitude count or 'all'");
  ps->add_option("--request-seed", ps_req_seed, "Seed for the amplitude indices");
  ps->add_option("-o,--out", ps_out, "Output amplitude file");

  // sample
  auto* sa = app.add_subcommand("sample", "Draw bitstrings from an amplitude file");
  std::string sa_in, sa_mode = "frugal";
  std::uint64_t sa_count = 10, sa_seed = 0;
  double sa_eps = 1e-3, sa_mprime = 10;
  int sa_qubits = 0;
  sa->add_option("amplitudes", sa_in, "Amplitude file")->required()->check(CLI::ExistingFile);
  sa->add_option("--qubits", sa_qubits, "Qubit count")->required();
  sa->add_option("--mode", sa_mode)->check(CLI::IsMember({"basic", "frugal"}));
  sa->add_option("-n,--count", sa_count, "Number of samples");
  sa->add_option("--epsilon", sa_eps, "BASIC accuracy");
  sa->add_option("--m-prime", sa_mprime, "FRUGAL acceptance scale");
  sa->add_option("--seed", sa_seed);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a benchmark circuit");
  GenSpec gs;
  std::string gen_version = "v2", gen_2q = "cz", gen_out;
  bool gen_no_h = false;
  gen->add_option("--rows", gs.rows)->required();
  gen->add_option("--cols", gs.cols)->required();
  gen->add_option("--depth", gs.depth, "Working cycles")->required();
  gen->add_option("--version", gen_version)->check(CLI::IsMember({"v1", "v2"}));
  gen->add_option("--two-qubit", gen_2q)->check(CLI::IsMember({"cz", "is"}));
  gen->add_option("--seed", gs.seed);
  gen->add_flag("--no-final-h", gen_no_h, "Omit the final Hadamard layer");
  gen->add_option("-o,--out", gen_out, "Output file or directory");

  // audit
  auto* au = app.add_subcommand("audit", "Hardness report for circuit files");
  std::vector<std::string> au_files;
  std::string au_grid;
  bool au_json = false;
  au->add_option("circuits", au_files)->required()->check(CLI::ExistingFile);
  au->add_option("--grid", au_grid);
  au->add_flag("--json", au_json);

  // plan
  auto* pl = app.add_subcommand("plan", "Show the simulation plan and forecast");
  CircuitArgs pl_c;
  PlanArgs pl_p;
  std::string pl_amps = "1000000", pl_params, pl_machine = "n1-highcpu-96";
  int pl_workers = 1, pl_nodes = 1;
  pl_c.add(pl);
  pl_p.add(pl);
  pl->add_option("--amps", pl_amps);
  pl->add_option("--workers", pl_workers, "Processes per node");
  pl->add_option("--nodes", pl_nodes);
  pl->add_option("--params", pl_params, "Calibrated cost parameters (JSON)");
  pl->add_option("--machine", pl_machine);

  // merge
  auto* mg = app.add_subcommand("merge", "Merge shard files");
  std::vector<std::string> mg_files;
  std::string mg_out, mg_dir;
  mg->add_option("shards", mg_files)->required()->check(CLI::ExistingFile);
  mg->add_option("-o,--out", mg_out);
  mg->add_option("--campaign", mg_dir, "Campaign directory, to report missing prefixes");

  // campaign
  auto* ca = app.add_subcommand("campaign", "Sharded prefix-job campaigns");
  ca->require_subcommand(1);
  auto* car = ca->add_subcommand("run", "Create and run a campaign");
  CircuitArgs car_c;
  PlanArgs car_p;
  std::string car_dir, car_amps = "1000", car_out, car_params;
  std::uint64_t car_req_seed = 0, car_kill_seed = 0;
  int car_workers = 1;
  double car_kill = 0;
  car_c.add(car);
  car_p.add(car);
  car->add_option("--shard-dir", car_dir)->required();
  car->add_option("--amps", car_amps);
  car->add_option("--request-seed", car_req_seed);
  car->add_option("--workers", car_workers);
  car->add_option("--kill-fraction", car_kill, "Fault injection: fraction of jobs killed on first attempt")
      ->check(CLI::Range(0.0, 1.0));
  car->add_option("--kill-seed", car_kill_seed);
  car->add_option("--params", car_params, "Cost parameters for forecast vs. actual");
  car->add_option("-o,--out", car_out, "Merged amplitude file");
  auto* cas = ca->add_subcommand("status", "Show campaign progress");
  std::string cas_dir;
  cas->add_option("--shard-dir", cas_dir)->required();
  auto* cre = ca->add_subcommand("resume", "Run the missing jobs of a campaign");
  std::string cre_dir, cre_out;
  int cre_workers = 0;
  cre->add_option("--shard-dir", cre_dir)->required();
  cre->add_option("--workers", cre_workers);
  cre->add_option("-o,--out", cre_out);

  // validate
  auto* va = app.add_subcommand("validate", "Verifier/Claimant protocol");
  va->require_subcommand(1);
  auto* vv = va->add_subcommand("verifier", "Issue a challenge or check a response");
  CircuitArgs vv_c;
  std::string vv_challenge = "challenge.json", vv_secret = "verifier_secret.json", vv_response;
  std::uint64_t vv_k = 100000, vv_seed = 0;
  double vv_delta = 0.03, vv_f1 = -1;
  vv_c.add(vv);
  vv->add_option("--challenge", vv_challenge);
  vv->add_option("--secret", vv_secret);
  vv->add_option("--response", vv_response, "Claimant response; without it a new challenge is issued");
  vv->add_option("-k", vv_k);
  vv->add_option("--delta", vv_delta);
  vv->add_option("--f1", vv_f1, "Secret fidelity; default uniform in [0.05, 0.25]");
  vv->add_option("--seed", vv_seed);
  auto* vc = va->add_subcommand("claimant", "Answer a challenge");
  CircuitArgs vc_c;
  std::string vc_challenge = "challenge.json", vc_engine = "exact", vc_out = "response.amp";
  double vc_f = 1.0;
  std::uint64_t vc_seed = 0;
  vc_c.add(vc);
  vc->add_option("--challenge", vc_challenge);
  vc->add_option("--engine", vc_engine)->check(CLI::IsMember({"exact", "approx", "random"}));
  vc->add_option("--fidelity", vc_f);
  vc->add_option("--seed", vc_seed);
  vc->add_option("-o,--out", vc_out);

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "Fit cost constants from benchmark runs");
  std::string cal_in, cal_out, cal_rates;
  cal->add_option("runs", cal_in, "JSON list of {q1,q2,d_p,d_b,x_p,x_b,f,n_a,p,seconds}")->required();
  cal->add_option("--rate-card", cal_rates);
  cal->add_option("-o,--out", cal_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      Circuit c = sim_c.load();
      StateBlock s = run_full(c);
      const std::uint64_t k = parse_amps(sim_amps, c.num_qubits());
      std::vector<std::uint64_t> idx;
      if (k == (std::uint64_t{1} << c.num_qubits())) {
        idx.resize(k);
        for (std::uint64_t i = 0; i < k; ++i) idx[i] = i;
      } else {
        idx = select_indices(c.num_qubits(), k, sim_req_seed);
      }
      emit_amplitudes(sim_out, fetch_amplitudes(s, idx), {{"circuit_hash", hex64(c.hash())}, {"engine", "statevec"}});
    } else if (*ps) {
      Circuit c = ps_c.load();
      const std::uint64_t k = parse_amps(ps_amps, c.num_qubits());
      std::vector<std::uint64_t> idx = select_indices(c.num_qubits(), k, ps_req_seed);
      SimPlan plan = make_plan(c, ps_p.options(c, k));
      AmplitudeBatch b = HybridEngine(c, plan, idx).run_approx();
      emit_amplitudes(ps_out, b,
                      {{"circuit_hash", hex64(c.hash())},
                       {"engine", "pathsum"},
                       {"fidelity", std::to_string(plan.fidelity)},
                       {"cut", describe_cut(plan.cut)}});
    } else if (*sa) {
      AmplitudeFile f = read_amplitudes_file(sa_in);
      SampleRequest req;
      req.n = sa_qubits;
      req.ell = sa_count;
      req.mode = sa_mode == "basic" ? SampleMode::Basic : SampleMode::Frugal;
      req.epsilon = sa_eps;
      req.m_prime = sa_mprime;
      req.seed = sa_seed;
      auto probs = probabilities(f.batch);
      SampleSet s = req.mode == SampleMode::Basic ? sample_basic(req, probs) : sample_frugal(req, probs);
      for (std::uint64_t b : s.bitstrings) std::cout << bitstring(b, sa_qubits) << "\n";
      std::cerr << "accepted " << s.accepted_count << " of " << f.batch.size() << " candidates\n";
    } else if (*gen) {
      gs.version = gen_version == "v1" ? BenchVersion::V1 : BenchVersion::V2;
      gs.two_qubit = gen_2q == "is" ? GateKind::ISWAP : GateKind::CZ;
      gs.include_final_h = !gen_no_h;
      Circuit c = generate(gs);
      if (gen_out.empty() || gen_out == "-") {
        std::cout << serialize_circuit(c);
      } else {
        std::string path = gen_out;
        if (std::filesystem::is_directory(path)) path = (std::filesystem::path(path) / instance_filename(gs)).string();
        save_circuit(c, path);
        std::cout << path << "\n";
      }
    } else if (*au) {
      json all = json::array();
      for (const auto& f : au_files) {
        CircuitArgs ca_{f, au_grid};
        HardnessReport r = audit(ca_.load());
        if (au_json) {
          json j = json::parse(audit_json(r));
          j["file"] = f;
          all.push_back(j);
        } else {
          std::printf("%s: depth %s, gates %d, 2q %d, T %d, diagonal runs %d, final H %s, best cut %s (x=%d)\n", f.c_str(),
                      r.depth_label.c_str(), r.total_gates, r.two_qubit_gates, r.t_count, r.diagonal_runs,
                      r.final_h ? "yes" : "no", describe_cut(r.best.cut).c_str(), r.best.cross_gates);
        }
      }
      if (au_json) std::cout << all.dump(2) << "\n";
    } else if (*pl) {
      Circuit c = pl_c.load();
      const std::uint64_t k = parse_amps(pl_amps, c.num_qubits());
      SimPlan plan = make_plan(c, pl_p.options(c, k, pl_workers));
      json j = plan_to_json(plan);
      j["circuit_hash"] = hex64(c.hash());
      if (!pl_params.empty()) {
        CostParams cp = load_params(pl_params);
        Forecast f = forecast(cp, forecast_input(plan, k, pl_workers, pl_nodes, pl_machine));
        j["forecast"] = {{"T_tot_hours", f.T_tot}, {"T_bill_hours", f.T_bill}, {"T_clock_hours", f.T_clock},
                         {"M_proc_bytes", f.M_proc}, {"M_node_bytes", f.M_node}, {"M_cluster_bytes", f.M_cluster},
                         {"cost_usd", f.cost}};
      }
      std::cout << j.dump(2) << "\n";
    } else if (*mg) {
      MergeResult m = merge(mg_files);
      if (!mg_dir.empty()) {
        Campaign k = open_campaign(mg_dir);
        auto miss = missing_prefixes(k.plan, m);
        if (!miss.empty()) {
          std::cerr << "missing prefixes:";
          for (auto p : miss) std::cerr << " " << p;
          std::cerr << "\n";
        }
      }
      emit_amplitudes(mg_out, m.batch, {{"circuit_hash", hex64(m.circuit_hash)}, {"plan_hash", hex64(m.plan_hash)}});
    } else if (*car) {
      Circuit c = car_c.load();
      const std::uint64_t k = parse_amps(car_amps, c.num_qubits());
      Campaign camp = create_campaign(c, car_p.options(c, k, car_workers), k, car_req_seed, car_dir, car_workers);
      CampaignOptions co;
      if (car_kill > 0) {
        const auto n_kill = static_cast<std::uint64_t>(std::llround(car_kill * camp.plan.retained.size()));
        for (std::uint64_t i : select_subset(camp.plan.retained.size(), n_kill, car_kill_seed))
          co.faults.kill.insert(camp.plan.retained[i]);
      }
      if (!car_params.empty()) co.params = load_params(car_params);
      return finish_campaign(camp, co, car_out);
    } else if (*cas) {
      print_status(open_campaign(cas_dir));
    } else if (*cre) {
      Campaign camp = open_campaign(cre_dir);
      if (cre_workers > 0) camp.workers = cre_workers;
      return finish_campaign(camp, {}, cre_out);
    } else if (*vv) {
      Circuit c = vv_c.load();
      if (vv_response.empty()) {
        Challenge ch = issue_challenge(c, vv_k, vv_delta, vv_seed);
        VerifierSecret s;
        s.f1 = vv_f1 > 0 ? vv_f1 : 0.05 + 0.2 * counter_uniform(vv_seed, 1);
        s.path_seed = counter_bits(vv_seed, 2);
        save_challenge(vv_challenge, ch);
        save_secret(vv_secret, s);
        std::cout << "challenge written to " << vv_challenge << "\n";
      } else {
        Challenge ch = load_challenge(vv_challenge);
        VerifierSecret s = load_secret(vv_secret);
        AmplitudeFile f = read_amplitudes_file(vv_response);
        VerifierResult r = verifier_round(c, ch, s, f.batch);
        std::printf("%s f_e=%.6f f1=%.6f delta=%.6f\n", r.pass ? "PASS" : "FAIL", r.f_e, r.f1, ch.delta);
        return r.pass ? 0 : 1;
      }
    } else if (*vc) {
      Circuit c = vc_c.load();
      Challenge ch = load_challenge(vc_challenge);
      ClaimantEngine e = vc_engine == "exact" ? ClaimantEngine::Exact
                         : vc_engine == "approx" ? ClaimantEngine::Approx : ClaimantEngine::Random;
      write_amplitudes_file(vc_out, claimant_round(c, ch, e, vc_f, vc_seed), 9, {{"circuit_hash", hex64(c.hash())}});
    } else if (*cal) {
      std::ifstream in(cal_in);
      if (!in) throw Error("cannot read " + cal_in);
      json j = json::parse(in);
      std::vector<BenchRun> runs;
      for (const auto& r : j) {
        BenchRun b;
        b.shape.q1 = r.at("q1");
        b.shape.q2 = r.at("q2");
        b.shape.d_p = r.at("d_p");
        b.shape.d_b = r.at("d_b");
        b.shape.x_p = r.at("x_p");
        b.shape.x_b = r.at("x_b");
        b.shape.f = r.value("f", 1.0);
        b.shape.n_a = r.at("n_a");
        b.shape.p = r.value("p", 1);
        b.seconds = r.at("seconds");
        runs.push_back(b);
      }
      CostParams base;
      if (!cal_rates.empty()) base.rate_card = load_rate_card(cal_rates);
      Calibration cb = calibrate(runs, base);
      std::printf("c1=%.6g c2=%.6g c3=%.6g relative_residual=%.4f\n", cb.params.c1, cb.params.c2, cb.params.c3,
                  cb.relative_residual);
      if (!cal_out.empty()) save_params(cb.params, cal_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
