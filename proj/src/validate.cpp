#include "sfsim/validate.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "json.hpp"
#include "sfsim/hash.hpp"
#include "sfsim/pathsum.hpp"
#include "sfsim/rng.hpp"
#include "sfsim/statevec.hpp"

namespace sfsim {

using nlohmann::json;

namespace {

void check_circuit(const Circuit& c, const Challenge& ch) {
  if (c.hash() != ch.circuit_hash) throw Error("challenge was issued for a different circuit");
}

AmplitudeBatch approx_amplitudes(const Circuit& c, const std::vector<std::uint64_t>& idx, double f, std::uint64_t seed) {
  PlanOptions po;
  po.fidelity = f;
  po.seed = seed;
  po.n_a = idx.size();
  SimPlan plan = make_plan(c, po);
  return HybridEngine(c, plan, idx).run_approx();
}

}  // namespace

std::vector<std::uint64_t> Challenge::indices() const { return select_indices(n_qubits, k, index_seed); }

Challenge issue_challenge(const Circuit& c, std::uint64_t k, double delta, std::uint64_t seed) {
  const int n = c.num_qubits();
  if (k < 1) throw Error("challenge needs k >= 1");
  if (n < 64 && k > (std::uint64_t{1} << n)) throw Error("k exceeds the number of basis states");
  if (!(delta > 0)) throw Error("delta must be positive");
  return Challenge{c.hash(), n, k, seed, delta};
}

VerifierResult verifier_round(const Circuit& c, const Challenge& ch, const VerifierSecret& secret,
                              const AmplitudeBatch& claimant) {
  check_circuit(c, ch);
  const std::vector<std::uint64_t> idx = ch.indices();
  if (claimant.indices != idx) throw Error("claimant response does not cover the challenge indices");
  AmplitudeBatch mine = approx_amplitudes(c, idx, secret.f1, secret.path_seed);
  VerifierResult r;
  r.f1 = secret.f1;
  r.f_e = estimate_fidelity(claimant, mine);
  r.pass = std::abs(r.f_e - secret.f1) <= ch.delta;
  return r;
}

AmplitudeBatch claimant_round(const Circuit& c, const Challenge& ch, ClaimantEngine engine, double fidelity,
                              std::uint64_t seed) {
  check_circuit(c, ch);
  const std::vector<std::uint64_t> idx = ch.indices();
  switch (engine) {
    case ClaimantEngine::Exact:
      if (c.num_qubits() <= 30) {
        StateBlock s = run_full(c);
        return fetch_amplitudes(s, idx);
      }
      return approx_amplitudes(c, idx, 1.0, seed);
    case ClaimantEngine::Approx:
      return approx_amplitudes(c, idx, fidelity, seed);
    case ClaimantEngine::Random: {
      AmplitudeBatch b = AmplitudeBatch::zeros(idx);
      CounterRng rng(seed);
      std::normal_distribution<double> g(0.0, 1.0);
      for (auto& a : b.amps) {
        const double re = g(rng);
        a = cdouble(re, g(rng));
      }
      return b;
    }
  }
  throw Error("unknown claimant engine");
}

double calibrate_delta(const Circuit& c, const Challenge& ch, double f1, int rounds, std::uint64_t seed) {
  if (rounds < 2) throw Error("calibration needs at least two rounds");
  AmplitudeBatch honest = claimant_round(c, ch, ClaimantEngine::Exact);
  double ss = 0;
  for (int r = 0; r < rounds; ++r) {
    VerifierSecret s{f1, counter_bits(seed, static_cast<std::uint64_t>(r))};
    const double d = verifier_round(c, ch, s, honest).f_e - f1;
    ss += d * d;
  }
  return 3.0 * std::sqrt(ss / rounds);
}

void save_challenge(const std::string& path, const Challenge& ch) {
  json j{{"circuit_hash", hex64(ch.circuit_hash)},
         {"qubits", ch.n_qubits},
         {"k", ch.k},
         {"index_seed", ch.index_seed},
         {"delta", ch.delta}};
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error("cannot write " + path);
}

Challenge load_challenge(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  json j = json::parse(in);
  Challenge ch;
  ch.circuit_hash = parse_hex64(j.at("circuit_hash").get<std::string>());
  ch.n_qubits = j.at("qubits");
  ch.k = j.at("k");
  ch.index_seed = j.at("index_seed");
  ch.delta = j.at("delta");
  return ch;
}

void save_secret(const std::string& path, const VerifierSecret& s) {
  std::ofstream out(path);
  out << json{{"f1", s.f1}, {"path_seed", s.path_seed}}.dump(2) << '\n';
  if (!out) throw Error("cannot write " + path);
}

VerifierSecret load_secret(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  json j = json::parse(in);
  return VerifierSecret{j.at("f1"), j.at("path_seed")};
}

}  // namespace sfsim
