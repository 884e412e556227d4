#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfsim/amplitudes.hpp"
#include "sfsim/circuit.hpp"

namespace sfsim {

struct Challenge {
  std::uint64_t circuit_hash = 0;
  int n_qubits = 0;
  std::uint64_t k = 0;
  std::uint64_t index_seed = 0;
  double delta = 0.03;

  std::vector<std::uint64_t> indices() const;
};

// Kept by the Verifier; never written into challenge.json.
struct VerifierSecret {
  double f1 = 0.125;
  std::uint64_t path_seed = 0;
};

Challenge issue_challenge(const Circuit& c, std::uint64_t k, double delta, std::uint64_t seed);

struct VerifierResult {
  bool pass = false;
  double f_e = 0;
  double f1 = 0;
};

VerifierResult verifier_round(const Circuit& c, const Challenge& ch, const VerifierSecret& secret,
                              const AmplitudeBatch& claimant);

enum class ClaimantEngine { Exact, Approx, Random };

AmplitudeBatch claimant_round(const Circuit& c, const Challenge& ch, ClaimantEngine engine, double fidelity = 1.0,
                              std::uint64_t seed = 0);

// 3x the RMS deviation of f_e from f1 over honest rounds with fresh Verifier seeds.
double calibrate_delta(const Circuit& c, const Challenge& ch, double f1, int rounds, std::uint64_t seed);

void save_challenge(const std::string& path, const Challenge& ch);
Challenge load_challenge(const std::string& path);
void save_secret(const std::string& path, const VerifierSecret& s);
VerifierSecret load_secret(const std::string& path);

}  // namespace sfsim
