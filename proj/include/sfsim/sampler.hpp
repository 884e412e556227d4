#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sfsim/amplitudes.hpp"

namespace sfsim {

enum class SampleMode { Basic, Frugal };

struct SampleRequest {
  int n = 0;
  std::uint64_t ell = 1;
  SampleMode mode = SampleMode::Frugal;
  double epsilon = 1e-3;      // BASIC
  double m_prime = 10;        // FRUGAL
  std::uint64_t seed = 0;

  void validate() const;
  double N() const;
};

struct Probability {
  std::uint64_t index;
  double p;
};

struct SampleSet {
  std::vector<std::uint64_t> bitstrings;
  std::uint64_t accepted_count = 0;
  double measured_tail_mass = 0;
};

std::uint64_t plan_basic(int n, double epsilon);
SampleSet sample_basic(const SampleRequest& req, const std::vector<Probability>& probs);
SampleSet sample_frugal(const SampleRequest& req, const std::vector<Probability>& probs);

std::vector<Probability> probabilities(const AmplitudeBatch& b);

struct TailMass {
  double value = 0;
  double stderr_ = 0;
};

// Σ p·[p > M'/N]·(N/|probs|) with a 100-resample bootstrap error.
TailMass tail_mass(const std::vector<double>& probs, double m_prime, int n, std::uint64_t seed = 0);

struct PorterThomasReport {
  std::size_t count = 0;
  double ks = 0;  // Kolmogorov-Smirnov statistic of N·p against Exp(1)
  std::vector<double> bin_edges;
  std::vector<double> observed;  // density of N·p per bin
  std::vector<double> expected;  // e^{-x} averaged over the bin
};

PorterThomasReport porter_thomas_fit(const std::vector<double>& probs, int n, bool renormalize = false);

// Analytic TV distance between p and the distribution the frugal rule induces under
// uniform proposals over the full space.
double frugal_induced_tv(const std::vector<double>& p, double m_prime);
double total_variation(const std::vector<double>& p, const std::vector<double>& q);

std::string bitstring(std::uint64_t index, int n);

}  // namespace sfsim
