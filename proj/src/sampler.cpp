#include "sfsim/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "sfsim/rng.hpp"

namespace sfsim {

void SampleRequest::validate() const {
  if (n < 1 || n > 62) throw Error("sample request needs 1 <= n <= 62");
  if (ell < 1) throw Error("sample count must be at least 1");
  if (mode == SampleMode::Basic && !(epsilon > 0 && epsilon < 1)) throw Error("epsilon must lie in (0, 1)");
  if (mode == SampleMode::Frugal && !(m_prime >= 1)) throw Error("M' must be at least 1");
}

double SampleRequest::N() const { return std::ldexp(1.0, n); }

std::uint64_t plan_basic(int n, double epsilon) {
  if (!(epsilon > 0 && epsilon <= 1)) throw Error("epsilon must lie in (0, 1]");
  const double m = std::ceil(n * std::log(2.0) - std::log(epsilon));
  return static_cast<std::uint64_t>(std::max(1.0, m));
}

namespace {

SampleSet accept(const std::vector<Probability>& probs, double N, double M, bool drop_high, std::uint64_t seed) {
  SampleSet s;
  const double limit = M / N;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    const double p = probs[j].p;
    if (p > limit) s.measured_tail_mass += p;
    if (drop_high && p > limit) continue;
    if (counter_uniform(seed, j) < std::min(1.0, p * N / M)) s.bitstrings.push_back(probs[j].index);
  }
  s.measured_tail_mass *= N / static_cast<double>(std::max<std::size_t>(probs.size(), 1));
  s.accepted_count = s.bitstrings.size();
  return s;
}

}  // namespace

SampleSet sample_basic(const SampleRequest& req, const std::vector<Probability>& probs) {
  req.validate();
  const std::uint64_t M = plan_basic(req.n, req.epsilon);
  if (probs.size() % M) throw Error("probability count " + std::to_string(probs.size()) + " is not a multiple of M = " + std::to_string(M));
  return accept(probs, req.N(), static_cast<double>(M), true, req.seed);
}

SampleSet sample_frugal(const SampleRequest& req, const std::vector<Probability>& probs) {
  req.validate();
  const double Mp = req.m_prime;
  const double whole = std::round(Mp);
  if (std::abs(Mp - whole) < 1e-12 && static_cast<std::uint64_t>(whole) > 0 && probs.size() % static_cast<std::uint64_t>(whole))
    throw Error("probability count " + std::to_string(probs.size()) + " is not a multiple of M' = " + std::to_string(Mp));
  return accept(probs, req.N(), Mp, false, req.seed);
}

std::vector<Probability> probabilities(const AmplitudeBatch& b) {
  std::vector<Probability> out;
  out.reserve(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) out.push_back({b.indices[i], std::norm(b.amps[i])});
  return out;
}

TailMass tail_mass(const std::vector<double>& probs, double m_prime, int n, std::uint64_t seed) {
  TailMass t;
  if (probs.empty()) return t;
  const double N = std::ldexp(1.0, n);
  const double limit = m_prime / N;
  const double scale = N / static_cast<double>(probs.size());
  auto contrib = [&](double p) { return p > limit ? p * scale : 0.0; };
  for (double p : probs) t.value += contrib(p);

  constexpr int kResamples = 100;
  CounterRng rng(seed);
  double sum = 0, sum2 = 0;
  for (int r = 0; r < kResamples; ++r) {
    double v = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) v += contrib(probs[rng() % probs.size()]);
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / kResamples;
  t.stderr_ = std::sqrt(std::max(0.0, sum2 / kResamples - mean * mean) * kResamples / (kResamples - 1));
  return t;
}

PorterThomasReport porter_thomas_fit(const std::vector<double>& probs, int n, bool renormalize) {
  if (probs.size() < 10000) throw Error("Porter-Thomas fit needs at least 1e4 probabilities, got " + std::to_string(probs.size()));
  PorterThomasReport r;
  r.count = probs.size();
  double scale = std::ldexp(1.0, n);
  if (renormalize) {
    double mean = 0;
    for (double p : probs) mean += p;
    mean /= static_cast<double>(probs.size());
    if (mean <= 0) throw Error("cannot renormalize an all-zero batch");
    scale = 1.0 / mean;
  }
  std::vector<double> x(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) x[i] = probs[i] * scale;
  std::sort(x.begin(), x.end());
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = 1 - std::exp(-x[i]);
    r.ks = std::max({r.ks, F - i / m, (i + 1) / m - F});
  }
  constexpr int kBins = 20;
  constexpr double kWidth = 0.5;
  r.observed.assign(kBins, 0);
  for (int b = 0; b <= kBins; ++b) r.bin_edges.push_back(b * kWidth);
  for (double v : x) {
    const int b = static_cast<int>(v / kWidth);
    if (b < kBins) r.observed[b] += 1 / (m * kWidth);
  }
  for (int b = 0; b < kBins; ++b)
    r.expected.push_back((std::exp(-r.bin_edges[b]) - std::exp(-r.bin_edges[b + 1])) / kWidth);
  return r;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw Error("distributions differ in size");
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return s / 2;
}

double frugal_induced_tv(const std::vector<double>& p, double m_prime) {
  const double N = static_cast<double>(p.size());
  std::vector<double> q(p.size());
  double z = 0;
  for (std::size_t i = 0; i < p.size(); ++i) z += q[i] = std::min(1.0, p[i] * N / m_prime);
  for (double& v : q) v /= z;
  return total_variation(p, q);
}

std::string bitstring(std::uint64_t index, int n) {
  std::string s(n, '0');
  for (int q = 0; q < n; ++q)
    if ((index >> (n - 1 - q)) & 1) s[q] = '1';
  return s;
}

}  // namespace sfsim
