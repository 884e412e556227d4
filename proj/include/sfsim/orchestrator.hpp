#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sfsim/amplitudes.hpp"
#include "sfsim/circuit.hpp"
#include "sfsim/costmodel.hpp"
#include "sfsim/pathsum.hpp"

namespace sfsim {

struct Campaign {
  Circuit circuit;
  SimPlan plan;
  std::vector<std::uint64_t> requests;
  std::uint64_t request_seed = 0;
  std::string shard_dir;
  int workers = 1;
  int retry_limit = 3;
  std::uint64_t plan_hash = 0;
};

struct Job {
  std::uint64_t prefix = 0;
  std::uint64_t circuit_hash = 0;
  std::uint64_t plan_hash = 0;
  std::uint64_t request_seed = 0;
  std::string shard_path;
};

enum class PrefixStatus { Pending, Done, Failed };

// Writes campaign.json and a copy of the circuit into shard_dir.
Campaign create_campaign(const Circuit& c, const PlanOptions& opt, std::uint64_t n_a, std::uint64_t request_seed,
                         const std::string& shard_dir, int workers = 1);
Campaign open_campaign(const std::string& shard_dir);

std::vector<Job> shard(const Campaign& c);
std::string shard_filename(std::uint64_t plan_hash, std::uint64_t prefix);
std::map<std::uint64_t, PrefixStatus> campaign_status(const Campaign& c);

struct FaultInjection {
  std::set<std::uint64_t> kill;  // prefixes whose worker dies mid-run
  bool every_attempt = false;    // otherwise only the first attempt dies
};

struct CampaignOptions {
  FaultInjection faults;
  std::optional<CostParams> params;  // enables forecast vs. actual in the report
};

struct JobStat {
  std::uint64_t prefix = 0;
  double wall_seconds = 0;
  double cpu_seconds = 0;
  int attempts = 0;
  bool reused = false;  // shard already present from an earlier run
};

struct CampaignResult {
  AmplitudeBatch merged;
  std::vector<JobStat> jobs;
  double wall_seconds = 0;
  double max_job_seconds = 0;
  double total_cpu_seconds = 0;
  long peak_rss_kb = -1;
  std::string report_path;
};

class CampaignFailed : public Error {
 public:
  CampaignFailed(const std::string& msg, std::vector<std::uint64_t> prefixes)
      : Error(msg), prefixes_(std::move(prefixes)) {}
  const std::vector<std::uint64_t>& prefixes() const { return prefixes_; }

 private:
  std::vector<std::uint64_t> prefixes_;
};

CampaignResult run_campaign(const Campaign& c, const CampaignOptions& opt = {});

struct MergeResult {
  AmplitudeBatch batch;
  std::vector<std::uint64_t> prefixes;
  std::uint64_t circuit_hash = 0;
  std::uint64_t plan_hash = 0;
};

MergeResult merge(const std::vector<std::string>& shard_files);
std::vector<std::uint64_t> missing_prefixes(const SimPlan& plan, const MergeResult& m);

// Shard I/O: 17 significant digits so merged sums round-trip exactly.
void write_shard(const std::string& path, const Job& job, const AmplitudeBatch& b, int n_qubits,
                 double wall_seconds, double cpu_seconds);

}  // namespace sfsim
