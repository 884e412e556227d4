#include "sfsim/orchestrator.hpp"

#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <deque>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "sfsim/hash.hpp"
#include "sfsim/rng.hpp"

namespace sfsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kShardDigits = 17;

double cpu_now() {
  timespec ts;
  clock_gettime(CLOCK_PROCESS_CPUTIME_ID, &ts);
  return ts.tv_sec + ts.tv_nsec * 1e-9;
}

std::string shard_path(const Campaign& c, std::uint64_t prefix) {
  return (fs::path(c.shard_dir) / shard_filename(c.plan_hash, prefix)).string();
}

bool shard_valid(const Campaign& c, std::uint64_t prefix, double* wall = nullptr, double* cpu = nullptr) {
  const std::string path = shard_path(c, prefix);
  if (!fs::exists(path)) return false;
  try {
    AmplitudeFile f = read_amplitudes_file(path);
    if (f.header.at("circuit_hash") != hex64(c.circuit.hash())) return false;
    if (f.header.at("plan_hash") != hex64(c.plan_hash)) return false;
    if (std::stoull(f.header.at("prefix")) != prefix) return false;
    if (f.batch.indices != c.requests) return false;
    if (wall) *wall = std::stod(f.header.at("wall_seconds"));
    if (cpu) *cpu = std::stod(f.header.at("cpu_seconds"));
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

json plan_json(const SimPlan& p) {
  return json{{"orientation", p.cut.orientation == Orientation::Horizontal ? "horizontal" : "vertical"},
              {"position", p.cut.position},
              {"x", p.x},
              {"x_p", p.x_p},
              {"x_b", p.x_b},
              {"d_p", p.d_p},
              {"d_b", p.d_b},
              {"fidelity", p.fidelity},
              {"seed", p.seed},
              {"prefix_space", p.prefix_space},
              {"retained", p.retained.size()}};
}

[[noreturn]] void run_job_child(const HybridEngine& eng, const Campaign& c, const Job& job, bool die) {
  try {
    const auto t0 = std::chrono::steady_clock::now();
    const double c0 = cpu_now();
    const std::string tmp = job.shard_path + ".tmp." + std::to_string(getpid());
    if (die) {
      // Simulated preemption: partial output left behind, process killed.
      std::ofstream partial(tmp);
      partial << "# circuit_hash " << hex64(job.circuit_hash) << "\n";
      partial.close();
      raise(SIGKILL);
    }
    AmplitudeBatch b = eng.run_prefix_tree(job.prefix);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_shard(tmp, job, b, c.circuit.num_qubits(), wall, cpu_now() - c0);
    fs::rename(tmp, job.shard_path);
    _exit(0);
  } catch (...) {
    _exit(3);
  }
}

}  // namespace

std::string shard_filename(std::uint64_t plan_hash, std::uint64_t prefix) {
  return hex64(plan_hash) + "." + std::to_string(prefix) + ".amp";
}

void write_shard(const std::string& path, const Job& job, const AmplitudeBatch& b, int n_qubits, double wall_seconds,
                 double cpu_seconds) {
  char wall[32], cpu[32];
  std::snprintf(wall, sizeof wall, "%.6f", wall_seconds);
  std::snprintf(cpu, sizeof cpu, "%.6f", cpu_seconds);
  write_amplitudes_file(path, b, kShardDigits,
                        {{"circuit_hash", hex64(job.circuit_hash)},
                         {"plan_hash", hex64(job.plan_hash)},
                         {"prefix", std::to_string(job.prefix)},
                         {"request_seed", std::to_string(job.request_seed)},
                         {"qubits", std::to_string(n_qubits)},
                         {"wall_seconds", wall},
                         {"cpu_seconds", cpu}});
}

Campaign create_campaign(const Circuit& c, const PlanOptions& opt, std::uint64_t n_a, std::uint64_t request_seed,
                         const std::string& shard_dir, int workers) {
  if (workers < 1) throw Error("need at least one worker");
  Campaign k;
  k.circuit = c;
  PlanOptions po = opt;
  po.n_a = n_a;
  po.workers = workers;
  k.plan = make_plan(c, po);
  k.request_seed = request_seed;
  k.requests = select_indices(c.num_qubits(), n_a, request_seed);
  k.shard_dir = shard_dir;
  k.workers = workers;
  k.plan_hash = k.plan.hash(request_hash(k.requests));
  fs::create_directories(shard_dir);
  save_circuit(c, (fs::path(shard_dir) / "circuit.txt").string());
  json j = plan_json(k.plan);
  j["rows"] = c.rows();
  j["cols"] = c.cols();
  j["circuit_hash"] = hex64(c.hash());
  j["plan_hash"] = hex64(k.plan_hash);
  j["n_a"] = n_a;
  j["request_seed"] = request_seed;
  j["workers"] = workers;
  std::ofstream out(fs::path(shard_dir) / "campaign.json");
  out << j.dump(2) << '\n';
  if (!out) throw Error("cannot write campaign.json in " + shard_dir);
  return k;
}

Campaign open_campaign(const std::string& shard_dir) {
  std::ifstream in(fs::path(shard_dir) / "campaign.json");
  if (!in) throw Error("no campaign.json in " + shard_dir);
  json j = json::parse(in);
  Circuit c = load_circuit((fs::path(shard_dir) / "circuit.txt").string(), GridShape{j.at("rows"), j.at("cols")});
  if (hex64(c.hash()) != j.at("circuit_hash").get<std::string>()) throw Error("circuit.txt does not match campaign.json");
  PlanOptions po;
  po.cut = make_cut(c, j.at("orientation") == "horizontal" ? Orientation::Horizontal : Orientation::Vertical,
                    j.at("position").get<int>());
  po.fidelity = j.at("fidelity");
  po.x_p = j.at("x_p").get<int>();
  po.seed = j.at("seed");
  Campaign k = create_campaign(c, po, j.at("n_a"), j.at("request_seed"), shard_dir, j.at("workers"));
  if (hex64(k.plan_hash) != j.at("plan_hash").get<std::string>()) throw Error("campaign plan could not be reproduced");
  return k;
}

std::vector<Job> shard(const Campaign& c) {
  std::vector<Job> jobs;
  for (std::uint64_t p : c.plan.retained)
    jobs.push_back({p, c.circuit.hash(), c.plan_hash, c.request_seed, shard_path(c, p)});
  return jobs;
}

std::map<std::uint64_t, PrefixStatus> campaign_status(const Campaign& c) {
  std::map<std::uint64_t, PrefixStatus> st;
  for (std::uint64_t p : c.plan.retained) {
    if (shard_valid(c, p))
      st[p] = PrefixStatus::Done;
    else if (fs::exists(shard_path(c, p) + ".failed"))
      st[p] = PrefixStatus::Failed;
    else
      st[p] = PrefixStatus::Pending;
  }
  return st;
}

CampaignResult run_campaign(const Campaign& c, const CampaignOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(c.shard_dir);
  HybridEngine eng(c.circuit, c.plan, c.requests);

  std::map<std::uint64_t, JobStat> stats;
  std::deque<Job> todo;
  for (const Job& j : shard(c)) {
    JobStat s;
    s.prefix = j.prefix;
    fs::remove(j.shard_path + ".failed");
    if (shard_valid(c, j.prefix, &s.wall_seconds, &s.cpu_seconds)) {
      s.reused = true;
    } else {
      todo.push_back(j);
    }
    stats[j.prefix] = s;
  }

  std::map<pid_t, Job> running;
  std::vector<std::uint64_t> failed;
  while (!todo.empty() || !running.empty()) {
    while (!todo.empty() && static_cast<int>(running.size()) < c.workers) {
      Job job = todo.front();
      todo.pop_front();
      JobStat& s = stats[job.prefix];
      ++s.attempts;
      const bool die = opt.faults.kill.count(job.prefix) && (opt.faults.every_attempt || s.attempts == 1);
      pid_t pid = fork();
      if (pid < 0) throw Error("fork failed");
      if (pid == 0) run_job_child(eng, c, job, die);
      running[pid] = job;
    }
    int status = 0;
    pid_t pid = waitpid(-1, &status, 0);
    if (pid < 0) throw Error("waitpid failed");
    auto it = running.find(pid);
    if (it == running.end()) continue;
    Job job = it->second;
    running.erase(it);
    JobStat& s = stats[job.prefix];
    const bool ok = WIFEXITED(status) && WEXITSTATUS(status) == 0 && shard_valid(c, job.prefix, &s.wall_seconds, &s.cpu_seconds);
    if (ok) continue;
    for (const auto& e : fs::directory_iterator(c.shard_dir)) {
      const std::string name = e.path().filename().string();
      if (name.rfind(fs::path(job.shard_path).filename().string() + ".tmp.", 0) == 0) fs::remove(e.path());
    }
    if (s.attempts > c.retry_limit) {
      failed.push_back(job.prefix);
      std::ofstream(job.shard_path + ".failed") << s.attempts << '\n';
    } else {
      todo.push_back(job);
    }
  }

  CampaignResult r;
  for (auto& [p, s] : stats) {
    r.jobs.push_back(s);
    r.max_job_seconds = std::max(r.max_job_seconds, s.wall_seconds);
    r.total_cpu_seconds += s.cpu_seconds;
  }
  rusage ru;
  if (getrusage(RUSAGE_CHILDREN, &ru) == 0) r.peak_rss_kb = ru.ru_maxrss;

  if (!failed.empty()) {
    std::sort(failed.begin(), failed.end());
    std::string list;
    for (std::uint64_t p : failed) list += (list.empty() ? "" : ",") + std::to_string(p);
    throw CampaignFailed("prefix jobs failed more than " + std::to_string(c.retry_limit) + " retries: " + list, failed);
  }

  std::vector<std::string> files;
  for (std::uint64_t p : c.plan.retained) files.push_back(shard_path(c, p));
  r.merged = merge(files).batch;
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json rep;
  rep["circuit_hash"] = hex64(c.circuit.hash());
  rep["plan_hash"] = hex64(c.plan_hash);
  rep["plan"] = plan_json(c.plan);
  rep["workers"] = c.workers;
  rep["n_a"] = c.requests.size();
  rep["wall_seconds"] = r.wall_seconds;
  rep["max_job_seconds"] = r.max_job_seconds;
  rep["total_cpu_seconds"] = r.total_cpu_seconds;
  rep["peak_rss_kb"] = r.peak_rss_kb;
  rep["jobs"] = json::array();
  for (const JobStat& s : r.jobs)
    rep["jobs"].push_back({{"prefix", s.prefix}, {"wall_seconds", s.wall_seconds}, {"cpu_seconds", s.cpu_seconds},
                           {"attempts", s.attempts}, {"reused", s.reused}});
  if (opt.params) {
    ForecastInput in;
    in.f = c.plan.fidelity;
    in.q1 = static_cast<int>(c.plan.cut.block_a.size());
    in.q2 = static_cast<int>(c.plan.cut.block_b.size());
    in.d_p = c.plan.d_p;
    in.d_b = c.plan.d_b;
    in.x_p = c.plan.x_p;
    in.x_b = c.plan.x_b;
    in.n_a = static_cast<double>(c.requests.size());
    in.p = c.workers;
    Forecast f = forecast(*opt.params, in);
    rep["forecast"] = {{"T_tot_hours", f.T_tot}, {"M_proc_bytes", f.M_proc}};
    rep["actual"] = {{"T_tot_hours", r.total_cpu_seconds / 3600.0}};
  }
  r.report_path = (fs::path(c.shard_dir) / "report.json").string();
  std::ofstream(r.report_path) << rep.dump(2) << '\n';
  return r;
}

MergeResult merge(const std::vector<std::string>& shard_files) {
  if (shard_files.empty()) throw Error("nothing to merge");
  std::vector<std::pair<std::uint64_t, AmplitudeBatch>> parts;
  MergeResult m;
  for (std::size_t i = 0; i < shard_files.size(); ++i) {
    AmplitudeFile f = read_amplitudes_file(shard_files[i]);
    if (!f.header.count("circuit_hash") || !f.header.count("plan_hash") || !f.header.count("prefix"))
      throw Error(shard_files[i] + " is not a shard file");
    const std::uint64_t ch = parse_hex64(f.header["circuit_hash"]);
    const std::uint64_t ph = parse_hex64(f.header["plan_hash"]);
    if (i == 0) {
      m.circuit_hash = ch;
      m.plan_hash = ph;
    } else if (ch != m.circuit_hash || ph != m.plan_hash) {
      throw Error("hash mismatch: " + shard_files[i] + " belongs to a different circuit or plan");
    }
    parts.emplace_back(std::stoull(f.header["prefix"]), std::move(f.batch));
  }
  std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < parts.size(); ++i)
    if (parts[i].first == parts[i - 1].first)
      throw Error("duplicate shard for prefix " + std::to_string(parts[i].first) + " would double count");
  m.batch = AmplitudeBatch::zeros(parts.front().second.indices);
  for (auto& [p, b] : parts) {
    m.batch.add(b);
    m.prefixes.push_back(p);
  }
  return m;
}

std::vector<std::uint64_t> missing_prefixes(const SimPlan& plan, const MergeResult& m) {
  std::vector<std::uint64_t> out;
  std::set_difference(plan.retained.begin(), plan.retained.end(), m.prefixes.begin(), m.prefixes.end(),
                      std::back_inserter(out));
  return out;
}

}  // namespace sfsim
