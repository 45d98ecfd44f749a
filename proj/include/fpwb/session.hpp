#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stop_token>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "fpwb/analysis.hpp"
#include "fpwb/regimes.hpp"
#include "fpwb/rewriter.hpp"
#include "fpwb/sampler.hpp"
#include "fpwb/spec.hpp"

namespace fpwb {

enum class Provenance { User, Generated, Combined };
std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

struct Candidate {
  std::uint64_t id = 0;
  Expr expr;
  Provenance provenance = Provenance::User;
  Derivation derivation;
  /// Report for the sample it was last analyzed on; hidden candidates may
  /// lag behind the session's spec until shown again.
  std::shared_ptr<const ErrorReport> report;
  bool visible = true;
  std::optional<std::uint64_t> duplicate_of;
  std::optional<std::uint64_t> source;  // start candidate of a suggestion
  std::string note;
};

/// Process-wide LRU of samples shared by all sessions.
class SampleStore {
 public:
  explicit SampleStore(std::size_t capacity = 32) : capacity_(capacity) {}
  std::shared_ptr<const Sample> find(const std::string& key);
  void put(const std::string& key, std::shared_ptr<const Sample> sample);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::size_t capacity_;
  std::list<std::string> lru_;  // front is most recent
  std::unordered_map<std::string,
                     std::pair<std::shared_ptr<const Sample>, std::list<std::string>::iterator>>
      map_;
};

struct SessionSnapshot {
  std::string id;
  Spec spec;
  std::shared_ptr<const Sample> sample;
  std::vector<Candidate> candidates;
};

enum class JobState { Queued, Running, Done, Cancelled, Failed };
std::string_view to_string(JobState s);

struct JobStatus {
  std::string id;
  std::string session_id;
  JobState state = JobState::Queued;
  bool timed_out = false;
  std::string error_code;
  std::string error_message;
  /// Ids of the candidates the job appended to the table (set once Done).
  std::vector<std::uint64_t> added;
};

struct WorkbenchOptions {
  std::size_t workers = 2;
  std::size_t sample_store_capacity = 32;
  SuggestOptions suggest;
};

/// Session state and orchestration. All members are thread-safe. Each
/// session admits one writer at a time; reads run concurrently.
class Workbench {
 public:
  explicit Workbench(WorkbenchOptions options = {});
  ~Workbench();
  Workbench(const Workbench&) = delete;
  Workbench& operator=(const Workbench&) = delete;

  /// Samples the spec and seeds the table with the spec expression.
  std::string create_session(Spec spec);
  SessionSnapshot snapshot(const std::string& session) const;

  Candidate add_candidate(const std::string& session, const Expr& e,
                          Provenance provenance = Provenance::User, Derivation derivation = {},
                          std::string note = {});
  /// Error estimate on the session sample without touching the table.
  ErrorReport estimate(const std::string& session, const Expr& e);

  /// Resamples on the new ranges and re-analyzes visible candidates. On
  /// failure the session is unchanged.
  SessionSnapshot set_range(const std::string& session, const std::vector<VarRange>& ranges);
  Candidate set_visible(const std::string& session, std::uint64_t candidate, bool visible);

  /// Report for the current sample (re-analyzing a stale hidden candidate).
  std::pair<std::shared_ptr<const ErrorReport>, std::shared_ptr<const Sample>> errors(
      const std::string& session, std::uint64_t candidate);
  LocalErrorTree local_error(const std::string& session, std::uint64_t candidate,
                             const Point& point);

  /// Combines candidates into a branched candidate and appends it.
  Candidate combine(const std::string& session, const std::vector<std::uint64_t>& candidates,
                    const std::string& var, std::size_t max_branches, double split_penalty = 1.0);

  std::string run_suggest(const std::string& session, std::uint64_t start,
                          std::optional<std::size_t> k = std::nullopt,
                          std::optional<std::chrono::milliseconds> budget = std::nullopt);
  /// Appends a finished job's results to its session on first observation.
  JobStatus poll_job(const std::string& job);
  JobStatus cancel_job(const std::string& job);
  /// Blocks until the job leaves the queued/running states.
  JobStatus wait_job(const std::string& job);

  void save(const std::string& session, const std::filesystem::path& file) const;
  std::string load(const std::filesystem::path& file);

  struct CacheStats {
    std::uint64_t sample_hits = 0;
    std::uint64_t sample_misses = 0;
    std::uint64_t exact_hits = 0;
    std::uint64_t exact_misses = 0;
  };
  CacheStats cache_stats() const;

 private:
  struct Session;
  struct Job;

  std::shared_ptr<Session> find_session(const std::string& id) const;
  std::shared_ptr<Job> find_job(const std::string& id) const;
  std::shared_ptr<const Sample> sample_for(Session& s, const Spec& spec);
  std::shared_ptr<const ErrorReport> report_for(Session& s, const Expr& e, const Sample& sample);
  Candidate& candidate_ref(Session& s, std::uint64_t id);
  Candidate append(Session& s, const Expr& e, Provenance provenance, Derivation derivation,
                   std::string note, std::optional<std::uint64_t> source);
  std::string register_session(std::shared_ptr<Session> s);
  void collect(Job& job);
  void worker_loop(std::stop_token stop);

  WorkbenchOptions options_;
  SampleStore store_;
  mutable std::mutex mu_;  // sessions_, jobs_, id counters
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::uint64_t next_session_ = 1;
  std::uint64_t next_job_ = 1;

  std::mutex queue_mu_;
  std::condition_variable_any queue_cv_;
  std::deque<std::shared_ptr<Job>> queue_;
  std::vector<std::jthread> workers_;

  std::atomic<std::uint64_t> sample_hits_{0}, sample_misses_{0}, exact_hits_{0}, exact_misses_{0};
};

}  // namespace fpwb
