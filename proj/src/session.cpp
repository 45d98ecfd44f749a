#include "fpwb/session.hpp"

#include <fstream>
#include <sstream>

#include "fpwb/emit.hpp"
#include "fpwb/error.hpp"
#include "fpwb/parse.hpp"
#include "fpwb/wire.hpp"

namespace fpwb {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::User: return "user";
    case Provenance::Generated: return "generated";
    case Provenance::Combined: return "combined";
  }
  return "user";
}

Provenance provenance_from_string(std::string_view s) {
  if (s == "user") return Provenance::User;
  if (s == "generated") return Provenance::Generated;
  if (s == "combined") return Provenance::Combined;
  throw Error(ErrorCode::BadRequest, "unknown provenance '" + std::string(s) + "'");
}

std::string_view to_string(JobState s) {
  switch (s) {
    case JobState::Queued: return "queued";
    case JobState::Running: return "running";
    case JobState::Done: return "done";
    case JobState::Cancelled: return "cancelled";
    case JobState::Failed: return "failed";
  }
  return "failed";
}

// ---------------------------------------------------------------------------
// SampleStore

std::shared_ptr<const Sample> SampleStore::find(const std::string& key) {
  std::lock_guard lock(mu_);
  auto it = map_.find(key);
  if (it == map_.end()) return nullptr;
  lru_.splice(lru_.begin(), lru_, it->second.second);
  return it->second.first;
}

void SampleStore::put(const std::string& key, std::shared_ptr<const Sample> sample) {
  std::lock_guard lock(mu_);
  auto it = map_.find(key);
  if (it != map_.end()) {
    it->second.first = std::move(sample);
    lru_.splice(lru_.begin(), lru_, it->second.second);
    return;
  }
  lru_.push_front(key);
  map_.emplace(key, std::make_pair(std::move(sample), lru_.begin()));
  while (map_.size() > capacity_) {
    map_.erase(lru_.back());
    lru_.pop_back();
  }
}

std::size_t SampleStore::size() const {
  std::lock_guard lock(mu_);
  return map_.size();
}

// ---------------------------------------------------------------------------
// sessions

struct Workbench::Session {
  std::string id;
  mutable std::shared_mutex mu;
  Spec spec;
  std::shared_ptr<const Sample> sample;
  std::map<std::string, std::shared_ptr<const Sample>> samples;
  std::map<std::string, std::shared_ptr<const std::vector<ExactValue>>> exacts;
  std::map<std::string, std::shared_ptr<const ErrorReport>> reports;
  std::vector<Candidate> candidates;
  std::uint64_t next_id = 1;

  SessionSnapshot view() const { return {id, spec, sample, candidates}; }
};

struct Workbench::Job {
  std::string id;
  std::string session_id;
  std::uint64_t start = 0;
  Expr start_expr;
  Spec spec;
  std::shared_ptr<const Sample> sample;
  SuggestOptions options;

  std::mutex mu;
  std::condition_variable cv;
  std::stop_source stop;
  JobState state = JobState::Queued;
  SuggestResult result;
  bool collected = false;
  std::vector<std::uint64_t> added;
  std::string error_code;
  std::string error_message;

  JobStatus status() const {
    JobStatus s;
    s.id = id;
    s.session_id = session_id;
    s.state = state;
    s.timed_out = result.timed_out;
    s.error_code = error_code;
    s.error_message = error_message;
    s.added = added;
    return s;
  }
};

Workbench::Workbench(WorkbenchOptions options)
    : options_(std::move(options)), store_(options_.sample_store_capacity) {
  for (std::size_t i = 0; i < std::max<std::size_t>(1, options_.workers); ++i) {
    workers_.emplace_back([this](std::stop_token st) { worker_loop(st); });
  }
}

Workbench::~Workbench() {
  {
    std::lock_guard lock(mu_);
    for (auto& [id, job] : jobs_) job->stop.request_stop();
  }
  for (auto& w : workers_) w.request_stop();
  queue_cv_.notify_all();
  workers_.clear();
}

std::shared_ptr<Workbench::Session> Workbench::find_session(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "no session '" + id + "'");
  return it->second;
}

std::shared_ptr<Workbench::Job> Workbench::find_job(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = jobs_.find(id);
  if (it == jobs_.end()) throw Error(ErrorCode::JobNotFound, "no job '" + id + "'");
  return it->second;
}

std::shared_ptr<const Sample> Workbench::sample_for(Session& s, const Spec& spec) {
  std::string key = spec_key(spec);
  if (auto it = s.samples.find(key); it != s.samples.end()) {
    ++sample_hits_;
    return it->second;
  }
  auto shared = store_.find(key);
  if (shared) {
    ++sample_hits_;
  } else {
    ++sample_misses_;
    shared = std::make_shared<const Sample>(sample(spec));
    store_.put(key, shared);
  }
  s.samples.emplace(key, shared);
  return shared;
}

std::shared_ptr<const ErrorReport> Workbench::report_for(Session& s, const Expr& e,
                                                         const Sample& sample) {
  std::string key = emit_fpcore_body(e) + "|" + sample.spec_key;
  if (auto it = s.reports.find(key); it != s.reports.end()) return it->second;
  std::shared_ptr<const std::vector<ExactValue>> exacts;
  if (auto it = s.exacts.find(key); it != s.exacts.end()) {
    ++exact_hits_;
    exacts = it->second;
  } else {
    ++exact_misses_;
    exacts = std::make_shared<const std::vector<ExactValue>>(exact_outputs(e, sample));
    s.exacts.emplace(key, exacts);
  }
  auto report = std::make_shared<const ErrorReport>(analyze(e, sample, *exacts));
  s.reports.emplace(key, report);
  return report;
}

Candidate& Workbench::candidate_ref(Session& s, std::uint64_t id) {
  for (auto& c : s.candidates) {
    if (c.id == id) return c;
  }
  throw Error(ErrorCode::NotFound,
              "no candidate " + std::to_string(id) + " in session '" + s.id + "'");
}

Candidate Workbench::append(Session& s, const Expr& e, Provenance provenance,
                            Derivation derivation, std::string note,
                            std::optional<std::uint64_t> source) {
  validate(e);
  Candidate c;
  c.expr = e;
  c.report = report_for(s, e, *s.sample);
  c.id = s.next_id++;
  c.provenance = provenance;
  c.derivation = std::move(derivation);
  c.note = std::move(note);
  c.source = source;
  for (const auto& other : s.candidates) {
    if (other.expr == e) {
      c.duplicate_of = other.id;
      break;
    }
  }
  s.candidates.push_back(c);
  return c;
}

std::string Workbench::register_session(std::shared_ptr<Session> s) {
  std::lock_guard lock(mu_);
  if (s->id.empty()) s->id = "s" + std::to_string(next_session_++);
  sessions_[s->id] = s;
  return s->id;
}

std::string Workbench::create_session(Spec spec) {
  validate(spec.expr);
  validate_spec(spec);
  auto s = std::make_shared<Session>();
  s->spec = spec;
  s->sample = sample_for(*s, spec);
  append(*s, spec.expr, Provenance::User, {}, "specification", std::nullopt);
  return register_session(s);
}

SessionSnapshot Workbench::snapshot(const std::string& session) const {
  auto s = find_session(session);
  std::shared_lock lock(s->mu);
  return s->view();
}

Candidate Workbench::add_candidate(const std::string& session, const Expr& e,
                                   Provenance provenance, Derivation derivation,
                                   std::string note) {
  auto s = find_session(session);
  std::unique_lock lock(s->mu);
  return append(*s, e, provenance, std::move(derivation), std::move(note), std::nullopt);
}

ErrorReport Workbench::estimate(const std::string& session, const Expr& e) {
  auto s = find_session(session);
  std::unique_lock lock(s->mu);
  validate(e);
  return *report_for(*s, e, *s->sample);
}

SessionSnapshot Workbench::set_range(const std::string& session,
                                     const std::vector<VarRange>& ranges) {
  auto s = find_session(session);
  std::unique_lock lock(s->mu);
  Spec next = s->spec.with_ranges(ranges);
  validate_spec(next);
  auto smp = sample_for(*s, next);  // throws before any state changes
  std::vector<std::shared_ptr<const ErrorReport>> reports(s->candidates.size());
  for (std::size_t i = 0; i < s->candidates.size(); ++i) {
    if (s->candidates[i].visible) reports[i] = report_for(*s, s->candidates[i].expr, *smp);
  }
  s->spec = std::move(next);
  s->sample = std::move(smp);
  for (std::size_t i = 0; i < s->candidates.size(); ++i) {
    if (reports[i]) s->candidates[i].report = std::move(reports[i]);
  }
  return s->view();
}

Candidate Workbench::set_visible(const std::string& session, std::uint64_t candidate,
                                 bool visible) {
  auto s = find_session(session);
  std::unique_lock lock(s->mu);
  Candidate& c = candidate_ref(*s, candidate);
  if (visible && (!c.report || c.report->spec_key != s->sample->spec_key)) {
    c.report = report_for(*s, c.expr, *s->sample);
  }
  c.visible = visible;
  return c;
}

std::pair<std::shared_ptr<const ErrorReport>, std::shared_ptr<const Sample>> Workbench::errors(
    const std::string& session, std::uint64_t candidate) {
  auto s = find_session(session);
  {
    std::shared_lock lock(s->mu);
    for (const auto& c : s->candidates) {
      if (c.id == candidate && c.report && c.report->spec_key == s->sample->spec_key) {
        return {c.report, s->sample};
      }
    }
  }
  std::unique_lock lock(s->mu);
  Candidate& c = candidate_ref(*s, candidate);
  auto report = report_for(*s, c.expr, *s->sample);
  if (c.visible) c.report = report;
  return {report, s->sample};
}

LocalErrorTree Workbench::local_error(const std::string& session, std::uint64_t candidate,
                                      const Point& point) {
  auto s = find_session(session);
  Expr e;
  Spec spec;
  {
    std::shared_lock lock(s->mu);
    auto it = std::find_if(s->candidates.begin(), s->candidates.end(),
                           [&](const Candidate& c) { return c.id == candidate; });
    if (it == s->candidates.end()) {
      throw Error(ErrorCode::NotFound, "no candidate " + std::to_string(candidate) +
                                           " in session '" + s->id + "'");
    }
    e = it->expr;
    spec = s->spec;
  }
  for (const auto& v : spec.vars) {
    if (!point.contains(v.name)) {
      throw Error(ErrorCode::BadRequest, "point does not bind variable '" + v.name + "'");
    }
  }
  return fpwb::local_error(e, point);
}

Candidate Workbench::combine(const std::string& session,
                             const std::vector<std::uint64_t>& candidates,
                             const std::string& var, std::size_t max_branches,
                             double split_penalty) {
  auto s = find_session(session);
  std::unique_lock lock(s->mu);
  if (candidates.empty()) throw Error(ErrorCode::BadRequest, "no candidates to combine");
  std::vector<Expr> exprs;
  std::vector<std::vector<double>> bits;
  for (auto id : candidates) {
    const Candidate& c = candidate_ref(*s, id);
    exprs.push_back(c.expr);
    bits.push_back(report_for(*s, c.expr, *s->sample)->bits);
  }
  RegimeResult r = infer_regimes(exprs, bits, *s->sample, {var, max_branches, split_penalty});
  if (r.segments.size() == 1) {
    return candidate_ref(*s, candidates[r.segments[0].candidate]);
  }
  std::ostringstream note;
  for (std::size_t i = 0; i < r.segments.size(); ++i) {
    if (i > 0) note << "; ";
    if (i < r.thresholds.size()) {
      note << var << " <= " << threshold_literal(r.thresholds[i]) << ": ";
    } else {
      note << "otherwise: ";
    }
    note << "#" << candidates[r.segments[i].candidate];
  }
  return append(*s, r.expr, Provenance::Combined, {}, note.str(), std::nullopt);
}

// ---------------------------------------------------------------------------
// suggestion jobs

std::string Workbench::run_suggest(const std::string& session, std::uint64_t start,
                                   std::optional<std::size_t> k,
                                   std::optional<std::chrono::milliseconds> budget) {
  auto s = find_session(session);
  auto job = std::make_shared<Job>();
  {
    std::shared_lock lock(s->mu);
    auto it = std::find_if(s->candidates.begin(), s->candidates.end(),
                           [&](const Candidate& c) { return c.id == start; });
    if (it == s->candidates.end()) {
      throw Error(ErrorCode::NotFound, "no candidate " + std::to_string(start) +
                                           " in session '" + s->id + "'");
    }
    job->start_expr = it->expr;
    job->spec = s->spec;
    job->sample = s->sample;
  }
  job->session_id = session;
  job->start = start;
  job->options = options_.suggest;
  if (k) job->options.k = *k;
  if (budget) job->options.budget = *budget;
  {
    std::lock_guard lock(mu_);
    job->id = "j" + std::to_string(next_job_++);
    jobs_[job->id] = job;
  }
  {
    std::lock_guard lock(queue_mu_);
    queue_.push_back(job);
  }
  queue_cv_.notify_one();
  return job->id;
}

void Workbench::worker_loop(std::stop_token stop) {
  while (true) {
    std::shared_ptr<Job> job;
    {
      std::unique_lock lock(queue_mu_);
      if (!queue_cv_.wait(lock, stop, [&] { return !queue_.empty(); })) return;
      job = queue_.front();
      queue_.pop_front();
    }
    {
      std::lock_guard lock(job->mu);
      if (job->state != JobState::Queued) continue;
      job->state = JobState::Running;
    }
    SuggestOptions opts = job->options;
    opts.stop = job->stop.get_token();
    JobState final_state = JobState::Done;
    SuggestResult result;
    std::string code, message;
    try {
      result = suggest(job->spec, *job->sample, job->start_expr, opts);
      if (result.cancelled) final_state = JobState::Cancelled;
    } catch (const Error& e) {
      final_state = JobState::Failed;
      code = std::string(to_string(e.code()));
      message = e.what();
    } catch (const std::exception& e) {
      final_state = JobState::Failed;
      code = std::string(to_string(ErrorCode::Internal));
      message = e.what();
    }
    {
      std::lock_guard lock(job->mu);
      // A cancel that raced with completion still wins.
      job->state = job->stop.stop_requested() ? JobState::Cancelled : final_state;
      job->result = std::move(result);
      job->error_code = std::move(code);
      job->error_message = std::move(message);
    }
    job->cv.notify_all();
  }
}

void Workbench::collect(Job& job) {
  if (job.state != JobState::Done || job.collected) return;
  job.collected = true;
  std::shared_ptr<Session> s;
  try {
    s = find_session(job.session_id);
  } catch (const Error&) {
    return;
  }
  std::unique_lock lock(s->mu);
  for (const auto& sug : job.result.candidates) {
    bool known = std::any_of(s->candidates.begin(), s->candidates.end(),
                             [&](const Candidate& c) { return c.expr == sug.expr; });
    if (known) continue;
    Candidate c = append(*s, sug.expr, Provenance::Generated, sug.derivation, {}, job.start);
    job.added.push_back(c.id);
  }
}

JobStatus Workbench::poll_job(const std::string& id) {
  auto job = find_job(id);
  std::lock_guard lock(job->mu);
  collect(*job);
  return job->status();
}

JobStatus Workbench::cancel_job(const std::string& id) {
  auto job = find_job(id);
  std::lock_guard lock(job->mu);
  if (job->state == JobState::Queued || job->state == JobState::Running) {
    job->stop.request_stop();
    if (job->state == JobState::Queued) job->state = JobState::Cancelled;
  }
  return job->status();
}

JobStatus Workbench::wait_job(const std::string& id) {
  auto job = find_job(id);
  {
    std::unique_lock lock(job->mu);
    job->cv.wait(lock, [&] {
      return job->state != JobState::Queued && job->state != JobState::Running;
    });
  }
  return poll_job(id);
}

Workbench::CacheStats Workbench::cache_stats() const {
  return {sample_hits_.load(), sample_misses_.load(), exact_hits_.load(), exact_misses_.load()};
}

// ---------------------------------------------------------------------------
// snapshots

namespace {
constexpr int kSnapshotVersion = 1;
}

void Workbench::save(const std::string& session, const std::filesystem::path& file) const {
  SessionSnapshot snap = snapshot(session);
  wire::json j;
  j["version"] = kSnapshotVersion;
  j["session_id"] = snap.id;
  j["spec"] = emit_fpcore(snap.spec.expr, snap.spec);
  {
    auto s = find_session(session);
    std::shared_lock lock(s->mu);
    j["next_id"] = s->next_id;
  }
  wire::json cands = wire::json::array();
  for (const auto& c : snap.candidates) {
    wire::json cj;
    cj["id"] = c.id;
    cj["fpcore"] = emit_fpcore_body(c.expr);
    cj["provenance"] = to_string(c.provenance);
    cj["visible"] = c.visible;
    cj["duplicate_of"] = c.duplicate_of ? wire::json(*c.duplicate_of) : wire::json();
    cj["source"] = c.source ? wire::json(*c.source) : wire::json();
    cj["note"] = c.note;
    cj["derivation"] = wire::encode(c.derivation);
    cands.push_back(std::move(cj));
  }
  j["candidates"] = std::move(cands);
  std::ofstream out(file);
  if (!out) throw Error(ErrorCode::BadRequest, "cannot write snapshot to " + file.string());
  out << j.dump(2) << "\n";
}

std::string Workbench::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::NotFound, "cannot read snapshot " + file.string());
  wire::json j;
  try {
    j = wire::json::parse(in);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::BadRequest, std::string("malformed snapshot: ") + e.what());
  }
  if (j.value("version", 0) != kSnapshotVersion) {
    throw Error(ErrorCode::BadRequest, "unsupported snapshot version");
  }
  auto s = std::make_shared<Session>();
  s->spec = parse_fpcore(j.at("spec").get<std::string>());
  s->sample = sample_for(*s, s->spec);
  auto vars = s->spec.var_names();
  for (const auto& cj : j.at("candidates")) {
    Candidate c;
    c.id = cj.at("id").get<std::uint64_t>();
    c.expr = wire::decode_fpcore_body(cj.at("fpcore").get<std::string>(), vars);
    c.provenance = provenance_from_string(cj.at("provenance").get<std::string>());
    c.visible = cj.at("visible").get<bool>();
    if (!cj.at("duplicate_of").is_null()) c.duplicate_of = cj.at("duplicate_of").get<std::uint64_t>();
    if (!cj.at("source").is_null()) c.source = cj.at("source").get<std::uint64_t>();
    c.note = cj.at("note").get<std::string>();
    c.derivation = wire::decode_derivation(cj.at("derivation"), vars);
    if (c.visible) c.report = report_for(*s, c.expr, *s->sample);
    s->candidates.push_back(std::move(c));
  }
  s->next_id = j.at("next_id").get<std::uint64_t>();
  std::string requested = j.value("session_id", "");
  {
    std::lock_guard lock(mu_);
    if (!requested.empty() && !sessions_.contains(requested)) s->id = requested;
  }
  return register_session(s);
}

}  // namespace fpwb
