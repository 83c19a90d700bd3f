// Copyright 2026 The opfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "opfuzz/campaign.hpp"

#include <condition_variable>
#include <ctime>
#include <deque>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "opfuzz/corpus.hpp"
#include "opfuzz/error.hpp"
#include "opfuzz/generator.hpp"

namespace opfuzz {

namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  ::gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string synthetic_log(const TestCase& tc, const Verdict& v) {
  std::ostringstream log;
  log << "target: synthetic\n"
      << "operator: " << tc.kind.name() << "\n"
      << "testcase: " << tc.id << "\n"
      << "verdict: " << to_string(v.kind);
  if (v.oob) log << " (" << to_string(*v.oob) << ")";
  if (v.pattern) log << " via " << to_string(*v.pattern);
  log << "\n";
  if (!v.detail.empty()) log << "detail: " << v.detail << "\n";
  log << "true element count: " << to_string(v.diag.true_count) << "\n"
      << "host element count: " << to_string(v.diag.host_count) << "\n"
      << "block: " << v.diag.block << "\n"
      << "grid: " << to_string(v.diag.grid) << "\n"
      << "capacity (grid * block): " << to_string(v.diag.capacity()) << "\n"
      << "slack (capacity - true): " << to_string(v.diag.slack()) << "\n";
  return log.str();
}

json histogram_json(const std::map<BugClass, uint64_t>& h) {
  json out = json::object();
  for (const auto& [cls, n] : h) out[std::string(to_string(cls))] = n;
  return out;
}

struct Job {
  TestCase tc;
  Verdict verdict;
  std::string log;
};

// Single consumer of findings; owns the findings directory.
class Archiver {
 public:
  explicit Archiver(fs::path dir) : dir_(std::move(dir)), thread_([this] { loop(); }) {}
  ~Archiver() { finish(); }

  void push(Job job) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      queue_.push_back(std::move(job));
    }
    cv_.notify_one();
  }

  void finish() {
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (done_) return;
      done_ = true;
    }
    cv_.notify_one();
    thread_.join();
    if (error_) std::rethrow_exception(error_);
  }

  std::vector<Finding> findings() const {
    std::vector<Finding> out;
    for (const auto& [sig, f] : findings_) out.push_back(f);
    return out;
  }

 private:
  // Drains the queue in batches; verdict.json is rewritten once per touched
  // signature per batch, since replacing files can be slow.
  void loop() {
    while (true) {
      std::deque<Job> batch;
      bool last = false;
      {
        std::unique_lock<std::mutex> lock(mu_);
        cv_.wait(lock, [this] { return done_ || !queue_.empty(); });
        batch.swap(queue_);
        last = done_;
      }
      if (!error_) {
        try {
          std::set<std::string> dirty;
          for (const Job& job : batch) {
            const std::string sig = dedup_signature(job.tc.kind, job.verdict);
            auto [it, fresh] = findings_.try_emplace(sig);
            Finding& f = it->second;
            if (fresh) {
              f.signature = sig;
              f.testcase_id = job.tc.id;
              f.verdict = job.verdict;
              f.bug_class = classify(job.verdict);
            }
            archive_finding(dir_, f, job.tc, job.log, false);
            dirty.insert(sig);
          }
          for (const auto& sig : dirty) write_verdict(dir_, findings_.at(sig));
        } catch (...) {
          error_ = std::current_exception();
        }
      }
      if (last) {
        std::lock_guard<std::mutex> lock(mu_);
        if (queue_.empty()) return;
      }
    }
  }

  fs::path dir_;
  std::map<std::string, Finding> findings_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Job> queue_;
  bool done_ = false;
  std::exception_ptr error_;
  std::thread thread_;
};

struct Stream {
  OperatorKind kind;
  TestCaseGenerator gen;
  uint64_t quota;
  OperatorStats stats;
  bool done = false;
};

}  // namespace

void CampaignConfig::check() const {
  if (ops.empty()) throw ConfigError("campaign: no operators selected");
  if (!count && !duration) throw ConfigError("campaign: a count or duration budget is required");
  if (count && *count == 0) throw ConfigError("campaign: count must be positive");
  if (duration && duration->count() <= 0) throw ConfigError("campaign: duration must be positive");
  if (workers < 1) throw ConfigError("campaign: workers must be >= 1");
  if (block < 1) throw ConfigError("campaign: block must be >= 1");
  if (external_timeout.count() <= 0) throw ConfigError("campaign: timeout must be positive");
  model.check();
  policy.check();
  if (target == TargetKind::kExternal) check_command_available(external_command);
}

uint64_t stream_seed(uint64_t campaign_seed, OperatorKind kind) {
  const uint64_t key = static_cast<uint64_t>(kind.family) * 8 + static_cast<uint64_t>(kind.rank);
  return splitmix64(campaign_seed ^ splitmix64(key + 1));
}

std::string finding_to_json(const Finding& f) {
  json doc = {{"signature", f.signature},
              {"testcase_id", f.testcase_id},
              {"bug_class", to_string(f.bug_class)},
              {"first_seen", f.first_seen},
              {"count", f.count},
              {"verdict", json::parse(verdict_to_json(f.verdict))}};
  return doc.dump(2) + "\n";
}

Finding finding_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("", "expected a JSON object");
  Finding f;
  auto str = [&](const char* name) {
    if (!doc.contains(name) || !doc[name].is_string()) throw ParseError(name, "expected a string");
    return doc[name].get<std::string>();
  };
  f.signature = str("signature");
  f.testcase_id = str("testcase_id");
  f.first_seen = str("first_seen");
  if (!doc.contains("count") || !doc["count"].is_number_unsigned()) {
    throw ParseError("count", "expected a non-negative integer");
  }
  f.count = doc["count"].get<uint64_t>();
  if (!doc.contains("verdict")) throw ParseError("verdict", "missing");
  f.verdict = verdict_from_json(doc["verdict"].dump());
  f.bug_class = classify(f.verdict);
  return f;
}

void write_verdict(const fs::path& dir, const Finding& finding) {
  write_file_atomic(dir / "findings" / finding.signature / "verdict.json",
                    finding_to_json(finding));
}

fs::path archive_finding(const fs::path& dir, Finding& finding, const TestCase& tc,
                         const std::string& raw_log, bool write_verdict) {
  const fs::path fdir = dir / "findings" / finding.signature;
  if (finding.count == 0) {
    std::error_code ec;
    if (fs::exists(fdir / "verdict.json", ec)) {
      // Left by an earlier campaign in the same directory: keep counting.
      const Finding prior = finding_from_json(read_file(fdir / "verdict.json"));
      finding.count = prior.count;
      finding.first_seen = prior.first_seen;
      finding.testcase_id = prior.testcase_id;
      finding.verdict = prior.verdict;
    } else {
      finding.first_seen = utc_now();
      write_file_atomic(fdir / "testcase.json", to_json(tc));
      write_file_atomic(fdir / "log.txt", raw_log);
    }
  }
  ++finding.count;
  if (write_verdict) opfuzz::write_verdict(dir, finding);
  return fdir;
}

uint64_t CampaignReport::bug_findings() const {
  uint64_t n = 0;
  for (const auto& f : findings) n += is_bug(f.bug_class) ? 1 : 0;
  return n;
}

std::string report_to_json(const CampaignReport& r, const CampaignConfig& cfg) {
  json doc = json::object();
  doc["generator_version"] = kGeneratorVersion;
  doc["seed"] = cfg.seed;
  doc["target"] = cfg.target == TargetKind::kNone        ? "none"
                  : cfg.target == TargetKind::kSynthetic ? "synthetic"
                                                         : "external";
  doc["workers"] = cfg.workers;
  doc["generated"] = r.generated;
  doc["executed"] = r.executed;
  doc["unsupported"] = r.unsupported;
  doc["histogram"] = histogram_json(r.histogram);
  doc["distinct_findings"] = r.findings.size();
  json findings = json::array();
  for (const auto& f : r.findings) {
    findings.push_back({{"signature", f.signature},
                        {"bug_class", to_string(f.bug_class)},
                        {"count", f.count},
                        {"testcase_id", f.testcase_id}});
  }
  doc["findings"] = std::move(findings);
  doc["elapsed_seconds"] = r.elapsed_seconds;
  doc["throughput_per_minute"] = r.throughput_per_minute;
  json ops = json::object();
  for (const auto& [name, s] : r.per_operator) {
    ops[name] = {{"generated", s.generated},
                 {"executed", s.executed},
                 {"unsupported", s.unsupported},
                 {"exhausted", s.exhausted},
                 {"histogram", histogram_json(s.histogram)}};
  }
  doc["operators"] = std::move(ops);
  return doc.dump(2) + "\n";
}

std::string report_summary(const CampaignReport& r) {
  std::ostringstream out;
  out << "generated " << r.generated << ", executed " << r.executed;
  if (r.unsupported) out << ", unsupported on target " << r.unsupported;
  out << " in " << r.elapsed_seconds << " s (" << static_cast<uint64_t>(r.throughput_per_minute)
      << " cases/min)\n";
  for (const auto& [cls, n] : r.histogram) out << "  " << to_string(cls) << ": " << n << "\n";
  out << "findings: " << r.findings.size() << "\n";
  for (const auto& f : r.findings) {
    out << "  " << f.signature << "  x" << f.count << "  [" << to_string(f.bug_class) << "]\n";
  }
  out << "per operator:\n";
  for (const auto& [name, s] : r.per_operator) {
    out << "  " << name << ": generated " << s.generated << ", executed " << s.executed
        << (s.exhausted ? " (exhausted)" : "") << "\n";
  }
  return out.str();
}

std::optional<Verdict> execute_on_target(const CampaignConfig& cfg, const TestCase& tc,
                                         std::string* log) {
  switch (cfg.target) {
    case TargetKind::kNone: return std::nullopt;
    case TargetKind::kSynthetic: {
      Verdict v = execute(tc, cfg.manifest, cfg.block);
      if (log) *log = synthetic_log(tc, v);
      return v;
    }
    case TargetKind::kExternal: {
      ExternalTarget t{cfg.external_command, cfg.framework, cfg.external_timeout,
                       cfg.out / "scripts"};
      ExternalRun run = run_external(t, tc);
      if (log) *log = run.verdict ? run.log : "unsupported on target: " + run.unsupported_reason;
      return run.verdict;
    }
  }
  return std::nullopt;
}

CampaignReport run_campaign(const CampaignConfig& cfg) {
  cfg.check();
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw IoError(cfg.out.string() + ": " + ec.message());

  const auto start = Clock::now();
  const std::optional<Clock::time_point> deadline =
      cfg.duration ? std::optional<Clock::time_point>(start + *cfg.duration) : std::nullopt;
  const size_t nops = cfg.ops.size();
  const unsigned workers = static_cast<unsigned>(std::min<size_t>(cfg.workers, nops));

  std::vector<std::unique_ptr<Stream>> streams;
  for (size_t i = 0; i < nops; ++i) {
    const OperatorKind k = cfg.ops[i];
    uint64_t quota = UINT64_MAX;
    if (cfg.count) quota = *cfg.count / nops + (i < *cfg.count % nops ? 1 : 0);
    streams.push_back(std::make_unique<Stream>(
        Stream{k, TestCaseGenerator(k, stream_seed(cfg.seed, k), cfg.model, cfg.policy, cfg.dtype),
               quota, {}, quota == 0}));
  }

  Archiver archiver(cfg.out);
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned w) {
    try {
      std::vector<Stream*> mine;
      for (size_t i = w; i < nops; i += workers) mine.push_back(streams[i].get());
      bool active = true;
      while (active) {
        active = false;
        for (Stream* s : mine) {
          if (s->done) continue;
          if (deadline && Clock::now() >= *deadline) return;
          auto tc = s->gen.next();
          if (!tc) {
            s->stats.exhausted = true;
            s->done = true;
            continue;
          }
          ++s->stats.generated;
          if (s->stats.generated >= s->quota) s->done = true;
          active = active || !s->done;
          if (cfg.archive_corpus) corpus_write(cfg.out, *tc);
          if (cfg.target == TargetKind::kNone) continue;
          std::string log;
          auto v = execute_on_target(cfg, *tc, &log);
          if (!v) {
            ++s->stats.unsupported;
            continue;
          }
          ++s->stats.executed;
          const BugClass cls = classify(*v);
          ++s->stats.histogram[cls];
          if (is_bug(cls)) archiver.push({std::move(*tc), std::move(*v), std::move(log)});
        }
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  std::vector<std::thread> threads;
  for (unsigned w = 1; w < workers; ++w) threads.emplace_back(work, w);
  work(0);
  for (auto& t : threads) t.join();
  archiver.finish();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  CampaignReport r;
  for (const auto& s : streams) {
    r.generated += s->stats.generated;
    r.executed += s->stats.executed;
    r.unsupported += s->stats.unsupported;
    for (const auto& [cls, n] : s->stats.histogram) r.histogram[cls] += n;
    r.per_operator[s->kind.name()] = s->stats;
  }
  r.findings = archiver.findings();
  r.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  r.throughput_per_minute =
      r.elapsed_seconds > 0 ? 60.0 * static_cast<double>(r.generated) / r.elapsed_seconds : 0;
  write_file_atomic(cfg.out / "report.json", report_to_json(r, cfg));
  write_file_atomic(cfg.out / "summary.txt", report_summary(r));
  return r;
}

}  // namespace opfuzz
