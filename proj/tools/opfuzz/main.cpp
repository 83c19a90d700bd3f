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

// opfuzz command-line driver.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "opfuzz/campaign.hpp"
#include "opfuzz/corpus.hpp"
#include "opfuzz/error.hpp"
#include "opfuzz/materialize.hpp"
#include "opfuzz/synthetic.hpp"
#include "opfuzz/testcase.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitClean = 0;
constexpr int kExitFindings = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

// Raw flag values; empty optionals fall back to the config file, then to
// CampaignConfig defaults.
struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> ops;
  std::optional<uint64_t> seed;
  std::optional<uint64_t> count;
  std::optional<std::string> duration;
  std::optional<std::string> target;
  std::optional<std::string> manifest;
  std::optional<int64_t> max_elems;
  std::optional<int64_t> dim_hi;
  std::optional<uint32_t> buckets;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
  std::optional<std::string> framework;
  std::optional<std::string> dtype;
  std::optional<double> timeout;
  std::optional<int64_t> block;
  bool no_corpus = false;
};

void add_campaign_flags(CLI::App* cmd, Flags& f, bool with_target) {
  cmd->add_option("--config", f.config, "JSON config file; flags override its values");
  cmd->add_option("--ops", f.ops,
                  "Comma-separated operators (Conv2d), families (Conv = all ranks) or 'all'");
  cmd->add_option("--seed", f.seed, "Campaign seed");
  cmd->add_option("--count", f.count, "Total test cases (split evenly across operators)");
  cmd->add_option("--duration", f.duration, "Wall-clock budget: 90, 90s, 5m, 1h, 500ms");
  if (with_target) {
    cmd->add_option("--target", f.target, "synthetic | external:<command template>");
    cmd->add_option("--manifest", f.manifest,
                    "Bug manifest JSON for the synthetic target ('none' = bug-free)");
    cmd->add_option("--framework", f.framework,
                    "Framework for external targets: pytorch, tensorflow, paddle");
    cmd->add_option("--timeout", f.timeout, "Per-case external timeout in seconds");
    cmd->add_option("--block", f.block, "Synthetic thread-block size");
  }
  cmd->add_option("--max-elems", f.max_elems, "Cap on input/output element counts (0 = off)");
  cmd->add_option("--dim-hi", f.dim_hi, "Upper bound for spatial dimensions");
  cmd->add_option("--buckets", f.buckets, "Hash bucket count for diversity constraints");
  cmd->add_option("--workers", f.workers, "Worker threads (operators are sharded)");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--dtype", f.dtype, "f16, f32, f64, i32 or i64");
  cmd->add_flag("--no-corpus", f.no_corpus, "Do not write every test case to the corpus");
}

std::chrono::milliseconds parse_duration(const std::string& s) {
  size_t pos = 0;
  double value = 0;
  try {
    value = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw opfuzz::ConfigError("bad duration '" + s + "'");
  }
  const std::string unit = s.substr(pos);
  double ms = 0;
  if (unit.empty() || unit == "s") {
    ms = value * 1000;
  } else if (unit == "ms") {
    ms = value;
  } else if (unit == "m") {
    ms = value * 60'000;
  } else if (unit == "h") {
    ms = value * 3'600'000;
  } else {
    throw opfuzz::ConfigError("bad duration unit in '" + s + "'");
  }
  if (ms <= 0) throw opfuzz::ConfigError("duration must be positive");
  return std::chrono::milliseconds(static_cast<int64_t>(ms));
}

std::vector<opfuzz::OperatorKind> parse_ops(const std::string& list) {
  std::vector<opfuzz::OperatorKind> out;
  std::set<opfuzz::OperatorKind> seen;
  auto add = [&](opfuzz::OperatorKind k) {
    if (seen.insert(k).second) out.push_back(k);
  };
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item == "all") {
      for (auto k : opfuzz::all_operator_kinds()) add(k);
    } else if (auto k = opfuzz::parse_operator(item)) {
      add(*k);
    } else if (auto f = opfuzz::parse_family(item)) {
      for (auto k : opfuzz::all_operator_kinds()) {
        if (k.family == *f) add(k);
      }
    } else {
      throw opfuzz::ConfigError("unknown operator '" + item + "'");
    }
  }
  if (out.empty()) throw opfuzz::ConfigError("no operators selected");
  return out;
}

template <typename T>
void from_file(const json& doc, const char* key, std::optional<T>& slot) {
  if (slot) return;
  for (std::string k : {std::string(key), [&] {
         std::string u = key;
         for (auto& c : u) c = c == '-' ? '_' : c;
         return u;
       }()}) {
    auto it = doc.find(k);
    if (it == doc.end()) continue;
    try {
      if constexpr (std::is_same_v<T, std::string>) {
        if (it->is_string()) {
          slot = it->template get<std::string>();
        } else if (it->is_array()) {
          std::string joined;
          for (const auto& e : *it) joined += (joined.empty() ? "" : ",") + e.template get<std::string>();
          slot = joined;
        } else {
          slot = it->dump();
        }
      } else {
        slot = it->template get<T>();
      }
    } catch (const json::exception& e) {
      throw opfuzz::ParseError(k, e.what());
    }
    return;
  }
}

void merge_config_file(Flags& f) {
  if (!f.config) return;
  json doc;
  try {
    doc = json::parse(opfuzz::read_file(*f.config));
  } catch (const json::parse_error& e) {
    throw opfuzz::ParseError("", *f.config + ": " + e.what());
  }
  if (!doc.is_object()) throw opfuzz::ParseError("", *f.config + ": expected a JSON object");
  static const std::set<std::string> kKeys = {
      "ops",     "seed",   "count",     "duration", "target",  "manifest", "max-elems",
      "max_elems", "dim-hi", "dim_hi", "buckets", "workers", "out",      "framework",
      "dtype",   "timeout", "block"};
  for (const auto& [key, value] : doc.items()) {
    if (kKeys.count(key) == 0) throw opfuzz::ParseError(key, "unknown config key");
  }
  from_file(doc, "ops", f.ops);
  from_file(doc, "seed", f.seed);
  from_file(doc, "count", f.count);
  from_file(doc, "duration", f.duration);
  from_file(doc, "target", f.target);
  from_file(doc, "manifest", f.manifest);
  from_file(doc, "max-elems", f.max_elems);
  from_file(doc, "dim-hi", f.dim_hi);
  from_file(doc, "buckets", f.buckets);
  from_file(doc, "workers", f.workers);
  from_file(doc, "out", f.out);
  from_file(doc, "framework", f.framework);
  from_file(doc, "dtype", f.dtype);
  from_file(doc, "timeout", f.timeout);
  from_file(doc, "block", f.block);
}

// Target-related fields only; shared by fuzz, check and replay.
void apply_target(const Flags& f, opfuzz::CampaignConfig& cfg) {
  const std::string target = f.target.value_or("synthetic");
  if (target == "synthetic") {
    cfg.target = opfuzz::TargetKind::kSynthetic;
  } else if (target.rfind("external:", 0) == 0) {
    cfg.target = opfuzz::TargetKind::kExternal;
    cfg.external_command = target.substr(9);
  } else if (target == "none") {
    cfg.target = opfuzz::TargetKind::kNone;
  } else {
    throw opfuzz::ConfigError("unknown target '" + target + "'");
  }
  if (f.manifest) {
    cfg.manifest = (*f.manifest == "none") ? opfuzz::BugManifest{}
                                           : opfuzz::load_manifest(*f.manifest);
  }
  if (f.framework) {
    auto fw = opfuzz::parse_framework(*f.framework);
    if (!fw) throw opfuzz::ConfigError("unknown framework '" + *f.framework + "'");
    cfg.framework = *fw;
  }
  if (f.timeout) {
    cfg.external_timeout = std::chrono::milliseconds(static_cast<int64_t>(*f.timeout * 1000));
  }
  if (f.block) cfg.block = *f.block;
  if (f.out) cfg.out = *f.out;
}

opfuzz::CampaignConfig build_config(Flags f, bool generation_only) {
  merge_config_file(f);
  opfuzz::CampaignConfig cfg;
  cfg.ops = parse_ops(f.ops.value_or("all"));
  if (f.seed) cfg.seed = *f.seed;
  if (f.count) cfg.count = *f.count;
  if (f.duration) cfg.duration = parse_duration(*f.duration);
  if (!cfg.count && !cfg.duration) cfg.count = 1000;
  apply_target(f, cfg);
  if (generation_only) cfg.target = opfuzz::TargetKind::kNone;
  if (f.max_elems) {
    if (*f.max_elems == 0) {
      cfg.model.max_elements.reset();
    } else {
      cfg.model.max_elements = *f.max_elems;
    }
  }
  if (f.dim_hi) cfg.model.dim.hi = *f.dim_hi;
  if (f.buckets) cfg.policy.bucket_count = *f.buckets;
  if (f.workers) cfg.workers = *f.workers;
  if (f.dtype) {
    auto d = opfuzz::parse_dtype(*f.dtype);
    if (!d) throw opfuzz::ConfigError("unknown dtype '" + *f.dtype + "'");
    cfg.dtype = *d;
  }
  cfg.archive_corpus = !f.no_corpus;
  return cfg;
}

void print_verdict(const opfuzz::OperatorKind kind, const opfuzz::Verdict& v) {
  std::cout << "verdict: " << opfuzz::to_string(v.kind) << " ["
            << opfuzz::to_string(opfuzz::classify(v)) << "]\n";
  if (v.kind != opfuzz::VerdictKind::kPass) {
    std::cout << "signature: " << opfuzz::dedup_signature(kind, v) << "\n";
  }
  std::cout << opfuzz::verdict_to_json(v);
}

int cmd_campaign(const Flags& flags, bool generation_only) {
  const opfuzz::CampaignConfig cfg = build_config(flags, generation_only);
  const opfuzz::CampaignReport r = opfuzz::run_campaign(cfg);
  std::cout << opfuzz::report_summary(r);
  std::cout << "report: " << (cfg.out / "report.json").string() << "\n";
  return r.bug_findings() > 0 ? kExitFindings : kExitClean;
}

int cmd_check(const std::string& file, const Flags& flags, bool run_target) {
  const opfuzz::TestCase tc = opfuzz::from_json(opfuzz::read_file(file));
  const auto violations = opfuzz::validate(tc);
  const std::string expected = opfuzz::compute_id(tc.kind, tc.params, tc.dtype);
  std::cout << tc.kind.name() << " " << tc.id << "\n";
  if (expected != tc.id) std::cout << "note: id does not match content (expected " << expected << ")\n";
  if (violations.empty()) {
    std::cout << "valid\n";
  } else {
    for (const auto& v : violations) std::cout << "violation: " << v.rule << ": " << v.detail << "\n";
  }
  int rc = violations.empty() ? kExitClean : kExitFindings;
  if (run_target) {
    opfuzz::CampaignConfig cfg;
    apply_target(flags, cfg);
    std::string log;
    auto v = opfuzz::execute_on_target(cfg, tc, &log);
    if (!v) {
      std::cout << "not executed: " << log << "\n";
    } else {
      print_verdict(tc.kind, *v);
      if (opfuzz::is_bug(opfuzz::classify(*v))) rc = kExitFindings;
    }
  }
  return rc;
}

int cmd_materialize(const std::string& file, const std::string& framework,
                    const std::optional<std::string>& out) {
  const opfuzz::TestCase tc = opfuzz::from_json(opfuzz::read_file(file));
  const auto fw = opfuzz::parse_framework(framework);
  if (!fw) throw opfuzz::ConfigError("unknown framework '" + framework + "'");
  const auto m = opfuzz::materialize(tc, *fw);
  if (const auto* u = std::get_if<opfuzz::UnsupportedOnTarget>(&m)) {
    std::cerr << "UnsupportedOnTarget: " << u->reason << "\n";
    return kExitFindings;
  }
  const auto& script = std::get<opfuzz::MaterializedScript>(m);
  if (out) {
    opfuzz::write_file_atomic(*out, script.source);
    std::cerr << "wrote " << *out << "\n";
  } else {
    std::cout << script.source;
  }
  return kExitClean;
}

int cmd_stats(const std::string& dir) {
  const fs::path root(dir);
  if (fs::exists(root / "report.json")) {
    std::cout << "report: " << (root / "report.json").string() << "\n";
    const json r = json::parse(opfuzz::read_file(root / "report.json"));
    std::cout << "  generated " << r.value("generated", 0) << ", executed "
              << r.value("executed", 0) << ", distinct findings "
              << r.value("distinct_findings", 0) << "\n";
  }
  const auto scan = opfuzz::corpus_scan(root);
  std::map<std::string, size_t> per_op;
  for (const auto& tc : scan.cases) ++per_op[tc.kind.name()];
  std::cout << "corpus: " << scan.cases.size() << " test cases, " << scan.corrupt.size()
            << " corrupt\n";
  for (const auto& [name, n] : per_op) std::cout << "  " << name << ": " << n << "\n";
  for (const auto& c : scan.corrupt) std::cout << "  corrupt: " << c.path.string() << ": " << c.error << "\n";
  size_t findings = 0;
  std::error_code ec;
  if (fs::is_directory(root / "findings", ec)) {
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(root / "findings")) {
      if (e.is_directory()) dirs.push_back(e.path());
    }
    std::sort(dirs.begin(), dirs.end());
    std::cout << "findings: " << dirs.size() << "\n";
    for (const auto& d : dirs) {
      try {
        const auto f = opfuzz::finding_from_json(opfuzz::read_file(d / "verdict.json"));
        std::cout << "  " << f.signature << "  x" << f.count << "  ["
                  << opfuzz::to_string(f.bug_class) << "]\n";
        ++findings;
      } catch (const opfuzz::Error& e) {
        std::cout << "  unreadable: " << d.string() << ": " << e.what() << "\n";
      }
    }
  }
  return findings > 0 ? kExitFindings : kExitClean;
}

int cmd_replay(const std::string& dir, const Flags& flags) {
  const fs::path root(dir);
  const opfuzz::TestCase tc = opfuzz::from_json(opfuzz::read_file(root / "testcase.json"));
  const opfuzz::Finding f = opfuzz::finding_from_json(opfuzz::read_file(root / "verdict.json"));
  opfuzz::CampaignConfig cfg;
  apply_target(flags, cfg);
  std::string log;
  const auto v = opfuzz::execute_on_target(cfg, tc, &log);
  if (!v) {
    std::cout << "not executed: " << log << "\n";
    return kExitFindings;
  }
  print_verdict(tc.kind, *v);
  const std::string sig = opfuzz::dedup_signature(tc.kind, *v);
  if (sig == f.signature) {
    std::cout << "reproduced: " << sig << "\n";
    return kExitClean;
  }
  std::cout << "not reproduced: expected " << f.signature << "\n";
  return kExitFindings;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"opfuzz: constraint-guided fuzzer for deep-learning operator parameters"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(opfuzz::kGeneratorVersion));

  Flags gen_flags;
  CLI::App* gen = app.add_subcommand("gen", "Generate test cases only");
  add_campaign_flags(gen, gen_flags, false);

  Flags fuzz_flags;
  CLI::App* fuzz = app.add_subcommand("fuzz", "Generate, execute, classify and archive");
  add_campaign_flags(fuzz, fuzz_flags, true);

  Flags check_flags;
  std::string check_file;
  CLI::App* check = app.add_subcommand("check", "Validate a test case; execute it with --target");
  check->add_option("file", check_file, "Test case JSON")->required();
  check->add_option("--target", check_flags.target, "synthetic | external:<command template>");
  check->add_option("--manifest", check_flags.manifest, "Bug manifest JSON ('none' = bug-free)");
  check->add_option("--framework", check_flags.framework, "Framework for external targets");
  check->add_option("--timeout", check_flags.timeout, "External timeout in seconds");
  check->add_option("--out", check_flags.out, "Scratch directory for external scripts");

  std::string mat_file;
  std::string mat_framework;
  std::optional<std::string> mat_out;
  CLI::App* mat = app.add_subcommand("materialize", "Print the framework script for a test case");
  mat->add_option("file", mat_file, "Test case JSON")->required();
  mat->add_option("--framework", mat_framework, "pytorch, tensorflow or paddle")->required();
  mat->add_option("-o,--output", mat_out, "Write to this file instead of stdout");

  std::string stats_dir;
  CLI::App* stats = app.add_subcommand("stats", "Summarize a campaign directory");
  stats->add_option("dir", stats_dir, "Campaign output directory")->required();

  Flags replay_flags;
  std::string replay_dir;
  CLI::App* replay = app.add_subcommand("replay", "Re-execute an archived finding");
  replay->add_option("dir", replay_dir, "findings/<signature> directory")->required();
  replay->add_option("--target", replay_flags.target, "synthetic | external:<command template>");
  replay->add_option("--manifest", replay_flags.manifest, "Bug manifest JSON ('none' = bug-free)");
  replay->add_option("--framework", replay_flags.framework, "Framework for external targets");
  replay->add_option("--timeout", replay_flags.timeout, "External timeout in seconds");
  replay->add_option("--out", replay_flags.out, "Scratch directory for external scripts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitClean : kExitUsage;
  }

  try {
    if (*gen) return cmd_campaign(gen_flags, true);
    if (*fuzz) return cmd_campaign(fuzz_flags, false);
    if (*check) return cmd_check(check_file, check_flags, check_flags.target.has_value());
    if (*mat) return cmd_materialize(mat_file, mat_framework, mat_out);
    if (*stats) return cmd_stats(stats_dir);
    if (*replay) return cmd_replay(replay_dir, replay_flags);
  } catch (const opfuzz::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const opfuzz::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const opfuzz::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
