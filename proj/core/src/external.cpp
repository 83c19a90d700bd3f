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

#include "opfuzz/external.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <sstream>

#include "opfuzz/corpus.hpp"
#include "opfuzz/error.hpp"

namespace opfuzz {

namespace fs = std::filesystem;

namespace {

bool executable(const fs::path& p) {
  struct stat st;
  return ::stat(p.c_str(), &st) == 0 && S_ISREG(st.st_mode) && ::access(p.c_str(), X_OK) == 0;
}

std::string first_word(std::string_view s) {
  size_t b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  size_t e = s.find_first_of(" \t", b);
  return std::string(s.substr(b, e == std::string_view::npos ? e : e - b));
}

std::string trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

bool looks_like_oom(std::string_view type) {
  return type.find("OutOfMemory") != std::string_view::npos ||
         type.find("ResourceExhausted") != std::string_view::npos || type == "MemoryError";
}

}  // namespace

void check_command_available(std::string_view command_template) {
  const std::string prog = first_word(command_template);
  if (prog.empty()) throw ConfigError("external target: empty command");
  if (prog.find('/') != std::string::npos) {
    if (!executable(prog)) throw ConfigError("external target: '" + prog + "' is not executable");
    return;
  }
  const char* path = std::getenv("PATH");
  std::stringstream dirs(path ? path : "");
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    if (!dir.empty() && executable(fs::path(dir) / prog)) return;
  }
  throw ConfigError("external target: command '" + prog + "' not found on PATH");
}

std::string expand_template(std::string_view tmpl, const std::string& script,
                            const std::string& framework, const std::string& verdict) {
  std::string out;
  for (size_t i = 0; i < tmpl.size();) {
    auto try_sub = [&](std::string_view key, const std::string& value) {
      if (tmpl.substr(i, key.size()) != key) return false;
      out += shell_quote(value);
      i += key.size();
      return true;
    };
    if (try_sub("{script}", script) || try_sub("{framework}", framework) ||
        try_sub("{verdict}", verdict)) {
      continue;
    }
    out += tmpl[i++];
  }
  return out;
}

ProcessResult run_process(const std::string& command, std::chrono::milliseconds timeout) {
  int out_pipe[2];
  int err_pipe[2];
  if (::pipe(out_pipe) != 0) throw IoError("pipe: " + std::string(std::strerror(errno)));
  if (::pipe(err_pipe) != 0) {
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    throw IoError("pipe: " + std::string(std::strerror(errno)));
  }
  const pid_t pid = ::fork();
  if (pid < 0) throw IoError("fork failed for: " + command);
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::dup2(err_pipe[1], STDERR_FILENO);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::close(err_pipe[0]);
    ::close(err_pipe[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);

  ProcessResult r;
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
  std::string* sinks[2] = {&r.out, &r.err};
  int open_fds = 2;
  char buf[4096];
  while (open_fds > 0) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      r.timed_out = true;
      ::kill(-pid, SIGKILL);
      break;
    }
    const int n = ::poll(fds, 2, static_cast<int>(std::min<int64_t>(left.count(), 1000)));
    if (n < 0 && errno != EINTR) break;
    for (int i = 0; i < 2; ++i) {
      if (fds[i].fd < 0 || (fds[i].revents & (POLLIN | POLLHUP | POLLERR)) == 0) continue;
      const ssize_t got = ::read(fds[i].fd, buf, sizeof(buf));
      if (got > 0) {
        sinks[i]->append(buf, static_cast<size_t>(got));
      } else {
        ::close(fds[i].fd);
        fds[i].fd = -1;
        --open_fds;
      }
    }
  }
  for (auto& f : fds) {
    if (f.fd >= 0) ::close(f.fd);
  }
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFEXITED(status)) {
    r.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    r.term_signal = WTERMSIG(status);
  }
  return r;
}

Verdict verdict_from_status(const ProcessResult& r) {
  Verdict v;
  if (r.timed_out) {
    v.kind = VerdictKind::kTimedOut;
    return v;
  }
  // Last recognizable status line wins.
  std::string status;
  std::stringstream lines(r.out);
  std::string line;
  while (std::getline(lines, line)) {
    line = trim(line);
    if (line == "OK" || line == "OOM" || line.rfind("EXCEPTION:", 0) == 0 ||
        line.rfind("SANITIZER:", 0) == 0) {
      status = line;
    }
  }
  if (r.term_signal != 0) {
    v.kind = VerdictKind::kHostCrash;
    v.detail = "signal " + std::to_string(r.term_signal);
  } else if (status == "OK" && r.exit_code == 0) {
    v.kind = VerdictKind::kPass;
  } else if (status == "OOM") {
    v.kind = VerdictKind::kOutOfMemory;
  } else if (status.rfind("SANITIZER:", 0) == 0) {
    v.kind = VerdictKind::kSanitizerError;
    const std::string kind = status.substr(10);
    v.sanitizer = parse_sanitizer_kind(kind).value_or(SanitizerKind::kApiError);
    if (!parse_sanitizer_kind(kind)) v.detail = kind;
  } else if (status.rfind("EXCEPTION:", 0) == 0) {
    const std::string type = status.substr(10);
    v.kind = looks_like_oom(type) ? VerdictKind::kOutOfMemory : VerdictKind::kApiException;
    v.detail = type;
  } else {
    v.kind = VerdictKind::kHostCrash;
    v.detail = status.empty() ? "no status line, exit " + std::to_string(r.exit_code)
                              : status + " with exit " + std::to_string(r.exit_code);
  }
  return v;
}

ExternalRun run_external(const ExternalTarget& target, const TestCase& tc) {
  ExternalRun run;
  const MaterializeResult m = materialize(tc, target.framework);
  if (const auto* u = std::get_if<UnsupportedOnTarget>(&m)) {
    run.unsupported_reason = u->reason;
    return run;
  }
  const auto& script = std::get<MaterializedScript>(m);
  const fs::path script_path = target.work_dir / script_filename(tc, target.framework);
  const fs::path verdict_path = target.work_dir / (tc.id + "_verdict.json");
  write_file_atomic(script_path, script.source);
  std::error_code ec;
  fs::remove(verdict_path, ec);
  const std::string cmd = expand_template(target.command_template, script_path.string(),
                                          std::string(to_string(target.framework)),
                                          verdict_path.string());
  const ProcessResult r = run_process(cmd, target.timeout);
  Verdict v = verdict_from_status(r);
  if (!r.timed_out && fs::exists(verdict_path, ec)) {
    try {
      v = verdict_from_json(read_file(verdict_path));
    } catch (const Error& e) {
      v.kind = VerdictKind::kHostCrash;
      v.detail = std::string("unreadable verdict file: ") + e.what();
    }
  }
  std::ostringstream log;
  log << "command: " << cmd << "\n";
  if (r.timed_out) {
    log << "timed out after " << target.timeout.count() << " ms\n";
  } else if (r.term_signal != 0) {
    log << "killed by signal " << r.term_signal << "\n";
  } else {
    log << "exit code: " << r.exit_code << "\n";
  }
  log << "--- stdout ---\n" << r.out << "--- stderr ---\n" << r.err;
  run.log = log.str();
  run.verdict = std::move(v);
  return run;
}

}  // namespace opfuzz
