#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pgv {

struct ProcessResult
{
  int exit_code = -1;  // -1 when killed or not started
  bool timed_out = false;
  std::string out;
  std::string err;
};

/// Runs argv[0] (searched on PATH) to completion, feeding `input` on stdin.
/// A program that cannot be started yields exit code 127. On timeout the
/// child is killed and `timed_out` set.
ProcessResult run_process(const std::vector<std::string> & argv,
                          const std::string & input = "",
                          std::chrono::milliseconds timeout = std::chrono::seconds(60),
                          const std::filesystem::path & cwd = {});

/// Absolute path of `name` on PATH (or `name` itself if it contains '/').
std::optional<std::filesystem::path> find_program(const std::string & name);

/// A child process with piped stdin/stdout for line-oriented dialogue.
class Pipe
{
 public:
  explicit Pipe(const std::vector<std::string> & argv);
  ~Pipe();
  Pipe(const Pipe &) = delete;
  Pipe & operator=(const Pipe &) = delete;

  void write(const std::string & s);
  /// Reads until `done(buffer)` returns a prefix length, then consumes and
  /// returns that prefix. Throws SolverTimeout on timeout and SolverError
  /// when the child closes its output.
  template <class Pred>
  std::string read_until(Pred done, std::chrono::milliseconds timeout);

  void kill();
  bool alive() const { return pid_ > 0; }

 private:
  bool fill(std::chrono::steady_clock::time_point deadline);

  int pid_ = -1;
  int in_fd_ = -1;
  int out_fd_ = -1;
  std::string buf_;
};

template <class Pred>
std::string Pipe::read_until(Pred done, std::chrono::milliseconds timeout)
{
  auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    if (auto n = done(buf_)) {
      std::string out = buf_.substr(0, *n);
      buf_.erase(0, *n);
      return out;
    }
    fill(deadline);
  }
}

}  // namespace pgv
