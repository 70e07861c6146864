#include "pgv/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>

#include "pgv/error.hpp"

namespace pgv {

namespace {

struct Fds
{
  int fd[2] = {-1, -1};
  ~Fds()
  {
    for (int f : fd) {
      if (f >= 0) {
        ::close(f);
      }
    }
  }
  void make()
  {
    if (::pipe2(fd, O_CLOEXEC) != 0) {
      throw PgvError(std::string("pipe: ") + std::strerror(errno));
    }
  }
  int take(int i)
  {
    int f = fd[i];
    fd[i] = -1;
    return f;
  }
};

// Forks and execs argv; returns the pid. The child's stdin/stdout/stderr
// are bound to the given descriptors (-1 leaves stderr to /dev/null).
int spawn(const std::vector<std::string> & argv, int in, int out, int err,
          const std::filesystem::path & cwd)
{
  std::vector<char *> args;
  for (const auto & a : argv) {
    args.push_back(const_cast<char *>(a.c_str()));
  }
  args.push_back(nullptr);
  std::string dir = cwd.string();
  int pid = ::fork();
  if (pid < 0) {
    throw PgvError(std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::dup2(in, 0);
    ::dup2(out, 1);
    if (err >= 0) {
      ::dup2(err, 2);
    } else {
      int null = ::open("/dev/null", O_WRONLY);
      ::dup2(null, 2);
    }
    if (!dir.empty() && ::chdir(dir.c_str()) != 0) {
      ::_exit(127);
    }
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  return pid;
}

int remaining_ms(std::chrono::steady_clock::time_point deadline)
{
  auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - std::chrono::steady_clock::now());
  return left.count() < 0 ? 0 : static_cast<int>(left.count());
}

}  // namespace

std::optional<std::filesystem::path> find_program(const std::string & name)
{
  if (name.find('/') != std::string::npos) {
    if (::access(name.c_str(), X_OK) == 0) {
      return std::filesystem::path(name);
    }
    return std::nullopt;
  }
  const char * path = std::getenv("PATH");
  std::string p = path ? path : "/usr/bin:/bin";
  std::size_t start = 0;
  while (start <= p.size()) {
    std::size_t end = p.find(':', start);
    if (end == std::string::npos) {
      end = p.size();
    }
    std::filesystem::path cand =
        std::filesystem::path(p.substr(start, end - start)) / name;
    if (::access(cand.c_str(), X_OK) == 0) {
      return cand;
    }
    start = end + 1;
  }
  return std::nullopt;
}

ProcessResult run_process(const std::vector<std::string> & argv,
                          const std::string & input,
                          std::chrono::milliseconds timeout,
                          const std::filesystem::path & cwd)
{
  ProcessResult r;
  if (argv.empty() || !find_program(argv[0])) {
    r.exit_code = 127;
    r.err = "program not found: " + (argv.empty() ? std::string() : argv[0]);
    return r;
  }
  Fds in, out, err;
  in.make();
  out.make();
  err.make();
  int pid = spawn(argv, in.fd[0], out.fd[1], err.fd[1], cwd);
  ::close(in.take(0));
  ::close(out.take(1));
  ::close(err.take(1));

  int win = in.take(1);
  ::fcntl(win, F_SETFL, O_NONBLOCK);
  std::size_t written = 0;
  if (input.empty()) {
    ::close(win);
    win = -1;
  }
  auto deadline = std::chrono::steady_clock::now() + timeout;
  bool out_open = true, err_open = true;
  char chunk[65536];
  while (out_open || err_open) {
    pollfd fds[3];
    int n = 0;
    int io = -1, ie = -1, iw = -1;
    if (out_open) {
      io = n;
      fds[n++] = {out.fd[0], POLLIN, 0};
    }
    if (err_open) {
      ie = n;
      fds[n++] = {err.fd[0], POLLIN, 0};
    }
    if (win >= 0) {
      iw = n;
      fds[n++] = {win, POLLOUT, 0};
    }
    int ms = remaining_ms(deadline);
    int rc = ::poll(fds, n, ms);
    if (rc < 0 && errno == EINTR) {
      continue;
    }
    if (rc == 0 && remaining_ms(deadline) == 0) {
      r.timed_out = true;
      ::kill(pid, SIGKILL);
      break;
    }
    auto drain = [&](int idx, int fd, std::string & sink, bool & open) {
      if (idx >= 0 && (fds[idx].revents & (POLLIN | POLLHUP | POLLERR))) {
        ssize_t k = ::read(fd, chunk, sizeof chunk);
        if (k > 0) {
          sink.append(chunk, static_cast<std::size_t>(k));
        } else if (k == 0 || errno != EINTR) {
          open = false;
        }
      }
    };
    drain(io, out.fd[0], r.out, out_open);
    drain(ie, err.fd[0], r.err, err_open);
    if (iw >= 0 && (fds[iw].revents & (POLLOUT | POLLERR | POLLHUP))) {
      ssize_t k = ::write(win, input.data() + written, input.size() - written);
      if (k > 0) {
        written += static_cast<std::size_t>(k);
      }
      if (k < 0 && errno != EAGAIN && errno != EINTR) {
        written = input.size();
      }
      if (written == input.size()) {
        ::close(win);
        win = -1;
      }
    }
  }
  if (win >= 0) {
    ::close(win);
  }
  int status = 0;
  ::waitpid(pid, &status, 0);
  if (!r.timed_out) {
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  return r;
}

// ---------------------------------------------------------------------------

Pipe::Pipe(const std::vector<std::string> & argv)
{
  if (argv.empty() || !find_program(argv[0])) {
    throw SolverError("program not found: " + (argv.empty() ? std::string() : argv[0]));
  }
  ::signal(SIGPIPE, SIG_IGN);
  Fds in, out;
  in.make();
  out.make();
  pid_ = spawn(argv, in.fd[0], out.fd[1], -1, {});
  in_fd_ = in.take(1);
  out_fd_ = out.take(0);
}

Pipe::~Pipe()
{
  kill();
}

void Pipe::kill()
{
  if (in_fd_ >= 0) {
    ::close(in_fd_);
    in_fd_ = -1;
  }
  if (out_fd_ >= 0) {
    ::close(out_fd_);
    out_fd_ = -1;
  }
  if (pid_ > 0) {
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
    pid_ = -1;
  }
}

void Pipe::write(const std::string & s)
{
  std::size_t done = 0;
  while (done < s.size()) {
    if (in_fd_ < 0) {
      throw SolverError("solver process is not running");
    }
    ssize_t k = ::write(in_fd_, s.data() + done, s.size() - done);
    if (k < 0) {
      if (errno == EINTR) {
        continue;
      }
      throw SolverError(std::string("write to solver failed: ") + std::strerror(errno));
    }
    done += static_cast<std::size_t>(k);
  }
}

bool Pipe::fill(std::chrono::steady_clock::time_point deadline)
{
  if (out_fd_ < 0) {
    throw SolverError("solver process is not running");
  }
  pollfd p{out_fd_, POLLIN, 0};
  for (;;) {
    int rc = ::poll(&p, 1, remaining_ms(deadline));
    if (rc < 0 && errno == EINTR) {
      continue;
    }
    if (rc == 0) {
      kill();
      throw SolverTimeout("solver timed out");
    }
    break;
  }
  char chunk[65536];
  ssize_t k = ::read(out_fd_, chunk, sizeof chunk);
  if (k <= 0) {
    kill();
    throw SolverError("solver closed its output unexpectedly");
  }
  buf_.append(chunk, static_cast<std::size_t>(k));
  return true;
}

}  // namespace pgv
