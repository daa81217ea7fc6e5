#include "linespots/process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>

namespace linespots {

namespace {

[[noreturn]] void throw_errno(const std::string& what) {
  throw std::runtime_error(what + ": " + std::strerror(errno));
}

void set_nonblocking(int fd) {
  int flags = fcntl(fd, F_GETFL, 0);
  if (flags < 0 || fcntl(fd, F_SETFL, flags | O_NONBLOCK) < 0)
    throw_errno("fcntl");
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::string& input) {
  if (argv.empty()) throw std::invalid_argument("run_process: empty argv");

  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (pipe(in_pipe) < 0 || pipe(out_pipe) < 0 || pipe(err_pipe) < 0)
    throw_errno("pipe");

  pid_t pid = fork();
  if (pid < 0) throw_errno("fork");

  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1],
                   err_pipe[0], err_pipe[1]})
      close(fd);
    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    execvp(cargv[0], cargv.data());
    // exec failed; report through stderr and exit hard.
    const char* msg = "exec failed: ";
    ssize_t n = write(STDERR_FILENO, msg, std::strlen(msg));
    n = write(STDERR_FILENO, cargv[0], std::strlen(cargv[0]));
    (void)n;
    _exit(127);
  }

  close(in_pipe[0]);
  close(out_pipe[1]);
  close(err_pipe[1]);

  int in_fd = in_pipe[1], out_fd = out_pipe[0], err_fd = err_pipe[0];
  set_nonblocking(in_fd);
  set_nonblocking(out_fd);
  set_nonblocking(err_fd);

  // Writing to a pipe whose reader exited raises SIGPIPE; we want the
  // EPIPE return instead.
  signal(SIGPIPE, SIG_IGN);

  ProcessResult result;
  size_t written = 0;
  bool in_open = true, out_open = true, err_open = true;
  if (input.empty()) {
    close(in_fd);
    in_open = false;
  }
  char buf[65536];

  while (in_open || out_open || err_open) {
    struct pollfd fds[3];
    int nfds = 0;
    int in_idx = -1, out_idx = -1, err_idx = -1;
    if (in_open) {
      in_idx = nfds;
      fds[nfds++] = {in_fd, POLLOUT, 0};
    }
    if (out_open) {
      out_idx = nfds;
      fds[nfds++] = {out_fd, POLLIN, 0};
    }
    if (err_open) {
      err_idx = nfds;
      fds[nfds++] = {err_fd, POLLIN, 0};
    }
    if (poll(fds, nfds, -1) < 0) {
      if (errno == EINTR) continue;
      throw_errno("poll");
    }
    if (in_idx >= 0 && (fds[in_idx].revents & (POLLOUT | POLLERR))) {
      ssize_t n = write(in_fd, input.data() + written,
                        std::min<size_t>(input.size() - written, 65536));
      if (n < 0 && errno != EAGAIN && errno != EINTR) {
        if (errno != EPIPE) throw_errno("write");
        written = input.size();
      } else if (n > 0) {
        written += static_cast<size_t>(n);
      }
      if (written == input.size()) {
        close(in_fd);
        in_open = false;
      }
    }
    auto drain = [&](int idx, int fd, bool& open, std::string& sink) {
      if (idx < 0 || !(fds[idx].revents & (POLLIN | POLLHUP | POLLERR))) return;
      ssize_t n = read(fd, buf, sizeof buf);
      if (n > 0) {
        sink.append(buf, static_cast<size_t>(n));
      } else if (n == 0 || (n < 0 && errno != EAGAIN && errno != EINTR)) {
        close(fd);
        open = false;
      }
    };
    drain(out_idx, out_fd, out_open, result.out);
    drain(err_idx, err_fd, err_open, result.err);
  }

  int status = 0;
  while (waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) throw_errno("waitpid");
  }
  if (WIFEXITED(status))
    result.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status))
    result.exit_code = 128 + WTERMSIG(status);
  return result;
}

std::string run_process_checked(const std::vector<std::string>& argv,
                                const std::string& input) {
  ProcessResult r = run_process(argv, input);
  if (!r.ok()) {
    std::string cmd;
    for (const auto& a : argv) {
      if (!cmd.empty()) cmd += ' ';
      cmd += a;
    }
    throw std::runtime_error("command failed (" + std::to_string(r.exit_code) +
                             "): " + cmd + "\n" + r.err);
  }
  return r.out;
}

}  // namespace linespots
