#include "protaudit/backends.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <nlohmann/json.hpp>

#include "protaudit/error.hpp"

namespace protaudit {
namespace {

using nlohmann::json;

struct Fd {
  int fd = -1;
  ~Fd() { Close(); }
  void Close() {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
};

}  // namespace

std::string RunCommand(const std::vector<std::string>& argv, const std::string& input,
                       std::chrono::milliseconds timeout) {
  if (argv.empty()) throw BackendError("empty backend command", {}, false);
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe(in_pipe) != 0) throw BackendError(std::string("pipe: ") + std::strerror(errno));
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw BackendError(std::string("pipe: ") + std::strerror(errno));
  }
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) throw BackendError(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  Fd to_child{in_pipe[1]};
  Fd from_child{out_pipe[0]};
  ::fcntl(to_child.fd, F_SETFL, O_NONBLOCK);
  ::signal(SIGPIPE, SIG_IGN);

  std::string output;
  std::size_t written = 0;
  if (input.empty()) to_child.Close();
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  bool timed_out = false;
  while (from_child.fd >= 0) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      timed_out = true;
      break;
    }
    pollfd fds[2];
    nfds_t n = 0;
    fds[n++] = {from_child.fd, POLLIN, 0};
    if (to_child.fd >= 0) fds[n++] = {to_child.fd, POLLOUT, 0};
    const int ready = ::poll(fds, n, static_cast<int>(left.count()));
    if (ready < 0 && errno == EINTR) continue;
    if (ready < 0) break;
    if (n == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const ssize_t w = ::write(to_child.fd, input.data() + written, input.size() - written);
      if (w > 0) written += static_cast<std::size_t>(w);
      if (w < 0 && errno != EAGAIN) written = input.size();
      if (written >= input.size()) to_child.Close();
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      char buf[4096];
      const ssize_t r = ::read(from_child.fd, buf, sizeof buf);
      if (r > 0) {
        output.append(buf, static_cast<std::size_t>(r));
      } else if (r == 0 || errno != EAGAIN) {
        from_child.Close();
      }
    }
  }
  if (timed_out) ::kill(pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (timed_out) throw BackendError("backend command timed out: " + argv[0]);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    throw BackendError("backend command " + argv[0] + " exited with status " + std::to_string(code),
                       {}, code != 127);
  }
  return output;
}

CommandInferenceBackend::CommandInferenceBackend(std::vector<std::string> argv, std::string id,
                                                 std::string version, std::chrono::milliseconds timeout,
                                                 std::size_t max_input_chars)
    : argv_(std::move(argv)),
      id_(std::move(id)),
      version_(std::move(version)),
      timeout_(timeout),
      max_input_chars_(max_input_chars) {}

std::vector<std::string> CommandInferenceBackend::Generate(const InferenceRequest& request) {
  json req;
  req["sentence"] = request.sentence;
  req["dimension"] = std::string(ToString(request.dimension));
  req["beam_size"] = request.beam_size;
  const std::string out = RunCommand(argv_, req.dump() + "\n", timeout_);
  try {
    return json::parse(out).at("phrases").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed backend response: ") + e.what());
  }
}

CommandCorefBackend::CommandCorefBackend(std::vector<std::string> argv, std::string id, std::string version,
                                         std::chrono::milliseconds timeout)
    : argv_(std::move(argv)), id_(std::move(id)), version_(std::move(version)), timeout_(timeout) {}

std::vector<std::vector<CorefSpan>> CommandCorefBackend::Resolve(const CorefRequest& request) {
  json req;
  req["story_id"] = request.story_id;
  req["text"] = request.text;
  json offsets = json::array();
  for (auto [b, e] : request.sentence_offsets) offsets.push_back({b, e});
  req["sentence_offsets"] = offsets;
  const std::string out = RunCommand(argv_, req.dump() + "\n", timeout_);
  std::vector<std::vector<CorefSpan>> clusters;
  try {
    const json doc = json::parse(out);
    for (const auto& c : doc.at("clusters")) {
      std::vector<CorefSpan> spans;
      for (const auto& s : c) {
        spans.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>(), s.at(2).get<std::size_t>()});
      }
      clusters.push_back(std::move(spans));
    }
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed coreference response: ") + e.what(), request.story_id);
  }
  return clusters;
}

}  // namespace protaudit
