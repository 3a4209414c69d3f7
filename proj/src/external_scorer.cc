#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>

#include "evidencer/annotator.h"
#include "evidencer/error.h"
#include "evidencer/ranker.h"
#include "json.hpp"

namespace evidencer {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::string_view kProtocolName = "evidencer-scorer";
constexpr int kProtocolVersion = 1;

std::string RecordId(const Candidate &c) { return to_string(c.sentence_ref) + "@" + c.motion_id; }

}  // namespace

ExternalScorer::ExternalScorer(ExternalScorerOptions options, ScoringContext context)
    : options_(std::move(options)), context_(std::move(context)) {
  int fds[2];
  if (socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
    throw Error(ErrorCode::kIo, std::string("socketpair: ") + std::strerror(errno));
  }
  pid_t pid = fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    throw Error(ErrorCode::kIo, std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    // Child: the plugin sees the socket as stdin and stdout; stderr passes through.
    dup2(fds[1], STDIN_FILENO);
    dup2(fds[1], STDOUT_FILENO);
    execl("/bin/sh", "sh", "-c", options_.command.c_str(), static_cast<char *>(nullptr));
    _exit(127);
  }
  ::close(fds[1]);
  fd_ = fds[0];
  pid_ = pid;

  nlohmann::ordered_json hello;
  hello["proto"] = kProtocolName;
  hello["version"] = kProtocolVersion;
  hello["variant"] = to_string(options_.variant);
  try {
    write_line(hello.dump());
    nlohmann::json reply = nlohmann::json::parse(read_line());
    if (!reply.is_object() || !reply.contains("ok") || reply["ok"] != true) {
      throw Error(ErrorCode::kProtocol, "scorer refused handshake: " + reply.dump());
    }
    if (reply.contains("name") && reply["name"].is_string()) {
      plugin_name_ = reply["name"].get<std::string>();
    }
  } catch (const nlohmann::json::exception &e) {
    kill(pid_, SIGKILL);
    waitpid(pid_, nullptr, 0);
    ::close(fd_);
    fd_ = pid_ = -1;
    throw Error(ErrorCode::kProtocol, std::string("malformed handshake reply: ") + e.what());
  } catch (...) {
    kill(pid_, SIGKILL);
    waitpid(pid_, nullptr, 0);
    ::close(fd_);
    fd_ = pid_ = -1;
    throw;
  }
}

ExternalScorer::~ExternalScorer() {
  try {
    close();
  } catch (...) {
  }
}

void ExternalScorer::write_line(const std::string &line) {
  std::string data = line + "\n";
  size_t sent = 0;
  while (sent < data.size()) {
    ssize_t n = send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kProtocol, std::string("scorer connection lost: ") + std::strerror(errno));
    }
    sent += static_cast<size_t>(n);
  }
}

std::string ExternalScorer::read_line() {
  const auto deadline = Clock::now() + std::chrono::milliseconds(options_.timeout_ms);
  while (true) {
    size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (remaining.count() <= 0) {
      throw Error(ErrorCode::kTimeout, "scorer did not answer within " +
                                           std::to_string(options_.timeout_ms) + " ms");
    }
    pollfd pfd{fd_, POLLIN, 0};
    int ready = poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kIo, std::string("poll: ") + std::strerror(errno));
    }
    if (ready == 0) continue;
    char chunk[4096];
    ssize_t n = recv(fd_, chunk, sizeof(chunk), 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kProtocol, std::string("scorer read failed: ") + std::strerror(errno));
    }
    if (n == 0) throw Error(ErrorCode::kProtocol, "scorer closed its output");
    buffer_.append(chunk, static_cast<size_t>(n));
  }
}

std::vector<double> ExternalScorer::score(std::span<const Candidate> candidates) {
  if (fd_ < 0) throw Error(ErrorCode::kProtocol, "scorer connection is closed");
  std::vector<double> out;
  out.reserve(candidates.size());
  for (const Candidate &c : candidates) {
    const Sentence &sentence = context_.sentence_for(c);
    const Motion &motion = context_.motion_for(c);
    const std::string id = RecordId(c);
    nlohmann::ordered_json request;
    request["id"] = id;
    request["motion"] = motion.text;
    request["sentence"] = sentence.text;
    request["masked"] = mask_topic(sentence, motion, context_.mask_token);
    nlohmann::json response;
    try {
      write_line(request.dump());
      response = nlohmann::json::parse(read_line());
    } catch (const nlohmann::json::exception &) {
      throw Error(ErrorCode::kProtocol, "malformed response for record " + id);
    } catch (const Error &e) {
      throw Error(e.code(), std::string(e.what()) + " (record " + id + ")");
    }
    if (!response.is_object() || !response.contains("id") || response["id"] != id) {
      throw Error(ErrorCode::kProtocol, "response id mismatch for record " + id);
    }
    if (!response.contains("score") || !response["score"].is_number()) {
      throw Error(ErrorCode::kProtocol, "no score for record " + id);
    }
    double s = response["score"].get<double>();
    if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
      throw Error(ErrorCode::kProtocol, "invalid score for record " + id);
    }
    out.push_back(s);
  }
  return out;
}

void ExternalScorer::close() {
  if (pid_ < 0) return;
  shutdown(fd_, SHUT_WR);
  // Wait for the plugin to exit, killing it after the timeout.
  const auto deadline = Clock::now() + std::chrono::milliseconds(options_.timeout_ms);
  int status = 0;
  pid_t done = 0;
  while ((done = waitpid(pid_, &status, WNOHANG)) == 0 && Clock::now() < deadline) {
    usleep(1000);
  }
  if (done == 0) {
    kill(pid_, SIGKILL);
    waitpid(pid_, &status, 0);
  }
  ::close(fd_);
  fd_ = -1;
  pid_ = -1;
  if (done == 0) throw Error(ErrorCode::kTimeout, "scorer did not exit after shutdown");
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw Error(ErrorCode::kProtocol, "scorer exited with nonzero status");
  }
}

}  // namespace evidencer
