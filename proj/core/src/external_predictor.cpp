/*
 * Copyright 2026 The cfaudit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cfaudit/external_predictor.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <set>
#include <thread>

#include "cfaudit/error.hpp"
#include "httplib.h"

namespace cfaudit {

using nlohmann::json;

ExternalPredictor::ExternalPredictor(FeatureSchema schema, ExternalOptions options)
    : schema_(std::move(schema)), options_(options) {
  if (options_.max_batch == 0) options_.max_batch = 1;
}

void ExternalPredictor::Handshake() {
  json reply;
  {
    std::lock_guard<std::mutex> lock(mu_);
    reply = Exchange(json{{"handshake", true}});
  }
  if (!reply.is_object() || !reply.contains("classes") || !reply["classes"].is_array()) {
    Fail(ErrorCode::kProtocol, "handshake reply lacks a class list");
  }
  std::set<std::string> remote;
  for (const json& c : reply["classes"]) {
    if (!c.is_string()) Fail(ErrorCode::kProtocol, "handshake class labels must be strings");
    remote.insert(c.get<std::string>());
  }
  const std::set<std::string> local(schema_.classes().begin(), schema_.classes().end());
  if (remote != local || remote.size() != reply["classes"].size()) {
    Fail(ErrorCode::kProtocol, "handshake classes do not match the schema classes");
  }
}

std::vector<std::size_t> ExternalPredictor::PredictBatch(std::span<const Instance> xs) const {
  std::vector<std::size_t> out;
  out.reserve(xs.size());
  for (std::size_t start = 0; start < xs.size(); start += options_.max_batch) {
    const std::size_t len = std::min(options_.max_batch, xs.size() - start);
    const std::vector<std::size_t> part = PredictChunk(xs.subspan(start, len));
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::vector<std::size_t> ExternalPredictor::PredictChunk(std::span<const Instance> xs) const {
  json instances = json::array();
  for (const Instance& x : xs) {
    if (x.size() != schema_.size()) Fail(ErrorCode::kValidation, "instance arity mismatch");
    instances.push_back(InstanceToJson(schema_, x));
  }
  std::lock_guard<std::mutex> lock(mu_);
  const long long id = next_id_++;
  const json reply = Exchange(json{{"id", id}, {"instances", std::move(instances)}});
  if (!reply.is_object() || !reply.contains("labels") || !reply["labels"].is_array()) {
    Fail(ErrorCode::kProtocol, "reply lacks a label list");
  }
  if (!reply.contains("id") || reply["id"] != id) {
    Fail(ErrorCode::kProtocol, "reply id does not match request id " + std::to_string(id));
  }
  const json& labels = reply["labels"];
  if (labels.size() != xs.size()) {
    Fail(ErrorCode::kProtocol, "expected " + std::to_string(xs.size()) + " labels, got " +
                                   std::to_string(labels.size()));
  }
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (const json& l : labels) {
    std::string label;
    if (l.is_string()) {
      label = l.get<std::string>();
    } else if (l.is_number_integer()) {
      label = std::to_string(l.get<long long>());
    } else {
      Fail(ErrorCode::kProtocol, "labels must be strings");
    }
    const auto idx = schema_.ClassIndex(label);
    if (!idx) Fail(ErrorCode::kProtocol, "unknown label '" + label + "' in reply");
    out.push_back(*idx);
  }
  return out;
}

// ---------------------------------------------------------------------------

StdioPredictor::StdioPredictor(const std::string& command, FeatureSchema schema,
                               ExternalOptions options)
    : ExternalPredictor(std::move(schema), options) {
  int sv[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0) {
    Fail(ErrorCode::kTransport, std::string("socketpair: ") + std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(sv[0]);
    ::close(sv[1]);
    Fail(ErrorCode::kTransport, std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::dup2(sv[1], STDIN_FILENO);
    ::dup2(sv[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(sv[1]);
  fd_ = sv[0];
  pid_ = pid;
  try {
    Handshake();
  } catch (...) {
    ::close(fd_);
    fd_ = -1;
    ::kill(pid_, SIGTERM);
    ::waitpid(pid_, nullptr, 0);
    pid_ = -1;
    throw;
  }
}

StdioPredictor::~StdioPredictor() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
  }
  if (pid_ > 0) {
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, nullptr, WNOHANG) == pid_) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
  }
}

json StdioPredictor::Exchange(const json& request) const {
  const std::string line = request.dump() + "\n";
  std::size_t sent = 0;
  while (sent < line.size()) {
    const ssize_t n = ::send(fd_, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      Fail(ErrorCode::kTransport, std::string("predictor write failed: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
  const auto deadline = std::chrono::steady_clock::now() + options().timeout;
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      const std::string reply = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      try {
        return json::parse(reply);
      } catch (const json::exception&) {
        Fail(ErrorCode::kProtocol, "malformed reply from predictor: " + reply.substr(0, 80));
      }
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) Fail(ErrorCode::kTransport, "predictor timed out");
    pollfd pfd{fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0 && errno == EINTR) continue;
    if (ready <= 0) Fail(ErrorCode::kTransport, "predictor timed out");
    char chunk[4096];
    const ssize_t got = ::recv(fd_, chunk, sizeof(chunk), 0);
    if (got < 0 && errno == EINTR) continue;
    if (got <= 0) Fail(ErrorCode::kTransport, "predictor closed the connection");
    buffer_.append(chunk, static_cast<std::size_t>(got));
  }
}

// ---------------------------------------------------------------------------

HttpPredictor::HttpPredictor(std::string host, int port, std::string path,
                             FeatureSchema schema, ExternalOptions options)
    : ExternalPredictor(std::move(schema), options),
      host_(std::move(host)),
      port_(port),
      path_(std::move(path)) {
  Handshake();
}

json HttpPredictor::Exchange(const json& request) const {
  httplib::Client client(host_, port_);
  const auto timeout = options().timeout;
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  auto res = client.Post(path_, request.dump(), "application/json");
  if (!res) {
    Fail(ErrorCode::kTransport, "HTTP predictor request failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    Fail(ErrorCode::kProtocol, "HTTP predictor returned status " + std::to_string(res->status));
  }
  try {
    return json::parse(res->body);
  } catch (const json::exception&) {
    Fail(ErrorCode::kProtocol, "malformed JSON from HTTP predictor");
  }
}

std::unique_ptr<Predictor> ConnectExternal(std::string_view descriptor,
                                           const FeatureSchema& schema,
                                           ExternalOptions options) {
  constexpr std::string_view kStdio = "stdio:";
  constexpr std::string_view kHttp = "http://";
  if (descriptor.substr(0, kStdio.size()) == kStdio) {
    return std::make_unique<StdioPredictor>(std::string(descriptor.substr(kStdio.size())), schema,
                                            options);
  }
  if (descriptor.substr(0, kHttp.size()) == kHttp) {
    std::string rest(descriptor.substr(kHttp.size()));
    std::string path = "/predict";
    if (const auto slash = rest.find('/'); slash != std::string::npos) {
      path = rest.substr(slash);
      rest = rest.substr(0, slash);
    }
    int port = 80;
    if (const auto colon = rest.rfind(':'); colon != std::string::npos) {
      try {
        port = std::stoi(rest.substr(colon + 1));
      } catch (const std::exception&) {
        Fail(ErrorCode::kInvalidArgument, "bad port in descriptor");
      }
      rest = rest.substr(0, colon);
    }
    return std::make_unique<HttpPredictor>(rest, port, path, schema, options);
  }
  Fail(ErrorCode::kInvalidArgument,
       "unknown predictor descriptor (expected stdio:<cmd> or http://host:port/path)");
}

}  // namespace cfaudit
