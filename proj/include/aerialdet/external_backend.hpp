// Copyright 2026 The aerialdet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Detector backend that talks to a child process over stdin/stdout using
// line-delimited JSON. See docs/backend_protocol.md for the message shapes.

#include <csignal>
#include <cstdio>
#include <string>

#include <fcntl.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

#include "aerialdet/detector.hpp"

namespace aerialdet {

inline nlohmann::json encode_request(const DetectRequest& r) {
  return {{"frame_idx", r.frame_idx},
          {"region", {{"x", r.region.x}, {"y", r.region.y}, {"w", r.region.w}, {"h", r.region.h}}},
          {"input_size", r.input_size}};
}

/// Parses one response line. Throws DetectorError on malformed or error
/// responses.
inline std::vector<Detection> decode_response(const std::string& line, int frame_idx) {
  nlohmann::json msg;
  try {
    msg = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DetectorError(frame_idx, std::string("malformed backend response: ") + e.what());
  }
  if (!msg.is_object()) throw DetectorError(frame_idx, "backend response is not an object");
  if (msg.contains("error")) throw DetectorError(frame_idx, "backend: " + msg["error"].dump());
  if (msg.value("frame_idx", -1) != frame_idx)
    throw DetectorError(frame_idx, "backend answered for a different frame");
  std::vector<Detection> out;
  try {
    for (const auto& d : msg.at("detections")) {
      Detection det{{d.at("x").get<double>(), d.at("y").get<double>(), d.at("w").get<double>(),
                     d.at("h").get<double>()},
                    d.at("confidence").get<double>(),
                    d.value("class_id", kPedestrianClass)};
      if (!det.valid()) throw DetectorError(frame_idx, "backend returned an invalid detection");
      out.push_back(det);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DetectorError(frame_idx, std::string("malformed backend response: ") + e.what());
  }
  return out;
}

/// Owns a child process started with `/bin/sh -c <command>`. One request is
/// in flight at a time.
class ExternalDetector final : public DetectorBackend {
 public:
  explicit ExternalDetector(const std::string& command) {
    int to_child[2], from_child[2];
    if (pipe(to_child) != 0) throw Error("pipe() failed");
    if (pipe(from_child) != 0) {
      close(to_child[0]);
      close(to_child[1]);
      throw Error("pipe() failed");
    }
    pid_ = fork();
    if (pid_ < 0) throw Error("fork() failed");
    if (pid_ == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      close(to_child[0]);
      close(to_child[1]);
      close(from_child[0]);
      close(from_child[1]);
      execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    // A dead child must surface as a detector error, not kill the process.
    std::signal(SIGPIPE, SIG_IGN);
    out_ = fdopen(to_child[1], "w");
    in_ = fdopen(from_child[0], "r");
    if (!out_ || !in_) throw Error("fdopen() failed");
  }

  ExternalDetector(const ExternalDetector&) = delete;
  ExternalDetector& operator=(const ExternalDetector&) = delete;

  ~ExternalDetector() override {
    if (out_) std::fclose(out_);
    if (in_) std::fclose(in_);
    if (pid_ > 0) {
      int status = 0;
      waitpid(pid_, &status, 0);
    }
  }

  std::vector<Detection> detect(const DetectRequest& request) override {
    const std::string line = encode_request(request).dump() + "\n";
    if (std::fputs(line.c_str(), out_) < 0 || std::fflush(out_) != 0)
      throw DetectorError(request.frame_idx, "backend process not accepting requests");
    std::string reply;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, in_)) {
      reply += buf;
      if (!reply.empty() && reply.back() == '\n') break;
    }
    if (reply.empty()) throw DetectorError(request.frame_idx, "backend process closed its output");
    return decode_response(reply, request.frame_idx);
  }

 private:
  pid_t pid_ = -1;
  std::FILE* out_ = nullptr;
  std::FILE* in_ = nullptr;
};

}  // namespace aerialdet
