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

// Scripted external predictor speaking the JSON-lines protocol on stdio.
//
//   fake_predictor <mode> [args...]
//     constant <label>            every instance gets <label>
//     threshold <index> <t>       "1" when instance[index] >= t, else "0"
//     wrong-count                 one label too few
//     wrong-id                    echoes a different request id
//     garbage                     replies with non-JSON text
//     disconnect                  exits after the handshake
//     slow <ms>                   threshold 0 0.5, sleeping before each reply
//   CLASSES=a,b,c overrides the advertised class list (default 0,1).

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

using nlohmann::json;

namespace {

std::vector<std::string> Classes() {
  const char* env = std::getenv("CLASSES");
  std::vector<std::string> out;
  std::stringstream ss(env ? env : "0,1");
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: fake_predictor <mode> [args]\n";
    return 2;
  }
  const std::string mode = argv[1];
  std::string line;
  while (std::getline(std::cin, line)) {
    const json req = json::parse(line, nullptr, false);
    if (req.is_discarded()) return 3;
    if (req.value("handshake", false)) {
      std::cout << json{{"classes", Classes()}}.dump() << std::endl;
      continue;
    }
    if (mode == "disconnect") return 0;
    if (mode == "garbage") {
      std::cout << "this is not json" << std::endl;
      continue;
    }
    std::vector<std::string> labels;
    for (const json& inst : req.at("instances")) {
      if (mode == "constant") {
        labels.push_back(argv[2]);
      } else {
        std::size_t index = 0;
        double t = 0.5;
        if (mode == "threshold") {
          index = std::stoul(argv[2]);
          t = std::stod(argv[3]);
        }
        labels.push_back(inst.at(index).get<double>() >= t ? "1" : "0");
      }
    }
    if (mode == "wrong-count" && !labels.empty()) labels.pop_back();
    if (mode == "slow") std::this_thread::sleep_for(std::chrono::milliseconds(std::stoi(argv[2])));
    long long id = req.at("id").get<long long>();
    if (mode == "wrong-id") id += 1000;
    std::cout << json{{"id", id}, {"labels", labels}}.dump() << std::endl;
  }
  return 0;
}
