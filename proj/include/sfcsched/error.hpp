/*
Copyright 2026 The sfcsched Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sfcsched {

enum class errc {
  cycle_detected,
  dangling_edge,
  unordered_edge,
  empty_chain,
  unknown_service,
  invalid_transition,
  unstable_queue,
  non_positive_rate,
  no_path,
  no_feasible_type,
  node_full,
  machine_busy,
  no_capacity,
  empty_queue,
  not_idle,
  not_buffered,
  parse_error,
  validation_error,
  io_error,
};

constexpr std::string_view to_string(errc code) noexcept {
  switch (code) {
    case errc::cycle_detected: return "CycleDetected";
    case errc::dangling_edge: return "DanglingEdge";
    case errc::unordered_edge: return "UnorderedEdge";
    case errc::empty_chain: return "EmptyChain";
    case errc::unknown_service: return "UnknownService";
    case errc::invalid_transition: return "InvalidTransition";
    case errc::unstable_queue: return "UnstableQueue";
    case errc::non_positive_rate: return "NonPositiveRate";
    case errc::no_path: return "NoPath";
    case errc::no_feasible_type: return "NoFeasibleType";
    case errc::node_full: return "NodeFull";
    case errc::machine_busy: return "MachineBusy";
    case errc::no_capacity: return "NoCapacity";
    case errc::empty_queue: return "EmptyQueue";
    case errc::not_idle: return "NotIdle";
    case errc::not_buffered: return "NotBuffered";
    case errc::parse_error: return "ParseError";
    case errc::validation_error: return "ValidationError";
    case errc::io_error: return "IoError";
  }
  return "Unknown";
}

// Every failure raised by the library carries one of the codes above.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace sfcsched
