#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vfog/core.hpp"

namespace vfog {

struct SingleScheme {
  friend bool operator==(const SingleScheme&, const SingleScheme&) = default;
};
struct ReplicateScheme {
  std::uint32_t copies = 1;  // K
  friend bool operator==(const ReplicateScheme&, const ReplicateScheme&) = default;
};
struct MdsScheme {
  std::uint32_t n = 1;  // coded subtasks
  std::uint32_t m = 1;  // results needed
  friend bool operator==(const MdsScheme&, const MdsScheme&) = default;
};

class CodingScheme {
 public:
  CodingScheme() = default;
  CodingScheme(SingleScheme s) : v_(s) {}
  CodingScheme(ReplicateScheme s);
  CodingScheme(MdsScheme s);

  static CodingScheme single() { return SingleScheme{}; }
  static CodingScheme replicate(std::uint32_t k) { return ReplicateScheme{k}; }
  static CodingScheme mds(std::uint32_t n, std::uint32_t m) { return MdsScheme{n, m}; }

  // Parses "single", "rep2"/"replicate(2)", "mds(3,2)".
  static CodingScheme parse(const std::string& text);
  std::string name() const;

  std::uint32_t subtask_count() const;
  std::uint32_t required_results() const;
  // Bits carried by each subtask of a parent with `bits` input bits.
  double subtask_bits(double bits) const;

  const auto& variant() const { return v_; }
  friend bool operator==(const CodingScheme&, const CodingScheme&) = default;

 private:
  std::variant<SingleScheme, ReplicateScheme, MdsScheme> v_;
};

struct Subtask {
  std::uint64_t id = 0;
  double bits = 0.0;
  NodeId node = 0;
};

struct SubtaskSet {
  TaskId parent = 0;
  std::vector<Subtask> subtasks;
  std::uint32_t required_results = 1;
  std::uint32_t results_received = 0;

  double total_bits() const;
};

// Expands `task` onto `nodes` (one subtask per node, in order). Subtask ids
// are `first_subtask_id`, `first_subtask_id + 1`, ...
SubtaskSet encode(const Task& task, const CodingScheme& scheme, const std::vector<NodeId>& nodes,
                  std::uint64_t first_subtask_id = 0);

// Per-subtask finish time; empty means the subtask failed.
using FinishTime = std::optional<double>;

std::optional<double> completion_time(const std::vector<FinishTime>& finish_times,
                                      const CodingScheme& scheme);

// Exhaustive-subset reference for completion_time. Exponential in the number
// of subtasks; intended for tests and the self-test command.
std::optional<double> brute_force_completion(const std::vector<FinishTime>& finish_times,
                                             const CodingScheme& scheme);

}  // namespace vfog
