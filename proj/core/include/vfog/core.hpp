#pragma once

#include <cstdint>
#include <limits>
#include <optional>

#include "vfog/random.hpp"

namespace vfog {

using TaskId = std::uint64_t;
using NodeId = std::uint64_t;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// A unit of offloadable work. `deadline` is relative to `release_time`;
// an empty deadline means the task is delay tolerant.
struct Task {
  TaskId id = 0;
  double release_time = 0.0;
  double input_bits = 0.0;
  double intensity = 1000.0;  // cycles per bit
  double output_bits = 0.0;
  std::optional<double> deadline;

  void validate() const;
};

enum class NodeKind { FogVehicle, Rsu };

struct FogNode {
  NodeId id = 0;
  NodeKind kind = NodeKind::FogVehicle;
  double cpu_hz = 0.0;
  double appear_time = 0.0;
  double depart_time = kInf;
  double link_success_prob = 1.0;
  double position = 0.0;  // 1-D road coordinate, meters
  double speed = 0.0;

  void validate() const;
  bool present_at(double t) const { return appear_time <= t && t < depart_time; }
};

struct LinkModel {
  static constexpr double kDefaultRateBps = 6e6;

  double data_rate_bps = kDefaultRateBps;
  // Time lost per failed attempt. Empty means one full transmission time.
  std::optional<double> retry_slot;

  void validate() const;
  double transmission_time(double bits) const { return bits / data_rate_bps; }
  double slot_time(double bits) const { return retry_slot.value_or(transmission_time(bits)); }
};

struct DelayBreakdown {
  double upload = 0.0;
  double compute = 0.0;
  double download = 0.0;
  double total = 0.0;

  static DelayBreakdown of(double upload, double compute, double download) {
    return {upload, compute, download, upload + compute + download};
  }
};

struct UploadSample {
  double delay = 0.0;
  std::uint64_t attempts = 1;
};

double compute_delay(double input_bits, double intensity, double cpu_hz);

// Transmission of `bits` over a link whose attempts each succeed with
// probability p. Failed attempts cost one retry slot each.
UploadSample sample_upload_delay(double bits, const LinkModel& link, double p,
                                 RandomStream& rng);

// Mean of sample_upload_delay.
double expected_upload_delay(double bits, const LinkModel& link, double p);

// End-to-end delay of running `task` on `node`, offloaded at the task's
// release time. Throws NodeDeparted when the node is not present for the
// whole interval.
DelayBreakdown offload_delay(const Task& task, const FogNode& node, const LinkModel& link,
                             RandomStream& rng);

}  // namespace vfog
