#include "vfog/core.hpp"

#include <cmath>
#include <string>

#include "vfog/error.hpp"

namespace vfog {

void Task::validate() const {
  if (!(input_bits > 0.0)) throw InvalidParameter("task input_bits must be positive");
  if (!(intensity > 0.0)) throw InvalidParameter("task intensity must be positive");
  if (!(output_bits >= 0.0)) throw InvalidParameter("task output_bits must be non-negative");
  if (deadline && !(*deadline > 0.0)) throw InvalidParameter("task deadline must be positive");
}

void FogNode::validate() const {
  if (!(cpu_hz > 0.0)) throw InvalidParameter("node cpu_hz must be positive");
  if (!(link_success_prob > 0.0) || link_success_prob > 1.0) {
    throw InvalidParameter("node link_success_prob must lie in (0, 1]");
  }
  if (!(appear_time < depart_time)) throw InvalidParameter("node must appear before it departs");
  if (kind == NodeKind::Rsu && speed != 0.0) throw InvalidParameter("RSU nodes cannot move");
}

void LinkModel::validate() const {
  if (!(data_rate_bps > 0.0)) throw InvalidParameter("link data_rate_bps must be positive");
  if (retry_slot && !(*retry_slot >= 0.0)) {
    throw InvalidParameter("link retry_slot must be non-negative");
  }
}

double compute_delay(double input_bits, double intensity, double cpu_hz) {
  if (!(cpu_hz > 0.0)) throw InvalidParameter("cpu_hz must be positive");
  if (!(intensity > 0.0)) throw InvalidParameter("intensity must be positive");
  if (input_bits < 0.0) throw InvalidParameter("input_bits must be non-negative");
  return input_bits * intensity / cpu_hz;
}

UploadSample sample_upload_delay(double bits, const LinkModel& link, double p,
                                 RandomStream& rng) {
  if (!(p > 0.0) || p > 1.0) throw InvalidParameter("success probability must lie in (0, 1]");
  if (bits < 0.0) throw InvalidParameter("bits must be non-negative");
  const std::uint64_t attempts = rng.geometric(p);
  const double tx = link.transmission_time(bits);
  const double failed = static_cast<double>(attempts - 1);
  return {tx + failed * link.slot_time(bits), attempts};
}

double expected_upload_delay(double bits, const LinkModel& link, double p) {
  if (!(p > 0.0) || p > 1.0) throw InvalidParameter("success probability must lie in (0, 1]");
  return link.transmission_time(bits) + (1.0 / p - 1.0) * link.slot_time(bits);
}

DelayBreakdown offload_delay(const Task& task, const FogNode& node, const LinkModel& link,
                             RandomStream& rng) {
  task.validate();
  if (!node.present_at(task.release_time)) {
    throw NodeDeparted("node " + std::to_string(node.id) + " is not present at offload time");
  }
  const double up = sample_upload_delay(task.input_bits, link, node.link_success_prob, rng).delay;
  const double comp = compute_delay(task.input_bits, task.intensity, node.cpu_hz);
  double down = 0.0;
  if (task.output_bits > 0.0) {
    down = sample_upload_delay(task.output_bits, link, node.link_success_prob, rng).delay;
  }
  DelayBreakdown d = DelayBreakdown::of(up, comp, down);
  if (task.release_time + d.total > node.depart_time) {
    throw NodeDeparted("node " + std::to_string(node.id) + " departs before the result returns");
  }
  return d;
}

}  // namespace vfog
