#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vfog/core.hpp"
#include "vfog/random.hpp"

namespace vfog {

// Greenshields road: speed and density are linearly related.
struct RoadModel {
  double v_max = 30.0;     // m/s
  double rho_jam = 0.12;   // vehicles per meter
  double fog_fraction = 0.1;
  double rsu_coverage = 300.0;  // meters

  void validate() const;
};

double density(double v, const RoadModel& road);
double flow(double v, const RoadModel& road);
// Poisson rate of recruitable fog vehicles passing an RSU.
double fog_arrival_rate(double v, const RoadModel& road);

// Poisson arrival instants on (0, horizon], strictly increasing.
std::vector<double> sample_arrivals(double rate, double horizon, RandomStream& rng);

struct TraceRecord {
  double time = 0.0;
  std::uint64_t vehicle_id = 0;
  double position = 0.0;
  double speed = 0.0;
  bool is_fog = false;
  double cpu_hz = 0.0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

// Immutable, validated vehicle trace sorted by (time, vehicle_id).
class TraceTimeline {
 public:
  TraceTimeline() = default;
  explicit TraceTimeline(std::vector<TraceRecord> records);

  const std::vector<TraceRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }

  struct Sample {
    double position = 0.0;
    double speed = 0.0;
    bool is_fog = false;
    double cpu_hz = 0.0;
    double first_seen = 0.0;
    double last_seen = 0.0;
  };
  // Linearly interpolated state of `vehicle` at `t`; false when the vehicle
  // is outside its recorded interval.
  bool sample(std::uint64_t vehicle, double t, Sample& out) const;

  std::vector<std::uint64_t> vehicles() const;
  std::vector<double> distinct_times() const;

 private:
  std::vector<TraceRecord> records_;
  // Per-vehicle index ranges into records_, ordered by time.
  std::vector<std::pair<std::uint64_t, std::vector<std::size_t>>> by_vehicle_;
  const std::vector<std::size_t>* rows_of(std::uint64_t vehicle) const;
};

inline constexpr const char* kTraceHeader = "time_s,vehicle_id,position_m,speed_mps,is_fog,cpu_hz";

TraceTimeline load_trace(std::istream& in);
TraceTimeline load_trace_file(const std::string& path);
void write_trace(std::ostream& out, const TraceTimeline& timeline);

// Fog vehicles within range_m of the client at time t, excluding the client.
// `link_success_prob` is stamped onto every returned node view.
std::vector<FogNode> candidate_set(const TraceTimeline& timeline, double t,
                                   std::uint64_t client_id, double range_m,
                                   double link_success_prob = 1.0);

// Contact intervals between the client and every fog vehicle, derived by
// evaluating candidate_set at each distinct trace instant. Each interval
// becomes one FogNode with appear/depart times.
std::vector<FogNode> contact_intervals(const TraceTimeline& timeline, std::uint64_t client_id,
                                       double range_m, double link_success_prob);

}  // namespace vfog
