#include "vfog/mobility.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "vfog/error.hpp"

namespace vfog {

void RoadModel::validate() const {
  if (!(v_max > 0.0)) throw InvalidParameter("road v_max must be positive");
  if (!(rho_jam > 0.0)) throw InvalidParameter("road rho_jam must be positive");
  if (!(fog_fraction > 0.0) || fog_fraction > 1.0) {
    throw InvalidParameter("road fog_fraction must lie in (0, 1]");
  }
  if (!(rsu_coverage > 0.0)) throw InvalidParameter("road rsu_coverage must be positive");
}

double density(double v, const RoadModel& road) {
  road.validate();
  if (!(v >= 0.0) || v > road.v_max) throw InvalidParameter("speed outside [0, v_max]");
  return road.rho_jam * (1.0 - v / road.v_max);
}

double flow(double v, const RoadModel& road) { return v * density(v, road); }

double fog_arrival_rate(double v, const RoadModel& road) {
  return road.fog_fraction * flow(v, road);
}

std::vector<double> sample_arrivals(double rate, double horizon, RandomStream& rng) {
  if (!(rate >= 0.0)) throw InvalidParameter("arrival rate must be non-negative");
  if (!(horizon > 0.0)) throw InvalidParameter("horizon must be positive");
  std::vector<double> out;
  if (rate == 0.0) return out;
  double t = 0.0;
  for (;;) {
    const double next = t + rng.exponential(rate);
    if (next > horizon) break;
    // A zero-length gap can only come from rounding; skip it to keep the
    // sequence strictly increasing.
    if (next > t) out.push_back(next);
    t = next;
  }
  return out;
}

// ---------------------------------------------------------------------------
// TraceTimeline

TraceTimeline::TraceTimeline(std::vector<TraceRecord> records) : records_(std::move(records)) {
  std::stable_sort(records_.begin(), records_.end(), [](const auto& a, const auto& b) {
    return a.time != b.time ? a.time < b.time : a.vehicle_id < b.vehicle_id;
  });
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (!(r.time >= 0.0) || !std::isfinite(r.time)) {
      throw ValidationError("record time must be a finite non-negative number");
    }
    if (r.is_fog && !(r.cpu_hz > 0.0)) {
      throw ValidationError("fog vehicle " + std::to_string(r.vehicle_id) +
                            " has non-positive cpu_hz");
    }
    if (i > 0 && records_[i - 1].time == r.time && records_[i - 1].vehicle_id == r.vehicle_id) {
      throw ValidationError("duplicate record for vehicle " + std::to_string(r.vehicle_id) +
                            " at time " + std::to_string(r.time));
    }
  }
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto id = records_[i].vehicle_id;
    auto it = std::lower_bound(by_vehicle_.begin(), by_vehicle_.end(), id,
                               [](const auto& e, std::uint64_t v) { return e.first < v; });
    if (it == by_vehicle_.end() || it->first != id) it = by_vehicle_.insert(it, {id, {}});
    it->second.push_back(i);
  }
}

const std::vector<std::size_t>* TraceTimeline::rows_of(std::uint64_t vehicle) const {
  auto it = std::lower_bound(by_vehicle_.begin(), by_vehicle_.end(), vehicle,
                             [](const auto& e, std::uint64_t v) { return e.first < v; });
  if (it == by_vehicle_.end() || it->first != vehicle) return nullptr;
  return &it->second;
}

bool TraceTimeline::sample(std::uint64_t vehicle, double t, Sample& out) const {
  const auto* rows = rows_of(vehicle);
  if (rows == nullptr || rows->empty()) return false;
  const auto& first = records_[rows->front()];
  const auto& last = records_[rows->back()];
  if (t < first.time || t > last.time) return false;
  auto it = std::upper_bound(rows->begin(), rows->end(), t,
                             [this](double tt, std::size_t idx) { return tt < records_[idx].time; });
  // `it` is the first row strictly after t; the row before it is at or before t.
  const auto& lo = records_[*std::prev(it)];
  out.first_seen = first.time;
  out.last_seen = last.time;
  if (it == rows->end() || lo.time == t) {
    out.position = lo.position;
    out.speed = lo.speed;
    out.is_fog = lo.is_fog;
    out.cpu_hz = lo.cpu_hz;
    return true;
  }
  const auto& hi = records_[*it];
  const double a = (t - lo.time) / (hi.time - lo.time);
  out.position = lo.position + a * (hi.position - lo.position);
  out.speed = lo.speed + a * (hi.speed - lo.speed);
  out.is_fog = lo.is_fog;
  out.cpu_hz = lo.cpu_hz;
  return true;
}

std::vector<std::uint64_t> TraceTimeline::vehicles() const {
  std::vector<std::uint64_t> out;
  out.reserve(by_vehicle_.size());
  for (const auto& e : by_vehicle_) out.push_back(e.first);
  return out;
}

std::vector<double> TraceTimeline::distinct_times() const {
  std::vector<double> out;
  for (const auto& r : records_) {
    if (out.empty() || out.back() != r.time) out.push_back(r.time);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_double(std::string_view field, std::size_t line, const char* name) {
  field = trim(field);
  double v = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ParseError(line, std::string("invalid ") + name + " '" + std::string(field) + "'");
  }
  return v;
}

std::uint64_t parse_u64(std::string_view field, std::size_t line, const char* name) {
  field = trim(field);
  std::uint64_t v = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(line, std::string("invalid ") + name + " '" + std::string(field) + "'");
  }
  return v;
}

std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

TraceTimeline load_trace(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  ++lineno;
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // BOM
  if (trim(line) != kTraceHeader) {
    throw ParseError(lineno, std::string("expected header '") + kTraceHeader + "'");
  }
  std::vector<TraceRecord> records;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(line);
    if (f.size() != 6) {
      throw ParseError(lineno, "expected 6 fields, got " + std::to_string(f.size()));
    }
    TraceRecord r;
    r.time = parse_double(f[0], lineno, "time_s");
    if (r.time < 0.0) throw ParseError(lineno, "time_s must be non-negative");
    r.vehicle_id = parse_u64(f[1], lineno, "vehicle_id");
    r.position = parse_double(f[2], lineno, "position_m");
    r.speed = parse_double(f[3], lineno, "speed_mps");
    const auto fog = trim(f[4]);
    if (fog == "0") {
      r.is_fog = false;
    } else if (fog == "1") {
      r.is_fog = true;
    } else {
      throw ParseError(lineno, "is_fog must be 0 or 1");
    }
    r.cpu_hz = parse_double(f[5], lineno, "cpu_hz");
    if (r.is_fog && !(r.cpu_hz > 0.0)) {
      throw ValidationError("line " + std::to_string(lineno) + ": fog vehicle " +
                            std::to_string(r.vehicle_id) + " has non-positive cpu_hz");
    }
    records.push_back(r);
  }
  return TraceTimeline(std::move(records));
}

TraceTimeline load_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open trace file '" + path + "'");
  return load_trace(in);
}

void write_trace(std::ostream& out, const TraceTimeline& timeline) {
  out << kTraceHeader << '\n';
  for (const auto& r : timeline.records()) {
    out << fmt_double(r.time) << ',' << r.vehicle_id << ',' << fmt_double(r.position) << ','
        << fmt_double(r.speed) << ',' << (r.is_fog ? 1 : 0) << ',' << fmt_double(r.cpu_hz)
        << '\n';
  }
}

// ---------------------------------------------------------------------------
// Candidates

std::vector<FogNode> candidate_set(const TraceTimeline& timeline, double t,
                                   std::uint64_t client_id, double range_m,
                                   double link_success_prob) {
  TraceTimeline::Sample client;
  if (!timeline.sample(client_id, t, client)) {
    throw ClientAbsent("client " + std::to_string(client_id) + " is not present at t=" +
                       std::to_string(t));
  }
  std::vector<FogNode> out;
  for (const auto id : timeline.vehicles()) {
    if (id == client_id) continue;
    TraceTimeline::Sample s;
    if (!timeline.sample(id, t, s) || !s.is_fog) continue;
    if (!(std::abs(s.position - client.position) <= range_m)) continue;
    FogNode n;
    n.id = id;
    n.kind = NodeKind::FogVehicle;
    n.cpu_hz = s.cpu_hz;
    n.appear_time = s.first_seen;
    n.depart_time = s.last_seen > s.first_seen ? s.last_seen : std::nextafter(s.first_seen, kInf);
    n.link_success_prob = link_success_prob;
    n.position = s.position;
    n.speed = s.speed;
    out.push_back(n);
  }
  return out;
}

std::vector<FogNode> contact_intervals(const TraceTimeline& timeline, std::uint64_t client_id,
                                       double range_m, double link_success_prob) {
  struct Open {
    FogNode node;
    bool in_contact = false;
  };
  std::vector<std::pair<std::uint64_t, Open>> open;
  std::vector<FogNode> out;
  auto find = [&](std::uint64_t id) -> Open& {
    auto it = std::lower_bound(open.begin(), open.end(), id,
                               [](const auto& e, std::uint64_t v) { return e.first < v; });
    if (it == open.end() || it->first != id) it = open.insert(it, {id, Open{}});
    return it->second;
  };
  for (const double t : timeline.distinct_times()) {
    std::vector<FogNode> now;
    TraceTimeline::Sample client;
    if (timeline.sample(client_id, t, client)) {
      now = candidate_set(timeline, t, client_id, range_m, link_success_prob);
    }
    // Close contacts that ended at this instant.
    for (auto& [id, o] : open) {
      if (!o.in_contact) continue;
      const bool still = std::any_of(now.begin(), now.end(), [&](const FogNode& n) { return n.id == id; });
      if (!still) {
        // A vehicle whose trace ended earlier left at its last record.
        o.node.depart_time = std::min(t, o.node.depart_time);
        out.push_back(o.node);
        o.in_contact = false;
      }
    }
    for (const auto& n : now) {
      Open& o = find(n.id);
      if (o.in_contact) continue;
      o.in_contact = true;
      o.node = n;
      o.node.appear_time = t;
      o.node.position = n.position;
    }
  }
  // Contacts still open at the end of the trace last until the vehicle's
  // final record.
  for (auto& [id, o] : open) {
    if (!o.in_contact) continue;
    TraceTimeline::Sample s;
    double end = o.node.appear_time;
    if (timeline.sample(id, o.node.appear_time, s)) end = s.last_seen;
    o.node.depart_time = end > o.node.appear_time ? end : std::nextafter(o.node.appear_time, kInf);
    out.push_back(o.node);
  }
  std::sort(out.begin(), out.end(), [](const FogNode& a, const FogNode& b) {
    return a.appear_time != b.appear_time ? a.appear_time < b.appear_time : a.id < b.id;
  });
  return out;
}

}  // namespace vfog
