#include "vfog/coding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>
#include <set>

#include "vfog/error.hpp"

namespace vfog {

CodingScheme::CodingScheme(ReplicateScheme s) : v_(s) {
  if (s.copies < 1) throw InvalidParameter("replication needs K >= 1");
}

CodingScheme::CodingScheme(MdsScheme s) : v_(s) {
  if (s.m < 1 || s.m > s.n) throw InvalidParameter("MDS needs 1 <= m <= n");
}

CodingScheme CodingScheme::parse(const std::string& text) {
  std::string t;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) {
      t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  static const std::regex kRep(R"(rep(\d{1,4})|replicate\((\d{1,4})\))");
  static const std::regex kMds(R"(mds\((\d{1,4}),(\d{1,4})\))");
  std::smatch m;
  if (t == "single") return single();
  if (std::regex_match(t, m, kRep)) {
    const auto& g = m[1].matched ? m[1] : m[2];
    return replicate(static_cast<std::uint32_t>(std::stoul(g.str())));
  }
  if (std::regex_match(t, m, kMds)) {
    return mds(static_cast<std::uint32_t>(std::stoul(m[1].str())),
               static_cast<std::uint32_t>(std::stoul(m[2].str())));
  }
  throw InvalidParameter("unknown coding scheme '" + text + "'");
}

std::string CodingScheme::name() const {
  struct V {
    std::string operator()(const SingleScheme&) const { return "single"; }
    std::string operator()(const ReplicateScheme& r) const {
      return "rep" + std::to_string(r.copies);
    }
    std::string operator()(const MdsScheme& m) const {
      return "mds(" + std::to_string(m.n) + "," + std::to_string(m.m) + ")";
    }
  };
  return std::visit(V{}, v_);
}

std::uint32_t CodingScheme::subtask_count() const {
  struct V {
    std::uint32_t operator()(const SingleScheme&) const { return 1; }
    std::uint32_t operator()(const ReplicateScheme& r) const { return r.copies; }
    std::uint32_t operator()(const MdsScheme& m) const { return m.n; }
  };
  return std::visit(V{}, v_);
}

std::uint32_t CodingScheme::required_results() const {
  if (const auto* m = std::get_if<MdsScheme>(&v_)) return m->m;
  return 1;
}

double CodingScheme::subtask_bits(double bits) const {
  if (const auto* m = std::get_if<MdsScheme>(&v_)) return std::ceil(bits / m->m);
  return bits;
}

double SubtaskSet::total_bits() const {
  double sum = 0.0;
  for (const auto& s : subtasks) sum += s.bits;
  return sum;
}

SubtaskSet encode(const Task& task, const CodingScheme& scheme, const std::vector<NodeId>& nodes,
                  std::uint64_t first_subtask_id) {
  task.validate();
  const std::uint32_t count = scheme.subtask_count();
  if (nodes.size() < count) {
    throw InsufficientCandidates(scheme.name() + " needs " + std::to_string(count) +
                                 " nodes, got " + std::to_string(nodes.size()));
  }
  std::set<NodeId> seen;
  for (std::uint32_t i = 0; i < count; ++i) {
    if (!seen.insert(nodes[i]).second) throw InvalidParameter("encode nodes must be distinct");
  }
  SubtaskSet set;
  set.parent = task.id;
  set.required_results = scheme.required_results();
  const double bits = scheme.subtask_bits(task.input_bits);
  for (std::uint32_t i = 0; i < count; ++i) {
    set.subtasks.push_back({first_subtask_id + i, bits, nodes[i]});
  }
  return set;
}

std::optional<double> completion_time(const std::vector<FinishTime>& finish_times,
                                      const CodingScheme& scheme) {
  const std::size_t need = scheme.required_results();
  std::vector<double> ok;
  ok.reserve(finish_times.size());
  for (const auto& f : finish_times) {
    if (f) ok.push_back(*f);
  }
  if (ok.size() < need) return std::nullopt;
  std::nth_element(ok.begin(), ok.begin() + static_cast<std::ptrdiff_t>(need - 1), ok.end());
  return ok[need - 1];
}

std::optional<double> brute_force_completion(const std::vector<FinishTime>& finish_times,
                                             const CodingScheme& scheme) {
  const std::size_t need = scheme.required_results();
  const std::size_t n = finish_times.size();
  if (n >= 63) throw SizeLimit("brute-force completion supports at most 62 subtasks");
  std::optional<double> best;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) != need) continue;
    double latest = -kInf;
    bool valid = true;
    for (std::size_t i = 0; i < n && valid; ++i) {
      if (!(mask >> i & 1U)) continue;
      if (!finish_times[i]) {
        valid = false;
      } else {
        latest = std::max(latest, *finish_times[i]);
      }
    }
    if (valid && (!best || latest < *best)) best = latest;
  }
  return best;
}

}  // namespace vfog
