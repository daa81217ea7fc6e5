#include "linespots/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <unordered_map>

namespace linespots {

namespace {

// Entry/tie-group lookup over one ranking.
struct Index {
  const RankedList& ranking;
  std::unordered_map<std::string, int32_t> path_ids;
  std::unordered_map<int64_t, size_t> entry_of_line;
  std::vector<size_t> group_of;

  static int64_t key(int32_t path_id, int32_t line) {
    return (static_cast<int64_t>(path_id) << 32) |
           static_cast<uint32_t>(line);
  }

  explicit Index(const RankedList& r) : ranking(r) {
    for (size_t i = 0; i < r.paths.size(); ++i)
      path_ids.emplace(r.paths[i], static_cast<int32_t>(i));
    entry_of_line.reserve(r.entries.size());
    for (size_t i = 0; i < r.entries.size(); ++i)
      entry_of_line.emplace(key(r.entries[i].path_id, r.entries[i].line), i);
    group_of.resize(r.entries.size());
    for (size_t g = 0; g < r.tie_groups.size(); ++g)
      for (size_t i = 0; i < r.tie_groups[g].count; ++i)
        group_of[r.tie_groups[g].first + i] = g;
  }

  std::optional<size_t> entry_of(const FaultLocation& loc) const {
    auto pit = path_ids.find(loc.path);
    if (pit == path_ids.end()) return std::nullopt;
    auto eit = entry_of_line.find(key(pit->second, loc.line));
    if (eit == entry_of_line.end()) return std::nullopt;
    return eit->second;
  }
};

// Earliest tie group holding any of the fault's lines, with the fault's
// line count inside it.
struct FaultGroup {
  int64_t p_start;  // 1-based rank of the group's first element
  int64_t t;        // group size
  int64_t t_f;      // fault lines inside the group
};

FaultGroup locate_fault(const Index& index, const Fault& fault) {
  size_t best = SIZE_MAX;
  std::vector<size_t> entries;
  entries.reserve(fault.locations.size());
  for (const FaultLocation& loc : fault.locations) {
    if (auto e = index.entry_of(loc)) {
      entries.push_back(*e);
      best = std::min(best, *e);
    }
  }
  if (best == SIZE_MAX)
    throw MetricError("fault " + fault.fix_commit +
                      " has no locations in the ranking");
  const TieGroup& g = index.ranking.tie_groups[index.group_of[best]];
  int64_t t_f = 0;
  for (size_t e : entries)
    if (e >= g.first && e < g.first + g.count) ++t_f;
  return {static_cast<int64_t>(g.first) + 1, static_cast<int64_t>(g.count),
          t_f};
}

// Eq-2-style expectation via incremental ratio products: the probability of
// the first hit at offset j satisfies P(1) = t_f/t and
// P(j+1) = P(j) * (t-j-t_f+1)/(t-j).
double expected_rank(int64_t p_start, int64_t t, int64_t t_f) {
  if (t_f >= t || t == 1) return static_cast<double>(p_start);
  double p = static_cast<double>(t_f) / static_cast<double>(t);
  double shifted = 0.0;  // sum_k k * P(offset = k+1)
  for (int64_t j = 2; j <= t - t_f + 1; ++j) {
    p *= static_cast<double>(t - j + 2 - t_f) / static_cast<double>(t - j + 1);
    shifted += static_cast<double>(j - 1) * p;
  }
  return static_cast<double>(p_start) + shifted;
}

// Integral over m in [0, cutoff] of one fault's expected-found curve,
// piecewise linear between integer inspection counts. The group spans
// m in [a-1, a-1+t]; before it the fault is never found, after it always.
double fault_found_area(int64_t a, int64_t t, int64_t t_f, double cutoff) {
  double group_start = static_cast<double>(a - 1);
  if (cutoff <= group_start) return 0.0;
  double area = 0.0;
  double survive = 1.0;  // P(no hit among the first j group lines)
  double y_prev = 0.0;
  for (int64_t j = 1; j <= t; ++j) {
    double next = j <= t - t_f
                      ? survive * static_cast<double>(t - t_f - j + 1) /
                            static_cast<double>(t - j + 1)
                      : 0.0;
    double y = 1.0 - next;
    double seg_start = group_start + static_cast<double>(j - 1);
    double seg_end = group_start + static_cast<double>(j);
    if (cutoff < seg_end) {
      double frac = cutoff - seg_start;
      double y_cut = y_prev + (y - y_prev) * frac;
      return area + 0.5 * (y_prev + y_cut) * frac;
    }
    area += 0.5 * (y_prev + y);
    if (next == 0.0) {
      // found with certainty from seg_end on
      return area + (cutoff - seg_end);
    }
    survive = next;
    y_prev = y;
  }
  return area + (cutoff - (group_start + static_cast<double>(t)));
}

std::set<FaultLocation> fault_union(const FaultSet& faults) {
  std::set<FaultLocation> all;
  for (const Fault& f : faults.faults)
    all.insert(f.locations.begin(), f.locations.end());
  return all;
}

}  // namespace

double e_inspect(const RankedList& ranking, const Fault& fault) {
  Index index(ranking);
  FaultGroup g = locate_fault(index, fault);
  return expected_rank(g.p_start, g.t, g.t_f);
}

int e_inspect_at_n(const RankedList& ranking, const FaultSet& faults, int n) {
  if (faults.faults.empty()) return 0;
  Index index(ranking);
  int count = 0;
  for (const Fault& f : faults.faults) {
    FaultGroup g = locate_fault(index, f);
    if (expected_rank(g.p_start, g.t, g.t_f) <= static_cast<double>(n))
      ++count;
  }
  return count;
}

std::optional<double> e_inspect_first(const RankedList& ranking,
                                      const FaultSet& faults) {
  if (faults.faults.empty()) return std::nullopt;
  Index index(ranking);
  double best = std::numeric_limits<double>::infinity();
  for (const Fault& f : faults.faults) {
    FaultGroup g = locate_fault(index, f);
    best = std::min(best, expected_rank(g.p_start, g.t, g.t_f));
  }
  return best;
}

std::optional<double> exam_score(const RankedList& ranking,
                                 const FaultSet& faults, int64_t total_lines) {
  if (faults.faults.empty()) return std::nullopt;
  if (total_lines < 1) throw MetricError("exam needs at least one line");
  Index index(ranking);
  double sum = 0.0;
  for (const Fault& f : faults.faults) {
    FaultGroup g = locate_fault(index, f);
    sum += expected_rank(g.p_start, g.t, g.t_f);
  }
  return sum / static_cast<double>(faults.faults.size()) /
         static_cast<double>(total_lines);
}

double raw_model_aucec(const RankedList& ranking, const FaultSet& faults,
                       double pi) {
  if (faults.faults.empty())
    throw MetricError("cost curve undefined for an empty fault set");
  Index index(ranking);
  const double lines = static_cast<double>(ranking.entries.size());
  const double cutoff = pi * lines;
  double area = 0.0;
  for (const Fault& f : faults.faults) {
    FaultGroup g = locate_fault(index, f);
    area += fault_found_area(g.p_start, g.t, g.t_f, cutoff);
  }
  return area / (static_cast<double>(faults.faults.size()) * lines);
}

double raw_optimal_aucec(const FaultSet& faults, int64_t total_lines,
                         double pi) {
  if (faults.faults.empty())
    throw MetricError("cost curve undefined for an empty fault set");
  // Faults in ascending order of line count, their lines packed at the top.
  std::vector<const Fault*> order;
  order.reserve(faults.faults.size());
  for (const Fault& f : faults.faults) order.push_back(&f);
  std::stable_sort(order.begin(), order.end(),
                   [](const Fault* a, const Fault* b) {
                     return a->locations.size() < b->locations.size();
                   });
  std::map<FaultLocation, int64_t> placed;
  int64_t next_rank = 1;
  std::vector<int64_t> first_hit(order.size(), 0);
  for (size_t i = 0; i < order.size(); ++i) {
    int64_t best = std::numeric_limits<int64_t>::max();
    for (const FaultLocation& loc : order[i]->locations) {
      auto [it, inserted] = placed.emplace(loc, next_rank);
      if (inserted) ++next_rank;
      best = std::min(best, it->second);
    }
    first_hit[i] = best;
  }
  const double lines = static_cast<double>(total_lines);
  const double cutoff = pi * lines;
  double area = 0.0;
  for (int64_t r : first_hit) area += fault_found_area(r, 1, 1, cutoff);
  return area / (static_cast<double>(order.size()) * lines);
}

double raw_baseline_aucec(double pi) { return 0.5 * pi * pi; }

double normalized_aucec_from_areas(double model, double baseline,
                                   double optimal) {
  if (optimal == baseline)
    throw MetricError("optimal and baseline areas coincide");
  return (model - baseline) / (optimal - baseline);
}

double normalized_aucec(const RankedList& ranking, const FaultSet& faults,
                        double pi) {
  return normalized_aucec_from_areas(
      raw_model_aucec(ranking, faults, pi), raw_baseline_aucec(pi),
      raw_optimal_aucec(faults, static_cast<int64_t>(ranking.entries.size()),
                        pi));
}

CostCurve cost_curve(const RankedList& ranking, const FaultSet& faults,
                     size_t max_points_per_group) {
  if (faults.faults.empty())
    throw MetricError("cost curve undefined for an empty fault set");
  Index index(ranking);
  const size_t lines = ranking.entries.size();
  const size_t n_faults = faults.faults.size();

  std::vector<FaultGroup> groups;
  groups.reserve(n_faults);
  for (const Fault& f : faults.faults)
    groups.push_back(locate_fault(index, f));

  // Emission grid: both ends of every tie group, plus interior samples of
  // groups that contain fault lines.
  std::vector<int64_t> grid;
  grid.push_back(0);
  for (const TieGroup& g : ranking.tie_groups) {
    grid.push_back(static_cast<int64_t>(g.first));
    grid.push_back(static_cast<int64_t>(g.first + g.count));
  }
  for (const FaultGroup& g : groups) {
    size_t step = std::max<size_t>(
        1, static_cast<size_t>(g.t) / std::max<size_t>(max_points_per_group, 2));
    for (int64_t m = g.p_start - 1 + static_cast<int64_t>(step);
         m < g.p_start - 1 + g.t; m += static_cast<int64_t>(step))
      grid.push_back(m);
  }
  grid.push_back(static_cast<int64_t>(lines));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<double> y(grid.size(), 0.0);
  std::vector<double> after(grid.size() + 1, 0.0);  // suffix adds

  for (const FaultGroup& g : groups) {
    // walk the survival probability across this fault's group, evaluating
    // at every grid point that falls inside it
    auto lo = std::lower_bound(grid.begin(), grid.end(), g.p_start - 1);
    double survive = 1.0;
    int64_t j = 0;
    auto it = lo;
    for (; it != grid.end() && *it < g.p_start - 1 + g.t; ++it) {
      int64_t target = *it - (g.p_start - 1);
      while (j < target) {
        ++j;
        survive = j <= g.t - g.t_f
                      ? survive * static_cast<double>(g.t - g.t_f - j + 1) /
                            static_cast<double>(g.t - j + 1)
                      : 0.0;
      }
      y[static_cast<size_t>(it - grid.begin())] += 1.0 - survive;
    }
    if (it != grid.end())
      after[static_cast<size_t>(it - grid.begin())] += 1.0;
  }

  CostCurve curve;
  curve.points.reserve(grid.size());
  double carried = 0.0;
  for (size_t i = 0; i < grid.size(); ++i) {
    carried += after[i];
    double value = (y[i] + carried) / static_cast<double>(n_faults);
    curve.points.emplace_back(
        static_cast<double>(grid[i]) / static_cast<double>(lines), value);
  }
  return curve;
}

double auroc(const RankedList& ranking, const std::set<FaultLocation>& faulty) {
  Index index(ranking);
  std::vector<int64_t> faulty_in_group(ranking.tie_groups.size(), 0);
  int64_t positives = 0;
  for (const FaultLocation& loc : faulty) {
    auto e = index.entry_of(loc);
    if (!e) throw MetricError("faulty line " + loc.path + ":" +
                              std::to_string(loc.line) + " is not ranked");
    ++faulty_in_group[index.group_of[*e]];
    ++positives;
  }
  int64_t negatives = static_cast<int64_t>(ranking.entries.size()) - positives;
  if (positives == 0 || negatives == 0)
    throw MetricError("auroc needs both faulty and clean lines");

  double pairs = 0.0;
  int64_t faulty_before = 0;
  for (size_t g = 0; g < ranking.tie_groups.size(); ++g) {
    int64_t p = faulty_in_group[g];
    int64_t n = static_cast<int64_t>(ranking.tie_groups[g].count) - p;
    pairs += static_cast<double>(n) *
             (static_cast<double>(faulty_before) + 0.5 * static_cast<double>(p));
    faulty_before += p;
  }
  return pairs /
         (static_cast<double>(positives) * static_cast<double>(negatives));
}

double auroc(const RankedList& ranking, const FaultSet& faults) {
  return auroc(ranking, fault_union(faults));
}

double measure_runtime_seconds(const std::function<void()>& run) {
  auto start = std::chrono::steady_clock::now();
  run();
  auto end = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(end - start).count();
}

}  // namespace linespots
