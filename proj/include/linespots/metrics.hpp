// metrics.hpp — predictive-performance metrics over a line ranking and a
// fault set, with expectation-based tie handling throughout.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "linespots/prediction.hpp"
#include "linespots/validation.hpp"

namespace linespots {

class MetricError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Expected rank of the first faulty element of one fault. The fault's
// best-ranked tie group is examined with t elements, of which t_f belong to
// the fault; the expectation over uniformly random tie-internal orders is
//   P_start + sum_{k=1..t-t_f} k * C(t-k-1, t_f-1) / C(t, t_f)
// computed with incremental ratio products. Untied faults return their
// exact rank.
double e_inspect(const RankedList& ranking, const Fault& fault);

// Number of faults with e_inspect <= n.
int e_inspect_at_n(const RankedList& ranking, const FaultSet& faults, int n);

// Lowest e_inspect over all faults; empty fault sets are undefined.
std::optional<double> e_inspect_first(const RankedList& ranking,
                                      const FaultSet& faults);

// Mean e_inspect over all faults as a proportion of total_lines.
std::optional<double> exam_score(const RankedList& ranking,
                                 const FaultSet& faults, int64_t total_lines);

// Expected proportion of faults found (y) after inspecting a proportion of
// lines (x), piecewise linear between per-line points. Within a tie group a
// fault's discovery probability follows the exact first-hit distribution
// over tie-internal orders.
struct CostCurve {
  std::vector<std::pair<double, double>> points;
};

// Curve sampled for emission: exact values, subsampled inside very large
// tie groups to keep files small.
CostCurve cost_curve(const RankedList& ranking, const FaultSet& faults,
                     size_t max_points_per_group = 64);

// Area under the model's expected cost-effectiveness curve over [0, pi].
double raw_model_aucec(const RankedList& ranking, const FaultSet& faults,
                       double pi);

// Area under the optimal curve: every fault's line set placed contiguously
// at the top, faults in ascending order of line count.
double raw_optimal_aucec(const FaultSet& faults, int64_t total_lines,
                         double pi);

// Area under the random baseline y = x.
double raw_baseline_aucec(double pi);

// (model - baseline) / (optimal - baseline); throws MetricError when the
// optimal and baseline areas coincide.
double normalized_aucec_from_areas(double model, double baseline,
                                   double optimal);
double normalized_aucec(const RankedList& ranking, const FaultSet& faults,
                        double pi);

// Area under the ROC curve over binary line labels (union of all fault
// locations), tie groups contributing diagonal segments. Requires at least
// one faulty and one clean line.
double auroc(const RankedList& ranking, const std::set<FaultLocation>& faulty);
double auroc(const RankedList& ranking, const FaultSet& faults);

// Wall-clock seconds of one scoring run.
double measure_runtime_seconds(const std::function<void()>& run);

// One (sample x algorithm) evaluation row.
struct EvaluationReport {
  std::string project;
  std::string origin;
  std::string algorithm;
  uint64_t seed = 0;
  int64_t loc = 0;
  int64_t fix_count = 0;
  std::optional<double> auroc;
  std::optional<double> exam;
  std::optional<double> aucec1;
  std::optional<double> aucec5;
  std::optional<double> einspect_at_10;
  std::optional<double> einspect_at_100;
  std::optional<double> einspect_f;
  double runtime_seconds = 0.0;
  std::string status = "ok";  // ok | empty-fault-set | error: <detail>
};

}  // namespace linespots
