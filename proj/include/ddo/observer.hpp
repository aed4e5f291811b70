#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "ddo/contractor.hpp"
#include "ddo/dynamics.hpp"
#include "ddo/interval.hpp"

namespace ddo {

/// Tuning of the divide-and-discard observer.
///
/// `m_max` caps the number of boxes kept per step.  `i_max` bounds the
/// Gauss-Seidel sweeps per box.  `k_split` and `k_prune` are the bin
/// counts of the splitting and pruning heuristics.  `scaling` holds the
/// per-dimension scales used to compare widths across state variables;
/// when left empty it defaults to the width of the initial box (floored at
/// a small positive value so degenerate dimensions stay comparable).
struct ObserverConfig {
  int m_max = 1;
  int i_max = 5;
  int k_split = 20;
  int k_prune = 20;
  std::vector<double> scaling;
  Rounding rounding = Rounding::Fast;
};

/// Widths divided by the per-dimension scales.
std::vector<double> scaled_widths(const Box& box, std::span<const double> scale);

/// Index of the largest scaled width; ties resolve to the lowest index.
std::size_t widest_dim(const Box& box, std::span<const double> scale);

/// Splits the box at the midpoint of dimension `dim` into the lower and
/// upper halves, which share the midpoint.  The dimension must have
/// positive width.
std::pair<Box, Box> bisect(const Box& box, std::size_t dim);

/// Grows the collection toward `m_max` boxes.  Full rounds bisect every
/// box along its widest scaled dimension while the doubled count fits;
/// the remaining budget goes to the boxes with the largest scaled widths,
/// selected through `k_split` equal-width bins from the widest bin down,
/// in encounter order within a bin.  Children replace their parent in
/// place.  Point boxes are never split.
BoxCollection refine(const BoxCollection& boxes, const ObserverConfig& cfg);

/// Removes redundant overlap.  Centers are binned along the dimension of
/// largest center spread into `k_prune` equal-width bins; within each bin
/// the box with the largest scaled width represents the bin, and the other
/// members are dropped iff the representative contains them entirely.
BoxCollection prune(const BoxCollection& boxes, const ObserverConfig& cfg);

/// Observation hook invoked once per step with the domain-clipped input
/// boxes and their one-step mean-value enclosures, index-aligned.
using PredictTrace =
    std::function<void(const BoxCollection& inputs, const BoxCollection& predictions)>;

/// One observer step: refine, predict each box through the mean-value
/// enclosure, correct against the strips of `y_next`, prune.  Fails with
/// InconsistentMeasurements when every box is discarded.
BoxCollection observer_step(const BoxCollection& boxes, const SystemModel& model,
                            std::span<const double> u, std::span<const double> y_next,
                            const ObserverConfig& cfg, const PredictTrace& trace = {});

/// Validates the configuration against the model and fills the default
/// scaling when none is given.
ObserverConfig resolve_config(const SystemModel& model, ObserverConfig cfg);

/// Runs the observer over a full measurement sequence.  `measurements`
/// holds y_0..y_N; `inputs` holds u_0..u_{N-1} (entries may be empty for
/// input-free systems).  Returns the N+1 collections, starting with the
/// initial contraction against y_0.
std::vector<BoxCollection> run(const SystemModel& model, const ObserverConfig& cfg,
                               const std::vector<std::vector<double>>& inputs,
                               const std::vector<std::vector<double>>& measurements);

/// Stateful wrapper around init/step for incremental use.
class DdObserver {
 public:
  DdObserver(SystemModel model, ObserverConfig cfg);

  /// Contracts X0 against the strips of y0; step index becomes 0.
  void init(std::span<const double> y0);

  /// Advances from step k to k+1 with input u_k and measurement y_{k+1}.
  void step(std::span<const double> u, std::span<const double> y_next);

  bool initialized() const { return step_ >= 0; }
  int current_step() const;
  const BoxCollection& collection() const;
  const SystemModel& model() const { return model_; }
  const ObserverConfig& config() const { return cfg_; }

 private:
  SystemModel model_;
  ObserverConfig cfg_;
  BoxCollection collection_;
  int step_ = -1;
};

}  // namespace ddo
