#include "ddo/observer.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ddo/error.hpp"

namespace ddo {

namespace {

// Floor for auto-derived scales so zero-width dimensions stay comparable.
constexpr double kMinScale = 1e-12;

void validate_counts(const ObserverConfig& cfg) {
  if (cfg.m_max < 1) fail(ErrorCode::InvalidArgument, "m_max must be at least 1");
  if (cfg.i_max < 1) fail(ErrorCode::InvalidArgument, "i_max must be at least 1");
  if (cfg.k_split < 1) fail(ErrorCode::InvalidArgument, "k_split must be at least 1");
  if (cfg.k_prune < 1) fail(ErrorCode::InvalidArgument, "k_prune must be at least 1");
}

void validate_scaling(std::span<const double> scale, std::size_t n) {
  if (scale.size() != n) {
    fail(ErrorCode::DimensionMismatch, "scaling dimension != state dimension");
  }
  for (double s : scale) {
    if (!(s > 0.0)) fail(ErrorCode::NonpositiveScale, "scales must be positive");
  }
}

void validate_collection(const BoxCollection& boxes, std::size_t n, const char* what) {
  for (const Box& b : boxes) {
    if (b.dim() != n) {
      fail(ErrorCode::DimensionMismatch, std::string(what) + ": mixed box dimensions");
    }
    if (b.is_empty()) fail(ErrorCode::EmptySet, std::string(what) + ": empty box in collection");
  }
}

// Equal-width bin index of v over [lo, hi]; bins are half-open except the
// last, and a degenerate range puts everything in bin 0.
std::size_t bin_index(double v, double lo, double hi, int bins) {
  if (!(hi > lo)) return 0;
  const double t = (v - lo) / (hi - lo);
  auto idx = static_cast<long>(t * bins);
  if (idx < 0) idx = 0;
  if (idx >= bins) idx = bins - 1;
  return static_cast<std::size_t>(idx);
}

double top_scaled_width(const Box& box, std::span<const double> scale, std::size_t dim) {
  return width(box[dim]) / scale[dim];
}

}  // namespace

std::vector<double> scaled_widths(const Box& box, std::span<const double> scale) {
  validate_scaling(scale, box.dim());
  if (box.is_empty()) fail(ErrorCode::EmptySet, "scaled_widths: empty box");
  std::vector<double> w(box.dim());
  for (std::size_t j = 0; j < box.dim(); ++j) w[j] = width(box[j]) / scale[j];
  return w;
}

std::size_t widest_dim(const Box& box, std::span<const double> scale) {
  const std::vector<double> w = scaled_widths(box, scale);
  // max_element keeps the first maximum, so ties go to the lowest index.
  return static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
}

std::pair<Box, Box> bisect(const Box& box, std::size_t dim) {
  if (dim >= box.dim()) fail(ErrorCode::InvalidArgument, "bisect: dimension out of range");
  if (box.is_empty()) fail(ErrorCode::EmptySet, "bisect: empty box");
  const Interval& c = box[dim];
  if (!(width(c) > 0.0)) fail(ErrorCode::ZeroWidthSplit, "bisect: dimension has zero width");
  const double m = std::min(std::max(midpoint(c), c.lo), c.hi);
  Box lo_half = box;
  Box hi_half = box;
  lo_half[dim] = Interval{c.lo, m};
  hi_half[dim] = Interval{m, c.hi};
  return {std::move(lo_half), std::move(hi_half)};
}

BoxCollection refine(const BoxCollection& boxes, const ObserverConfig& cfg) {
  validate_counts(cfg);
  if (boxes.empty()) fail(ErrorCode::EmptySet, "refine: empty collection");
  const std::size_t n = boxes.front().dim();
  validate_scaling(cfg.scaling, n);
  validate_collection(boxes, n, "refine");
  const auto m_max = static_cast<std::size_t>(cfg.m_max);

  BoxCollection cur = boxes;
  // Full rounds: bisect every box while the doubled count still fits.
  while (cur.size() * 2 <= m_max) {
    BoxCollection next;
    next.reserve(cur.size() * 2);
    std::size_t splits = 0;
    for (const Box& b : cur) {
      const std::size_t j = widest_dim(b, cfg.scaling);
      if (width(b[j]) > 0.0) {
        auto [lo_half, hi_half] = bisect(b, j);
        next.push_back(std::move(lo_half));
        next.push_back(std::move(hi_half));
        ++splits;
      } else {
        next.push_back(b);
      }
    }
    cur = std::move(next);
    if (splits == 0) return cur;
  }
  if (cur.size() >= m_max) return cur;

  // Partial round: the leftover budget goes to the boxes with the largest
  // scaled widths, located through equal-width bins instead of a sort.
  const std::size_t budget = m_max - cur.size();
  std::vector<std::size_t> top_dim(cur.size());
  std::vector<double> top_w(cur.size());
  for (std::size_t b = 0; b < cur.size(); ++b) {
    top_dim[b] = widest_dim(cur[b], cfg.scaling);
    top_w[b] = top_scaled_width(cur[b], cfg.scaling, top_dim[b]);
  }
  const auto [lo_it, hi_it] = std::minmax_element(top_w.begin(), top_w.end());
  const double w_lo = *lo_it;
  const double w_hi = *hi_it;

  std::vector<std::vector<std::size_t>> bins(static_cast<std::size_t>(cfg.k_split));
  for (std::size_t b = 0; b < cur.size(); ++b) {
    bins[bin_index(top_w[b], w_lo, w_hi, cfg.k_split)].push_back(b);
  }

  std::vector<char> split_flag(cur.size(), 0);
  std::size_t remaining = budget;
  for (std::size_t bin = bins.size(); bin-- > 0 && remaining > 0;) {
    for (std::size_t b : bins[bin]) {
      if (remaining == 0) break;
      if (!(width(cur[b][top_dim[b]]) > 0.0)) continue;
      split_flag[b] = 1;
      --remaining;
    }
  }

  BoxCollection out;
  out.reserve(cur.size() + budget);
  for (std::size_t b = 0; b < cur.size(); ++b) {
    if (split_flag[b]) {
      auto [lo_half, hi_half] = bisect(cur[b], top_dim[b]);
      out.push_back(std::move(lo_half));
      out.push_back(std::move(hi_half));
    } else {
      out.push_back(std::move(cur[b]));
    }
  }
  return out;
}

BoxCollection prune(const BoxCollection& boxes, const ObserverConfig& cfg) {
  validate_counts(cfg);
  if (boxes.empty()) fail(ErrorCode::EmptySet, "prune: empty collection");
  const std::size_t n = boxes.front().dim();
  validate_scaling(cfg.scaling, n);
  validate_collection(boxes, n, "prune");
  if (boxes.size() == 1) return boxes;

  std::vector<std::vector<double>> centers(boxes.size());
  for (std::size_t b = 0; b < boxes.size(); ++b) centers[b] = midpoint(boxes[b]);

  // Bin along the dimension whose centers spread the most.
  std::size_t spread_dim = 0;
  double best_spread = -1.0;
  for (std::size_t j = 0; j < n; ++j) {
    double lo = centers[0][j];
    double hi = centers[0][j];
    for (std::size_t b = 1; b < boxes.size(); ++b) {
      lo = std::min(lo, centers[b][j]);
      hi = std::max(hi, centers[b][j]);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      spread_dim = j;
    }
  }
  double v_lo = centers[0][spread_dim];
  double v_hi = v_lo;
  for (std::size_t b = 1; b < boxes.size(); ++b) {
    v_lo = std::min(v_lo, centers[b][spread_dim]);
    v_hi = std::max(v_hi, centers[b][spread_dim]);
  }

  std::vector<std::vector<std::size_t>> bins(static_cast<std::size_t>(cfg.k_prune));
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    bins[bin_index(centers[b][spread_dim], v_lo, v_hi, cfg.k_prune)].push_back(b);
  }

  std::vector<char> removed(boxes.size(), 0);
  for (const auto& bin : bins) {
    if (bin.size() < 2) continue;
    // The widest member represents the bin; ties keep the earliest.
    std::size_t rep = bin[0];
    double rep_w = top_scaled_width(boxes[rep], cfg.scaling, widest_dim(boxes[rep], cfg.scaling));
    for (std::size_t k = 1; k < bin.size(); ++k) {
      const std::size_t b = bin[k];
      const double w = top_scaled_width(boxes[b], cfg.scaling, widest_dim(boxes[b], cfg.scaling));
      if (w > rep_w) {
        rep = b;
        rep_w = w;
      }
    }
    for (std::size_t b : bin) {
      if (b != rep && contains(boxes[rep], boxes[b])) removed[b] = 1;
    }
  }

  BoxCollection out;
  out.reserve(boxes.size());
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    if (!removed[b]) out.push_back(boxes[b]);
  }
  return out;
}

ObserverConfig resolve_config(const SystemModel& model, ObserverConfig cfg) {
  validate_counts(cfg);
  if (model.n == 0) fail(ErrorCode::InvalidArgument, "model has no state");
  if (cfg.scaling.empty()) {
    if (model.X0.dim() != model.n || model.X0.is_empty()) {
      fail(ErrorCode::InvalidArgument, "model initial bounds unusable for default scaling");
    }
    cfg.scaling = width(model.X0);
    for (double& s : cfg.scaling) s = std::max(s, kMinScale);
  }
  validate_scaling(cfg.scaling, model.n);
  return cfg;
}

BoxCollection observer_step(const BoxCollection& boxes, const SystemModel& model,
                            std::span<const double> u, std::span<const double> y_next,
                            const ObserverConfig& cfg, const PredictTrace& trace) {
  if (boxes.empty()) fail(ErrorCode::EmptySet, "observer_step: empty collection");
  if (y_next.size() != model.p) {
    fail(ErrorCode::DimensionMismatch, "observer_step: measurement dimension != p");
  }
  if (cfg.scaling.size() != model.n) {
    fail(ErrorCode::DimensionMismatch,
         "observer_step: scaling not resolved against the model (see resolve_config)");
  }
  ScopedRounding mode(cfg.rounding);

  BoxCollection inputs = refine(boxes, cfg);
  for (Box& b : inputs) b = apply_state_domain(model, b);

  BoxCollection predicted;
  predicted.reserve(inputs.size());
  for (const Box& b : inputs) {
    predicted.push_back(mean_value_enclosure(model, b, u, model.W));
  }
  if (trace) trace(inputs, predicted);

  const StripSet strips{model.C, {y_next.begin(), y_next.end()}, model.V};
  BoxCollection corrected = gs_contract(predicted, strips, cfg.i_max);
  if (corrected.empty()) {
    fail(ErrorCode::InconsistentMeasurements, "every box is inconsistent with the measurement");
  }
  return prune(corrected, cfg);
}

std::vector<BoxCollection> run(const SystemModel& model, const ObserverConfig& cfg_in,
                               const std::vector<std::vector<double>>& inputs,
                               const std::vector<std::vector<double>>& measurements) {
  if (measurements.empty()) {
    fail(ErrorCode::InvalidArgument, "run: need at least the initial measurement");
  }
  const std::size_t steps = measurements.size() - 1;
  if (inputs.size() < steps) fail(ErrorCode::DimensionMismatch, "run: fewer inputs than steps");
  for (const auto& y : measurements) {
    if (y.size() != model.p) fail(ErrorCode::DimensionMismatch, "run: measurement dimension != p");
  }
  const ObserverConfig cfg = resolve_config(model, cfg_in);
  ScopedRounding mode(cfg.rounding);

  std::vector<BoxCollection> out;
  out.reserve(measurements.size());
  const StripSet strips0{model.C, measurements[0], model.V};
  BoxCollection collection = contract_initial(model.X0, strips0, cfg.i_max);
  if (collection.empty()) {
    fail(ErrorCode::InconsistentMeasurements,
         "initial bounds inconsistent with the first measurement");
  }
  out.push_back(collection);
  for (std::size_t k = 0; k < steps; ++k) {
    try {
      collection = observer_step(collection, model, inputs[k], measurements[k + 1], cfg);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InconsistentMeasurements) {
        fail(e.code(), "all boxes discarded at step " + std::to_string(k + 1));
      }
      throw;
    }
    out.push_back(collection);
  }
  return out;
}

DdObserver::DdObserver(SystemModel model, ObserverConfig cfg)
    : model_(std::move(model)), cfg_(resolve_config(model_, std::move(cfg))) {}

void DdObserver::init(std::span<const double> y0) {
  if (y0.size() != model_.p) {
    fail(ErrorCode::DimensionMismatch, "init: measurement dimension != p");
  }
  ScopedRounding mode(cfg_.rounding);
  const StripSet strips{model_.C, {y0.begin(), y0.end()}, model_.V};
  BoxCollection collection = contract_initial(model_.X0, strips, cfg_.i_max);
  if (collection.empty()) {
    fail(ErrorCode::InconsistentMeasurements,
         "initial bounds inconsistent with the first measurement");
  }
  collection_ = std::move(collection);
  step_ = 0;
}

void DdObserver::step(std::span<const double> u, std::span<const double> y_next) {
  if (step_ < 0) fail(ErrorCode::InvalidArgument, "step called before init");
  collection_ = observer_step(collection_, model_, u, y_next, cfg_);
  ++step_;
}

int DdObserver::current_step() const {
  if (step_ < 0) fail(ErrorCode::InvalidArgument, "observer not initialized");
  return step_;
}

const BoxCollection& DdObserver::collection() const {
  if (step_ < 0) fail(ErrorCode::InvalidArgument, "observer not initialized");
  return collection_;
}

}  // namespace ddo
