#include "ddo/ddo.h"

#include <cstddef>
#include <exception>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ddo/benchmarks.hpp"
#include "ddo/dynamics.hpp"
#include "ddo/error.hpp"
#include "ddo/interval.hpp"
#include "ddo/metrics.hpp"
#include "ddo/observer.hpp"

struct ddo_model {
  ddo::SystemModel model;
};

struct ddo_truth {
  ddo::TruthRun run;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t p = 0;
};

struct ddo_observer {
  ddo::DdObserver observer;
};

struct ddo_directions {
  ddo::DirectionSet dirs;
  std::size_t dim = 0;
};

namespace {

thread_local std::string t_last_error;

ddo_status to_status(ddo::ErrorCode code) {
  using ddo::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument:
      return DDO_ERR_INVALID_ARGUMENT;
    case ErrorCode::DimensionMismatch:
      return DDO_ERR_DIMENSION_MISMATCH;
    case ErrorCode::EmptySet:
      return DDO_ERR_EMPTY_SET;
    case ErrorCode::DivisorContainsZero:
      return DDO_ERR_DIVISOR_CONTAINS_ZERO;
    case ErrorCode::NegativeDomain:
      return DDO_ERR_NEGATIVE_DOMAIN;
    case ErrorCode::ZeroCoefficient:
      return DDO_ERR_ZERO_COEFFICIENT;
    case ErrorCode::NonpositiveScale:
      return DDO_ERR_NONPOSITIVE_SCALE;
    case ErrorCode::ZeroWidthSplit:
      return DDO_ERR_ZERO_WIDTH_SPLIT;
    case ErrorCode::InconsistentMeasurements:
      return DDO_ERR_INCONSISTENT_MEASUREMENTS;
    case ErrorCode::DomainViolation:
      return DDO_ERR_DOMAIN_VIOLATION;
    case ErrorCode::InitialStateOutsideX0:
      return DDO_ERR_INITIAL_STATE_OUTSIDE_X0;
    case ErrorCode::NonpositiveMetric:
      return DDO_ERR_NONPOSITIVE_METRIC;
  }
  return DDO_ERR_INTERNAL;
}

ddo_status set_error(ddo_status status, const char* message) {
  t_last_error = message;
  return status;
}

template <typename Fn>
ddo_status wrap(Fn&& fn) {
  try {
    fn();
    return DDO_OK;
  } catch (const ddo::Error& e) {
    t_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return DDO_ERR_INTERNAL;
  } catch (...) {
    t_last_error = "unknown error";
    return DDO_ERR_INTERNAL;
  }
}

const ddo::BoxCollection& live_collection(const ddo_observer* observer) {
  return observer->observer.collection();
}

}  // namespace

extern "C" {

const char* ddo_status_name(ddo_status status) {
  switch (status) {
    case DDO_OK:
      return "DDO_OK";
    case DDO_ERR_INVALID_ARGUMENT:
      return "DDO_ERR_INVALID_ARGUMENT";
    case DDO_ERR_DIMENSION_MISMATCH:
      return "DDO_ERR_DIMENSION_MISMATCH";
    case DDO_ERR_EMPTY_SET:
      return "DDO_ERR_EMPTY_SET";
    case DDO_ERR_DIVISOR_CONTAINS_ZERO:
      return "DDO_ERR_DIVISOR_CONTAINS_ZERO";
    case DDO_ERR_NEGATIVE_DOMAIN:
      return "DDO_ERR_NEGATIVE_DOMAIN";
    case DDO_ERR_ZERO_COEFFICIENT:
      return "DDO_ERR_ZERO_COEFFICIENT";
    case DDO_ERR_NONPOSITIVE_SCALE:
      return "DDO_ERR_NONPOSITIVE_SCALE";
    case DDO_ERR_ZERO_WIDTH_SPLIT:
      return "DDO_ERR_ZERO_WIDTH_SPLIT";
    case DDO_ERR_INCONSISTENT_MEASUREMENTS:
      return "DDO_ERR_INCONSISTENT_MEASUREMENTS";
    case DDO_ERR_DOMAIN_VIOLATION:
      return "DDO_ERR_DOMAIN_VIOLATION";
    case DDO_ERR_INITIAL_STATE_OUTSIDE_X0:
      return "DDO_ERR_INITIAL_STATE_OUTSIDE_X0";
    case DDO_ERR_NONPOSITIVE_METRIC:
      return "DDO_ERR_NONPOSITIVE_METRIC";
    case DDO_ERR_INTERNAL:
      return "DDO_ERR_INTERNAL";
  }
  return "DDO_ERR_UNKNOWN";
}

const char* ddo_last_error(void) { return t_last_error.c_str(); }

ddo_status ddo_vdp_model_create(double mu, double h, ddo_model** out) {
  if (!out) return set_error(DDO_ERR_INVALID_ARGUMENT, "null output pointer");
  return wrap([&] { *out = new ddo_model{ddo::vdp_model(ddo::VdpParams{mu, h})}; });
}

void ddo_tank_params_init(ddo_tank_params* params) {
  if (!params) return;
  *params = ddo_tank_params{};
  params->n = 30;
  params->h = 0.5;
  params->g = 9.81;
  params->u_level = 0.1;
  params->level_floor = 1e-6;
}

ddo_status ddo_tank_model_create(const ddo_tank_params* params, ddo_model** out) {
  if (!params || !out) return set_error(DDO_ERR_INVALID_ARGUMENT, "null argument");
  return wrap([&] {
    if (params->n < 2) ddo::fail(ddo::ErrorCode::InvalidArgument, "tank: need at least two tanks");
    ddo::TankParams prm;
    prm.n = static_cast<std::size_t>(params->n);
    prm.h = params->h;
    prm.g = params->g;
    prm.u_level = params->u_level;
    prm.level_floor = params->level_floor;
    if (params->kappa) prm.kappa.assign(params->kappa, params->kappa + params->n);
    const auto take_indices = [](const int* idx, int count, const char* what) {
      std::vector<std::size_t> out_idx;
      if (count < 1) {
        ddo::fail(ddo::ErrorCode::InvalidArgument, std::string("tank: empty ") + what + " list");
      }
      out_idx.reserve(static_cast<std::size_t>(count));
      for (int i = 0; i < count; ++i) {
        if (idx[i] < 1) {
          ddo::fail(ddo::ErrorCode::InvalidArgument,
                    std::string("tank: ") + what + " index out of range");
        }
        out_idx.push_back(static_cast<std::size_t>(idx[i]));
      }
      return out_idx;
    };
    if (params->inflow) prm.inflow = take_indices(params->inflow, params->inflow_count, "inflow");
    if (params->measured) {
      prm.measured = take_indices(params->measured, params->measured_count, "measured");
    }
    *out = new ddo_model{ddo::tank_model(prm)};
  });
}

ddo_status ddo_model_scale_uncertainty(ddo_model* model, double w_factor, double v_factor) {
  if (!model) return set_error(DDO_ERR_INVALID_ARGUMENT, "null model");
  return wrap([&] { model->model = ddo::scale_uncertainty(model->model, w_factor, v_factor); });
}

void ddo_model_free(ddo_model* model) { delete model; }

int ddo_model_state_dim(const ddo_model* model) {
  return model ? static_cast<int>(model->model.n) : -1;
}

int ddo_model_input_dim(const ddo_model* model) {
  return model ? static_cast<int>(model->model.m) : -1;
}

int ddo_model_measurement_dim(const ddo_model* model) {
  return model ? static_cast<int>(model->model.p) : -1;
}

ddo_status ddo_model_initial_box(const ddo_model* model, double* lo, double* hi) {
  if (!model || !lo || !hi) return set_error(DDO_ERR_INVALID_ARGUMENT, "null argument");
  return wrap([&] {
    for (std::size_t j = 0; j < model->model.n; ++j) {
      lo[j] = model->model.X0[j].lo;
      hi[j] = model->model.X0[j].hi;
    }
  });
}

ddo_status ddo_truth_create(const ddo_model* model, const double* x0, const double* inputs,
                            int horizon, uint64_t seed, ddo_truth** out) {
  if (!model || !out) return set_error(DDO_ERR_INVALID_ARGUMENT, "null argument");
  return wrap([&] {
    if (horizon < 0) ddo::fail(ddo::ErrorCode::InvalidArgument, "negative horizon");
    std::span<const double> x0span;
    if (x0) x0span = std::span<const double>(x0, model->model.n);
    std::vector<std::vector<double>> ins;
    if (inputs) {
      ins.resize(static_cast<std::size_t>(horizon));
      for (std::size_t k = 0; k < ins.size(); ++k) {
        ins[k].assign(inputs + k * model->model.m, inputs + (k + 1) * model->model.m);
      }
    }
    *out = new ddo_truth{ddo::simulate_truth(model->model, x0span, ins, horizon, seed),
                         model->model.n, model->model.m, model->model.p};
  });
}

void ddo_truth_free(ddo_truth* truth) { delete truth; }

int ddo_truth_horizon(const ddo_truth* truth) {
  return truth ? static_cast<int>(truth->run.states.size()) - 1 : -1;
}

ddo_status ddo_truth_state(const ddo_truth* truth, int k, double* out) {
  if (!truth || !out) return set_error(DDO_ERR_INVALID_ARGUMENT, "null argument");
  return wrap([&] {
    if (k < 0 || static_cast<std::size_t>(k) >= truth->run.states.size()) {
      ddo::fail(ddo::ErrorCode::InvalidArgument, "state index out of range");
    }
    const auto& x = truth->run.states[static_cast<std::size_t>(k)];
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = x[j];
  });
}

ddo_status ddo_truth_measurement(const ddo_truth* truth, int k, double* out) {
  if (!truth || !out) return set_error(DDO_ERR_INVALID_ARGUMENT, "null argument");
  return wrap([&] {
    if (k < 0 || static_cast<std::size_t>(k) >= truth->run.measurements.size()) {
      ddo::fail(ddo::ErrorCode::InvalidArgument, "measurement index out of range");
    }
    const auto& y = truth->run.measurements[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i];
  });
}

ddo_status ddo_truth_input(const ddo_truth* truth, int k, double* out) {
  if (!truth || !out) return set_error(DDO_ERR_INVALID_ARGUMENT, "null argument");
  return wrap([&] {
    if (k < 0 || static_cast<std::size_t>(k) >= truth->run.inputs.size()) {
      ddo::fail(ddo::ErrorCode::InvalidArgument, "input index out of range");
    }
    const auto& u = truth->run.inputs[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i];
  });
}

void ddo_observer_config_init(ddo_observer_config* config) {
  if (!config) return;
  config->m_max = 1;
  config->i_max = 5;
  config->k_split = 20;
  config->k_prune = 20;
  config->rigorous = 0;
  config->scaling = nullptr;
}

ddo_status ddo_observer_create(const ddo_model* model, const ddo_observer_config* config,
                               ddo_observer** out) {
  if (!model || !config || !out) return set_error(DDO_ERR_INVALID_ARGUMENT, "null argument");
  return wrap([&] {
    ddo::ObserverConfig cfg;
    cfg.m_max = config->m_max;
    cfg.i_max = config->i_max;
    cfg.k_split = config->k_split;
    cfg.k_prune = config->k_prune;
    cfg.rounding = config->rigorous ? ddo::Rounding::Rigorous : ddo::Rounding::Fast;
    if (config->scaling) {
      cfg.scaling.assign(config->scaling, config->scaling + model->model.n);
    }
    *out = new ddo_observer{ddo::DdObserver(model->model, std::move(cfg))};
  });
}

void ddo_observer_free(ddo_observer* observer) { delete observer; }

ddo_status ddo_observer_init(ddo_observer* observer, const double* y0) {
  if (!observer || !y0) return set_error(DDO_ERR_INVALID_ARGUMENT, "null argument");
  return wrap([&] {
    observer->observer.init(std::span<const double>(y0, observer->observer.model().p));
  });
}

ddo_status ddo_observer_step(ddo_observer* observer, const double* u, const double* y_next) {
  if (!observer || !y_next) return set_error(DDO_ERR_INVALID_ARGUMENT, "null argument");
  const std::size_t m = observer->observer.model().m;
  if (m > 0 && !u) {
    return set_error(DDO_ERR_INVALID_ARGUMENT, "null input for a model with inputs");
  }
  return wrap([&] {
    const std::span<const double> uspan =
        m > 0 ? std::span<const double>(u, m) : std::span<const double>();
    observer->observer.step(uspan,
                            std::span<const double>(y_next, observer->observer.model().p));
  });
}

int ddo_observer_box_count(const ddo_observer* observer) {
  if (!observer || !observer->observer.initialized()) return -1;
  return static_cast<int>(observer->observer.collection().size());
}

int ddo_observer_current_step(const ddo_observer* observer) {
  if (!observer || !observer->observer.initialized()) return -1;
  return observer->observer.current_step();
}

ddo_status ddo_observer_box(const ddo_observer* observer, int index, double* lo, double* hi) {
  if (!observer || !lo || !hi) return set_error(DDO_ERR_INVALID_ARGUMENT, "null argument");
  return wrap([&] {
    const ddo::BoxCollection& boxes = live_collection(observer);
    if (index < 0 || static_cast<std::size_t>(index) >= boxes.size()) {
      ddo::fail(ddo::ErrorCode::InvalidArgument, "box index out of range");
    }
    const ddo::Box& b = boxes[static_cast<std::size_t>(index)];
    for (std::size_t j = 0; j < b.dim(); ++j) {
      lo[j] = b[j].lo;
      hi[j] = b[j].hi;
    }
  });
}

ddo_status ddo_observer_hull(const ddo_observer* observer, double* lo, double* hi) {
  if (!observer || !lo || !hi) return set_error(DDO_ERR_INVALID_ARGUMENT, "null argument");
  return wrap([&] {
    const ddo::Box h = ddo::hull_of_collection(live_collection(observer));
    for (std::size_t j = 0; j < h.dim(); ++j) {
      lo[j] = h[j].lo;
      hi[j] = h[j].hi;
    }
  });
}

ddo_status ddo_observer_contains(const ddo_observer* observer, const double* x, int* out) {
  if (!observer || !x || !out) return set_error(DDO_ERR_INVALID_ARGUMENT, "null argument");
  return wrap([&] {
    const std::span<const double> pt(x, observer->observer.model().n);
    int hit = 0;
    for (const ddo::Box& b : live_collection(observer)) {
      if (ddo::contains(b, pt)) {
        hit = 1;
        break;
      }
    }
    *out = hit;
  });
}

ddo_status ddo_observer_support(const ddo_observer* observer, const double* direction,
                                double* out) {
  if (!observer || !direction || !out) {
    return set_error(DDO_ERR_INVALID_ARGUMENT, "null argument");
  }
  return wrap([&] {
    *out = ddo::support(live_collection(observer),
                        std::span<const double>(direction, observer->observer.model().n));
  });
}

ddo_status ddo_observer_hull_volume_term(const ddo_observer* observer, double* out) {
  if (!observer || !out) return set_error(DDO_ERR_INVALID_ARGUMENT, "null argument");
  return wrap([&] { *out = ddo::hull_volume_term(live_collection(observer)); });
}

ddo_status ddo_observer_width_term(const ddo_observer* observer,
                                   const ddo_directions* directions, double* out) {
  if (!observer || !directions || !out) {
    return set_error(DDO_ERR_INVALID_ARGUMENT, "null argument");
  }
  return wrap([&] {
    if (directions->dim != observer->observer.model().n) {
      ddo::fail(ddo::ErrorCode::DimensionMismatch, "direction dimension != state dimension");
    }
    *out = ddo::width_term(live_collection(observer), directions->dirs);
  });
}

ddo_status ddo_directions_create(int dim, int count, uint64_t seed, ddo_directions** out) {
  if (!out) return set_error(DDO_ERR_INVALID_ARGUMENT, "null output pointer");
  return wrap([&] {
    if (dim < 1 || count < 1) {
      ddo::fail(ddo::ErrorCode::InvalidArgument, "directions: dim and count must be positive");
    }
    *out = new ddo_directions{
        ddo::sample_directions(static_cast<std::size_t>(dim), static_cast<std::size_t>(count),
                               seed),
        static_cast<std::size_t>(dim)};
  });
}

void ddo_directions_free(ddo_directions* directions) { delete directions; }

int ddo_directions_count(const ddo_directions* directions) {
  return directions ? static_cast<int>(directions->dirs.dirs.size()) : -1;
}

ddo_status ddo_directions_get(const ddo_directions* directions, int index, double* out) {
  if (!directions || !out) return set_error(DDO_ERR_INVALID_ARGUMENT, "null argument");
  return wrap([&] {
    if (index < 0 || static_cast<std::size_t>(index) >= directions->dirs.dirs.size()) {
      ddo::fail(ddo::ErrorCode::InvalidArgument, "direction index out of range");
    }
    const auto& d = directions->dirs.dirs[static_cast<std::size_t>(index)];
    for (std::size_t j = 0; j < d.size(); ++j) out[j] = d[j];
  });
}

ddo_status ddo_normalize(double* values, int count) {
  if (!values) return set_error(DDO_ERR_INVALID_ARGUMENT, "null values");
  return wrap([&] {
    if (count < 1) ddo::fail(ddo::ErrorCode::InvalidArgument, "normalize: empty list");
    const std::vector<double> r =
        ddo::normalize(std::span<const double>(values, static_cast<std::size_t>(count)));
    for (std::size_t i = 0; i < r.size(); ++i) values[i] = r[i];
  });
}

}  // extern "C"
