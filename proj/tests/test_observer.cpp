#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "ddo/benchmarks.hpp"
#include "ddo/observer.hpp"
#include "doctest.h"
#include "single_set_reference.hpp"

using namespace ddo;

namespace {

Box box2(double l0, double h0, double l1, double h1) {
  Box b(2);
  b[0] = Interval{l0, h0};
  b[1] = Interval{l1, h1};
  return b;
}

ObserverConfig cfg2(int m_max, std::vector<double> scaling = {1.0, 1.0}) {
  ObserverConfig c;
  c.m_max = m_max;
  c.scaling = std::move(scaling);
  return c;
}

bool in_union(const BoxCollection& boxes, const std::vector<double>& pt) {
  for (const Box& b : boxes) {
    if (contains(b, pt)) return true;
  }
  return false;
}

bool same_collection(const BoxCollection& a, const BoxCollection& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].dim() != b[i].dim()) return false;
    for (std::size_t j = 0; j < a[i].dim(); ++j) {
      if (a[i][j].lo != b[i][j].lo || a[i][j].hi != b[i][j].hi) return false;
    }
  }
  return true;
}

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  double unif(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
};

}  // namespace

TEST_CASE("scaled widths and widest dimension") {
  const Box b = box2(0.0, 4.0, 0.0, 1.0);
  const std::vector<double> unit{1.0, 1.0};
  CHECK(scaled_widths(b, unit) == std::vector<double>{4.0, 1.0});
  CHECK(widest_dim(b, unit) == 0);

  // Scaling can move the widest dimension.
  const std::vector<double> skew{8.0, 1.0};
  CHECK(scaled_widths(b, skew) == std::vector<double>{0.5, 1.0});
  CHECK(widest_dim(b, skew) == 1);

  // Ties resolve to the lowest index.
  CHECK(widest_dim(box2(0.0, 1.0, 0.0, 1.0), unit) == 0);

  CHECK_THROWS_AS((void)scaled_widths(b, std::vector<double>{1.0}), Error);
  CHECK_THROWS_AS((void)scaled_widths(b, std::vector<double>{1.0, 0.0}), Error);
}

TEST_CASE("bisect splits at the midpoint") {
  const Box b = box2(0.0, 4.0, 0.0, 1.0);
  const auto [lo, hi] = bisect(b, 0);
  CHECK(lo[0] == Interval{0.0, 2.0});
  CHECK(hi[0] == Interval{2.0, 4.0});
  CHECK(lo[1] == Interval{0.0, 1.0});
  CHECK(hi[1] == Interval{0.0, 1.0});

  try {
    (void)bisect(box2(1.0, 1.0, 0.0, 1.0), 0);
    FAIL("bisect accepted a zero-width dimension");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroWidthSplit);
  }
  CHECK_THROWS_AS((void)bisect(b, 2), Error);
}

TEST_CASE("refine doubles while the budget allows") {
  const BoxCollection start{box2(0.0, 2.0, 0.0, 1.0)};

  BoxCollection two = refine(start, cfg2(2));
  REQUIRE(two.size() == 2);
  CHECK(two[0][0] == Interval{0.0, 1.0});
  CHECK(two[1][0] == Interval{1.0, 2.0});
  CHECK(two[0][1] == Interval{0.0, 1.0});

  // A second full round splits both children; [0,1] x [0,1] ties to dim 0.
  BoxCollection four = refine(start, cfg2(4));
  REQUIRE(four.size() == 4);
  CHECK(four[0][0] == Interval{0.0, 0.5});
  CHECK(four[1][0] == Interval{0.5, 1.0});
  CHECK(four[2][0] == Interval{1.0, 1.5});
  CHECK(four[3][0] == Interval{1.5, 2.0});

  // Non-power-of-two budgets are met exactly.
  CHECK(refine(start, cfg2(251)).size() == 251);
}

TEST_CASE("refine partial round favors the widest bins") {
  BoxCollection boxes{
      box2(0.0, 1.0, 0.0, 0.5),
      box2(0.0, 1.2, 0.0, 0.5),
      box2(0.0, 1.5, 0.0, 0.5),
      box2(0.0, 9.0, 0.0, 0.5),
  };

  // Budget of one: only the box in the top width bin splits, in place.
  ObserverConfig cfg = cfg2(5);
  cfg.k_split = 2;
  BoxCollection out = refine(boxes, cfg);
  REQUIRE(out.size() == 5);
  CHECK(out[0][0] == Interval{0.0, 1.0});
  CHECK(out[1][0] == Interval{0.0, 1.2});
  CHECK(out[2][0] == Interval{0.0, 1.5});
  CHECK(out[3][0] == Interval{0.0, 4.5});
  CHECK(out[4][0] == Interval{4.5, 9.0});

  // Budget of two: the lower bin contributes in encounter order.
  cfg.m_max = 6;
  out = refine(boxes, cfg);
  REQUIRE(out.size() == 6);
  CHECK(out[0][0] == Interval{0.0, 0.5});
  CHECK(out[1][0] == Interval{0.5, 1.0});
  CHECK(out[2][0] == Interval{0.0, 1.2});
  CHECK(out[3][0] == Interval{0.0, 1.5});
  CHECK(out[4][0] == Interval{0.0, 4.5});
  CHECK(out[5][0] == Interval{4.5, 9.0});
}

TEST_CASE("refine never splits point boxes") {
  Box point(2);
  point[0] = Interval{1.0, 1.0};
  point[1] = Interval{2.0, 2.0};

  // All-point collection stops growing instead of looping.
  BoxCollection only_points = refine({point, point}, cfg2(16));
  CHECK(only_points.size() == 2);

  // Mixed collection spends the whole budget on the splittable box.
  BoxCollection mixed = refine({point, box2(0.0, 1.0, 0.0, 1.0)}, cfg2(3));
  REQUIRE(mixed.size() == 3);
  CHECK(mixed[0][0] == Interval{1.0, 1.0});
  CHECK(mixed[1][0] == Interval{0.0, 0.5});
  CHECK(mixed[2][0] == Interval{0.5, 1.0});
}

TEST_CASE("refine reaches the cap and preserves the union") {
  Gen gen(20240812);
  for (int trial = 0; trial < 300; ++trial) {
    const int count = gen.pick(1, 12);
    BoxCollection boxes;
    for (int b = 0; b < count; ++b) {
      Box box(3);
      for (std::size_t j = 0; j < 3; ++j) {
        const double lo = gen.unif(-5.0, 5.0);
        box[j] = Interval{lo, lo + gen.unif(0.01, 4.0)};
      }
      boxes.push_back(box);
    }
    ObserverConfig cfg;
    cfg.m_max = gen.pick(1, 40);
    cfg.k_split = gen.pick(1, 25);
    cfg.scaling = {gen.unif(0.1, 4.0), gen.unif(0.1, 4.0), gen.unif(0.1, 4.0)};

    const BoxCollection out = refine(boxes, cfg);
    const std::size_t expect =
        boxes.size() >= static_cast<std::size_t>(cfg.m_max)
            ? boxes.size()
            : static_cast<std::size_t>(cfg.m_max);
    REQUIRE(out.size() == expect);

    for (int s = 0; s < 40; ++s) {
      const Box& src = boxes[static_cast<std::size_t>(gen.pick(0, count - 1))];
      std::vector<double> pt(3);
      for (std::size_t j = 0; j < 3; ++j) pt[j] = gen.unif(src[j].lo, src[j].hi);
      REQUIRE(in_union(out, pt));
    }
  }
}

TEST_CASE("prune drops boxes contained in the bin representative") {
  ObserverConfig cfg = cfg2(8);
  cfg.k_prune = 1;
  const BoxCollection out = prune({box2(0.0, 4.0, 0.0, 4.0), box2(1.0, 2.0, 1.0, 2.0)}, cfg);
  REQUIRE(out.size() == 1);
  CHECK(out[0][0] == Interval{0.0, 4.0});
}

TEST_CASE("prune keeps boxes that only partially overlap") {
  ObserverConfig cfg = cfg2(8);
  cfg.k_prune = 1;
  const BoxCollection out = prune({box2(0.0, 4.0, 0.0, 4.0), box2(1.0, 5.0, 1.0, 2.0)}, cfg);
  CHECK(out.size() == 2);
}

TEST_CASE("prune only compares within a bin") {
  // Nested boxes whose centers land in different bins both survive; the
  // heuristic trades completeness for linear cost.
  const BoxCollection boxes{box2(0.0, 4.0, 0.0, 4.0), box2(1.0, 2.0, 1.0, 2.0)};
  CHECK(prune(boxes, cfg2(8)).size() == 2);  // default k_prune = 20

  // With distant clusters the bins separate them and pruning still fires
  // inside the far cluster.
  const BoxCollection clusters{
      box2(0.0, 1.0, 0.0, 1.0),
      box2(100.0, 101.0, 100.0, 101.0),
      box2(100.2, 100.8, 100.2, 100.8),
  };
  ObserverConfig cfg = cfg2(8);
  cfg.k_prune = 2;
  const BoxCollection out = prune(clusters, cfg);
  REQUIRE(out.size() == 2);
  CHECK(out[0][0] == Interval{0.0, 1.0});
  CHECK(out[1][0] == Interval{100.0, 101.0});
}

TEST_CASE("prune removals are always covered by a survivor") {
  Gen gen(4096);
  for (int trial = 0; trial < 300; ++trial) {
    const int count = gen.pick(2, 15);
    BoxCollection boxes;
    for (int b = 0; b < count; ++b) {
      Box box(2);
      for (std::size_t j = 0; j < 2; ++j) {
        const double lo = gen.unif(-3.0, 3.0);
        box[j] = Interval{lo, lo + gen.unif(0.0, 3.0)};
      }
      boxes.push_back(box);
    }
    ObserverConfig cfg = cfg2(8, {gen.unif(0.1, 2.0), gen.unif(0.1, 2.0)});
    cfg.k_prune = gen.pick(1, 10);

    const BoxCollection out = prune(boxes, cfg);
    REQUIRE(out.size() >= 1);
    REQUIRE(out.size() <= boxes.size());

    // Survivors are a subsequence of the input.
    std::size_t cursor = 0;
    for (const Box& kept : out) {
      while (cursor < boxes.size() &&
             !(boxes[cursor][0] == kept[0] && boxes[cursor][1] == kept[1])) {
        ++cursor;
      }
      REQUIRE(cursor < boxes.size());
      ++cursor;
    }

    // The union is unchanged: anything sampled from an input box is still
    // covered, because removal requires containment in a survivor.
    for (int s = 0; s < 40; ++s) {
      const Box& src = boxes[static_cast<std::size_t>(gen.pick(0, count - 1))];
      std::vector<double> pt(2);
      for (std::size_t j = 0; j < 2; ++j) pt[j] = gen.unif(src[j].lo, src[j].hi);
      REQUIRE(in_union(out, pt));
    }
  }
}

TEST_CASE("resolve_config fills scaling from the initial box") {
  const SystemModel model = vdp_model(VdpParams{});
  const ObserverConfig cfg = resolve_config(model, ObserverConfig{});
  CHECK(cfg.scaling == std::vector<double>{2.0, 2.0});

  ObserverConfig bad;
  bad.m_max = 0;
  CHECK_THROWS_AS((void)resolve_config(model, bad), Error);
  bad = ObserverConfig{};
  bad.scaling = {1.0};
  CHECK_THROWS_AS((void)resolve_config(model, bad), Error);
  bad.scaling = {1.0, -1.0};
  CHECK_THROWS_AS((void)resolve_config(model, bad), Error);
}

TEST_CASE("observer step fails when every box conflicts with the measurement") {
  const SystemModel model = vdp_model(VdpParams{});
  const ObserverConfig cfg = resolve_config(model, ObserverConfig{});
  const BoxCollection start{model.X0};
  try {
    (void)observer_step(start, model, {}, std::vector<double>{100.0}, cfg);
    FAIL("step accepted an impossible measurement");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InconsistentMeasurements);
  }
}

TEST_CASE("prediction trace sees aligned inputs and enclosures") {
  const SystemModel model = vdp_model(VdpParams{});
  ObserverConfig cfg = resolve_config(model, ObserverConfig{});
  cfg.m_max = 4;

  std::size_t calls = 0;
  PredictTrace trace = [&](const BoxCollection& inputs, const BoxCollection& predictions) {
    ++calls;
    REQUIRE(inputs.size() == 4);
    REQUIRE(predictions.size() == 4);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      // The center image always lies in the mean-value enclosure.
      const std::vector<double> fc =
          model.f(midpoint(inputs[i]), {}, midpoint(model.W));
      CHECK(contains(predictions[i], fc));
    }
  };
  (void)observer_step({model.X0}, model, {}, std::vector<double>{0.1}, cfg, trace);
  CHECK(calls == 1);
}

TEST_CASE("observer run tracks the true state") {
  Gen gen(71);
  // Van der Pol, rigorous rounding: the true state must stay inside the
  // union at every step.
  {
    const SystemModel model = vdp_model(VdpParams{});
    ObserverConfig cfg;
    cfg.m_max = 8;
    cfg.rounding = Rounding::Rigorous;
    for (std::uint64_t seed : {11ULL, 12ULL, 13ULL}) {
      std::vector<double> x0{gen.unif(-1.0, 1.0), gen.unif(-1.0, 1.0)};
      const TruthRun truth = simulate_truth(model, x0, {}, 30, seed);
      const auto sets = run(model, cfg, truth.inputs, truth.measurements);
      REQUIRE(sets.size() == truth.states.size());
      for (std::size_t k = 0; k < sets.size(); ++k) {
        REQUIRE(!sets[k].empty());
        REQUIRE(sets[k].size() <= 8);
        REQUIRE(in_union(sets[k], truth.states[k]));
      }
    }
  }
  // Tank cascade with its state domain active.
  {
    TankParams params;
    params.n = 5;
    const SystemModel model = tank_model(params);
    ObserverConfig cfg;
    cfg.m_max = 6;
    cfg.rounding = Rounding::Rigorous;
    const TruthRun truth = simulate_truth(model, {}, {}, 15, 99);
    const auto sets = run(model, cfg, truth.inputs, truth.measurements);
    REQUIRE(sets.size() == 16);
    for (std::size_t k = 0; k < sets.size(); ++k) {
      REQUIRE(in_union(sets[k], truth.states[k]));
    }
  }
}

TEST_CASE("incremental observer matches the batch run") {
  const SystemModel model = vdp_model(VdpParams{});
  ObserverConfig cfg;
  cfg.m_max = 5;
  const TruthRun truth = simulate_truth(model, {}, {}, 20, 7);

  const auto batch = run(model, cfg, truth.inputs, truth.measurements);

  DdObserver obs(model, cfg);
  CHECK(!obs.initialized());
  CHECK_THROWS_AS(obs.step({}, truth.measurements[1]), Error);
  CHECK_THROWS_AS((void)obs.current_step(), Error);
  CHECK_THROWS_AS((void)obs.collection(), Error);

  obs.init(truth.measurements[0]);
  CHECK(obs.initialized());
  CHECK(obs.current_step() == 0);
  REQUIRE(same_collection(obs.collection(), batch[0]));
  for (std::size_t k = 0; k + 1 < truth.measurements.size(); ++k) {
    obs.step(truth.inputs[k], truth.measurements[k + 1]);
    CHECK(obs.current_step() == static_cast<int>(k) + 1);
    REQUIRE(same_collection(obs.collection(), batch[k + 1]));
  }
}

TEST_CASE("single-box runs match the endpoint-array reference") {
  // With a budget of one box, refinement and pruning are identities and the
  // observer must reproduce the plain interval observer bit for bit.
  ScopedRounding mode(Rounding::Fast);

  auto compare = [](const SystemModel& model, const TruthRun& truth) {
    ObserverConfig cfg;
    cfg.m_max = 1;
    const auto sets = run(model, cfg, truth.inputs, truth.measurements);

    refobs::SingleSetReference ref(model, cfg.i_max);
    REQUIRE(ref.init(truth.measurements[0]));
    REQUIRE(sets[0].size() == 1);
    for (std::size_t k = 0; k < sets.size(); ++k) {
      if (k > 0) {
        REQUIRE(ref.step(truth.inputs[k - 1], truth.measurements[k]));
      }
      REQUIRE(sets[k].size() == 1);
      for (std::size_t j = 0; j < model.n; ++j) {
        REQUIRE(sets[k][0][j].lo == ref.lo()[j]);
        REQUIRE(sets[k][0][j].hi == ref.hi()[j]);
      }
    }
  };

  const SystemModel vdp = vdp_model(VdpParams{});
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    compare(vdp, simulate_truth(vdp, {}, {}, 40, seed));
  }

  TankParams params;
  params.n = 5;
  const SystemModel tank = tank_model(params);
  for (std::uint64_t seed : {1ULL, 2ULL}) {
    compare(tank, simulate_truth(tank, {}, {}, 20, seed));
  }
}
