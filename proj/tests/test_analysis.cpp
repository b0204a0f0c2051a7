#include <doctest.h>

#include <cmath>
#include <vector>

#include "ryd/analysis.hpp"
#include "ryd/trajectory.hpp"

using namespace ryd;

namespace {

// Hand-built record: r_rows[sample][atom] shelved populations on a unit grid.
TrajectoryRecord synth_record(int n_atoms, double spacing,
                              const std::vector<std::vector<double>>& r_rows) {
  TrajectoryRecord rec;
  rec.params.omega_e = 0.2;
  rec.lattice.n_atoms = n_atoms;
  rec.lattice.cutoff = n_atoms >= 2 ? 1 : 0;
  rec.integrator.sample_interval = spacing;
  for (std::size_t k = 0; k < r_rows.size(); ++k) {
    rec.sample_times.push_back(spacing * static_cast<double>(k));
    for (double v : r_rows[k]) rec.r_pop.push_back(v);
  }
  rec.duration = rec.sample_times.empty() ? 0.0 : rec.sample_times.back();
  return rec;
}

TrajectoryRecord bright_dark_bright() {
  // labels B B D D D B at threshold 0.98
  return synth_record(1, 1.0, {{0.5}, {0.5}, {0.99}, {0.99}, {0.99}, {0.5}});
}

}  // namespace

// -------------------------------------------------------------- segmentation

TEST_CASE("threshold segmentation tiles the record") {
  const auto seg = classify_periods(bright_dark_bright(), 0.98);
  REQUIRE(seg.n_atoms() == 1);
  CHECK(seg.threshold == 0.98);
  CHECK(seg.sample_spacing == 1.0);
  const std::vector<std::uint8_t> expected{0, 0, 1, 1, 1, 0};
  CHECK(seg.labels[0] == expected);

  const auto& ivs = seg.intervals[0];
  REQUIRE(ivs.size() == 3);
  CHECK(ivs[0].label == PeriodLabel::bright);
  CHECK(ivs[0].start == 0.0);
  CHECK(ivs[0].end == 2.0);
  CHECK(ivs[1].label == PeriodLabel::dark);
  CHECK(ivs[1].start == 2.0);
  CHECK(ivs[1].end == 5.0);
  CHECK(ivs[2].label == PeriodLabel::bright);
  CHECK(ivs[2].start == 5.0);
  // each sample owns one spacing, so the tiling ends past the last sample
  CHECK(ivs[2].end == 6.0);
  CHECK(ivs[1].length() == 3.0);
}

TEST_CASE("segmentation input validation") {
  CHECK_THROWS_AS(classify_periods(TrajectoryRecord{}, 0.98), std::invalid_argument);
  CHECK_THROWS_AS(classify_periods(bright_dark_bright(), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(classify_periods(bright_dark_bright(), 0.0), std::invalid_argument);
  auto bad = bright_dark_bright();
  bad.r_pop.pop_back();
  CHECK_THROWS_AS(classify_periods(bad, 0.98), std::invalid_argument);
}

// ---------------------------------------------------------------- rate stats

TEST_CASE("exit rates use completed intervals only") {
  const auto seg = classify_periods(bright_dark_bright(), 0.98);
  const auto rates = estimate_single_rates(seg);
  // completed: bright [0,2) and dark [2,5); the final bright run is truncated
  CHECK(rates.bright_to_dark.exits == 1);
  CHECK(rates.bright_to_dark.time_in_label == 2.0);
  CHECK(rates.bright_to_dark.rate == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rates.bright_to_dark.stderr_ == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rates.dark_to_bright.exits == 1);
  CHECK(rates.dark_to_bright.time_in_label == 3.0);
  CHECK(rates.dark_to_bright.rate == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("rate estimation pools atoms and validates indices") {
  // atom 0 alternates, atom 1 never shelves
  const auto rec = synth_record(2, 1.0,
                                {{0.5, 0.1},
                                 {0.99, 0.1},
                                 {0.99, 0.1},
                                 {0.5, 0.1},
                                 {0.99, 0.1},
                                 {0.5, 0.1}});
  const auto seg = classify_periods(rec, 0.98);
  const auto pooled = estimate_single_rates(seg, kAllAtoms);
  // atom 0 completed: B[0,1) D[1,3) B[3,4) D[4,5); atom 1 adds nothing
  CHECK(pooled.bright_to_dark.exits == 2);
  CHECK(pooled.bright_to_dark.time_in_label == 2.0);
  CHECK(pooled.dark_to_bright.exits == 2);
  CHECK(pooled.dark_to_bright.time_in_label == 3.0);

  const auto single = estimate_single_rates(seg, 0);
  CHECK(single.bright_to_dark.exits == pooled.bright_to_dark.exits);
  CHECK_THROWS_AS(estimate_single_rates(seg, 1), std::invalid_argument);  // all bright
  CHECK_THROWS_AS(estimate_single_rates(seg, 2), std::invalid_argument);  // no such atom
}

// ----------------------------------------------------------- dwell histogram

TEST_CASE("dwell histogram from a segmentation") {
  const auto seg = classify_periods(bright_dark_bright(), 0.98);
  const auto h = dwell_time_histogram(seg, PeriodLabel::dark, 4);
  CHECK(h.label == PeriodLabel::dark);
  CHECK(h.n_intervals == 1);
  REQUIRE(h.edges.size() == 5);
  CHECK(h.edges.front() == 0.0);
  CHECK(h.edges.back() == doctest::Approx(3.0).epsilon(1e-8));
  std::int64_t total = 0;
  for (auto c : h.counts) total += c;
  CHECK(total == 1);
  CHECK(!h.fit_available);

  // a two-sample record has no completed dark interval at all
  const auto tiny = classify_periods(synth_record(1, 1.0, {{0.5}, {0.99}}), 0.98);
  CHECK_THROWS_AS(dwell_time_histogram(tiny, PeriodLabel::dark, 4),
                  std::invalid_argument);
}

TEST_CASE("dwell fit flags a clearly non-exponential sample") {
  const std::vector<double> equal(50, 2.0);
  const auto h = dwell_histogram_from_lengths(equal, PeriodLabel::bright, 8);
  CHECK(h.fit_available);
  CHECK(h.rate == doctest::Approx(0.5).epsilon(1e-15));  // 1 / mean
  CHECK(h.poor_fit);
}

TEST_CASE("dwell fit recovers the rate from exponential quantiles") {
  const int n = 200;
  const double rate = 0.3;
  std::vector<double> dwells;
  for (int k = 0; k < n; ++k) {
    const double u = (static_cast<double>(k) + 0.5) / n;
    dwells.push_back(-std::log1p(-u) / rate);
  }
  const auto h = dwell_histogram_from_lengths(dwells, PeriodLabel::dark, 10);
  CHECK(h.fit_available);
  CHECK(std::abs(h.rate - rate) < 0.005);
  CHECK(h.rate_stderr == doctest::Approx(h.rate / std::sqrt(200.0)).epsilon(1e-12));
  CHECK(!h.poor_fit);
}

TEST_CASE("dwell histogram edge cases") {
  CHECK_THROWS_AS(dwell_histogram_from_lengths({}, PeriodLabel::dark, 4),
                  std::invalid_argument);
  CHECK_THROWS_AS(dwell_histogram_from_lengths({1.0}, PeriodLabel::dark, 0),
                  std::invalid_argument);
  const auto h = dwell_histogram_from_lengths({1.0, 2.0}, PeriodLabel::dark, 2);
  CHECK(h.n_intervals == 2);
  CHECK(!h.fit_available);  // below the 50-interval floor
}

// --------------------------------------------------------------- pattern rates

namespace {

// 3-site ring over 4 samples: site 0 stays dark, site 1 shelves at sample 2.
PeriodSegmentation ring_fixture(LatticeSpec& lat) {
  lat.n_atoms = 3;
  lat.cutoff = 1;
  const auto rec = synth_record(3, 1.0,
                                {{0.99, 0.2, 0.2},
                                 {0.99, 0.2, 0.2},
                                 {0.99, 0.99, 0.2},
                                 {0.99, 0.99, 0.2}});
  return classify_periods(rec, 0.98);
}

}  // namespace

TEST_CASE("pattern transition counting on a ring") {
  LatticeSpec lat;
  const auto seg = ring_fixture(lat);
  const std::vector<PatternQuery> queries = {
      {"DBB", "DDB"}, {"DDB", "DBB"}, {"BDD", "BDB"}};
  const auto stats = estimate_pattern_rates(seg, lat, queries);
  REQUIRE(stats.size() == 3);

  // DBB matched at samples 0 and 1 (window at site 0); the shelving of site 1
  // between samples 1 and 2 is the single counted event.
  CHECK(stats[0].events == 1);
  CHECK(stats[0].time_at_risk == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(stats[0].rate == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(stats[0].rate_stderr == doctest::Approx(0.5).epsilon(1e-15));

  // DDB holds at sample 2 only (sample 3 has no successor) and never decays.
  CHECK(stats[1].events == 0);
  CHECK(stats[1].time_at_risk == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(stats[1].rate == 0.0);

  // BDD matches only through the periodic wrap (window at site 2).
  CHECK(stats[2].events == 0);
  CHECK(stats[2].time_at_risk == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("open chains slide the window without wrapping") {
  LatticeSpec lat;
  lat.n_atoms = 4;
  lat.boundary = Boundary::open;
  lat.cutoff = 1;
  const auto rec = synth_record(4, 1.0,
                                {{0.99, 0.2, 0.2, 0.2}, {0.99, 0.2, 0.2, 0.2}});
  const auto seg = classify_periods(rec, 0.98);
  const auto stats = estimate_pattern_rates(seg, lat, {{"DBB", "DDB"}});
  REQUIRE(stats.size() == 1);
  // only the window at site 0 matches; a wrapped placement would add more
  CHECK(stats[0].time_at_risk == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(stats[0].events == 0);
}

TEST_CASE("patterns that never occur accrue no risk time") {
  LatticeSpec lat;
  lat.n_atoms = 3;
  lat.cutoff = 1;
  const auto rec = synth_record(3, 1.0, {{0.2, 0.2, 0.2}, {0.2, 0.2, 0.2}});
  const auto seg = classify_periods(rec, 0.98);
  const auto stats = estimate_pattern_rates(seg, lat, {{"DBB", "DDB"}});
  CHECK(stats[0].time_at_risk == 0.0);
  CHECK(stats[0].events == 0);
  CHECK(stats[0].rate == 0.0);
}

TEST_CASE("pattern query validation") {
  LatticeSpec lat;
  const auto seg = ring_fixture(lat);
  auto run = [&](const char* s, const char* t) {
    return estimate_pattern_rates(seg, lat, {{s, t}});
  };
  CHECK_THROWS_AS(run("DXB", "DDB"), std::invalid_argument);  // bad letter
  CHECK_THROWS_AS(run("DB", "DDB"), std::invalid_argument);   // length mismatch
  CHECK_THROWS_AS(run("DBB", "DDD"), std::invalid_argument);  // two flips
  CHECK_THROWS_AS(run("DBB", "DBB"), std::invalid_argument);  // zero flips
  CHECK_THROWS_AS(run("DBBB", "DDBB"), std::invalid_argument);  // wider than chain
  LatticeSpec wrong;
  wrong.n_atoms = 2;
  wrong.cutoff = 1;
  CHECK_THROWS_AS(estimate_pattern_rates(seg, wrong, {{"DB", "DD"}}),
                  std::invalid_argument);
}

// ------------------------------------------------------------ survival curves

namespace {

// Record whose inter-emission intervals are exact exponential quantiles.
TrajectoryRecord quantile_record(int n_intervals, double rate) {
  TrajectoryRecord rec;
  rec.lattice.n_atoms = 1;
  rec.integrator.sample_interval = 1.0;
  rec.sample_times = {0.0};
  rec.r_pop = {0.0};
  double t = 0.5;
  rec.emissions.push_back({t, 0, JumpChannel::e_decay, 0.5});
  for (int k = 0; k < n_intervals; ++k) {
    const double u = (static_cast<double>(k) + 0.5) / n_intervals;
    t += -std::log1p(-u) / rate;
    rec.emissions.push_back({t, 0, JumpChannel::e_decay, 0.5});
  }
  return rec;
}

}  // namespace

TEST_CASE("empirical survival of exponential intervals") {
  const double rate = 0.3;
  const auto rec = quantile_record(400, rate);
  const auto curve = empirical_survival(rec);
  REQUIRE(curve.n_intervals == 400);
  REQUIRE(curve.t.size() == 401);
  CHECK(curve.t[0] == 0.0);
  CHECK(curve.p0[0] == 1.0);
  CHECK(curve.p0.back() == 0.0);
  for (std::size_t k = 1; k < curve.t.size(); ++k) {
    CHECK(curve.t[k] >= curve.t[k - 1]);
    CHECK(curve.p0[k] <= curve.p0[k - 1]);
  }
  const double close = ks_distance(
      curve, [&](double t) { return std::exp(-rate * t); });
  CHECK(close < 0.01);
  const double far = ks_distance(
      curve, [&](double t) { return std::exp(-1.5 * rate * t); });
  CHECK(far > 0.1);
}

TEST_CASE("survival estimation needs enough emissions") {
  CHECK_THROWS_AS(empirical_survival(quantile_record(50, 0.3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(ks_distance(SurvivalCurve{}, [](double) { return 1.0; }),
                  std::invalid_argument);
}

TEST_CASE("tail fit recovers exact exponential data") {
  std::vector<double> t, p;
  for (int k = 0; k <= 300; ++k) {
    t.push_back(static_cast<double>(k));
    p.push_back(0.3 * std::exp(-0.02 * static_cast<double>(k)));
  }
  const auto fit = fit_exponential_tail(t, p, 50.0);
  CHECK(fit.rate == doctest::Approx(0.02).epsilon(1e-10));
  CHECK(fit.amplitude == doctest::Approx(0.3).epsilon(1e-10));

  CHECK_THROWS_AS(fit_exponential_tail({1.0, 2.0}, {0.5, 0.4}, 0.0),
                  std::invalid_argument);  // too few points
  CHECK_THROWS_AS(fit_exponential_tail({5.0, 5.0, 5.0}, {0.5, 0.4, 0.3}, 0.0),
                  std::invalid_argument);  // degenerate grid
  CHECK_THROWS_AS(fit_exponential_tail({1.0}, {0.5, 0.4}, 0.0),
                  std::invalid_argument);  // length mismatch
}

// ---------------------------------------------------------------- utilities

TEST_CASE("splitting and rejoining a trajectory is lossless") {
  SystemParams p;
  p.omega_e = 0.2;
  p.omega_r = 0.005;
  p.v_nn = 0.1;
  LatticeSpec lat;
  lat.n_atoms = 1;
  lat.cutoff = 0;
  IntegratorOptions opts;
  opts.sample_interval = 1.0;
  const auto full = run_trajectory(p, lat, 100.0, 100, 0, opts);
  REQUIRE(full.n_samples() == 101);

  const double seam = full.sample_times[50];
  TrajectoryRecord a = full, b = full;
  a.sample_times.assign(full.sample_times.begin(), full.sample_times.begin() + 51);
  a.r_pop.assign(full.r_pop.begin(), full.r_pop.begin() + 51);
  a.duration = seam;
  a.emissions.clear();
  b.sample_times.assign(full.sample_times.begin() + 50, full.sample_times.end());
  b.r_pop.assign(full.r_pop.begin() + 50, full.r_pop.end());
  b.duration = full.duration - seam;
  b.emissions.clear();
  for (const auto& e : full.emissions)
    (e.time < seam ? a : b).emissions.push_back(e);

  const auto joined = concat_records(a, b);
  CHECK(joined.sample_times == full.sample_times);
  CHECK(joined.r_pop == full.r_pop);
  CHECK(joined.duration == full.duration);
  REQUIRE(joined.emissions.size() == full.emissions.size());
  for (std::size_t k = 0; k < full.emissions.size(); ++k) {
    CHECK(joined.emissions[k].time == full.emissions[k].time);
    CHECK(joined.emissions[k].atom == full.emissions[k].atom);
    CHECK(joined.emissions[k].channel == full.emissions[k].channel);
    CHECK(joined.emissions[k].norm_before == full.emissions[k].norm_before);
  }

  // the pooled estimators cannot tell the joined record from the original
  const auto seg_full = classify_periods(full, 0.9);
  const auto seg_join = classify_periods(joined, 0.9);
  CHECK(seg_full.labels == seg_join.labels);

  SUBCASE("mismatched continuations are rejected") {
    auto b2 = b;
    b2.integrator.sample_interval = 2.0;
    CHECK_THROWS_AS(concat_records(a, b2), std::invalid_argument);
    auto b3 = b;
    for (auto& t : b3.sample_times) t += 1.0;
    CHECK_THROWS_AS(concat_records(a, b3), std::invalid_argument);
    auto b4 = b;
    b4.r_pop[0] += 0.5;
    CHECK_THROWS_AS(concat_records(a, b4), std::invalid_argument);
    auto b5 = b;
    b5.emissions.insert(b5.emissions.begin(), {10.0, 0, JumpChannel::e_decay, 0.5});
    CHECK_THROWS_AS(concat_records(a, b5), std::invalid_argument);
  }
}
