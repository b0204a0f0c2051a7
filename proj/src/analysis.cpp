#include "ryd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ryd {

// -------------------------------------------------------------- segmentation

PeriodSegmentation classify_periods(const TrajectoryRecord& record, double threshold) {
  if (record.sample_times.empty())
    throw std::invalid_argument("classify_periods: record has no samples");
  if (!(threshold > 0.0) || !(threshold < 1.0))
    throw std::invalid_argument("classify_periods: threshold must be in (0, 1)");
  const int n_atoms = record.n_atoms();
  const std::size_t n_samples = record.n_samples();
  if (record.r_pop.size() != n_samples * static_cast<std::size_t>(n_atoms))
    throw std::invalid_argument("classify_periods: malformed population table");

  PeriodSegmentation seg;
  seg.threshold = threshold;
  seg.sample_spacing = record.integrator.sample_interval;
  seg.sample_times = record.sample_times;
  seg.labels.assign(static_cast<std::size_t>(n_atoms),
                    std::vector<std::uint8_t>(n_samples, 0));
  seg.intervals.resize(static_cast<std::size_t>(n_atoms));
  for (int a = 0; a < n_atoms; ++a) {
    auto& lab = seg.labels[static_cast<std::size_t>(a)];
    for (std::size_t k = 0; k < n_samples; ++k)
      lab[k] = record.r_at(k, a) > threshold ? 1 : 0;
    auto& ivs = seg.intervals[static_cast<std::size_t>(a)];
    std::size_t run_start = 0;
    for (std::size_t k = 1; k <= n_samples; ++k) {
      if (k < n_samples && lab[k] == lab[run_start]) continue;
      PeriodInterval iv;
      iv.start = record.sample_times[run_start];
      // Each sample owns [t, t + spacing), so the run ends one spacing after
      // its last sample.
      iv.end = record.sample_times[k - 1] + seg.sample_spacing;
      iv.label = lab[run_start] ? PeriodLabel::dark : PeriodLabel::bright;
      ivs.push_back(iv);
      run_start = k;
    }
  }
  return seg;
}

// ---------------------------------------------------------------- rate stats

RatePair estimate_single_rates(const PeriodSegmentation& seg, int atom) {
  const int n_atoms = seg.n_atoms();
  if (atom != kAllAtoms && (atom < 0 || atom >= n_atoms))
    throw std::invalid_argument("estimate_single_rates: atom index out of range");
  double time_b = 0.0, time_d = 0.0;
  std::int64_t exits_b = 0, exits_d = 0;
  for (int a = 0; a < n_atoms; ++a) {
    if (atom != kAllAtoms && a != atom) continue;
    const auto& ivs = seg.intervals[static_cast<std::size_t>(a)];
    // The final interval is cut off by the end of the record: no exit observed.
    for (std::size_t k = 0; k + 1 < ivs.size(); ++k) {
      if (ivs[k].label == PeriodLabel::bright) {
        time_b += ivs[k].length();
        ++exits_b;
      } else {
        time_d += ivs[k].length();
        ++exits_d;
      }
    }
  }
  if (exits_b == 0 || exits_d == 0)
    throw std::invalid_argument(
        "estimate_single_rates: need a completed interval of each label");
  RatePair out;
  out.bright_to_dark.exits = exits_b;
  out.bright_to_dark.time_in_label = time_b;
  out.bright_to_dark.rate = static_cast<double>(exits_b) / time_b;
  out.bright_to_dark.stderr_ =
      out.bright_to_dark.rate / std::sqrt(static_cast<double>(exits_b));
  out.dark_to_bright.exits = exits_d;
  out.dark_to_bright.time_in_label = time_d;
  out.dark_to_bright.rate = static_cast<double>(exits_d) / time_d;
  out.dark_to_bright.stderr_ =
      out.dark_to_bright.rate / std::sqrt(static_cast<double>(exits_d));
  return out;
}

// ----------------------------------------------------------- dwell histogram

DwellHistogram dwell_histogram_from_lengths(const std::vector<double>& dwells,
                                            PeriodLabel label, int n_bins) {
  if (n_bins < 1)
    throw std::invalid_argument("dwell_histogram_from_lengths: n_bins must be >= 1");
  if (dwells.empty())
    throw std::invalid_argument("dwell_histogram_from_lengths: no completed interval");

  DwellHistogram h;
  h.label = label;
  h.n_intervals = static_cast<std::int64_t>(dwells.size());
  const double top = *std::max_element(dwells.begin(), dwells.end()) *
                     (1.0 + 1e-9);
  const double width = top / n_bins;
  h.edges.resize(static_cast<std::size_t>(n_bins) + 1);
  for (int k = 0; k <= n_bins; ++k)
    h.edges[static_cast<std::size_t>(k)] = width * k;
  h.counts.assign(static_cast<std::size_t>(n_bins), 0);
  double total = 0.0;
  for (double d : dwells) {
    const auto bin = std::min<std::size_t>(static_cast<std::size_t>(d / width),
                                           static_cast<std::size_t>(n_bins) - 1);
    ++h.counts[bin];
    total += d;
  }

  if (h.n_intervals < 50) return h;  // histogram only, no fit
  h.fit_available = true;
  h.rate = static_cast<double>(h.n_intervals) / total;
  h.rate_stderr = h.rate / std::sqrt(static_cast<double>(h.n_intervals));
  // Pearson statistic of the histogram against the fitted exponential.
  double chi2 = 0.0;
  int used = 0;
  for (int k = 0; k < n_bins; ++k) {
    const double lo = h.edges[static_cast<std::size_t>(k)];
    const double hi = h.edges[static_cast<std::size_t>(k) + 1];
    const double expected = static_cast<double>(h.n_intervals) *
                            (std::exp(-h.rate * lo) - std::exp(-h.rate * hi));
    if (expected < 1.0) continue;
    const double diff = static_cast<double>(h.counts[static_cast<std::size_t>(k)]) -
                        expected;
    chi2 += diff * diff / expected;
    ++used;
  }
  if (used > 2) {
    h.chi_square_per_dof = chi2 / static_cast<double>(used - 2);
    h.poor_fit = h.chi_square_per_dof > 3.0;
  }
  return h;
}

DwellHistogram dwell_time_histogram(const PeriodSegmentation& seg, PeriodLabel label,
                                    int n_bins) {
  std::vector<double> dwells;
  for (const auto& ivs : seg.intervals)
    for (std::size_t k = 0; k + 1 < ivs.size(); ++k)
      if (ivs[k].label == label) dwells.push_back(ivs[k].length());
  return dwell_histogram_from_lengths(dwells, label, n_bins);
}

// --------------------------------------------------------------- pattern rates

namespace {

std::vector<std::uint8_t> parse_pattern(const std::string& s) {
  std::vector<std::uint8_t> out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == 'B' || c == 'b')
      out.push_back(0);
    else if (c == 'D' || c == 'd')
      out.push_back(1);
    else
      throw std::invalid_argument("pattern labels must be 'B' or 'D': " + s);
  }
  return out;
}

}  // namespace

std::vector<PatternStat> estimate_pattern_rates(
    const PeriodSegmentation& seg, const LatticeSpec& lattice,
    const std::vector<PatternQuery>& patterns) {
  lattice.validate();
  const int n_atoms = seg.n_atoms();
  if (n_atoms != lattice.n_atoms)
    throw std::invalid_argument("estimate_pattern_rates: lattice/segmentation mismatch");
  const std::size_t n_samples = seg.sample_times.size();

  std::vector<PatternStat> out;
  for (const auto& q : patterns) {
    const auto src = parse_pattern(q.source);
    const auto tgt = parse_pattern(q.target);
    const int w = static_cast<int>(src.size());
    if (w == 0 || src.size() != tgt.size())
      throw std::invalid_argument("estimate_pattern_rates: pattern length mismatch");
    if (w > n_atoms)
      throw std::invalid_argument("estimate_pattern_rates: pattern wider than chain");
    int flips = 0;
    for (int j = 0; j < w; ++j) flips += src[static_cast<std::size_t>(j)] !=
                                         tgt[static_cast<std::size_t>(j)];
    if (flips != 1)
      throw std::invalid_argument(
          "estimate_pattern_rates: source and target must differ at exactly one site");

    const bool periodic = lattice.boundary == Boundary::periodic;
    const int placements = periodic ? n_atoms : n_atoms - w + 1;
    PatternStat st;
    st.source = q.source;
    st.target = q.target;
    for (std::size_t k = 0; k + 1 < n_samples; ++k) {
      for (int s = 0; s < placements; ++s) {
        bool at_risk = true;
        for (int j = 0; j < w && at_risk; ++j) {
          const int a = periodic ? (s + j) % n_atoms : s + j;
          at_risk = seg.labels[static_cast<std::size_t>(a)][k] ==
                    src[static_cast<std::size_t>(j)];
        }
        if (!at_risk) continue;
        st.time_at_risk += seg.sample_spacing;
        bool hit = true;
        for (int j = 0; j < w && hit; ++j) {
          const int a = periodic ? (s + j) % n_atoms : s + j;
          hit = seg.labels[static_cast<std::size_t>(a)][k + 1] ==
                tgt[static_cast<std::size_t>(j)];
        }
        if (hit) ++st.events;
      }
    }
    if (st.time_at_risk > 0.0) {
      st.rate = static_cast<double>(st.events) / st.time_at_risk;
      st.rate_stderr = std::sqrt(static_cast<double>(st.events)) / st.time_at_risk;
    }
    out.push_back(std::move(st));
  }
  return out;
}

// ------------------------------------------------------------ survival curves

SurvivalCurve empirical_survival(const TrajectoryRecord& record) {
  if (record.emissions.size() < 100)
    throw std::invalid_argument("empirical_survival: needs at least 100 emissions");
  std::vector<double> d;
  d.reserve(record.emissions.size() - 1);
  for (std::size_t k = 1; k < record.emissions.size(); ++k)
    d.push_back(record.emissions[k].time - record.emissions[k - 1].time);
  std::sort(d.begin(), d.end());
  const auto n = static_cast<std::int64_t>(d.size());
  SurvivalCurve c;
  c.n_intervals = n;
  c.t.reserve(d.size() + 1);
  c.p0.reserve(d.size() + 1);
  c.t.push_back(0.0);
  c.p0.push_back(1.0);
  for (std::int64_t k = 0; k < n; ++k) {
    c.t.push_back(d[static_cast<std::size_t>(k)]);
    c.p0.push_back(static_cast<double>(n - 1 - k) / static_cast<double>(n));
  }
  return c;
}

double ks_distance(const SurvivalCurve& empirical,
                   const std::function<double(double)>& survival) {
  const std::int64_t n = empirical.n_intervals;
  if (n < 1) throw std::invalid_argument("ks_distance: empty empirical curve");
  double dist = 0.0;
  for (std::int64_t i = 1; i <= n; ++i) {
    const double f = 1.0 - survival(empirical.t[static_cast<std::size_t>(i)]);
    const double lo = static_cast<double>(i - 1) / static_cast<double>(n);
    const double hi = static_cast<double>(i) / static_cast<double>(n);
    dist = std::max({dist, std::abs(f - lo), std::abs(f - hi)});
  }
  return dist;
}

TailFit fit_exponential_tail(const std::vector<double>& t, const std::vector<double>& p,
                             double t_min) {
  if (t.size() != p.size())
    throw std::invalid_argument("fit_exponential_tail: grid length mismatch");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::int64_t n = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_min || !(p[k] > 0.0)) continue;
    const double y = std::log(p[k]);
    sx += t[k];
    sy += y;
    sxx += t[k] * t[k];
    sxy += t[k] * y;
    ++n;
  }
  if (n < 3)
    throw std::invalid_argument("fit_exponential_tail: needs >= 3 usable points");
  const double denom = static_cast<double>(n) * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0))
    throw std::invalid_argument("fit_exponential_tail: degenerate time grid");
  const double slope = (static_cast<double>(n) * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / static_cast<double>(n);
  return {-slope, std::exp(intercept)};
}

// ---------------------------------------------------------------- utilities

TrajectoryRecord concat_records(const TrajectoryRecord& a, const TrajectoryRecord& b) {
  if (a.lattice.n_atoms != b.lattice.n_atoms)
    throw std::invalid_argument("concat_records: atom count mismatch");
  if (a.sample_times.empty() || b.sample_times.empty())
    throw std::invalid_argument("concat_records: empty record");
  const double da = a.integrator.sample_interval;
  const double db = b.integrator.sample_interval;
  if (std::abs(da - db) > 1e-12 * std::max(da, db))
    throw std::invalid_argument("concat_records: sample spacing mismatch");
  const double seam = a.sample_times.back();
  if (std::abs(b.sample_times.front() - seam) > 1e-9 * std::max(1.0, std::abs(seam)))
    throw std::invalid_argument("concat_records: records do not abut");
  const int n_atoms = a.lattice.n_atoms;
  const std::size_t last = a.n_samples() - 1;
  for (int i = 0; i < n_atoms; ++i)
    if (std::abs(a.r_at(last, i) - b.r_at(0, i)) > 1e-12)
      throw std::invalid_argument("concat_records: populations disagree at the seam");

  TrajectoryRecord out = a;
  out.sample_times.insert(out.sample_times.end(), b.sample_times.begin() + 1,
                          b.sample_times.end());
  out.r_pop.insert(out.r_pop.end(),
                   b.r_pop.begin() + static_cast<std::ptrdiff_t>(n_atoms),
                   b.r_pop.end());
  for (const auto& e : b.emissions) {
    if (e.time < seam - 1e-9)
      throw std::invalid_argument("concat_records: continuation emission before seam");
    out.emissions.push_back(e);
  }
  out.duration = out.sample_times.back() - out.sample_times.front();
  out.max_norm_increase = std::max(a.max_norm_increase, b.max_norm_increase);
  out.max_jump_norm_mismatch =
      std::max(a.max_jump_norm_mismatch, b.max_jump_norm_mismatch);
  return out;
}

}  // namespace ryd
