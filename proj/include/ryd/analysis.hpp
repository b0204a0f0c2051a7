#pragma once
// Bright/dark statistics extracted from trajectory records: threshold
// segmentation of per-atom shelved population, dwell-time distributions,
// empirical transition rates, local-pattern transition rates along the chain,
// and empirical survival curves of inter-emission intervals.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ryd/trajectory.hpp"

namespace ryd {

// -------------------------------------------------------------- segmentation

enum class PeriodLabel : std::uint8_t { bright = 0, dark = 1 };

struct PeriodInterval {
  double start = 0.0;
  double end = 0.0;  // half-open [start, end)
  PeriodLabel label = PeriodLabel::bright;
  double length() const { return end - start; }
};

// Per-atom alternating bright/dark intervals on the record's sample grid.
// Each sample owns [t, t + spacing), so the intervals tile
// [first sample, last sample + spacing).
struct PeriodSegmentation {
  double threshold = 0.98;     // shelved-population cut defining "dark"
  double sample_spacing = 0.0;
  std::vector<double> sample_times;
  std::vector<std::vector<PeriodInterval>> intervals;      // [atom]
  std::vector<std::vector<std::uint8_t>> labels;           // [atom][sample], 1 = dark
  int n_atoms() const { return static_cast<int>(intervals.size()); }
};

// Labels atom i dark at sample t iff its shelved population exceeds the
// threshold there, then merges consecutive equal labels into intervals.
PeriodSegmentation classify_periods(const TrajectoryRecord& record,
                                    double threshold = 0.98);

// ---------------------------------------------------------------- rate stats

struct RateEstimate {
  double rate = 0.0;
  double stderr_ = 0.0;   // rate / sqrt(exits)
  std::int64_t exits = 0;
  double time_in_label = 0.0;
};

struct RatePair {
  RateEstimate bright_to_dark;
  RateEstimate dark_to_bright;
};

inline constexpr int kAllAtoms = -1;

// Exit rate = exits / time-in-label over completed intervals; the final
// (right-truncated) interval of each atom carries no exit and is excluded.
// Pass an atom index to restrict the estimate, kAllAtoms to pool.
RatePair estimate_single_rates(const PeriodSegmentation& seg, int atom = kAllAtoms);

// ----------------------------------------------------------- dwell histogram

struct DwellHistogram {
  PeriodLabel label = PeriodLabel::dark;
  std::vector<double> edges;          // n_bins + 1, spanning [0, max dwell]
  std::vector<std::int64_t> counts;
  std::int64_t n_intervals = 0;
  bool fit_available = false;         // needs >= 50 completed intervals
  double rate = 0.0;                  // maximum-likelihood exponential rate
  double rate_stderr = 0.0;
  double chi_square_per_dof = 0.0;    // fitted exponential vs histogram
  bool poor_fit = false;              // chi_square_per_dof > 3
};

// Histogram of completed dwell times with the given label, pooled across
// atoms (final truncated intervals excluded).  Throws when no interval exists.
DwellHistogram dwell_time_histogram(const PeriodSegmentation& seg, PeriodLabel label,
                                    int n_bins);

// Same histogram built from an explicit list of dwell lengths, e.g. pooled
// across several records.
DwellHistogram dwell_histogram_from_lengths(const std::vector<double>& dwells,
                                            PeriodLabel label, int n_bins);

// --------------------------------------------------------------- pattern rates

struct PatternQuery {
  std::string source;  // e.g. "DBB"
  std::string target;  // e.g. "DDB"; must differ from source at exactly one site
};

struct PatternStat {
  std::string source;
  std::string target;
  std::int64_t events = 0;
  double time_at_risk = 0.0;  // summed over all window placements
  double rate = 0.0;          // events / time_at_risk (0 when no risk time)
  double rate_stderr = 0.0;   // sqrt(events) / time_at_risk
};

// Counts source->target window transitions between consecutive samples; a
// window placement at risk contributes one sample spacing to the denominator.
// Periodic lattices wrap the window; open chains slide it over the interior.
std::vector<PatternStat> estimate_pattern_rates(const PeriodSegmentation& seg,
                                                const LatticeSpec& lattice,
                                                const std::vector<PatternQuery>& patterns);

// ------------------------------------------------------------ survival curves

struct SurvivalCurve {
  std::vector<double> t;    // 0, then sorted complete inter-emission intervals
  std::vector<double> p0;   // empirical survival at each t (starts at 1)
  std::int64_t n_intervals = 0;
};

// Empirical survival of complete inter-emission intervals (all atoms pooled).
// Requires at least 100 emissions.
SurvivalCurve empirical_survival(const TrajectoryRecord& record);

// Kolmogorov-Smirnov distance between the empirical interval distribution and
// an analytic survival function evaluated at the empirical jump points.
double ks_distance(const SurvivalCurve& empirical,
                   const std::function<double(double)>& survival);

// Least-squares fit of log p against t on the points with t >= t_min and
// p > 0; returns p ~ amplitude * exp(-rate * t).
struct TailFit {
  double rate = 0.0;
  double amplitude = 0.0;
};
TailFit fit_exponential_tail(const std::vector<double>& t, const std::vector<double>& p,
                             double t_min);

// ---------------------------------------------------------------- utilities

// Joins a record with its continuation (same grid, abutting sample times,
// agreeing populations at the shared sample).  Used to check that estimators
// over a pooled run equal estimators over the original unbroken run.
TrajectoryRecord concat_records(const TrajectoryRecord& a, const TrajectoryRecord& b);

}  // namespace ryd
