#include "ryd/trajectory.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "ryd/basis.hpp"
#include "ryd/propagator.hpp"
#include "ryd/rng.hpp"

namespace ryd {
namespace {

// Immutable per-run machinery shared by all trajectories of an ensemble.
struct EngineContext {
  SystemParams params;
  LatticeSpec lattice;
  IntegratorOptions opts;
  double duration = 0.0;
  std::int64_t n_intervals = 0;
  SparseOperator h_eff;
  std::vector<JumpOperator> jumps;
  std::unique_ptr<NoJumpPropagator> prop;
  std::vector<std::vector<std::int64_t>> r_states;  // states with atom i in |r>

  EngineContext(const SystemParams& p, const LatticeSpec& lat, double dur,
                const IntegratorOptions& o)
      : params(p), lattice(lat), opts(o), duration(dur) {
    params.validate();
    lattice.validate();
    opts.validate();
    const double q = duration / opts.sample_interval;
    n_intervals = std::llround(q);
    if (n_intervals < 1 ||
        std::abs(q - static_cast<double>(n_intervals)) > 1e-9 * q)
      throw std::invalid_argument(
          "run_trajectory: duration must be a positive integer multiple of "
          "sample_interval");
    BasisIndex basis(lattice.n_atoms);
    if (opts.initial_state < 0 || opts.initial_state >= basis.dim())
      throw std::invalid_argument("run_trajectory: initial_state out of range");
    h_eff = build_effective_hamiltonian(params, lattice);
    jumps = build_jump_operators(params, lattice);
    prop = make_propagator(h_eff, opts.sample_interval, opts.dt_min);
    r_states.resize(static_cast<std::size_t>(lattice.n_atoms));
    for (std::int64_t s = 0; s < basis.dim(); ++s)
      for (int i = 0; i < lattice.n_atoms; ++i)
        if (basis.level(s, i) == lvl_r) r_states[static_cast<std::size_t>(i)].push_back(s);
  }
};

double total_decay_rate(const std::vector<JumpOperator>& jumps,
                        const Eigen::VectorXcd& psi) {
  double sum = 0.0;
  for (const auto& j : jumps) sum += j.weight(psi);
  return sum;
}

// Finds tau in (0, span] with |exp(-i H_eff tau) left|^2 = r and returns the
// pre-jump state there.  `left` has squared norm > r and the crossing is
// bracketed inside the span; Newton uses d|psi|^2/dtau = -<decay rate>.
double refine_crossing(const EngineContext& ctx, const Eigen::VectorXcd& left,
                       double span, double r, Eigen::VectorXcd& phi) {
  double tau = span;
  for (int iter = 0; iter < 64; ++iter) {
    phi = left;
    ctx.prop->advance_small(phi, tau);
    const double g = phi.squaredNorm() - r;
    if (std::abs(g) <= ctx.opts.jump_norm_tol) return tau;
    const double rate = total_decay_rate(ctx.jumps, phi);
    if (!(rate > 0.0))
      throw NumericError("refine_crossing: vanishing decay rate at a crossing");
    tau += g / rate;  // Newton step for g(tau), g' = -rate
    if (tau < 0.0) tau = 0.0;
    if (tau > span) tau = span;
  }
  throw NumericError("refine_crossing: Newton refinement did not converge");
}

TrajectoryRecord run_one(const EngineContext& ctx, std::uint64_t seed,
                         std::uint64_t stream) {
  const int n_atoms = ctx.lattice.n_atoms;
  const double tick = ctx.prop->tick_dt();
  const std::int64_t chunk_ticks = std::int64_t{1} << ctx.prop->levels();

  TrajectoryRecord rec;
  rec.params = ctx.params;
  rec.lattice = ctx.lattice;
  rec.integrator = ctx.opts;
  rec.seed = seed;
  rec.stream = stream;
  rec.duration = ctx.duration;
  rec.sample_times.reserve(static_cast<std::size_t>(ctx.n_intervals) + 1);
  rec.r_pop.reserve((static_cast<std::size_t>(ctx.n_intervals) + 1) *
                    static_cast<std::size_t>(n_atoms));

  CounterRng rng(seed, stream);

  const std::int64_t dim = ctx.h_eff.rows();
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi(ctx.opts.initial_state) = 1.0;
  double r = rng.next_open01();
  double prev_n2 = 1.0;

  auto sample_row = [&](double t) {
    rec.sample_times.push_back(t);
    const double n2 = psi.squaredNorm();
    for (int i = 0; i < n_atoms; ++i) {
      double p = 0.0;
      for (std::int64_t s : ctx.r_states[static_cast<std::size_t>(i)])
        p += std::norm(psi(s));
      rec.r_pop.push_back(p / n2);
    }
  };

  sample_row(0.0);
  Eigen::VectorXcd probe(dim), phi(dim);

  for (std::int64_t k = 0; k < ctx.n_intervals; ++k) {
    const double t0 = static_cast<double>(k) * ctx.opts.sample_interval;
    std::int64_t off = 0;  // ticks completed within this interval
    while (off < chunk_ticks) {
      const std::uint64_t remaining = static_cast<std::uint64_t>(chunk_ticks - off);
      const int lev = std::bit_width(remaining) - 1;  // largest 2^lev <= remaining
      probe = psi;
      ctx.prop->advance_ticks(probe, std::int64_t{1} << lev);
      const double n2 = probe.squaredNorm();
      if (n2 > r) {  // no crossing in this span
        if (n2 > prev_n2 && n2 - prev_n2 > rec.max_norm_increase)
          rec.max_norm_increase = n2 - prev_n2;
        psi.swap(probe);
        prev_n2 = n2;
        off += std::int64_t{1} << lev;
        continue;
      }
      // Crossing inside (off, off + 2^lev]: bisect down to a single tick,
      // keeping psi at the left edge of the bracketing span.
      for (int j = lev - 1; j >= 0; --j) {
        probe = psi;
        ctx.prop->advance_ticks(probe, std::int64_t{1} << j);
        if (probe.squaredNorm() > r) {
          psi.swap(probe);
          off += std::int64_t{1} << j;
        }
      }
      // One or more emissions inside the tick (off, off+1].
      double span = tick;
      double shift = 0.0;
      const double base = t0 + static_cast<double>(off) * tick;
      for (int burst = 0;; ++burst) {
        if (burst >= 1000)
          throw NumericError("run_trajectory: emission burst did not terminate");
        const double tau = refine_crossing(ctx, psi, span, r, phi);
        const double norm_before = phi.squaredNorm();
        const double mismatch = std::abs(norm_before - r);
        if (mismatch > rec.max_jump_norm_mismatch)
          rec.max_jump_norm_mismatch = mismatch;
        // Channel draw proportional to <phi|c_m^dag c_m|phi>.
        std::vector<double> w(ctx.jumps.size());
        double total = 0.0;
        for (std::size_t m = 0; m < ctx.jumps.size(); ++m) {
          w[m] = ctx.jumps[m].weight(phi);
          total += w[m];
        }
        if (!(total > 0.0))
          throw NumericError("run_trajectory: no open decay channel at a jump");
        const double target = rng.next_open01() * total;
        std::size_t pick = 0;
        double cum = 0.0;
        for (; pick + 1 < ctx.jumps.size(); ++pick) {
          cum += w[pick];
          if (target < cum) break;
        }
        rec.emissions.push_back({base + shift + tau, ctx.jumps[pick].atom,
                                 ctx.jumps[pick].channel, norm_before});
        psi = ctx.jumps[pick].op.apply(phi);
        psi /= psi.norm();
        r = rng.next_open01();
        span -= tau;
        shift += tau;
        if (span <= 0.0) break;  // jump landed exactly on the tick edge
        probe = psi;
        ctx.prop->advance_small(probe, span);
        if (probe.squaredNorm() > r) {
          psi.swap(probe);
          break;  // rest of the tick is jump-free
        }
        // Another crossing before the tick edge: refine from the post-jump state.
      }
      prev_n2 = psi.squaredNorm();
      off += 1;
    }
    sample_row(static_cast<double>(k + 1) * ctx.opts.sample_interval);
  }
  return rec;
}

}  // namespace

TrajectoryRecord run_trajectory(const SystemParams& params, const LatticeSpec& lattice,
                                double duration, std::uint64_t seed,
                                std::uint64_t stream, const IntegratorOptions& opts) {
  EngineContext ctx(params, lattice, duration, opts);
  return run_one(ctx, seed, stream);
}

std::vector<TrajectoryRecord> run_ensemble(const SystemParams& params,
                                           const LatticeSpec& lattice, double duration,
                                           int n_traj, std::uint64_t seed, int n_jobs,
                                           const IntegratorOptions& opts) {
  if (n_traj < 1) throw std::invalid_argument("run_ensemble: n_traj must be >= 1");
  if (n_jobs < 1) throw std::invalid_argument("run_ensemble: n_jobs must be >= 1");
  EngineContext ctx(params, lattice, duration, opts);
  std::vector<TrajectoryRecord> out(static_cast<std::size_t>(n_traj));
  const int workers = std::min(n_jobs, n_traj);
  if (workers == 1) {
    for (int i = 0; i < n_traj; ++i)
      out[static_cast<std::size_t>(i)] =
          run_one(ctx, seed, static_cast<std::uint64_t>(i));
    return out;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_traj) return;
      try {
        out[static_cast<std::size_t>(i)] =
            run_one(ctx, seed, static_cast<std::uint64_t>(i));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace ryd
