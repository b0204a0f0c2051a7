#pragma once
// Quantum-jump (Monte Carlo wave-function) unravelling of the dissipative
// chain dynamics.
//
// Between emissions the state evolves under the non-Hermitian H_eff while its
// squared norm decays monotonically; an emission fires when the norm crosses
// a uniform draw r.  The crossing is bracketed on an exact tick grid (one
// ladder mat-vec per halving), then polished with Newton steps using the
// identity d|psi|^2/dt = -<psi| sum_m c_m^dag c_m |psi> until the pre-jump
// norm matches r to jump_norm_tol.  The emitting channel is drawn with
// probability proportional to <psi|c_m^dag c_m|psi>.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ryd/model.hpp"
#include "ryd/params.hpp"

namespace ryd {

// ----------------------------------------------------------------- options

struct IntegratorOptions {
  double sample_interval = 1.0;    // spacing of population samples
  double dt_min          = 1e-4;   // tick grid resolution floor (>= actual tick)
  double jump_norm_tol   = 1e-9;   // |  |psi|^2 - r | accepted at a jump
  std::int64_t initial_state = 0;  // packed product state, |g...g> by default

  void validate() const {
    if (!(sample_interval > 0.0))
      throw std::invalid_argument("IntegratorOptions: sample_interval must be > 0");
    if (!(dt_min > 0.0) || dt_min > sample_interval)
      throw std::invalid_argument(
          "IntegratorOptions: dt_min must be in (0, sample_interval]");
    if (!(jump_norm_tol > 0.0))
      throw std::invalid_argument("IntegratorOptions: jump_norm_tol must be > 0");
  }
};

// ----------------------------------------------------------------- results

struct EmissionEvent {
  double time = 0.0;          // emission time within the trajectory
  int atom = 0;               // emitting site
  JumpChannel channel = JumpChannel::e_decay;
  double norm_before = 0.0;   // squared norm at the accepted pre-jump state
};

struct TrajectoryRecord {
  SystemParams params;
  LatticeSpec lattice;
  IntegratorOptions integrator;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // independent sub-stream index within the seed
  double duration = 0.0;

  std::vector<EmissionEvent> emissions;   // strictly increasing times
  std::vector<double> sample_times;       // 0, dt, 2dt, ..., duration
  std::vector<double> r_pop;              // row-major [sample][atom] Rydberg pop.

  // Worst-case integrator diagnostics accumulated over the run.
  double max_norm_increase = 0.0;        // largest positive norm^2 step seen
  double max_jump_norm_mismatch = 0.0;   // largest | |psi|^2 - r | at a jump

  int n_atoms() const { return lattice.n_atoms; }
  std::size_t n_samples() const { return sample_times.size(); }
  double r_at(std::size_t sample, int atom) const {
    return r_pop[sample * static_cast<std::size_t>(lattice.n_atoms) +
                 static_cast<std::size_t>(atom)];
  }
};

// ------------------------------------------------------------------ engine

// Runs one trajectory of the given duration (must be an integer multiple of
// sample_interval).  (seed, stream) fully determine the result; records with
// equal inputs are bitwise identical.
TrajectoryRecord run_trajectory(const SystemParams& params, const LatticeSpec& lattice,
                                double duration, std::uint64_t seed,
                                std::uint64_t stream = 0,
                                const IntegratorOptions& opts = {});

// Runs n_traj trajectories with streams 0..n_traj-1 on up to n_jobs threads.
// Results are indexed by stream and independent of the thread schedule.
std::vector<TrajectoryRecord> run_ensemble(const SystemParams& params,
                                           const LatticeSpec& lattice, double duration,
                                           int n_traj, std::uint64_t seed,
                                           int n_jobs = 1,
                                           const IntegratorOptions& opts = {});

}  // namespace ryd
