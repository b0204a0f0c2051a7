#pragma once
// No-jump propagation e^{-i H_eff t} for the trajectory engine.
//
// Two interchangeable backends share one interface:
//  * DenseLadderPropagator (dim <= 1024): precomputes exp(-i H_eff 2^k tick)
//    for a binary ladder of spans, so any tick-aligned advance is a handful
//    of dense mat-vecs and bisection descends one ladder level per halving.
//  * SparseTaylorPropagator (any dim): evaluates the exponential action by a
//    diagonally-shifted, segmented Taylor series with per-step error control.
//
// Both keep |psi| non-increasing up to roundoff because H_eff generates a
// contraction semigroup.

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "ryd/sparse.hpp"

namespace ryd {

// Dense matrix exponential by scaling-and-squaring with a Taylor core,
// accurate to ~1e-13 relative for the dissipative generators used here.
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a);

class NoJumpPropagator {
 public:
  virtual ~NoJumpPropagator() = default;

  // psi <- exp(-i H_eff * ticks * tick_dt()) psi for tick-aligned spans.
  virtual void advance_ticks(Eigen::VectorXcd& psi, std::int64_t ticks) const = 0;

  // psi <- exp(-i H_eff tau) psi for arbitrary tau in [0, tick_dt()];
  // used by the sub-tick refinement of jump times.
  virtual void advance_small(Eigen::VectorXcd& psi, double tau) const = 0;

  double tick_dt() const { return tick_dt_; }
  int levels() const { return levels_; }  // ladder height: 2^levels ticks per chunk

 protected:
  NoJumpPropagator(double tick_dt, int levels)
      : tick_dt_(tick_dt), levels_(levels) {}
  double tick_dt_;
  int levels_;
};

// Largest dimension handled by the precomputed dense ladder.
inline constexpr std::int64_t kDensePropagatorCap = 1024;

// Picks the dense ladder when dim <= kDensePropagatorCap, else the sparse
// Taylor backend.  tick_dt = chunk / 2^ceil(log2(chunk / dt_min)) <= dt_min,
// where chunk is the sampling interval the engine advances per check.
std::unique_ptr<NoJumpPropagator> make_propagator(const SparseOperator& h_eff,
                                                  double chunk, double dt_min);

// Unnormalised no-jump evolution psi(t) = exp(-i H_eff t) psi; convenience
// wrapper used by tests and the survival-probability oracle.
Eigen::VectorXcd evolve_no_jump(const SparseOperator& h_eff,
                                const Eigen::VectorXcd& psi, double t);

}  // namespace ryd
