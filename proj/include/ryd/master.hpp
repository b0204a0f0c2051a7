#pragma once
// Exact Lindblad master-equation reference for small chains: right-hand side,
// adaptive time evolution, steady states and the no-jump survival probability.
// This is the independent check the trajectory ensemble is validated against.

#include <vector>

#include <Eigen/Dense>

#include "ryd/model.hpp"
#include "ryd/params.hpp"

namespace ryd {

// Hard caps: the dense density-matrix evolution is sized for 3^5 = 243 basis
// states, the steady-state solver for 3^4 = 81 (its Liouvillian is dim^2).
inline constexpr int kMasterEvolveMaxAtoms = 5;
inline constexpr int kSteadyStateMaxAtoms = 4;

// ------------------------------------------------------------- Liouvillian

// Dense Hamiltonian + structured jump terms; rhs() evaluates
//   drho/dt = -i[H, rho] + sum_m (c_m rho c_m^dag - 1/2 {c_m^dag c_m, rho}).
struct Liouvillian {
  Eigen::MatrixXcd h;                           // Hermitian part, dense
  std::vector<std::vector<Triplet>> jump_entries;
  Eigen::VectorXcd half_loss;                   // 1/2 sum_m c_m^dag c_m (diagonal)

  static Liouvillian build(const SystemParams& params, const LatticeSpec& lattice);
  Eigen::MatrixXcd rhs(const Eigen::MatrixXcd& rho) const;
  std::int64_t dim() const { return h.rows(); }
};

// ---------------------------------------------------------------- evolution

struct MasterOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
};

// rho(t) from rho0 by an adaptive embedded Runge-Kutta 5(4) integrator
// (Dormand-Prince tableau) with elementwise error control.
Eigen::MatrixXcd evolve_master(const SystemParams& params, const LatticeSpec& lattice,
                               const Eigen::MatrixXcd& rho0, double t,
                               const MasterOptions& opts = {});

// -------------------------------------------------------------- steady state

struct SteadyStateResult {
  Eigen::MatrixXcd rho;    // Hermitian, unit trace
  bool degenerate = false; // more than one stationary state detected
  int null_dim = 1;        // stationary-subspace dimension (lower bound if sparse)
  double residual = 0.0;   // max-norm of L vec(rho) at the returned state
};

// Stationary state of the Lindbladian: dense null-space analysis up to N = 3,
// shifted inverse iteration on the sparse Liouvillian at N = 4.  When the
// stationary subspace is degenerate the returned rho is one element of it and
// `degenerate` is set.
SteadyStateResult steady_state(const SystemParams& params, const LatticeSpec& lattice);

// -------------------------------------------------------- survival probability

// P(t_k) = | exp(-i H_eff t_k) psi0 |^2, the probability that no emission has
// occurred up to t_k.  Times must be non-decreasing and non-negative; the
// state is advanced incrementally between consecutive entries.
std::vector<double> survival_probability(const SystemParams& params,
                                         const LatticeSpec& lattice,
                                         const Eigen::VectorXcd& psi0,
                                         const std::vector<double>& times);

}  // namespace ryd
