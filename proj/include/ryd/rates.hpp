#pragma once
// Closed-form bright/dark transition rates for driven three-level atoms and
// interacting pairs, perturbative slow modes of the no-emission generator,
// and numerically exact slow-mode extraction used to cross-validate them.
//
// Conventions: rates are in units of gamma_e; a "slow mode" is the eigenpair
// of H_eff whose eigenvalue has the least-negative imaginary part, so its
// decay -2 Im(lambda) sets the exit rate of non-emitting (dark) periods.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ryd/params.hpp"
#include "ryd/sparse.hpp"

namespace ryd {

// ------------------------------------------------------------ scalar rates

// Emission rate of a resonantly driven two-level atom; this is also the
// photon rate within a bright period: gamma_e Omega_e^2/(gamma_e^2+2Omega_e^2).
double gamma_short(const SystemParams& p);

// Exit rate of a dark (r-shelved) period at weak-transition detuning delta_r.
double gamma_d_to_b(double delta_r, const SystemParams& p);

// Entry rate into a dark period from a bright period at detuning delta_r.
double gamma_b_to_d(double delta_r, const SystemParams& p);

// Local detuning seen by an atom with the given number of dark (r-shelved)
// neighbours: delta_r - v_nn * n_dark.
double effective_detuning(double delta_r, double v_nn, int n_dark_neighbours);

// Pairwise collective rates in the equal-drive regime (omega = both Rabi
// amplitudes, delta_r = 0): exit rate of the doubly-shelved configuration,
// and an upper bound for the reverse entry rate.
double gamma_dd_to_bb(double omega, double v_nn, double gamma_e);
double gamma_bb_to_dd_bound(double omega, double v_nn, double gamma_e);

// -------------------------------------------------------------- rate tables

// All eight transition rates among the four bright/dark configurations of an
// interacting pair.  Transitions that only involve a single shelved atom use
// delta_r; transitions in or out of the doubly-shelved configuration use the
// shifted detuning delta_r - v_nn.
struct TwoAtomRateTable {
  double delta_r = 0.0;
  double v_nn = 0.0;
  double bb_to_bd = 0.0, bb_to_db = 0.0;  // bright pair, one atom shelves
  double bd_to_bb = 0.0, db_to_bb = 0.0;  // mixed pair, the dark atom returns
  double bd_to_dd = 0.0, db_to_dd = 0.0;  // mixed pair, the bright atom shelves
  double dd_to_bd = 0.0, dd_to_db = 0.0;  // dark pair, one atom returns
  double dd_exit_total() const { return dd_to_bd + dd_to_db; }
};
TwoAtomRateTable two_atom_rate_table(double delta_r, double v_nn,
                                     const SystemParams& p);

// Single-atom rates evaluated at the effective local detuning for an atom
// with n dark neighbours; the analytic prediction for chain pattern rates.
struct LocalRates {
  double delta_eff = 0.0;
  double bright_to_dark = 0.0;
  double dark_to_bright = 0.0;
};
LocalRates multi_atom_local_rates(double delta_r, double v_nn, const SystemParams& p,
                                  int n_dark_neighbours);

// --------------------------------------------------------------- slow modes

struct SlowMode {
  Complex lambda;        // slow eigenvalue of H_eff (units of gamma_e)
  Eigen::VectorXcd u;    // eigenvector in the packed product basis
  Complex c = 0.0;       // expansion coefficient of the initial condition on u
  double p = 0.0;        // |c|^2: probability an emission interval goes dark
  bool p_is_bound = false;          // p is an upper bound (unknown prior state)
  double eigenbasis_condition = 0.0;  // numeric route only; 0 for perturbative
};

// Second-order perturbative slow mode of a single driven atom (initial
// condition |g>): eigenvector normalised to unit shelved component.
SlowMode perturbative_slow_mode_1atom(const SystemParams& p);

// Second-order perturbative slow mode of an interacting pair in the
// weak-drive regime; same structure with the shifted detuning delta_r - v_nn.
SlowMode perturbative_slow_mode_2atom(const SystemParams& p, double v_nn);

// Fourth-order slow mode of a pair with equal drive amplitudes on resonance;
// the entry probability is an upper bound (the pre-emission state is unknown).
SlowMode perturbative_slow_mode_2atom_degenerate(double omega, double v_nn,
                                                 double gamma_e);

// Dense eigendecomposition of H_eff (dim <= 729): returns the eigenvalue with
// least-negative imaginary part, its eigenvector, and the coefficient of
// `initial` on it in the (non-orthogonal) eigenbasis.  Throws NumericError if
// the eigenbasis condition number exceeds 1e8 (near-defective generator).
SlowMode numeric_slow_mode(const SparseOperator& h_eff,
                           const Eigen::VectorXcd& initial);

// ------------------------------------------------------- regime diagnostics

// Dimensionless ratios controlling whether well-separated bright/dark jumps
// are expected, with the documented thresholds applied.
struct RegimeReport {
  double weak_drive_ratio = 0.0;   // omega_r * gamma_e / omega_e^2
  double collective_ratio = 0.0;   // omega_r / (2 v_nn), +inf when v_nn = 0
  double b_to_d_over_short = 0.0;  // rate separation at delta_r
  double d_to_b_over_short = 0.0;
  bool single_atom_jumps = false;  // weak_drive_ratio <= 0.25 and separation <= 0.1
  bool collective_jumps = false;   // equal drives on resonance, ratio <= 0.25
};
RegimeReport regime_diagnostics(const SystemParams& p, double v_nn);

}  // namespace ryd
