#pragma once
// Drive, decay and chain-geometry parameters for the three-level Rydberg chain.
// All frequencies and rates are in units of gamma_e unless gamma_e itself is set.

#include <cmath>
#include <stdexcept>
#include <string>

namespace ryd {

// Thrown when a requested problem size exceeds a hard implementation cap
// (distinct from bad-value validation so callers can map it to its own exit code).
struct ResourceCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an iterative numerical routine fails to reach its tolerance
// (series divergence, ill-conditioned eigenbasis, ...).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Hard cap on chain length: 3^12 product states is the largest basis the
// dense/sparse machinery is sized for.
inline constexpr int kMaxAtoms = 12;

// ------------------------------------------------------------------ params

// Per-atom drive/decay parameters plus the nearest-neighbour rr interaction.
struct SystemParams {
  double omega_e = 0.0;  // |g>-|e> Rabi amplitude
  double omega_r = 0.0;  // |g>-|r> Rabi amplitude
  double delta_e = 0.0;  // |e> detuning
  double delta_r = 0.0;  // |r> detuning
  double gamma_e = 1.0;  // |e> -> |g> decay rate (sets the time unit)
  double gamma_r = 0.0;  // |r> -> |g> decay rate
  double v_nn    = 0.0;  // rr interaction of a nearest-neighbour pair

  // Throws std::invalid_argument on non-finite or unphysical values.
  void validate() const {
    auto fin = [](double x) { return std::isfinite(x); };
    if (!fin(omega_e) || !fin(omega_r) || !fin(delta_e) || !fin(delta_r) ||
        !fin(gamma_e) || !fin(gamma_r) || !fin(v_nn))
      throw std::invalid_argument("SystemParams: non-finite value");
    if (gamma_e <= 0.0)
      throw std::invalid_argument("SystemParams: gamma_e must be > 0");
    if (gamma_r < 0.0)
      throw std::invalid_argument("SystemParams: gamma_r must be >= 0");
    if (omega_e < 0.0 || omega_r < 0.0)
      throw std::invalid_argument("SystemParams: drive amplitudes must be >= 0");
  }
};

// ------------------------------------------------------------------ lattice

enum class Boundary { open, periodic };

// 1D chain geometry. Pairs at chain distance d <= cutoff interact with
// strength v_nn / d^exponent; distance wraps around under periodic boundary.
struct LatticeSpec {
  int      n_atoms  = 1;
  Boundary boundary = Boundary::periodic;
  int      exponent = 6;  // power-law fall-off of the rr interaction
  int      cutoff   = 3;  // neighbour shells kept (0 disables pair terms)

  void validate() const {
    if (n_atoms < 1)
      throw std::invalid_argument("LatticeSpec: n_atoms must be >= 1");
    if (n_atoms > kMaxAtoms)
      throw ResourceCapError("LatticeSpec: n_atoms exceeds cap of " +
                             std::to_string(kMaxAtoms));
    if (exponent < 1)
      throw std::invalid_argument("LatticeSpec: exponent must be >= 1");
    if (cutoff < 0)
      throw std::invalid_argument("LatticeSpec: cutoff must be >= 0");
    // On a ring, distances never exceed floor(N/2); a larger cutoff would
    // silently double-count pairs, so reject it.
    if (boundary == Boundary::periodic && 2 * cutoff > n_atoms)
      throw std::invalid_argument(
          "LatticeSpec: periodic boundary requires 2*cutoff <= n_atoms");
  }

  // Chain distance between sites i and j (ring distance when periodic).
  int distance(int i, int j) const {
    int d = i > j ? i - j : j - i;
    if (boundary == Boundary::periodic) d = std::min(d, n_atoms - d);
    return d;
  }

  // Interaction strength for the (i, j) pair; 0 beyond the cutoff.
  double coupling(double v_nn, int i, int j) const {
    const int d = distance(i, j);
    if (d == 0 || d > cutoff) return 0.0;
    return v_nn / std::pow(static_cast<double>(d), exponent);
  }
};

}  // namespace ryd
