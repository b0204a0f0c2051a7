#pragma once
// Hamiltonian and jump-operator construction for the driven Rydberg chain.
//
// H = sum_i [ (omega_e/2)(|g><e|_i + h.c.) + (omega_r/2)(|g><r|_i + h.c.)
//             - delta_e |e><e|_i - delta_r |r><r|_i ]
//     + sum_{i<j, d(i,j) <= cutoff} v_nn / d^exponent |rr><rr|_{ij}
//
// The effective Hamiltonian appends -i/2 sum_m c_m^dag c_m, with one decay
// channel per atom (e -> g at gamma_e, plus r -> g at gamma_r when nonzero).

#include <vector>

#include "ryd/basis.hpp"
#include "ryd/params.hpp"
#include "ryd/sparse.hpp"

namespace ryd {

enum class JumpChannel : int { e_decay = 0, r_decay = 1 };

// One collapse operator sqrt(rate) |g><from|_atom.
struct JumpOperator {
  int atom = 0;
  JumpChannel channel = JumpChannel::e_decay;
  double rate = 0.0;    // gamma_e or gamma_r
  SparseOperator op;    // the full sparse matrix on the product basis

  // <psi| c^dag c |psi>, the weight this channel contributes to the total
  // decay rate of a (not necessarily normalised) state.
  double weight(const Eigen::VectorXcd& psi) const;
};

// Hermitian chain Hamiltonian on the 3^N product basis.
SparseOperator build_hamiltonian(const SystemParams& p, const LatticeSpec& lat);

// Non-Hermitian no-jump generator H - (i/2) sum c^dag c.
SparseOperator build_effective_hamiltonian(const SystemParams& p,
                                           const LatticeSpec& lat);

// Collapse operators in canonical order: atom-major, e-decay before r-decay.
// r-decay channels are present only when gamma_r > 0.
std::vector<JumpOperator> build_jump_operators(const SystemParams& p,
                                               const LatticeSpec& lat);

}  // namespace ryd
