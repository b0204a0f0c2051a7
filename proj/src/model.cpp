#include "ryd/model.hpp"

namespace ryd {

double JumpOperator::weight(const Eigen::VectorXcd& psi) const {
  // c has at most one entry per column, so <psi|c^dag c|psi> reduces to a
  // masked sum over source amplitudes.
  double w = 0.0;
  for (const auto& t : op.triplets()) w += std::norm(t.value) * std::norm(psi[t.col]);
  return w;
}

namespace {

// Hermitian part shared by build_hamiltonian and build_effective_hamiltonian.
std::vector<Triplet> hamiltonian_triplets(const SystemParams& p,
                                          const LatticeSpec& lat) {
  const BasisIndex basis(lat.n_atoms);
  const int n = lat.n_atoms;
  const std::int64_t dim = basis.dim();

  // Pair couplings resolved once; zero entries are skipped below.
  std::vector<std::vector<double>> vij(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) vij[i][j] = lat.coupling(p.v_nn, i, j);

  std::vector<Triplet> ts;
  ts.reserve(static_cast<std::size_t>(dim) * (n + 2));
  for (std::int64_t s = 0; s < dim; ++s) {
    double diag = 0.0;
    for (int i = 0; i < n; ++i) {
      const int li = basis.level(s, i);
      if (li == lvl_e) diag -= p.delta_e;
      if (li == lvl_r) {
        diag -= p.delta_r;
        for (int j = i + 1; j < n; ++j)
          if (basis.level(s, j) == lvl_r) diag += vij[i][j];
      }
      // Drive terms: emit only the lowering half here, mirror afterwards.
      if (li == lvl_e && p.omega_e != 0.0)
        ts.push_back({basis.with_level(s, i, lvl_g), s, 0.5 * p.omega_e});
      if (li == lvl_r && p.omega_r != 0.0)
        ts.push_back({basis.with_level(s, i, lvl_g), s, 0.5 * p.omega_r});
    }
    if (diag != 0.0) ts.push_back({s, s, diag});
  }
  const std::size_t lowered = ts.size();
  for (std::size_t k = 0; k < lowered; ++k)
    if (ts[k].row != ts[k].col)
      ts.push_back({ts[k].col, ts[k].row, std::conj(ts[k].value)});
  return ts;
}

}  // namespace

SparseOperator build_hamiltonian(const SystemParams& p, const LatticeSpec& lat) {
  p.validate();
  lat.validate();
  const std::int64_t dim = BasisIndex(lat.n_atoms).dim();
  return SparseOperator::from_triplets(dim, dim, hamiltonian_triplets(p, lat));
}

SparseOperator build_effective_hamiltonian(const SystemParams& p,
                                           const LatticeSpec& lat) {
  p.validate();
  lat.validate();
  const BasisIndex basis(lat.n_atoms);
  const std::int64_t dim = basis.dim();
  auto ts = hamiltonian_triplets(p, lat);
  // -i/2 sum_m c_m^dag c_m is diagonal: each occupied decaying level adds
  // -i*rate/2 to its state's diagonal.
  for (std::int64_t s = 0; s < dim; ++s) {
    double loss = 0.0;
    for (int i = 0; i < lat.n_atoms; ++i) {
      const int li = basis.level(s, i);
      if (li == lvl_e) loss += p.gamma_e;
      if (li == lvl_r) loss += p.gamma_r;
    }
    if (loss != 0.0) ts.push_back({s, s, Complex(0.0, -0.5 * loss)});
  }
  return SparseOperator::from_triplets(dim, dim, std::move(ts));
}

std::vector<JumpOperator> build_jump_operators(const SystemParams& p,
                                               const LatticeSpec& lat) {
  p.validate();
  lat.validate();
  const BasisIndex basis(lat.n_atoms);
  const std::int64_t dim = basis.dim();
  std::vector<JumpOperator> ops;
  for (int i = 0; i < lat.n_atoms; ++i) {
    auto make = [&](int from, double rate, JumpChannel ch) {
      std::vector<Triplet> ts;
      const double amp = std::sqrt(rate);
      for (std::int64_t s = 0; s < dim; ++s)
        if (basis.level(s, i) == from)
          ts.push_back({basis.with_level(s, i, lvl_g), s, amp});
      JumpOperator j;
      j.atom = i;
      j.channel = ch;
      j.rate = rate;
      j.op = SparseOperator::from_triplets(dim, dim, std::move(ts));
      ops.push_back(std::move(j));
    };
    make(lvl_e, p.gamma_e, JumpChannel::e_decay);
    if (p.gamma_r > 0.0) make(lvl_r, p.gamma_r, JumpChannel::r_decay);
  }
  return ops;
}

}  // namespace ryd
