#include "ryd/master.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "ryd/basis.hpp"
#include "ryd/propagator.hpp"
#include "ryd/rng.hpp"

namespace ryd {

// ------------------------------------------------------------- Liouvillian

Liouvillian Liouvillian::build(const SystemParams& params, const LatticeSpec& lattice) {
  params.validate();
  lattice.validate();
  Liouvillian out;
  out.h = build_hamiltonian(params, lattice).dense();
  const auto jumps = build_jump_operators(params, lattice);
  out.half_loss = Eigen::VectorXcd::Zero(out.h.rows());
  for (const auto& j : jumps) {
    out.jump_entries.push_back(j.op.triplets());
    for (const auto& t : out.jump_entries.back())
      out.half_loss(t.col) += 0.5 * std::norm(t.value);
  }
  return out;
}

Eigen::MatrixXcd Liouvillian::rhs(const Eigen::MatrixXcd& rho) const {
  const Complex mi(0.0, -1.0);
  Eigen::MatrixXcd out = mi * (h * rho - rho * h);
  for (const auto& entries : jump_entries)
    for (const auto& a : entries)
      for (const auto& b : entries)
        out(a.row, b.row) += a.value * std::conj(b.value) * rho(a.col, b.col);
  out.noalias() -= half_loss.asDiagonal() * rho;
  out.noalias() -= rho * half_loss.asDiagonal();
  return out;
}

// ---------------------------------------------------------------- evolution

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695,
                 e4 = b4 - 393.0 / 640, e5 = b5 + 92097.0 / 339200,
                 e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

double scaled_error(const Eigen::MatrixXcd& err, const Eigen::MatrixXcd& y0,
                    const Eigen::MatrixXcd& y1, double rtol, double atol) {
  double acc = 0.0;
  for (Eigen::Index c = 0; c < err.cols(); ++c)
    for (Eigen::Index r = 0; r < err.rows(); ++r) {
      const double sc =
          atol + rtol * std::max(std::abs(y0(r, c)), std::abs(y1(r, c)));
      const double q = std::abs(err(r, c)) / sc;
      acc += q * q;
    }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

}  // namespace

Eigen::MatrixXcd evolve_master(const SystemParams& params, const LatticeSpec& lattice,
                               const Eigen::MatrixXcd& rho0, double t,
                               const MasterOptions& opts) {
  if (lattice.n_atoms > kMasterEvolveMaxAtoms)
    throw ResourceCapError("evolve_master: sized for at most " +
                           std::to_string(kMasterEvolveMaxAtoms) + " atoms");
  const Liouvillian liou = Liouvillian::build(params, lattice);
  if (rho0.rows() != liou.dim() || rho0.cols() != liou.dim())
    throw std::invalid_argument("evolve_master: rho0 dimension mismatch");
  if (!(t >= 0.0) || !std::isfinite(t))
    throw std::invalid_argument("evolve_master: t must be finite and >= 0");
  if (!(opts.rtol > 0.0) || !(opts.atol > 0.0))
    throw std::invalid_argument("evolve_master: tolerances must be > 0");
  Eigen::MatrixXcd y = rho0;
  if (t == 0.0) return y;

  double tn = 0.0;
  double h = std::min(0.1, t);
  Eigen::MatrixXcd k1, k2, k3, k4, k5, k6, k7, y5, err;
  while (tn < t) {
    if (h > t - tn) h = t - tn;
    k1 = liou.rhs(y);
    k2 = liou.rhs(y + h * (a21 * k1));
    k3 = liou.rhs(y + h * (a31 * k1 + a32 * k2));
    k4 = liou.rhs(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    k5 = liou.rhs(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    k6 = liou.rhs(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = liou.rhs(y5);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = scaled_error(err, y, y5, opts.rtol, opts.atol);
    if (en <= 1.0) {
      y = y5;
      tn += h;
    }
    const double fac =
        std::clamp(0.9 * std::pow(std::max(en, 1e-10), -0.2), 0.2, 5.0);
    h *= fac;
    if (!(h > 1e-14 * std::max(1.0, t)))
      throw NumericError("evolve_master: step size underflow");
  }
  return y;
}

// -------------------------------------------------------------- steady state

namespace {

// Reshapes a column-major vectorised density matrix, projects it onto the
// Hermitian unit-trace slice.
Eigen::MatrixXcd to_density(const Eigen::VectorXcd& v, std::int64_t dim) {
  Eigen::MatrixXcd rho =
      Eigen::Map<const Eigen::MatrixXcd>(v.data(), dim, dim);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const Complex tr = rho.trace();
  if (std::abs(tr) < 1e-12)
    throw NumericError("steady_state: traceless null vector");
  return rho / tr;
}

// Inverse iteration toward the eigenvalue nearest the factorised shift.  The
// stationary eigenvalue is the one closest to zero by construction, so a tiny
// shift pins it; the eigenvector route through the nonnormal generator is
// avoided because its triangular solves amplify rounding near metastable
// modes into order-one eigenvector errors.
template <class Factorisation>
Eigen::VectorXcd inverse_iterate(const Factorisation& lu, Eigen::VectorXcd v) {
  v /= v.norm();
  for (int it = 0; it < 50; ++it) {
    Eigen::VectorXcd w = lu.solve(v);
    const double wn = w.norm();
    if (!(wn > 0.0) || !std::isfinite(wn))
      throw NumericError("steady_state: inverse iteration broke down");
    w /= wn;
    const Complex p = v.dot(w);  // align the free phase before comparing
    if (std::abs(p) > 0.0) w *= std::conj(p) / std::abs(p);
    const double delta = (w - v).norm();
    v = std::move(w);
    if (delta < 1e-13) break;
  }
  return v;
}

// Dense route (dim^2 <= 1000): singular values count the stationary subspace,
// shifted inverse iteration extracts the steady vector.
SteadyStateResult steady_dense(const Liouvillian& liou) {
  const std::int64_t dim = liou.dim();
  const std::int64_t d2 = dim * dim;
  Eigen::MatrixXcd lmat(d2, d2);
  Eigen::MatrixXcd unit = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::int64_t c = 0; c < dim; ++c)
    for (std::int64_t r = 0; r < dim; ++r) {
      unit(r, c) = 1.0;
      const Eigen::MatrixXcd col = liou.rhs(unit);
      unit(r, c) = 0.0;
      lmat.col(r + c * dim) = Eigen::Map<const Eigen::VectorXcd>(col.data(), d2);
    }
  // Stationary directions sit at the rounding floor; metastable ones stay
  // orders of magnitude above it (slowest physical rates here are >= 1e-5).
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(lmat);
  const auto& sv = svd.singularValues();
  const double tol = 1e-9 * std::max(1.0, sv(0));
  SteadyStateResult out;
  out.null_dim = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) <= tol) ++out.null_dim;
  if (out.null_dim == 0)
    throw NumericError("steady_state: no stationary direction found");
  out.degenerate = out.null_dim > 1;

  Eigen::MatrixXcd shifted = lmat;
  shifted.diagonal().array() -= Complex(1e-9, 0.0);
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);
  Eigen::MatrixXcd mixed = Eigen::MatrixXcd::Identity(dim, dim);
  mixed /= static_cast<double>(dim);
  Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(mixed.data(), d2);
  v = inverse_iterate(lu, v);
  out.rho = to_density(v, dim);
  out.residual = liou.rhs(out.rho).cwiseAbs().maxCoeff();
  return out;
}

// Sparse route (N = 4): shifted inverse iteration on the explicit sparse
// Liouvillian; degeneracy probed by a second run from an independent start.
Eigen::SparseMatrix<Complex> sparse_liouvillian(const SystemParams& params,
                                                const LatticeSpec& lattice,
                                                Complex diag_shift) {
  const SparseOperator h = build_hamiltonian(params, lattice);
  const auto jumps = build_jump_operators(params, lattice);
  const std::int64_t dim = h.rows();
  const Complex mi(0.0, -1.0);
  std::vector<Eigen::Triplet<Complex>> ts;
  const auto hts = h.triplets();
  ts.reserve(static_cast<std::size_t>(dim) * hts.size() * 2);
  // -i (I x H) vec(rho) and +i (H^T x I) vec(rho) for column-major vec.
  for (const auto& e : hts)
    for (std::int64_t b = 0; b < dim; ++b) {
      ts.emplace_back(e.row + b * dim, e.col + b * dim, mi * e.value);
      ts.emplace_back(b + e.col * dim, b + e.row * dim, -mi * e.value);
    }
  Eigen::VectorXd loss = Eigen::VectorXd::Zero(dim);
  for (const auto& j : jumps) {
    const auto entries = j.op.triplets();
    for (const auto& a : entries) {
      loss(a.col) += std::norm(a.value);
      for (const auto& b : entries)
        ts.emplace_back(a.row + b.row * dim, a.col + b.col * dim,
                        a.value * std::conj(b.value));
    }
  }
  for (std::int64_t a = 0; a < dim; ++a)
    for (std::int64_t b = 0; b < dim; ++b)
      ts.emplace_back(a + b * dim, a + b * dim,
                      Complex(-0.5 * (loss(a) + loss(b)), 0.0) + diag_shift);
  Eigen::SparseMatrix<Complex> lmat(dim * dim, dim * dim);
  lmat.setFromTriplets(ts.begin(), ts.end());
  return lmat;
}

SteadyStateResult steady_sparse(const SystemParams& params, const LatticeSpec& lattice,
                                const Liouvillian& liou) {
  const std::int64_t dim = liou.dim();
  // Small diagonal shift moves the exact null eigenvalue off zero so the
  // factorisation is regular; inverse iteration then converges onto it.
  Eigen::SparseMatrix<Complex> lmat =
      sparse_liouvillian(params, lattice, Complex(-1e-9, 0.0));
  lmat.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu;
  lu.compute(lmat);
  if (lu.info() != Eigen::Success)
    throw NumericError("steady_state: sparse factorisation failed");

  // Start 1: maximally mixed state (never trace-orthogonal to the physical
  // steady state).  Start 2: fixed pseudo-random Hermitian direction.
  Eigen::MatrixXcd mixed = Eigen::MatrixXcd::Identity(dim, dim);
  mixed /= static_cast<double>(dim);
  Eigen::VectorXcd v1 = Eigen::Map<const Eigen::VectorXcd>(mixed.data(), dim * dim);
  v1 = inverse_iterate(lu, v1);

  CounterRng rng(0x5eedu, 0);
  Eigen::MatrixXcd rnd(dim, dim);
  for (std::int64_t c = 0; c < dim; ++c)
    for (std::int64_t r = 0; r < dim; ++r)
      rnd(r, c) = Complex(rng.next_open01() - 0.5, rng.next_open01() - 0.5);
  rnd = (rnd + rnd.adjoint()).eval();
  Eigen::VectorXcd v2 = Eigen::Map<const Eigen::VectorXcd>(rnd.data(), dim * dim);
  v2 = inverse_iterate(lu, v2);

  SteadyStateResult out;
  out.rho = to_density(v1, dim);
  Eigen::MatrixXcd rho2;
  try {
    rho2 = to_density(v2, dim);
  } catch (const NumericError&) {
    rho2 = out.rho;  // traceless second vector already implies degeneracy
    out.degenerate = true;
  }
  if ((out.rho - rho2).cwiseAbs().maxCoeff() > 1e-6) out.degenerate = true;
  out.null_dim = out.degenerate ? 2 : 1;  // lower bound on the sparse route
  out.residual = liou.rhs(out.rho).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace

SteadyStateResult steady_state(const SystemParams& params, const LatticeSpec& lattice) {
  if (lattice.n_atoms > kSteadyStateMaxAtoms)
    throw ResourceCapError("steady_state: sized for at most " +
                           std::to_string(kSteadyStateMaxAtoms) + " atoms");
  const Liouvillian liou = Liouvillian::build(params, lattice);
  if (liou.dim() * liou.dim() <= 1000) return steady_dense(liou);
  return steady_sparse(params, lattice, liou);
}

// -------------------------------------------------------- survival probability

std::vector<double> survival_probability(const SystemParams& params,
                                         const LatticeSpec& lattice,
                                         const Eigen::VectorXcd& psi0,
                                         const std::vector<double>& times) {
  params.validate();
  lattice.validate();
  const SparseOperator h_eff = build_effective_hamiltonian(params, lattice);
  if (psi0.size() != h_eff.rows())
    throw std::invalid_argument("survival_probability: psi0 dimension mismatch");
  std::vector<double> out;
  out.reserve(times.size());
  Eigen::VectorXcd psi = psi0;
  double t_now = 0.0;
  for (double t : times) {
    if (!std::isfinite(t) || t < t_now)
      throw std::invalid_argument(
          "survival_probability: times must be non-decreasing and >= 0");
    if (t > t_now) psi = evolve_no_jump(h_eff, psi, t - t_now);
    t_now = t;
    out.push_back(psi.squaredNorm());
  }
  return out;
}

}  // namespace ryd
