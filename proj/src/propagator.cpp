#include "ryd/propagator.hpp"

#include <cmath>
#include <stdexcept>

#include "ryd/params.hpp"

namespace ryd {

// ------------------------------------------------------------------ expm

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("expm: square matrix required");
  // Scale until the 1-norm is small enough that a short Taylor series is
  // accurate to ~1e-19, then square back up.
  const double n1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (n1 > 0.25) s = static_cast<int>(std::ceil(std::log2(n1 / 0.25)));
  const Eigen::MatrixXcd b = a * std::ldexp(1.0, -s);
  Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(a.rows(), a.cols());
  Eigen::MatrixXcd sum = term;
  for (int k = 1; k <= 40; ++k) {
    term = (term * b) / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() <= 1e-18 * sum.cwiseAbs().maxCoeff()) break;
  }
  for (int k = 0; k < s; ++k) sum = sum * sum;
  return sum;
}

namespace {

// Shared Taylor evaluation of psi <- exp(-i h tau) psi for one segment whose
// scaled norm is modest; terms are added in a fixed order for determinism.
void taylor_segment(const SparseOperator& h, Eigen::VectorXcd& psi, double tau,
                    Eigen::VectorXcd& term, Eigen::VectorXcd& scratch) {
  const Complex z(0.0, -tau);
  term = psi;
  for (int k = 1; k <= 120; ++k) {
    h.apply(term, scratch);
    term = scratch * (z / static_cast<double>(k));
    psi += term;
    if (term.squaredNorm() <= 1e-28 * psi.squaredNorm()) return;
  }
  throw NumericError("taylor_segment: series did not converge");
}

// ------------------------------------------------------------- dense ladder

class DenseLadderPropagator final : public NoJumpPropagator {
 public:
  DenseLadderPropagator(const SparseOperator& h_eff, double chunk, int levels)
      : NoJumpPropagator(chunk / std::ldexp(1.0, levels), levels), h_(h_eff) {
    const Eigen::MatrixXcd hd = h_eff.dense();
    ladder_.resize(levels + 1);
    ladder_[0] = expm(Complex(0.0, -tick_dt_) * hd);
    for (int k = 1; k <= levels; ++k) ladder_[k] = ladder_[k - 1] * ladder_[k - 1];
  }

  void advance_ticks(Eigen::VectorXcd& psi, std::int64_t ticks) const override {
    const std::int64_t chunk = std::int64_t{1} << levels_;
    while (ticks >= chunk) {
      psi = ladder_[levels_] * psi;
      ticks -= chunk;
    }
    for (int k = levels_ - 1; k >= 0; --k)
      if (ticks & (std::int64_t{1} << k)) psi = ladder_[k] * psi;
  }

  void advance_small(Eigen::VectorXcd& psi, double tau) const override {
    if (tau == 0.0) return;
    Eigen::VectorXcd term, scratch;
    taylor_segment(h_, psi, tau, term, scratch);
  }

 private:
  SparseOperator h_;  // kept for sub-tick Taylor steps
  std::vector<Eigen::MatrixXcd> ladder_;
};

// ------------------------------------------------------------ sparse Taylor

class SparseTaylorPropagator final : public NoJumpPropagator {
 public:
  SparseTaylorPropagator(const SparseOperator& h_eff, double chunk, int levels)
      : NoJumpPropagator(chunk / std::ldexp(1.0, levels), levels) {
    // Centering the diagonal shrinks the series length; the scalar phase
    // exp(-i mu tau) is restored on every advance.
    const std::int64_t dim = h_eff.rows();
    Complex tr = 0.0;
    for (std::int64_t s = 0; s < dim; ++s) tr += h_eff.entry(s, s);
    mu_ = tr / static_cast<double>(dim);
    std::vector<Triplet> ts = h_eff.triplets();
    for (std::int64_t s = 0; s < dim; ++s) ts.push_back({s, s, -mu_});
    h_ = SparseOperator::from_triplets(dim, dim, std::move(ts));
    norm_bound_ = h_.norm_inf();
  }

  void advance_ticks(Eigen::VectorXcd& psi, std::int64_t ticks) const override {
    advance_tau(psi, static_cast<double>(ticks) * tick_dt_);
  }

  void advance_small(Eigen::VectorXcd& psi, double tau) const override {
    advance_tau(psi, tau);
  }

 private:
  void advance_tau(Eigen::VectorXcd& psi, double tau) const {
    if (tau == 0.0) return;
    const int segments =
        std::max(1, static_cast<int>(std::ceil(norm_bound_ * tau / 4.0)));
    const double dt = tau / segments;
    Eigen::VectorXcd term(psi.size()), scratch(psi.size());
    for (int seg = 0; seg < segments; ++seg) taylor_segment(h_, psi, dt, term, scratch);
    psi *= std::exp(Complex(0.0, -tau) * mu_);
  }

  SparseOperator h_;  // shifted generator H_eff - mu I
  Complex mu_;
  double norm_bound_ = 0.0;
};

}  // namespace

std::unique_ptr<NoJumpPropagator> make_propagator(const SparseOperator& h_eff,
                                                  double chunk, double dt_min) {
  if (h_eff.rows() != h_eff.cols())
    throw std::invalid_argument("make_propagator: square operator required");
  if (!(chunk > 0.0) || !(dt_min > 0.0))
    throw std::invalid_argument("make_propagator: chunk and dt_min must be > 0");
  int levels = 0;
  while (chunk / std::ldexp(1.0, levels) > dt_min && levels < 40) ++levels;
  if (h_eff.rows() <= kDensePropagatorCap)
    return std::make_unique<DenseLadderPropagator>(h_eff, chunk, levels);
  return std::make_unique<SparseTaylorPropagator>(h_eff, chunk, levels);
}

Eigen::VectorXcd evolve_no_jump(const SparseOperator& h_eff,
                                const Eigen::VectorXcd& psi, double t) {
  if (t < 0.0) throw std::invalid_argument("evolve_no_jump: negative time");
  Eigen::VectorXcd out = psi;
  if (t == 0.0) return out;
  SparseTaylorPropagator prop(h_eff, t, 0);
  prop.advance_small(out, t);
  return out;
}

}  // namespace ryd
