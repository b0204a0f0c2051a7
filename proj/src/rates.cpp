#include "ryd/rates.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "ryd/basis.hpp"

namespace ryd {

namespace {

void require_strong_drive(const SystemParams& p) {
  if (!(p.omega_e > 0.0))
    throw std::domain_error("rates: omega_e must be > 0 for bright/dark rates");
}

// Shared quartic denominator of the dark-period rates.
double rate_denominator(double delta, const SystemParams& p) {
  const double d2 = delta * delta;
  const double g2 = p.gamma_e * p.gamma_e;
  const double oe2 = p.omega_e * p.omega_e;
  return 16.0 * d2 * d2 + 4.0 * d2 * (g2 - 2.0 * oe2) + oe2 * oe2;
}

}  // namespace

// ------------------------------------------------------------ scalar rates

double gamma_short(const SystemParams& p) {
  const double g2 = p.gamma_e * p.gamma_e;
  const double oe2 = p.omega_e * p.omega_e;
  return p.gamma_e * oe2 / (g2 + 2.0 * oe2);
}

double gamma_d_to_b(double delta_r, const SystemParams& p) {
  require_strong_drive(p);
  const double oe2 = p.omega_e * p.omega_e;
  const double or2 = p.omega_r * p.omega_r;
  return p.gamma_e * oe2 * or2 / rate_denominator(delta_r, p);
}

double gamma_b_to_d(double delta_r, const SystemParams& p) {
  require_strong_drive(p);
  const double g2 = p.gamma_e * p.gamma_e;
  const double oe2 = p.omega_e * p.omega_e;
  const double prefactor = (g2 + 4.0 * delta_r * delta_r) / (g2 + 2.0 * oe2);
  return prefactor * gamma_d_to_b(delta_r, p);
}

double effective_detuning(double delta_r, double v_nn, int n_dark_neighbours) {
  if (n_dark_neighbours < 0 || n_dark_neighbours > 2)
    throw std::invalid_argument(
        "effective_detuning: a chain site has 0, 1 or 2 dark neighbours");
  return delta_r - v_nn * static_cast<double>(n_dark_neighbours);
}

double gamma_dd_to_bb(double omega, double v_nn, double gamma_e) {
  if (!(v_nn > 0.0)) throw std::domain_error("gamma_dd_to_bb: v_nn must be > 0");
  if (!(gamma_e > 0.0)) throw std::domain_error("gamma_dd_to_bb: gamma_e must be > 0");
  const double o2 = omega * omega;
  const double g2 = gamma_e * gamma_e;
  return gamma_e * o2 * o2 / (2.0 * v_nn * v_nn * (g2 + 4.0 * v_nn * v_nn));
}

double gamma_bb_to_dd_bound(double omega, double v_nn, double gamma_e) {
  if (!(v_nn > 0.0)) throw std::domain_error("gamma_bb_to_dd_bound: v_nn must be > 0");
  if (!(gamma_e > 0.0))
    throw std::domain_error("gamma_bb_to_dd_bound: gamma_e must be > 0");
  const double o2 = omega * omega;
  return o2 * o2 / (2.0 * gamma_e * v_nn * v_nn);
}

// -------------------------------------------------------------- rate tables

TwoAtomRateTable two_atom_rate_table(double delta_r, double v_nn,
                                     const SystemParams& p) {
  TwoAtomRateTable t;
  t.delta_r = delta_r;
  t.v_nn = v_nn;
  const double shifted = delta_r - v_nn;
  t.bb_to_bd = t.bb_to_db = gamma_b_to_d(delta_r, p);
  t.bd_to_bb = t.db_to_bb = gamma_d_to_b(delta_r, p);
  t.bd_to_dd = t.db_to_dd = gamma_b_to_d(shifted, p);
  t.dd_to_bd = t.dd_to_db = gamma_d_to_b(shifted, p);
  return t;
}

LocalRates multi_atom_local_rates(double delta_r, double v_nn, const SystemParams& p,
                                  int n_dark_neighbours) {
  LocalRates out;
  out.delta_eff = effective_detuning(delta_r, v_nn, n_dark_neighbours);
  out.bright_to_dark = gamma_b_to_d(out.delta_eff, p);
  out.dark_to_bright = gamma_d_to_b(out.delta_eff, p);
  return out;
}

// --------------------------------------------------------------- slow modes

SlowMode perturbative_slow_mode_1atom(const SystemParams& p) {
  require_strong_drive(p);
  const Complex i(0.0, 1.0);
  const double dr = p.delta_r, g = p.gamma_e, oe = p.omega_e, orr = p.omega_r;
  const Complex den = 4.0 * dr * dr - oe * oe - 2.0 * i * g * dr;
  const Complex num = orr * (-2.0 * dr + i * g);
  SlowMode m;
  m.lambda = -dr + orr * num / (2.0 * den);
  m.u = Eigen::VectorXcd::Zero(3);
  m.u(lvl_g) = num / den;
  m.u(lvl_e) = oe * orr / den;
  m.u(lvl_r) = 1.0;
  m.c = m.u(lvl_g);  // initial condition |g> projects onto the shelved mode
  m.p = std::norm(m.c);
  return m;
}

SlowMode perturbative_slow_mode_2atom(const SystemParams& p, double v_nn) {
  require_strong_drive(p);
  const Complex i(0.0, 1.0);
  const double dp = p.delta_r - v_nn;  // detuning shifted by the pair interaction
  const double g = p.gamma_e, oe = p.omega_e, orr = p.omega_r;
  const Complex den = 4.0 * dp * dp - oe * oe - 2.0 * i * g * dp;
  const Complex cg = orr * (-2.0 * dp + i * g) / den;
  const Complex ce = oe * orr / den;
  const BasisIndex basis(2);
  SlowMode m;
  m.lambda = -2.0 * p.delta_r + v_nn + orr * orr * (-2.0 * dp + i * g) / den;
  m.u = Eigen::VectorXcd::Zero(9);
  m.u(basis.pack({lvl_g, lvl_r})) = cg;
  m.u(basis.pack({lvl_e, lvl_r})) = ce;
  m.u(basis.pack({lvl_r, lvl_g})) = cg;
  m.u(basis.pack({lvl_r, lvl_e})) = ce;
  m.u(basis.pack({lvl_r, lvl_r})) = 1.0;
  m.c = cg;
  m.p = std::norm(m.c);
  return m;
}

SlowMode perturbative_slow_mode_2atom_degenerate(double omega, double v_nn,
                                                 double gamma_e) {
  if (!(v_nn > 0.0))
    throw std::domain_error("perturbative_slow_mode_2atom_degenerate: v_nn must be > 0");
  if (!(gamma_e > 0.0))
    throw std::domain_error(
        "perturbative_slow_mode_2atom_degenerate: gamma_e must be > 0");
  const Complex i(0.0, 1.0);
  const double o2 = omega * omega;
  const double g2 = gamma_e * gamma_e;
  const double admix = omega / (2.0 * v_nn);
  const BasisIndex basis(2);
  SlowMode m;
  m.lambda = v_nn + o2 / (2.0 * v_nn) +
             o2 * o2 * (2.0 * v_nn - i * gamma_e) /
                 (4.0 * v_nn * v_nn * (g2 + 4.0 * v_nn * v_nn));
  m.u = Eigen::VectorXcd::Zero(9);
  m.u(basis.pack({lvl_g, lvl_r})) = admix;
  m.u(basis.pack({lvl_r, lvl_g})) = admix;
  m.u(basis.pack({lvl_r, lvl_r})) = 1.0;
  // The pre-emission amplitude on |gr> is unknown but bounded by 1, so c and
  // p are reported at that extreme and flagged as bounds.
  m.c = admix;
  m.p = admix * admix;
  m.p_is_bound = true;
  return m;
}

SlowMode numeric_slow_mode(const SparseOperator& h_eff,
                           const Eigen::VectorXcd& initial) {
  if (h_eff.rows() != h_eff.cols())
    throw std::invalid_argument("numeric_slow_mode: square operator required");
  if (h_eff.rows() > 729)
    throw ResourceCapError("numeric_slow_mode: dense eigensolve sized for dim <= 729");
  if (initial.size() != h_eff.rows())
    throw std::invalid_argument("numeric_slow_mode: initial state dimension mismatch");
  const Eigen::MatrixXcd hd = h_eff.dense();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(hd);
  if (es.info() != Eigen::Success)
    throw NumericError("numeric_slow_mode: eigensolver failed");
  const Eigen::VectorXcd& ev = es.eigenvalues();

  // Least-negative imaginary part wins; near-ties resolved by smallest |Re|,
  // then most-negative Re, then index, so the choice is deterministic.
  double im_best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < ev.size(); ++k) im_best = std::max(im_best, ev(k).imag());
  const double tol = 1e-10 * (1.0 + std::abs(im_best));
  Eigen::Index pick = -1;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (ev(k).imag() < im_best - tol) continue;
    if (pick < 0) {
      pick = k;
      continue;
    }
    const double ra = std::abs(ev(k).real()), rb = std::abs(ev(pick).real());
    if (ra < rb - tol ||
        (std::abs(ra - rb) <= tol && ev(k).real() < ev(pick).real() - tol))
      pick = k;
  }

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(es.eigenvectors());
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  const double smax = svd.singularValues()(0);
  const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(cond < 1e8))
    throw NumericError("numeric_slow_mode: eigenbasis condition number exceeds 1e8");

  const Eigen::VectorXcd coeff = es.eigenvectors().partialPivLu().solve(initial);
  SlowMode m;
  m.lambda = ev(pick);
  m.u = es.eigenvectors().col(pick);
  m.c = coeff(pick);
  m.p = std::norm(m.c);
  m.eigenbasis_condition = cond;
  return m;
}

// ------------------------------------------------------- regime diagnostics

RegimeReport regime_diagnostics(const SystemParams& p, double v_nn) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  RegimeReport r;
  r.weak_drive_ratio =
      p.omega_e > 0.0 ? p.omega_r * p.gamma_e / (p.omega_e * p.omega_e) : kInf;
  r.collective_ratio = v_nn > 0.0 ? p.omega_r / (2.0 * v_nn) : kInf;
  const double gs = gamma_short(p);
  if (p.omega_e > 0.0 && gs > 0.0) {
    r.b_to_d_over_short = gamma_b_to_d(p.delta_r, p) / gs;
    r.d_to_b_over_short = gamma_d_to_b(p.delta_r, p) / gs;
  } else {
    r.b_to_d_over_short = r.d_to_b_over_short = kInf;
  }
  r.single_atom_jumps =
      r.weak_drive_ratio <= 0.25 &&
      std::max(r.b_to_d_over_short, r.d_to_b_over_short) <= 0.1;
  // The collective criterion applies to the equal-drive resonant setup.
  const bool equal_drives =
      std::abs(p.omega_r - p.omega_e) <= 1e-12 * std::max(p.omega_r, p.omega_e);
  r.collective_jumps =
      equal_drives && std::abs(p.delta_r) <= 1e-12 && r.collective_ratio <= 0.25;
  return r;
}

}  // namespace ryd
