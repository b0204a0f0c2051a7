#include <doctest.h>

#include <complex>
#include <vector>

#include "ryd/sparse.hpp"

using namespace ryd;

namespace {

SparseOperator sample_op() {
  // 3x3: [[1, 0, 2i], [0, 0, 0], [-1, 3, 0]]
  return SparseOperator::from_triplets(3, 3,
                                       {{0, 0, {1.0, 0.0}},
                                        {0, 2, {0.0, 2.0}},
                                        {2, 0, {-1.0, 0.0}},
                                        {2, 1, {3.0, 0.0}}});
}

}  // namespace

TEST_CASE("canonical form is independent of insertion order") {
  const std::vector<Triplet> fwd = {{0, 1, {1.0, 0.0}},
                                    {1, 0, {0.0, -1.0}},
                                    {1, 1, {0.5, 0.5}}};
  std::vector<Triplet> rev(fwd.rbegin(), fwd.rend());
  const auto a = SparseOperator::from_triplets(2, 2, fwd);
  const auto b = SparseOperator::from_triplets(2, 2, rev);
  CHECK(a == b);
}

TEST_CASE("duplicates merge and exact zeros drop") {
  const auto op = SparseOperator::from_triplets(
      2, 2,
      {{0, 0, {1.0, 0.0}}, {0, 0, {2.0, 0.0}}, {1, 1, {1.0, 0.0}}, {1, 1, {-1.0, 0.0}}});
  CHECK(op.nnz() == 1);
  CHECK(op.entry(0, 0) == Complex(3.0, 0.0));
  CHECK(op.entry(1, 1) == Complex(0.0, 0.0));
}

TEST_CASE("apply matches dense multiply") {
  const auto op = sample_op();
  Eigen::VectorXcd x(3);
  x << Complex(1.0, 1.0), Complex(0.0, -2.0), Complex(3.0, 0.0);
  const Eigen::VectorXcd via_sparse = op.apply(x);
  const Eigen::VectorXcd via_dense = op.dense() * x;
  CHECK((via_sparse - via_dense).norm() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(via_sparse[1] == Complex(0.0, 0.0));
}

TEST_CASE("adjoint conjugate-transposes") {
  const auto op = sample_op();
  const auto ad = op.adjoint();
  const Eigen::MatrixXcd diff = ad.dense() - op.dense().adjoint();
  CHECK(diff.norm() == doctest::Approx(0.0).epsilon(1e-15));
  // adjoint twice is the identity on the canonical form
  CHECK(ad.adjoint() == op);
}

TEST_CASE("hermitian predicate") {
  const auto herm = SparseOperator::from_triplets(
      2, 2, {{0, 1, {0.0, 1.0}}, {1, 0, {0.0, -1.0}}, {0, 0, {2.0, 0.0}}});
  CHECK(herm.is_hermitian(1e-14));
  CHECK_FALSE(sample_op().is_hermitian(1e-14));
}

TEST_CASE("entry lookup and norm bound") {
  const auto op = sample_op();
  CHECK(op.entry(0, 2) == Complex(0.0, 2.0));
  CHECK(op.entry(1, 1) == Complex(0.0, 0.0));
  CHECK(op.norm_inf() == doctest::Approx(4.0));  // row 2: |-1| + |3|
}

TEST_CASE("triplets stream is row-major with ascending columns") {
  const auto ts = sample_op().triplets();
  REQUIRE(ts.size() == 4);
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const bool ordered = ts[k - 1].row < ts[k].row ||
                         (ts[k - 1].row == ts[k].row && ts[k - 1].col < ts[k].col);
    CHECK(ordered);
  }
}

TEST_CASE("shape and range guards") {
  CHECK_THROWS_AS(SparseOperator::from_triplets(2, 2, {{2, 0, {1.0, 0.0}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(SparseOperator::from_triplets(2, 2, {{0, -1, {1.0, 0.0}}}),
                  std::invalid_argument);
  const auto op = sample_op();
  Eigen::VectorXcd wrong(2);
  wrong.setZero();
  Eigen::VectorXcd y;
  CHECK_THROWS_AS(op.apply(wrong, y), std::invalid_argument);
}
