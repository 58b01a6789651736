#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "folspec/graded_matrix.hpp"

using namespace folspec;

namespace {

GradedMatrix two_sector_example() {
  GradedMatrix m = GradedMatrix::square({2, 3});
  Mat up(3, 2);
  up << 1, 2, 3, 4, 5, 6;
  m.set_block(0, 1, up);
  return m;
}

}  // namespace

TEST_CASE("dimensions and offsets") {
  GradedMatrix m({2, 3, 1}, {4, 5, 6});
  CHECK(m.sectors_in() == 3);
  CHECK(m.sectors_out() == 3);
  CHECK(m.total_in() == 6);
  CHECK(m.total_out() == 15);
  CHECK(m.offset_in(0) == 0);
  CHECK(m.offset_in(2) == 5);
  CHECK(m.offset_out(2) == 9);
  CHECK(m.dim_in(1) == 3);
  CHECK(m.dim_out(1) == 5);
}

TEST_CASE("absent blocks are zero, stored blocks come back") {
  GradedMatrix m = two_sector_example();
  CHECK(m.has_block(0, 1));
  CHECK_FALSE(m.has_block(1, 0));
  CHECK(m.block(1, 0).rows() == 2);
  CHECK(m.block(1, 0).cols() == 3);
  CHECK(m.block(1, 0).isZero(0.0));
  CHECK(m.block(0, 1)(2, 1) == 6.0);
}

TEST_CASE("set_block rejects wrong shapes and prunes zeros") {
  GradedMatrix m = GradedMatrix::square({2, 3});
  CHECK_THROWS_AS(m.set_block(0, 1, Mat::Zero(2, 2)), Error);
  try {
    m.set_block(0, 1, Mat::Zero(2, 2));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Internal);
  }
  m.set_block(0, 1, Mat::Ones(3, 2));
  CHECK(m.has_block(0, 1));
  m.set_block(0, 1, Mat::Zero(3, 2));
  CHECK_FALSE(m.has_block(0, 1));
}

TEST_CASE("dense layout concatenates sectors in order") {
  GradedMatrix m = two_sector_example();
  m.set_block(1, 1, 2.0 * Mat::Identity(3, 3));
  const Mat d = m.dense();
  REQUIRE(d.rows() == 5);
  REQUIRE(d.cols() == 5);
  CHECK(d(2, 0) == 1.0);  // block (0,1) lands below the degree-0 rows
  CHECK(d(4, 1) == 6.0);
  CHECK(d(0, 0) == 0.0);
  CHECK(d(2, 2) == 2.0);
}

TEST_CASE("compose agrees with the dense product") {
  GradedMatrix a = GradedMatrix::square({2, 2, 2});
  GradedMatrix b = GradedMatrix::square({2, 2, 2});
  Rng rng(11);
  Mat m01(2, 2), m12(2, 2), n01(2, 2), n12(2, 2);
  for (Mat* p : {&m01, &m12, &n01, &n12})
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) (*p)(i, j) = rng.uniform();
  a.set_block(0, 1, m01);
  a.set_block(1, 2, m12);
  b.set_block(0, 1, n01);
  b.set_block(1, 2, n12);
  const Mat direct = a.dense() * b.dense();
  const Mat graded = a.compose(b).dense();
  CHECK((direct - graded).norm() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(a.compose(b).has_block(0, 2));
  CHECK_FALSE(a.compose(b).has_block(0, 1));
}

TEST_CASE("sum, difference, and scaling act blockwise") {
  GradedMatrix a = two_sector_example();
  GradedMatrix b = two_sector_example();
  CHECK(((a + b).dense() - 2.0 * a.dense()).norm() == 0.0);
  CHECK((a - b).dense().isZero(0.0));
  CHECK(((a * 3.0).dense() - 3.0 * a.dense()).norm() == 0.0);
  CHECK(((2.0 * a).dense() - (a * 2.0).dense()).norm() == 0.0);
}

TEST_CASE("restricted stacks the chosen sectors") {
  GradedMatrix m = GradedMatrix::square({1, 2, 1});
  Mat d0(2, 1);
  d0 << 1, 2;
  Mat d1(1, 2);
  d1 << 3, 4;
  m.set_block(0, 1, d0);
  m.set_block(1, 2, d1);
  const Mat evens_to_odds = m.restricted({0, 2}, {1});
  REQUIRE(evens_to_odds.rows() == 2);
  REQUIRE(evens_to_odds.cols() == 2);
  CHECK(evens_to_odds(0, 0) == 1.0);
  CHECK(evens_to_odds(1, 0) == 2.0);
  CHECK(evens_to_odds(0, 1) == 0.0);
  const Mat odds_to_evens = m.restricted({1}, {0, 2});
  CHECK(odds_to_evens(1, 0) == 3.0);
  CHECK(odds_to_evens(1, 1) == 4.0);
}

TEST_CASE("complexified keeps blocks and metadata") {
  GradedMatrix m = two_sector_example();
  m.name = "sample";
  m.symmetric_wrt_weight = true;
  m.aliasing_tail = 0.25;
  const GradedMatrixC c = m.complexified();
  CHECK(c.name == "sample");
  CHECK(c.symmetric_wrt_weight);
  CHECK(c.aliasing_tail == 0.25);
  CHECK((c.dense() - m.dense().cast<cplx>()).norm() == 0.0);
}

TEST_CASE("op_norm matches a hand-computed singular value") {
  Mat a(2, 2);
  a << 3, 0, 0, -4;
  CHECK(op_norm(a) == doctest::Approx(4.0).epsilon(1e-14));
  MatC b(2, 2);
  b << cplx(0, 2), cplx(0, 0), cplx(0, 0), cplx(1, 0);
  CHECK(op_norm(b) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(op_norm(Mat()) == 0.0);
}

TEST_CASE("deterministic generator repeats its stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 32; ++i) CHECK(a.uniform() == b.uniform());
  const Vec v = Rng(7).vector(5);
  CHECK(v.size() == 5);
  CHECK(v.cwiseAbs().maxCoeff() <= 1.0);
  CHECK(v.cwiseAbs().minCoeff() > 0.0);  // all-zero draw would be broken
}
