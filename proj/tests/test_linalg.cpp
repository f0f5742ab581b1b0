#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "multilens/linalg.hpp"
#include "multilens/errors.hpp"

using namespace multilens;

TEST_CASE("det2 basics") {
  CHECK(det2(Mat2::identity()) == 1.0);
  CHECK(det2(Mat2{0, 1, 1, 0}) == -1.0);
}

TEST_CASE("det2 agrees with the LU determinant") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int t = 0; t < 50; ++t) {
    const Mat2 m{d(rng), d(rng), d(rng), d(rng)};
    DenseMatrix dm(2, 2);
    dm.set_block2(0, 0, m);
    CHECK(det2(m) == doctest::Approx(dm.determinant()).epsilon(1e-12));
  }
}

TEST_CASE("block triangular determinant: single block") {
  BlockMatrix bm({2}, {2});
  DenseMatrix d(2, 2);
  d.set_block2(0, 0, Mat2{3, 1, 0, 2});
  bm.set_block(0, 0, d);
  CHECK(block_triangular_det(bm) == doctest::Approx(6.0));
}

TEST_CASE("block triangular determinant: singular diagonal block") {
  BlockMatrix bm({2, 2}, {2, 2});
  DenseMatrix s(2, 2);
  s.set_block2(0, 0, Mat2{1, 2, 2, 4});  // rank 1
  DenseMatrix r(2, 2);
  r.set_block2(0, 0, Mat2{5, 1, 2, 3});
  bm.set_block(0, 0, s);
  bm.set_block(1, 1, r);
  CHECK(block_triangular_det(bm) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("block triangular determinant rejects nonzero lower block") {
  BlockMatrix bm({2, 2}, {2, 2});
  DenseMatrix d(2, 2);
  d.set_block2(0, 0, Mat2::identity());
  bm.set_block(0, 0, d);
  bm.set_block(1, 1, d);
  DenseMatrix low(2, 2);
  low.set_block2(0, 0, Mat2{0, 0, 1e-3, 0});
  bm.set_block(1, 0, low);
  CHECK_THROWS_AS(block_triangular_det(bm), ValidationError);
}

TEST_CASE("block determinant identity on random upper-triangular matrices") {
  // 200 random matrices, k <= 5 blocks of size <= 3, against dense LU
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> kd(1, 5), sd(1, 3);
  std::uniform_real_distribution<double> vd(-2.0, 2.0);
  for (int t = 0; t < 200; ++t) {
    const int k = kd(rng);
    std::vector<std::size_t> sizes;
    for (int i = 0; i < k; ++i) sizes.push_back(sd(rng));
    BlockMatrix bm(sizes, sizes);
    for (int i = 0; i < k; ++i) {
      for (int j = i; j < k; ++j) {
        DenseMatrix b(sizes[i], sizes[j]);
        for (std::size_t r = 0; r < sizes[i]; ++r)
          for (std::size_t c = 0; c < sizes[j]; ++c) b.at(r, c) = vd(rng);
        if (i == j) {
          // keep the diagonal comfortably invertible
          for (std::size_t r = 0; r < sizes[i]; ++r) b.at(r, r) += 4.0;
        }
        bm.set_block(i, j, b);
      }
    }
    const double product = block_triangular_det(bm);
    const double dense = bm.to_dense().determinant();
    CHECK(std::abs(product - dense) <=
          1e-10 * std::max(1.0, std::abs(dense)));
  }
}
