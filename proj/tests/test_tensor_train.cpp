#include <doctest.h>

#include <complex>
#include <sstream>

#include "ttpricer/serialization.hpp"
#include "ttpricer/tensor_train.hpp"

#include "test_util.hpp"

using namespace ttp;
using namespace ttptest;

namespace {

TensorTrain ones_tt(int d) {
  std::vector<Core> cores;
  for (int i = 0; i < d; ++i) cores.push_back(Core{Matrix::Ones(1, 1), Matrix::Ones(1, 1)});
  return TensorTrain(std::move(cores));
}

}  // namespace

TEST_CASE("evaluate on the all-ones rank-1 train") {
  TensorTrain tt = ones_tt(3);
  auto res = evaluate(tt, {0, 1, 0});
  CHECK(res.value.real() == doctest::Approx(1.0));
  CHECK(res.value.imag() == doctest::Approx(0.0));
  // One chi_{i-1} x chi_i product per site, all bonds 1.
  CHECK(res.mult_count == 3);
}

TEST_CASE("evaluate mult count matches Table II accounting") {
  // d=5 with every interior bond 2: 1*2 + 2*2 + 2*2 + 2*2 + 2*1 = 16.
  TensorTrain tt = random_tt({2, 2, 2, 2, 2}, {2, 2, 2, 2}, 7);
  auto res = evaluate(tt, {0, 1, 1, 0, 1});
  CHECK(res.mult_count == 16);

  // Rank-1 train of length 10 costs d multiplications.
  TensorTrain unit = ones_tt(10);
  CHECK(evaluate(unit, IndexVec(10, 0)).mult_count == 10);
}

TEST_CASE("evaluate equals dense entry for an exact decomposition") {
  TensorTrain tt = random_tt({2, 2, 2}, {2, 2}, 11);
  DenseTensor dense = to_dense(tt);
  auto res = evaluate(tt, {0, 1, 0});
  CHECK(std::abs(res.value - dense.at({0, 1, 0})) < 1e-12);
}

TEST_CASE("evaluate rejects out-of-range indices") {
  TensorTrain tt = random_tt({2, 3}, {2}, 3);
  CHECK_THROWS_AS(evaluate(tt, {0, 3}), BoundsError);
  CHECK_THROWS_AS(evaluate(tt, {0}), BoundsError);
  CHECK_THROWS_AS(evaluate(tt, {-1, 0}), BoundsError);
}

TEST_CASE("to_dense of a rank-1 outer product") {
  Core c1{Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 2.0)};
  Core c2{Matrix::Constant(1, 1, 3.0), Matrix::Constant(1, 1, 4.0)};
  TensorTrain tt({c1, c2});
  DenseTensor d = to_dense(tt);
  CHECK(d.at({0, 0}).real() == doctest::Approx(3.0));
  CHECK(d.at({0, 1}).real() == doctest::Approx(4.0));
  CHECK(d.at({1, 0}).real() == doctest::Approx(6.0));
  CHECK(d.at({1, 1}).real() == doctest::Approx(8.0));
}

TEST_CASE("to_dense agrees with evaluate everywhere") {
  TensorTrain tt = random_tt({3, 4, 2, 3}, {3, 5, 2}, 23);
  DenseTensor dense = to_dense(tt);
  for_each_index(dense.dims, [&](const IndexVec& idx) {
    CHECK(std::abs(evaluate(tt, idx).value - dense.at(idx)) < 1e-12);
  });
}

TEST_CASE("to_dense degenerate and oversized inputs") {
  CHECK_THROWS_AS(to_dense(TensorTrain{}), StructureError);
  TensorTrain tt = random_tt({10, 10, 10}, {2, 2}, 5);
  CHECK_THROWS_AS(to_dense(tt, 999), SizeError);
}

TEST_CASE("empty tensor train construction stays empty") {
  TensorTrain tt;
  CHECK(tt.empty());
  CHECK_THROWS_AS(evaluate(tt, {}), StructureError);
}

TEST_CASE("constructor rejects inconsistent bonds") {
  std::mt19937 rng(2);
  Core a{random_matrix(1, 3, rng)};
  Core b{random_matrix(2, 1, rng)};
  CHECK_THROWS_AS(TensorTrain({a, b}), StructureError);
}

TEST_CASE("canonicalize preserves the represented tensor") {
  TensorTrain tt = random_tt({3, 2, 4, 3}, {3, 4, 3}, 31);
  DenseTensor before = to_dense(tt);
  const double scale = std::sqrt(dense_norm2(before));

  for (Direction dir : {Direction::Left, Direction::Right}) {
    TensorTrain canon = canonicalize(tt, dir);
    DenseTensor after = to_dense(canon);
    CHECK(std::sqrt(dense_dist2(before, after)) <= 1e-12 * scale);
  }
}

TEST_CASE("left canonical cores are isometries") {
  TensorTrain tt = random_tt({3, 3, 3, 3}, {3, 6, 3}, 37);
  TensorTrain canon = canonicalize(tt, Direction::Left);
  for (int i = 0; i + 1 < canon.size(); ++i) {
    const Eigen::Index chi = canon.slice(i, 0).cols();
    Matrix gram = Matrix::Zero(chi, chi);
    for (Eigen::Index x = 0; x < canon.local_dim(i); ++x)
      gram += canon.slice(i, x).adjoint() * canon.slice(i, x);
    CHECK((gram - Matrix::Identity(chi, chi)).norm() < 1e-12);
  }
}

TEST_CASE("right canonical cores are isometries") {
  TensorTrain tt = random_tt({2, 4, 3, 2}, {2, 4, 2}, 41);
  TensorTrain canon = canonicalize(tt, Direction::Right);
  for (int i = 1; i < canon.size(); ++i) {
    const Eigen::Index chi = canon.slice(i, 0).rows();
    Matrix gram = Matrix::Zero(chi, chi);
    for (Eigen::Index x = 0; x < canon.local_dim(i); ++x)
      gram += canon.slice(i, x) * canon.slice(i, x).adjoint();
    CHECK((gram - Matrix::Identity(chi, chi)).norm() < 1e-12);
  }
}

TEST_CASE("canonicalize keeps a rank-1 product of unit vectors rank-1") {
  std::vector<Core> cores;
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector2cd v;
    v << Complex(0.6, 0.0), Complex(0.0, 0.8);
    Core c{Matrix::Constant(1, 1, v(0)), Matrix::Constant(1, 1, v(1))};
    cores.push_back(c);
  }
  TensorTrain tt(std::move(cores));
  DenseTensor before = to_dense(tt);
  TensorTrain canon = canonicalize(tt, Direction::Left);
  CHECK(canon.max_bond_dim() == 1);
  CHECK(max_abs_diff(before, to_dense(canon)) < 1e-14);
}

TEST_CASE("truncate_svd with tiny tolerance keeps tight ranks") {
  TensorTrain tt = random_tt({2, 3, 3, 2}, {2, 4, 2}, 43);
  auto [cut, report] = truncate_svd(tt, 1e-15);
  CHECK(cut.bond_dims() == tt.bond_dims());
  CHECK(report.achieved_rel_error <= 1e-15);
  DenseTensor a = to_dense(tt), b = to_dense(cut);
  CHECK(std::sqrt(dense_dist2(a, b) / dense_norm2(a)) < 1e-10);
}

TEST_CASE("truncate_svd recovers an inflated rank-2 train") {
  TensorTrain tt = random_tt({3, 3, 3, 3}, {2, 2, 2}, 47);
  // Zero-pad every interior bond from 2 to 5; the tensor is unchanged.
  std::vector<Core> inflated;
  for (int i = 0; i < tt.size(); ++i) {
    const Eigen::Index l = i == 0 ? 1 : 5;
    const Eigen::Index r = i == tt.size() - 1 ? 1 : 5;
    Core core;
    for (Eigen::Index x = 0; x < tt.local_dim(i); ++x) {
      Matrix m = Matrix::Zero(l, r);
      m.topLeftCorner(tt.slice(i, x).rows(), tt.slice(i, x).cols()) = tt.slice(i, x);
      core.push_back(std::move(m));
    }
    inflated.push_back(std::move(core));
  }
  TensorTrain fat(std::move(inflated));
  auto [cut, report] = truncate_svd(fat, 1e-10);
  for (Eigen::Index b : cut.bond_dims()) CHECK(b == 2);
  CHECK(max_abs_diff(to_dense(tt), to_dense(cut)) < 1e-10);
}

TEST_CASE("truncate_svd validates its tolerance") {
  TensorTrain tt = random_tt({2, 2}, {2}, 5);
  CHECK_THROWS_AS(truncate_svd(tt, 0.0), ParameterError);
  CHECK_THROWS_AS(truncate_svd(tt, 1.0), ParameterError);
  CHECK_THROWS_AS(truncate_svd(tt, -1e-3), ParameterError);
}

TEST_CASE("truncation report matches the recomputed dense error") {
  for (unsigned seed : {3u, 17u, 29u}) {
    TensorTrain tt = random_tt({4, 4, 4, 4, 4}, {4, 9, 9, 4}, seed);
    DenseTensor before = to_dense(tt);
    for (double tol : {1e-2, 1e-4, 1e-8}) {
      auto [cut, report] = truncate_svd(tt, tol);
      DenseTensor after = to_dense(cut);
      const double dense_rel = dense_dist2(before, after) / dense_norm2(before);
      CHECK(report.achieved_rel_error <= tol);
      CHECK(std::abs(report.achieved_rel_error - dense_rel) < 1e-10);
      // Bond dimensions never grow.
      auto bb = tt.bond_dims();
      auto cb = cut.bond_dims();
      for (std::size_t i = 0; i < cb.size(); ++i) CHECK(cb[i] <= bb[i]);
    }
  }
}

TEST_CASE("pair_merge of two rank-1 cores multiplies their values") {
  Core c1{Matrix::Constant(1, 1, Complex(2.0, 1.0))};
  Core c2{Matrix::Constant(1, 1, Complex(0.0, 3.0))};
  TensorTrain tt({c1, c2});
  TensorTrainOperator tto = pair_merge(tt, {{0, 1}});
  CHECK(tto.size() == 1);
  CHECK(tto.bond_dim(0) == 1);
  CHECK(tto.bond_dim(1) == 1);
  CHECK(std::abs(tto.core(0)[0][0](0, 0) - Complex(2.0, 1.0) * Complex(0.0, 3.0)) < 1e-15);
}

TEST_CASE("pair_merge preserves the represented tensor") {
  TensorTrain tt = random_tt({3, 2, 4, 2}, {2, 3, 2}, 53);
  TensorTrainOperator tto = pair_merge_adjacent(tt);
  CHECK(tto.size() == 2);
  DenseTensor a = to_dense(tt);
  DenseTensor b = to_dense(tto);
  CHECK(a.dims == b.dims);
  CHECK(max_abs_diff(a, b) < 1e-12);
}

TEST_CASE("pair_merge rejects malformed pairings") {
  TensorTrain odd = random_tt({2, 2, 2}, {2, 2}, 59);
  CHECK_THROWS_AS(pair_merge_adjacent(odd), StructureError);
  TensorTrain tt = random_tt({2, 2, 2, 2}, {2, 2, 2}, 61);
  CHECK_THROWS_AS(pair_merge(tt, {{0, 1}}), StructureError);
  CHECK_THROWS_AS(pair_merge(tt, {{0, 2}, {1, 3}}), StructureError);
}

TEST_CASE("contract_operator against an identity operator") {
  TensorTrain tt = random_tt({3, 3}, {2}, 67);
  std::vector<OpCore> id_cores;
  for (int i = 0; i < 2; ++i) {
    OpCore oc(3, std::vector<Matrix>(3));
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        oc[j][k] = Matrix::Constant(1, 1, j == k ? 1.0 : 0.0);
    id_cores.push_back(std::move(oc));
  }
  TensorTrainOperator id(std::move(id_cores));
  TensorTrain out = contract_operator(id, tt);
  CHECK(max_abs_diff(to_dense(tt), to_dense(out)) < 1e-12);
}

TEST_CASE("contract_operator matches the brute-force double sum") {
  const int d = 2, n = 4;
  TensorTrain phi2d = random_tt({n, 3, n, 3}, {2, 3, 2}, 71);
  TensorTrainOperator tto = pair_merge_adjacent(phi2d);
  TensorTrain tt = random_tt({n, n}, {3}, 73);
  TensorTrain out = contract_operator(tto, tt);

  DenseTensor op = to_dense(tto);
  DenseTensor vec = to_dense(tt);
  DenseTensor got = to_dense(out);
  for (Eigen::Index k1 = 0; k1 < 3; ++k1)
    for (Eigen::Index k2 = 0; k2 < 3; ++k2) {
      Complex expect = 0.0;
      for (Eigen::Index j1 = 0; j1 < n; ++j1)
        for (Eigen::Index j2 = 0; j2 < n; ++j2)
          expect += op.at({j1, k1, j2, k2}) * vec.at({j1, j2});
      CHECK(std::abs(expect - got.at({k1, k2})) < 1e-12);
    }
  (void)d;
}

TEST_CASE("contract_operator validates shapes") {
  TensorTrain phi2d = random_tt({4, 3, 4, 3}, {2, 3, 2}, 79);
  TensorTrainOperator tto = pair_merge_adjacent(phi2d);
  TensorTrain wrong = random_tt({5, 5}, {3}, 83);
  CHECK_THROWS_AS(contract_operator(tto, wrong), StructureError);
}

TEST_CASE("dot and norm2 agree with dense sums") {
  TensorTrain a = random_tt({3, 2, 3}, {2, 4}, 89);
  TensorTrain b = random_tt({3, 2, 3}, {3, 2}, 97);
  DenseTensor da = to_dense(a), db = to_dense(b);
  Complex expect = 0.0;
  for (std::size_t i = 0; i < da.data.size(); ++i) expect += da.data[i] * db.data[i];
  CHECK(std::abs(dot(a, b) - expect) < 1e-12);
  CHECK(norm2(a) == doctest::Approx(dense_norm2(da)).epsilon(1e-12));
}

TEST_CASE("tensor train container round-trips bit-exactly") {
  TensorTrain tt = random_tt({3, 4, 2}, {3, 5}, 101);
  std::stringstream ss;
  save_tensor_train(tt, ss);
  TensorTrain back = load_tensor_train(ss);
  REQUIRE(back.size() == tt.size());
  for (int i = 0; i < tt.size(); ++i) {
    REQUIRE(back.local_dim(i) == tt.local_dim(i));
    for (Eigen::Index x = 0; x < tt.local_dim(i); ++x)
      CHECK(back.slice(i, x) == tt.slice(i, x));
  }
}

TEST_CASE("container loader rejects garbage") {
  std::stringstream ss("definitely not a container");
  CHECK_THROWS_AS(load_tensor_train(ss), IoError);
}
