#include "asp/error.hpp"
#include "asp/fockspace.hpp"
#include "asp/hamiltonians.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace asp;

TEST(FockSector, SizesAndOrder) {
  const auto s = FockSector::fixed_number(2, 1);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.word(0), 0b01u);
  EXPECT_EQ(s.word(1), 0b10u);
  EXPECT_EQ(FockSector::fixed_spin(3, 1, 1).size(), 9u);
  EXPECT_EQ(FockSector::fixed_spin(4, 2, 2).size(), 36u);
  EXPECT_EQ(FockSector::fixed_number(10, 5).size(), 252u);
  EXPECT_EQ(FockSector::fixed_spin(8, 4, 4).size(), 4900u);
}

TEST(FockSector, CanonicalAndInverse) {
  const auto s = FockSector::fixed_spin(4, 2, 1);
  EXPECT_TRUE(std::is_sorted(s.basis().begin(), s.basis().end()));
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(s.index_of(s.word(i)), i);
    EXPECT_EQ(std::popcount(s.word(i)), 3);
  }
  EXPECT_FALSE(s.contains(0b11u));
  EXPECT_EQ(s.particles(), 3);
}

TEST(FockSector, InvalidConstraint) {
  EXPECT_THROW(FockSector::fixed_number(4, 5), DomainError);
  EXPECT_THROW(FockSector::fixed_number(4, -1), DomainError);
  EXPECT_THROW(FockSector::fixed_spin(2, 3, 0), DomainError);
}

TEST(ApplyExcitation, Examples) {
  const OpString a0{ann(0)};
  EXPECT_FALSE(apply_excitation(0b10, a0));
  const OpString c1{cre(1)};
  auto r = apply_excitation(0b01, c1);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->word, 0b11u);
  // a+_1 a+_0 |vac> = -a+_0 a+_1 |vac>; the canonical |11> is a+_0 a+_1 |vac>.
  EXPECT_EQ(r->sign, -1);
  const OpString c01{cre(0), cre(1)}, c10{cre(1), cre(0)};
  auto x = apply_excitation(0, c01), y = apply_excitation(0, c10);
  EXPECT_EQ(x->word, y->word);
  EXPECT_EQ(x->sign, 1);
  EXPECT_EQ(x->sign, -y->sign);
  const OpString aa{ann(0), ann(1)};
  auto z = apply_excitation(0b11, aa);
  ASSERT_TRUE(z);
  EXPECT_EQ(z->word, 0u);
  EXPECT_EQ(z->sign, -1);  // a_0 a_1 a+_0 a+_1 |vac> = -|vac>
  const OpString cc{cre(0), cre(0)};
  EXPECT_FALSE(apply_excitation(0, cc));
}

TEST(BuildOperator, HoppingAndNumber) {
  const auto s = FockSector::fixed_number(2, 1);
  const double j = 0.7;
  std::vector<Term> hop{{j, {cre(0), ann(1)}}, {j, {cre(1), ann(0)}}};
  const auto m = build_operator(s, hop);
  EXPECT_TRUE(m.hermitian());
  Eigen::Matrix2d want;
  want << 0, j, j, 0;
  EXPECT_LT((m.to_dense() - want).norm(), 1e-15);
  std::vector<Term> n0{{1.0, {cre(0), ann(0)}}};
  EXPECT_LT((build_operator(s, n0).to_dense() - Eigen::Vector2d(1, 0).asDiagonal().toDenseMatrix()).norm(), 1e-15);
}

TEST(BuildOperator, HubbardDimer) {
  for (double U : {-3.0, 0.0, 1.5, 8.0}) {
    const auto spec = build_hubbard_chain(2, 1.0, U, 0.0, false, 1, 1);
    const auto ev = eigenvalues(spec.sector_matrix());
    EXPECT_NEAR(ev(0), (U - std::sqrt(U * U + 16.0)) / 2, 1e-12) << "U=" << U;
  }
}

TEST(BuildOperator, RejectsNonConserving) {
  const auto s = FockSector::fixed_number(3, 1);
  std::vector<Term> t{{1.0, {cre(0)}}};
  EXPECT_THROW(build_operator(s, t), DomainError);
  const auto sp = FockSector::fixed_spin(2, 1, 0);
  std::vector<Term> flip{{1.0, {cre(1), ann(0)}}};
  EXPECT_THROW(build_operator(sp, flip), DomainError);
}

TEST(BuildOperator, CommutesWithNumberAndTransposes) {
  const int L = 5;
  const auto sec = FockSector::constrained(L, {});  // all particle numbers
  std::vector<Term> num;
  for (int p = 0; p < L; ++p) num.push_back({1.0, {cre(p), ann(p)}});
  const auto N = build_operator(sec, num).to_dense();
  for (int p = 0; p < L; ++p)
    for (int q = 0; q < L; ++q) {
      std::vector<Term> t{{1.0, {cre(p), ann(q)}}}, tt{{1.0, {cre(q), ann(p)}}};
      const auto A = build_operator(sec, t).to_dense();
      EXPECT_LT((A * N - N * A).norm(), 1e-12);
      EXPECT_LT((A.transpose() - build_operator(sec, tt).to_dense()).norm(), 1e-14);
    }
}

TEST(BuildOperator, PairCreationAnticommutes) {
  const int L = 5;
  const auto from = FockSector::fixed_number(L, 2), to = FockSector::fixed_number(L, 4);
  for (int p = 0; p < L; ++p)
    for (int q = 0; q < L; ++q) {
      std::vector<Term> pq{{1.0, {cre(p), cre(q)}}}, qp{{-1.0, {cre(q), cre(p)}}};
      EXPECT_LT((build_transition(from, to, pq).to_dense() - build_transition(from, to, qp).to_dense()).norm(), 1e-15);
    }
}

TEST(Eigensolve, Examples) {
  Eigen::MatrixXd d = Eigen::Vector3d(3, 1, 2).asDiagonal();
  auto es = eigensolve(OperatorMatrix(d));
  EXPECT_LT((es.values - Eigen::Vector3d(1, 2, 3)).norm(), 1e-15);
  Eigen::Matrix2d h;
  h << 0, -0.4, -0.4, 0;
  es = eigensolve(OperatorMatrix(Eigen::MatrixXd(h)));
  EXPECT_NEAR(es.values(0), -0.4, 1e-15);
  EXPECT_NEAR(es.values(1), 0.4, 1e-15);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(30, 30);
  for (int i = 0; i < 30; ++i)
    for (int k = 0; k < 30; ++k) a(i, k) = nd(rng);
  a = (a + a.transpose()).eval();
  const OperatorMatrix A(a);
  es = eigensolve(A);
  EXPECT_LT((es.vectors * es.values.asDiagonal() * es.vectors.transpose() - a).norm(), 1e-10);
  for (int k = 0; k < 30; ++k)
    EXPECT_LT((a * es.vectors.col(k) - es.values(k) * es.vectors.col(k)).norm(), 1e-10 * operator_norm(A));
  EXPECT_TRUE(std::is_sorted(es.values.data(), es.values.data() + 30));
  EXPECT_EQ(eigensolve(A, 4).values.size(), 4);
}

TEST(Eigensolve, RejectsNonHermitian) {
  Eigen::Matrix2d m;
  m << 0, 1, 0, 0;
  const OperatorMatrix A{Eigen::MatrixXd(m)};
  EXPECT_FALSE(A.hermitian());
  EXPECT_THROW(eigensolve(A), DomainError);
  EXPECT_NEAR(operator_norm(A), 1.0, 1e-15);
}

TEST(OperatorMatrix, StorageFollowsDimension) {
  const auto small = build_hubbard_chain(4, 1.0, 2.0, 0.0, true, 2, 2).sector_matrix();
  EXPECT_TRUE(small.is_dense());
  const auto big = build_hubbard_chain(8, 1.0, 2.0, 0.0, true, 4, 4).sector_matrix();
  EXPECT_FALSE(big.is_dense());
  EXPECT_EQ(big.rows(), 4900);
  EXPECT_TRUE(big.hermitian());
}

TEST(SlaterDeterminant, TwoOrbitals) {
  const auto s = FockSector::fixed_number(3, 2);
  Eigen::VectorXd a = Eigen::Vector3d(1, 1, 0) / std::sqrt(2.0), b = Eigen::Vector3d(0, 0, 1);
  const auto v = slater_determinant(s, {a, b});
  EXPECT_NEAR(v.norm(), 1.0, 1e-14);
  // Swapping orbitals flips the sign.
  EXPECT_LT((slater_determinant(s, {b, a}) + v).norm(), 1e-14);
}
