#include "asp/adiabatic.hpp"
#include "asp/error.hpp"
#include "asp/pairing.hpp"
#include "asp/twobody.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace asp;

namespace {

OperatorMatrix diag(std::initializer_list<double> d) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) v(i++) = x;
  return OperatorMatrix(Eigen::MatrixXd(v.asDiagonal()));
}

struct TrimerPaths {
  AdiabaticPath direct, stepwise;
  OperatorMatrix reflection;
};

// HF initial state, residual split into site projectors and the rest.
TrimerPaths trimer_paths(double dU) {
  const auto H = build_trimer(1.0, 0.37, -5.0, -5.0 + dU);
  const auto hf = hartree_fock(H, HfAnsatz::trimer_best);
  const auto split = split_residual(H, hf.mean_field, ConstantPolicy::spread);
  const auto sec = H.sector();
  const auto modes = eigendecompose(build_two_particle_matrix(split.residual));
  const auto terms = residual_terms(modes, sec);
  const int p0 = pair_index(6, 0, 1), p2 = pair_index(6, 4, 5);
  std::vector<OperatorMatrix> mats;
  std::vector<int> first, rest, last;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const int dom = modes[terms[k].mode].dominant_pair;
    (dom == p0 && first.empty() ? first : dom == p2 && last.empty() ? last : rest).push_back(static_cast<int>(k));
    mats.push_back(terms[k].matrix);
  }
  const auto R = ReflectionSymmetry::trimer().sector_matrix(sec);
  const auto Hi = split.initial.sector_matrix();
  const int M = static_cast<int>(mats.size());
  return {AdiabaticPath(Hi, mats, PathSchedule::direct(M), R),
          AdiabaticPath(Hi, mats, PathSchedule::stepwise(M, {first, rest, last}), R), R};
}

double commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
  const Eigen::MatrixXd A = a.to_dense(), B = b.to_dense();
  return (A * B - B * A).norm();
}

}  // namespace

TEST(Schedule, DirectValues) {
  const auto s = PathSchedule::direct(3);
  EXPECT_LT((s.values(0.5) - Eigen::Vector3d::Constant(0.5)).norm(), 1e-15);
  EXPECT_DOUBLE_EQ(s.slope(1, 0.2), 1.0);
  EXPECT_TRUE(s.kinks().empty());
}

TEST(Schedule, StepwiseValues) {
  const auto s = PathSchedule::stepwise(3, {{0}, {1}, {2}});
  EXPECT_LT((s.values(0.5) - Eigen::Vector3d(1, 0.5, 0)).norm(), 1e-15);
  EXPECT_LT((s.values(0.0)).norm(), 1e-15);
  EXPECT_LT((s.values(1.0) - Eigen::Vector3d::Ones()).norm(), 1e-15);
  EXPECT_EQ(s.kinks().size(), 2u);
  EXPECT_DOUBLE_EQ(s.slope(0, 1.0 / 3, Side::left), 3.0);
  EXPECT_DOUBLE_EQ(s.slope(0, 1.0 / 3, Side::right), 0.0);
}

TEST(Schedule, EndpointFlat) {
  const auto s = PathSchedule::stepwise(2, {{1}, {0}}, true);
  for (int k = 0; k < 2; ++k) {
    EXPECT_EQ(s.slope(k, 0.0), 0.0);
    EXPECT_EQ(s.slope(k, 1.0, Side::left), 0.0);
    EXPECT_EQ(s.slope(k, 0.5, Side::left), 0.0);
    EXPECT_EQ(s.slope(k, 0.5, Side::right), 0.0);
  }
  EXPECT_NEAR(s.value(1, 0.25), 0.5, 1e-15);
  EXPECT_NEAR(s.slope(1, 0.25), 3.0, 1e-12);
  EXPECT_TRUE(s.kinks().empty());
}

TEST(Schedule, RejectsNonPartition) {
  EXPECT_THROW(PathSchedule::stepwise(3, {{0}, {1}}), DomainError);
  EXPECT_THROW(PathSchedule::stepwise(3, {{0, 1}, {1, 2}}), DomainError);
  EXPECT_THROW(PathSchedule::stepwise(2, {{0}, {}, {1}}), DomainError);
  EXPECT_THROW(PathSchedule::stepwise(2, {{0}, {3}}), DomainError);
}

TEST(Path, EndpointsAndDirectIdentity) {
  const auto p = trimer_paths(1e-6);
  const auto Hf = build_trimer(1.0, 0.37, -5.0, -5.0 + 1e-6).sector_matrix();
  for (const auto* path : {&p.direct, &p.stepwise}) {
    EXPECT_LT((path->at(0.0) - path->initial).frobenius(), 1e-15);
    EXPECT_LT((path->at(1.0) - Hf).frobenius(), 1e-10);
    EXPECT_LT((path->final_hamiltonian() - Hf).frobenius(), 1e-10);
  }
  const auto want = p.direct.initial + 0.37 * (Hf - p.direct.initial);
  EXPECT_LT((p.direct.at(0.37) - want).frobenius(), 1e-12);
}

TEST(Path, DerivativesByFiniteDifference) {
  const auto p = trimer_paths(1e-6);
  const double s = 0.21, h = 1e-6;
  const auto fd = (1.0 / (2 * h)) * (p.stepwise.at(s + h) - p.stepwise.at(s - h));
  EXPECT_LT((fd - p.stepwise.first_derivative(s)).frobenius(), 1e-6);
}

TEST(Path, SymmetryObstruction) {
  const auto p = trimer_paths(0.0);
  for (double s : {0.1, 0.5, 0.69, 0.9}) {
    EXPECT_LT(commutator(p.direct.at(s), p.reflection), 1e-10) << s;
    EXPECT_GT(commutator(p.stepwise.at(s), p.reflection), 1e-3) << s;
  }
}

TEST(Gap, RefinesAvoidedCrossing) {
  const double c = 0.5371, eps = 1e-3;
  Eigen::Matrix2d a;
  a << -c, eps, eps, c;
  const AdiabaticPath path(OperatorMatrix(Eigen::MatrixXd(a)), {diag({1, -1})}, PathSchedule::direct(1));
  const auto tr = gap_trace(path, uniform_grid(41), 2);
  EXPECT_NEAR(tr.minimum.s, c, 1e-6);
  EXPECT_NEAR(tr.minimum.gap, 2 * eps, 1e-9);
  ASSERT_EQ(tr.s.size(), 41u);
  EXPECT_EQ(tr.energies.rows(), 41);
  EXPECT_TRUE(tr.label0.empty());
}

TEST(Gap, TrimerLabels) {
  const auto p = trimer_paths(1e-6);
  const auto tr = gap_trace(p.direct, uniform_grid(21));
  EXPECT_EQ(tr.label0.front().str(), "S");
  EXPECT_EQ(tr.label0.back().str(), "A");
  for (double g : tr.gap) EXPECT_GE(g, -1e-12);
}

TEST(Propagate, ConstantPath) {
  const auto H = build_trimer(1.0, 0.37, -5.0, -5.0).sector_matrix();
  const AdiabaticPath path(H, {OperatorMatrix::zero(9, 9)}, PathSchedule::direct(1));
  for (double T : {1.0, 50.0}) {
    const auto r = propagate(path, T, 200, 20);
    for (const auto& smp : r.samples) EXPECT_NEAR(smp.fidelity, 1.0, 1e-12);
    EXPECT_NEAR(r.final_fidelity, 1.0, 1e-12);
  }
}

TEST(Propagate, Unitarity) {
  const auto p = trimer_paths(1e-6);
  const auto r = propagate(p.stepwise, 40.0, 10000, 1000);
  EXPECT_LT(r.max_norm_drift, 1e-9);
  EXPECT_NEAR(r.samples.back().s, 1.0, 1e-15);
}

TEST(Propagate, DegenerateGroundFlagged) {
  const AdiabaticPath path(diag({0, 0, 1}), {diag({0, 0, 0})}, PathSchedule::direct(1));
  const auto r = propagate(path, 1.0, 100, 50);
  for (const auto& smp : r.samples) EXPECT_TRUE(std::isnan(smp.fidelity));
}

TEST(Propagate, StepwiseBeatsDirect) {
  const auto p = trimer_paths(1e-6);
  EXPECT_LT(propagate(p.direct, 80.0, 4000).final_fidelity, 0.5);
}

TEST(Numerator, ScaledIdentity) {
  const double c = 1.7;
  const AdiabaticPath path(diag({0, 1, 2}), {OperatorMatrix(c * Eigen::MatrixXd::Identity(3, 3))},
                           PathSchedule::direct(1));
  EXPECT_NEAR(adiabatic_numerator(path), c * c, 1e-12);
  const AdiabaticPath flat(diag({0, 1, 2}), {OperatorMatrix(c * Eigen::MatrixXd::Identity(3, 3))},
                           PathSchedule::direct(1, true));
  EXPECT_NEAR(adiabatic_numerator(flat), 1.2 * c * c, 1e-9);
}

TEST(Numerator, TermNormBound) {
  const auto p = trimer_paths(1e-6);
  const auto H = build_trimer_split(1.0, 0.37, -5.0);
  const auto hf = hartree_fock(H, HfAnsatz::trimer_best);
  const auto modes = eigendecompose(build_two_particle_matrix(split_residual(H, hf.mean_field, ConstantPolicy::spread).residual));
  const auto terms = residual_terms(modes, H.sector());
  for (const auto* path : {&p.direct, &p.stepwise}) {
    double bound = 0.0;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const double max_slope = path == &p.direct ? 1.0 : 3.0;
      const double nrm = operator_norm(pseudoprojector(modes[terms[k].mode], H.sector()));
      EXPECT_LE(nrm, norm_bound(6, 2) + 1e-12);
      bound += max_slope * std::abs(terms[k].eigenvalue) * nrm;
    }
    EXPECT_LE(adiabatic_numerator(*path), bound * bound);
  }
}

TEST(Numerator, HadamardStepwiseRatioGrows) {
  auto ratio = [](int L) {
    const auto modes = hadamard_maximal_modes(L);
    const auto sec = FockSector::fixed_number(L, L / 2);
    std::vector<OperatorMatrix> terms;
    std::vector<std::vector<int>> stages;
    for (const auto& m : modes) {
      stages.push_back({static_cast<int>(terms.size())});
      terms.push_back(pseudoprojector(m, sec));
    }
    const auto H0 = OperatorMatrix::zero(sec.size(), sec.size());
    const int M = static_cast<int>(terms.size());
    const double direct = adiabatic_numerator(AdiabaticPath(H0, terms, PathSchedule::direct(M)), 40);
    const double step = adiabatic_numerator(AdiabaticPath(H0, terms, PathSchedule::stepwise(M, stages)), 40);
    return step / direct;
  };
  EXPECT_GT(ratio(8), ratio(4));
}

TEST(Jansen, ClosedFormLinear) {
  const double c = 0.8, delta = 0.05;
  const AdiabaticPath path(diag({0, 1}), {OperatorMatrix(c * Eigen::MatrixXd::Identity(2, 2))}, PathSchedule::direct(1));
  const auto j = jansen_time(path, delta);
  EXPECT_NEAR(j.integral, 7 * c * c, 1e-10);
  EXPECT_NEAR(j.boundary, 2 * c, 1e-12);
  EXPECT_EQ(j.kinks, 0.0);
  EXPECT_NEAR(j.time, (7 * c * c + 2 * c) / delta, 1e-8);
  EXPECT_NEAR(jansen_time(path, delta / 2).time, 2 * j.time, 1e-8);
}

TEST(Jansen, ClosedFormSmoothstep) {
  // int gamma'^2 = 6/5 and int |gamma''| = 3 for 3u^2 - 2u^3.
  const double c = 0.8, delta = 0.1;
  const AdiabaticPath path(diag({0, 1}), {OperatorMatrix(c * Eigen::MatrixXd::Identity(2, 2))},
                           PathSchedule::direct(1, true));
  const auto j = jansen_time(path, delta, 2000);
  EXPECT_EQ(j.boundary, 0.0);
  EXPECT_NEAR(j.integral, 3 * c + 7 * c * c * 1.2, 1e-5);
  EXPECT_NEAR(j.time * delta, j.integral, 1e-9);
}

TEST(Jansen, ClosedGapThrows) {
  const AdiabaticPath path(diag({0, 0}), {diag({1, 1})}, PathSchedule::direct(1));
  EXPECT_THROW(jansen_time(path, 0.1), DomainError);
}
