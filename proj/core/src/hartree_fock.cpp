#include "asp/error.hpp"
#include "asp/hamiltonians.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace asp {

namespace {

constexpr int kBrentBits = std::numeric_limits<double>::digits;
constexpr double kHalfPi = std::numbers::pi / 2;

struct Minimum {
  double x;
  double f;
};

// Grid scan followed by Brent on the bracketing cell.
Minimum minimise_1d(const std::function<double(double)>& f, double lo, double hi, int grid) {
  double best_x = lo, best_f = f(lo);
  const double step = (hi - lo) / (grid - 1);
  for (int i = 1; i < grid; ++i) {
    const double x = lo + i * step;
    const double v = f(x);
    if (v < best_f) best_f = v, best_x = x;
  }
  auto [x, v] = boost::math::tools::brent_find_minima(f, std::max(lo, best_x - step),
                                                      std::min(hi, best_x + step), kBrentBits);
  if (v > best_f) return {best_x, best_f};
  return {x, v};
}

Eigen::VectorXd mode_densities(const FockSector& sector, const Eigen::VectorXd& v) {
  Eigen::VectorXd n = Eigen::VectorXd::Zero(sector.num_modes());
  for (std::size_t i = 0; i < sector.size(); ++i) {
    const double w = v(static_cast<Eigen::Index>(i)) * v(static_cast<Eigen::Index>(i));
    for (int p = 0; p < sector.num_modes(); ++p)
      if (sector.word(i) >> p & 1) n(p) += w;
  }
  return n;
}

bool is_trimer_like(const HamiltonianSpec& s) {
  return s.spin && s.spin->sites == 3 && s.spin->n_up == 1 && s.spin->n_down == 1;
}

HartreeFockResult finish(const HamiltonianSpec& spec, const FockSector& sector, const Eigen::VectorXd& state,
                         double energy, HfAnsatz family, std::vector<double> angles) {
  HartreeFockResult r;
  r.energy = energy;
  r.state = state;
  r.densities = mode_densities(sector, state);
  r.mean_field = mean_field_spec(spec, r.densities);
  r.family = family;
  r.angles = std::move(angles);
  return r;
}

}  // namespace

Eigen::VectorXd trimer_symmetric_orbital(double theta, int spin) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(6);
  c(spin_mode(0, spin)) = std::cos(theta) / std::numbers::sqrt2;
  c(spin_mode(1, spin)) = std::sin(theta);
  c(spin_mode(2, spin)) = std::cos(theta) / std::numbers::sqrt2;
  return c;
}

Eigen::VectorXd trimer_antisymmetric_orbital(int spin) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(6);
  c(spin_mode(0, spin)) = 1.0 / std::numbers::sqrt2;
  c(spin_mode(2, spin)) = -1.0 / std::numbers::sqrt2;
  return c;
}

HamiltonianSpec mean_field_spec(const HamiltonianSpec& spec, const Eigen::VectorXd& n) {
  auto U = hubbard_interactions(spec);
  if (!U) throw DomainError("mean-field substitution needs an on-site Hubbard interaction");
  HamiltonianSpec mf = spec;
  mf.g = Tensor4(spec.num_modes);
  mf.model = "hartree_fock";
  for (int p = 0; p < spec.spin->sites; ++p) {
    const int up = spin_mode(p, 0), dn = spin_mode(p, 1);
    mf.h(up, up) += (*U)(p) * n(dn);
    mf.h(dn, dn) += (*U)(p) * n(up);
    mf.constant -= (*U)(p) * n(up) * n(dn);
  }
  return mf;
}

HartreeFockResult hartree_fock(const HamiltonianSpec& spec, HfAnsatz ansatz) {
  const FockSector sector = spec.sector();
  const Eigen::MatrixXd H = spec.sector_matrix().to_dense();
  auto energy = [&](const std::vector<Eigen::VectorXd>& orbs) {
    const Eigen::VectorXd v = slater_determinant(sector, orbs);
    return v.dot(H * v);
  };

  if (ansatz == HfAnsatz::lowest_orbitals) {
    if (!spec.spin) throw DomainError("lowest-orbital Ansatz needs a spin layout");
    std::vector<Eigen::VectorXd> orbs;
    const int sites = spec.spin->sites;
    for (int spin = 0; spin < 2; ++spin) {
      Eigen::MatrixXd block(sites, sites);
      for (int a = 0; a < sites; ++a)
        for (int b = 0; b < sites; ++b) block(a, b) = spec.h(spin_mode(a, spin), spin_mode(b, spin));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
      const int count = spin == 0 ? spec.spin->n_up : spec.spin->n_down;
      for (int k = 0; k < count; ++k) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(spec.num_modes);
        for (int a = 0; a < sites; ++a) c(spin_mode(a, spin)) = es.eigenvectors()(a, k);
        orbs.push_back(c);
      }
    }
    const Eigen::VectorXd v = slater_determinant(sector, orbs);
    return finish(spec, sector, v, v.dot(H * v), ansatz, {});
  }

  if (!is_trimer_like(spec)) throw DomainError("trimer Ansatz needs three sites with one fermion per spin");

  auto antisym = [&]() {
    const Eigen::VectorXd up = trimer_antisymmetric_orbital(0);
    auto f = [&](double t) { return energy({up, trimer_symmetric_orbital(t, 1)}); };
    const Minimum m = minimise_1d(f, -kHalfPi, kHalfPi, 201);
    const Eigen::VectorXd v = slater_determinant(sector, {up, trimer_symmetric_orbital(m.x, 1)});
    return finish(spec, sector, v, m.f, HfAnsatz::trimer_antisymmetric, {m.x});
  };
  auto sym = [&]() {
    auto f2 = [&](double a, double b) {
      return energy({trimer_symmetric_orbital(a, 0), trimer_symmetric_orbital(b, 1)});
    };
    // Coarse 2D scan, then nested Brent around the best cell.
    constexpr int grid = 51;
    const double step = 2 * kHalfPi / (grid - 1);
    double a0 = 0, b0 = 0, best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid; ++i)
      for (int k = 0; k < grid; ++k) {
        const double a = -kHalfPi + i * step, b = -kHalfPi + k * step;
        const double v = f2(a, b);
        if (v < best) best = v, a0 = a, b0 = b;
      }
    auto inner = [&](double a) {
      auto g = [&](double b) { return f2(a, b); };
      return boost::math::tools::brent_find_minima(g, b0 - step, b0 + step, kBrentBits);
    };
    auto outer = [&](double a) { return inner(a).second; };
    const auto [a, fa] = boost::math::tools::brent_find_minima(outer, a0 - step, a0 + step, kBrentBits);
    const double b = inner(a).first;
    const Eigen::VectorXd v =
        slater_determinant(sector, {trimer_symmetric_orbital(a, 0), trimer_symmetric_orbital(b, 1)});
    return finish(spec, sector, v, fa, HfAnsatz::trimer_symmetric, {a, b});
  };

  switch (ansatz) {
    case HfAnsatz::trimer_antisymmetric: return antisym();
    case HfAnsatz::trimer_symmetric: return sym();
    default: {
      auto A = antisym();
      auto S = sym();
      return S.energy <= A.energy ? S : A;
    }
  }
}

}  // namespace asp
