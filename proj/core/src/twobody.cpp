#include "asp/twobody.hpp"

#include "asp/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace asp {

TwoParticleMatrix build_two_particle_matrix(const InteractionTensor& t) {
  const int L = t.num_modes;
  const auto pairs = pair_list(L);
  const auto n = static_cast<Eigen::Index>(pairs.size());
  TwoParticleMatrix out{L, Eigen::MatrixXd::Zero(n, n)};
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      const auto [p, r] = pairs[a];
      const auto [q, s] = pairs[b];
      out.F(a, b) = t.antisymmetrised(p, q, r, s);
    }
  if (n && (out.F - out.F.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw DomainError("two-particle matrix is not symmetric");
  out.F = 0.5 * (out.F + out.F.transpose()).eval();
  return out;
}

namespace {

// Connected components of the coupling graph |F_ab| > cut.
std::vector<std::vector<Eigen::Index>> blocks_of(const Eigen::MatrixXd& F, double cut) {
  const Eigen::Index n = F.rows();
  std::vector<Eigen::Index> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Eigen::Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a + 1; b < n; ++b)
      if (std::abs(F(a, b)) > cut) parent[find(a)] = find(b);
  std::vector<std::vector<Eigen::Index>> out;
  std::vector<Eigen::Index> slot(n, -1);
  for (Eigen::Index a = 0; a < n; ++a) {
    const Eigen::Index r = find(a);
    if (slot[r] < 0) {
      slot[r] = static_cast<Eigen::Index>(out.size());
      out.emplace_back();
    }
    out[slot[r]].push_back(a);
  }
  return out;
}

}  // namespace

std::vector<TwoBodyMode> eigendecompose(const TwoParticleMatrix& tp, double degeneracy_tol) {
  const Eigen::MatrixXd& F = tp.F;
  const Eigen::Index n = F.rows();
  std::vector<TwoBodyMode> modes;
  if (n == 0) return modes;
  const double scale = F.cwiseAbs().maxCoeff();
  for (const auto& blk : blocks_of(F, 1e-14 * scale)) {
    const auto m = static_cast<Eigen::Index>(blk.size());
    Eigen::MatrixXd sub(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b) sub(a, b) = F(blk[a], blk[b]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
    for (Eigen::Index k = 0; k < m; ++k) {
      TwoBodyMode mode;
      mode.eigenvalue = es.eigenvalues()(k);
      mode.vector = Eigen::VectorXd::Zero(n);
      for (Eigen::Index a = 0; a < m; ++a) mode.vector(blk[a]) = es.eigenvectors()(a, k);
      Eigen::Index top = 0;
      mode.vector.cwiseAbs().maxCoeff(&top);
      if (mode.vector(top) < 0) mode.vector = -mode.vector;
      mode.dominant_pair = static_cast<int>(top);
      modes.push_back(std::move(mode));
    }
  }
  double lam_max = 0;
  for (const auto& m : modes) lam_max = std::max(lam_max, std::abs(m.eigenvalue));
  const double tol = degeneracy_tol * lam_max;
  std::sort(modes.begin(), modes.end(),
            [](const auto& a, const auto& b) { return a.eigenvalue < b.eigenvalue; });
  int group = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= modes.size(); ++i) {
    if (i == modes.size() || (i > start && modes[i].eigenvalue - modes[i - 1].eigenvalue > tol)) {
      std::stable_sort(modes.begin() + static_cast<std::ptrdiff_t>(start),
                       modes.begin() + static_cast<std::ptrdiff_t>(i),
                       [](const auto& a, const auto& b) { return a.dominant_pair < b.dominant_pair; });
      for (std::size_t k = start; k < i; ++k) modes[k].group = group;
      ++group;
      start = i;
    }
  }
  return modes;
}

OperatorMatrix pair_annihilator(const Eigen::VectorXd& phi, const FockSector& sector) {
  const int L = sector.num_modes();
  if (phi.size() != pair_count(L)) throw DomainError("two-body vector length differs from pair count");
  if (sector.particles() < 2) throw DomainError("pair annihilation needs N >= 2");
  const FockSector target = FockSector::fixed_number(L, sector.particles() - 2);
  std::vector<Term> terms;
  for (const auto& [q, s] : pair_list(L)) {
    const double v = phi(pair_index(L, q, s));
    if (v != 0.0) terms.push_back({v, {ann(s), ann(q)}});
  }
  return build_transition(sector, target, terms);
}

OperatorMatrix pseudoprojector(const Eigen::VectorXd& phi, const FockSector& sector) {
  const OperatorMatrix b = pair_annihilator(phi, sector);
  OperatorMatrix p = b.transpose() * b;
  // Restore exact symmetry lost to rounding in the product.
  return 0.5 * (p + p.transpose());
}

OperatorMatrix pseudoprojector_from_strings(const Eigen::VectorXd& phi, const FockSector& sector) {
  const int L = sector.num_modes();
  if (sector.particles() < 2) throw DomainError("pseudoprojector needs N >= 2");
  const auto pairs = pair_list(L);
  std::vector<Term> terms;
  for (const auto& [p, r] : pairs)
    for (const auto& [q, s] : pairs) {
      const double v = phi(pair_index(L, p, r)) * phi(pair_index(L, q, s));
      if (v != 0.0) terms.push_back({v, {cre(p), cre(r), ann(s), ann(q)}});
    }
  if (terms.empty()) return OperatorMatrix::zero(static_cast<Eigen::Index>(sector.size()),
                                                 static_cast<Eigen::Index>(sector.size()));
  return build_operator(sector, terms);
}

std::vector<ResidualTerm> residual_terms(const std::vector<TwoBodyMode>& modes, const FockSector& sector) {
  double lam_max = 1.0;
  for (const auto& m : modes) lam_max = std::max(lam_max, std::abs(m.eigenvalue));
  std::vector<ResidualTerm> out;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    if (std::abs(modes[k].eigenvalue) <= 1e-12 * lam_max) continue;
    out.push_back({static_cast<int>(k), modes[k].eigenvalue,
                   modes[k].eigenvalue * pseudoprojector(modes[k], sector)});
  }
  return out;
}

}  // namespace asp
