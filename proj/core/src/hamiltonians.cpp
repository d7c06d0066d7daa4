#include "asp/hamiltonians.hpp"

#include "asp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace asp {

double Tensor4::max_abs() const {
  double m = 0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Tensor4& Tensor4::operator+=(const Tensor4& o) {
  if (o.dim_ != dim_) throw DomainError("tensor dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Tensor4& Tensor4::operator-=(const Tensor4& o) {
  if (o.dim_ != dim_) throw DomainError("tensor dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

Tensor4& Tensor4::operator*=(double f) {
  for (double& v : data_) v *= f;
  return *this;
}

std::vector<std::array<int, 2>> pair_list(int modes) {
  std::vector<std::array<int, 2>> out;
  out.reserve(static_cast<std::size_t>(pair_count(modes)));
  for (int p = 0; p < modes; ++p)
    for (int r = p + 1; r < modes; ++r) out.push_back({p, r});
  return out;
}

// ---------------------------------------------------------------- spec

HamiltonianSpec HamiltonianSpec::zeros(int num_modes, int particles, std::optional<SpinLayout> spin) {
  HamiltonianSpec s;
  s.num_modes = num_modes;
  s.h = Eigen::MatrixXd::Zero(num_modes, num_modes);
  s.g = Tensor4(num_modes);
  s.particles = particles;
  s.spin = spin;
  return s;
}

FockSector HamiltonianSpec::sector() const {
  if (spin) {
    if (2 * spin->sites != num_modes) throw DomainError("spin layout does not match mode count");
    return FockSector::fixed_spin(spin->sites, spin->n_up, spin->n_down);
  }
  return FockSector::fixed_number(num_modes, particles);
}

std::vector<Term> HamiltonianSpec::terms() const {
  std::vector<Term> t;
  if (constant != 0.0) t.push_back({constant, {}});
  for (int p = 0; p < num_modes; ++p)
    for (int q = 0; q < num_modes; ++q)
      if (h(p, q) != 0.0) t.push_back({h(p, q), {cre(p), ann(q)}});
  for (int p = 0; p < num_modes; ++p)
    for (int q = 0; q < num_modes; ++q)
      for (int r = 0; r < num_modes; ++r) {
        if (r == p) continue;
        for (int s = 0; s < num_modes; ++s) {
          if (s == q) continue;
          const double v = g(p, q, r, s);
          if (v != 0.0) t.push_back({0.5 * v, {cre(p), cre(r), ann(s), ann(q)}});
        }
      }
  return t;
}

OperatorMatrix HamiltonianSpec::matrix_in(const FockSector& sector) const {
  const auto t = terms();
  if (t.empty()) return OperatorMatrix::zero(static_cast<Eigen::Index>(sector.size()),
                                             static_cast<Eigen::Index>(sector.size()));
  return build_operator(sector, t);
}

HamiltonianSpec operator-(const HamiltonianSpec& a, const HamiltonianSpec& b) {
  if (a.num_modes != b.num_modes) throw DomainError("hamiltonians act on different mode counts");
  HamiltonianSpec r = a;
  r.h -= b.h;
  r.g -= b.g;
  r.constant -= b.constant;
  r.model = "residual";
  return r;
}

SymmetryReport validate_symmetries(const HamiltonianSpec& spec, double tol) {
  SymmetryReport rep;
  const int L = spec.num_modes;
  auto note = [&](const char* rel, std::array<int, 4> idx, double dev) {
    rep.max_deviation = std::max(rep.max_deviation, dev);
    if (dev <= tol) return;
    rep.passed = false;
    for (auto& v : rep.violations)
      if (v.relation == rel) {
        if (dev > v.deviation) v = {rel, idx, dev};
        return;
      }
    rep.violations.push_back({rel, idx, dev});
  };
  if (spec.h.rows() != L || spec.h.cols() != L || spec.g.dim() != L) {
    rep.passed = false;
    rep.violations.push_back({"tensor shape", {L, L, L, L}, std::numeric_limits<double>::infinity()});
    return rep;
  }
  for (int p = 0; p < L; ++p)
    for (int q = 0; q < L; ++q) note("h_PQ = h_QP", {p, q, 0, 0}, std::abs(spec.h(p, q) - spec.h(q, p)));
  for (int p = 0; p < L; ++p)
    for (int q = 0; q < L; ++q)
      for (int r = 0; r < L; ++r)
        for (int s = 0; s < L; ++s) {
          const double v = spec.g(p, q, r, s);
          note("g_PQRS = g_RSPQ", {p, q, r, s}, std::abs(v - spec.g(r, s, p, q)));
          note("g_PQRS = g_QPRS", {p, q, r, s}, std::abs(v - spec.g(q, p, r, s)));
          note("g_PQRS = g_PQSR", {p, q, r, s}, std::abs(v - spec.g(p, q, s, r)));
        }
  return rep;
}

InteractionTensor absorb_one_body(const HamiltonianSpec& spec) {
  const int L = spec.num_modes;
  const int N = spec.particles;
  if (N < 2) throw DomainError("one-body absorption undefined for N < 2");
  const double inv = 1.0 / (N - 1);
  const double cshift = 2.0 * spec.constant / (static_cast<double>(N) * (N - 1));
  InteractionTensor t{L, spec.g, Tensor4(L)};
  Tensor4& G = t.combined;
  for (int p = 0; p < L; ++p)
    for (int q = 0; q < L; ++q) {
      for (int r = 0; r < L; ++r) {
        G(p, q, r, r) += spec.h(p, q) * inv;
        G(r, r, p, q) += spec.h(p, q) * inv;
      }
      if (p == q)
        for (int r = 0; r < L; ++r) G(p, p, r, r) += cshift;
    }
  G *= 0.5;
  for (int p = 0; p < L; ++p)
    for (int q = 0; q < L; ++q)
      for (int r = 0; r < L; ++r)
        for (int s = 0; s < L; ++s)
          t.antisymmetrised(p, q, r, s) = G(p, q, r, s) - G(r, q, p, s) - G(p, s, r, q) + G(r, s, p, q);
  return t;
}

OperatorMatrix antisymmetrised_matrix(const InteractionTensor& t, const FockSector& sector) {
  const int L = t.num_modes;
  std::vector<Term> terms;
  for (int p = 0; p < L; ++p)
    for (int r = p + 1; r < L; ++r)
      for (int q = 0; q < L; ++q)
        for (int s = q + 1; s < L; ++s) {
          const double v = t.antisymmetrised(p, q, r, s);
          if (v != 0.0) terms.push_back({v, {cre(p), cre(r), ann(s), ann(q)}});
        }
  if (terms.empty()) return OperatorMatrix::zero(static_cast<Eigen::Index>(sector.size()),
                                                 static_cast<Eigen::Index>(sector.size()));
  return build_operator(sector, terms);
}

// ---------------------------------------------------------------- models

namespace {

void add_bond(HamiltonianSpec& s, int a, int b, int spin, double t) {
  const int P = spin_mode(a, spin), Q = spin_mode(b, spin);
  s.h(P, Q) += t;
  s.h(Q, P) += t;
}

void add_onsite(HamiltonianSpec& s, int site, double U) {
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const int P = spin_mode(site, a), R = spin_mode(site, b);
      s.g(P, P, R, R) = U;
    }
}

}  // namespace

HamiltonianSpec build_hubbard_chain(int sites, double j, double U, double mu, bool periodic,
                                    int n_up, int n_down) {
  if (sites < 2) throw DomainError("a chain needs at least two sites");
  auto s = HamiltonianSpec::zeros(2 * sites, n_up + n_down, SpinLayout{sites, n_up, n_down});
  s.model = "hubbard_chain";
  const int bonds = periodic && sites > 2 ? sites : sites - 1;
  for (int b = 0; b < bonds; ++b)
    for (int spin = 0; spin < 2; ++spin) add_bond(s, b, (b + 1) % sites, spin, j);
  for (int p = 0; p < 2 * sites; ++p) s.h(p, p) += mu;
  for (int p = 0; p < sites; ++p) add_onsite(s, p, U);
  return s;
}

HamiltonianSpec build_trimer(double j, double j13, double U1, double U3) {
  auto s = HamiltonianSpec::zeros(6, 2, SpinLayout{3, 1, 1});
  s.model = "trimer";
  for (int spin = 0; spin < 2; ++spin) {
    add_bond(s, 0, 1, spin, j);
    add_bond(s, 1, 2, spin, j);
    add_bond(s, 0, 2, spin, spin == 0 ? j13 : -j13);
  }
  add_onsite(s, 0, U1);
  add_onsite(s, 2, U3);
  return s;
}

HamiltonianSpec build_four_site(double j, double delta, double U, double dU) {
  auto s = HamiltonianSpec::zeros(8, 4, SpinLayout{4, 2, 2});
  s.model = "four_site";
  for (int b = 0; b < 4; ++b)
    for (int spin = 0; spin < 2; ++spin) {
      const double t = b % 2 == 0 ? j : (spin == 0 ? j + delta : j - delta);
      add_bond(s, b, (b + 1) % 4, spin, t);
    }
  for (int p = 0; p < 4; ++p) add_onsite(s, p, U + p * dU);
  return s;
}

std::optional<Eigen::VectorXd> hubbard_interactions(const HamiltonianSpec& spec, double tol) {
  if (!spec.spin) return std::nullopt;
  const int L = spec.num_modes;
  const int sites = spec.spin->sites;
  Eigen::VectorXd U = Eigen::VectorXd::Zero(sites);
  for (int p = 0; p < sites; ++p) U(p) = spec.g(spin_mode(p, 0), spin_mode(p, 0), spin_mode(p, 1), spin_mode(p, 1));
  for (int p = 0; p < L; ++p)
    for (int q = 0; q < L; ++q)
      for (int r = 0; r < L; ++r)
        for (int s = 0; s < L; ++s) {
          double expect = 0.0;
          if (p == q && r == s && p / 2 == r / 2) expect = U(p / 2);
          if (std::abs(spec.g(p, q, r, s) - expect) > tol) return std::nullopt;
        }
  return U;
}

// ---------------------------------------------------------------- symmetry

ReflectionSymmetry ReflectionSymmetry::from_sites(std::vector<int> site_permutation) {
  const int sites = static_cast<int>(site_permutation.size());
  std::vector<int> seen(sites, 0);
  for (int p : site_permutation) {
    if (p < 0 || p >= sites || seen[p]++) throw DomainError("site map is not a permutation");
  }
  ReflectionSymmetry r;
  r.site_permutation = std::move(site_permutation);
  r.mode_permutation.resize(2 * sites);
  r.one_body = Eigen::MatrixXd::Zero(2 * sites, 2 * sites);
  for (int p = 0; p < sites; ++p)
    for (int spin = 0; spin < 2; ++spin) {
      const int from = spin_mode(p, spin), to = spin_mode(r.site_permutation[p], spin);
      r.mode_permutation[from] = to;
      r.one_body(to, from) = 1.0;
    }
  return r;
}

OperatorMatrix ReflectionSymmetry::sector_matrix(const FockSector& sector) const {
  const int L = static_cast<int>(mode_permutation.size());
  if (sector.num_modes() != L) throw DomainError("reflection and sector act on different modes");
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t j = 0; j < sector.size(); ++j) {
    OpString ops;
    const Word w = sector.word(j);
    for (int p = 0; p < L; ++p)
      if (w >> p & 1) ops.push_back(cre(mode_permutation[p]));
    auto ex = apply_excitation(0, ops);
    auto i = ex ? sector.index_of(ex->word) : std::nullopt;
    if (!i) throw DomainError("reflection leaves the sector");
    trip.emplace_back(static_cast<int>(*i), static_cast<int>(j), ex->sign);
  }
  OperatorMatrix::Sparse m(static_cast<Eigen::Index>(sector.size()), static_cast<Eigen::Index>(sector.size()));
  m.setFromTriplets(trip.begin(), trip.end());
  if (m.rows() < OperatorMatrix::kDenseLimit) return OperatorMatrix(OperatorMatrix::Dense(m));
  return OperatorMatrix(std::move(m));
}

Eigen::MatrixXd ReflectionSymmetry::pair_matrix() const {
  const int L = static_cast<int>(mode_permutation.size());
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(pair_count(L), pair_count(L));
  for (const auto& [p, r] : pair_list(L)) {
    const int a = mode_permutation[p], b = mode_permutation[r];
    W(pair_index(L, std::min(a, b), std::max(a, b)), pair_index(L, p, r)) = a < b ? 1.0 : -1.0;
  }
  return W;
}

std::string SymmetryLabel::str() const {
  switch (kind) {
    case Kind::symmetric: return "S";
    case Kind::antisymmetric: return "A";
    default: return "M";
  }
}

SymmetryLabel symmetry_label(const Eigen::VectorXd& state, const OperatorMatrix& reflection) {
  SymmetryLabel l;
  l.expectation = state.dot(reflection.apply(state));
  l.epsilon = 1.0 - std::abs(l.expectation);
  if (l.expectation >= 1.0 - 1e-8)
    l.kind = SymmetryLabel::Kind::symmetric;
  else if (l.expectation <= -1.0 + 1e-8)
    l.kind = SymmetryLabel::Kind::antisymmetric;
  return l;
}

SymmetryLabel symmetry_label(const Eigen::VectorXd& state, const ReflectionSymmetry& sym,
                             const FockSector& sector) {
  return symmetry_label(state, sym.sector_matrix(sector));
}

SectorGroundEnergies sector_ground_energies(const OperatorMatrix& H, const OperatorMatrix& reflection) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rs(reflection.to_dense());
  const Eigen::MatrixXd h = H.to_dense();
  auto lowest = [&](bool plus) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index k = 0; k < rs.eigenvalues().size(); ++k)
      if ((rs.eigenvalues()(k) > 0) == plus) cols.push_back(k);
    if (cols.empty()) return std::numeric_limits<double>::infinity();
    Eigen::MatrixXd B(h.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) B.col(static_cast<Eigen::Index>(c)) = rs.eigenvectors().col(cols[c]);
    Eigen::MatrixXd proj = B.transpose() * h * B;
    proj = 0.5 * (proj + proj.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(proj, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
  };
  return {lowest(true), lowest(false)};
}

// ---------------------------------------------------------------- residual

ResidualSplit split_residual(const HamiltonianSpec& target, const HamiltonianSpec& initial,
                             ConstantPolicy policy) {
  ResidualSplit out{initial, target - initial};
  if (policy == ConstantPolicy::drop) {
    const int L = target.num_modes;
    const double alpha = out.residual.h.trace() / L;
    out.residual.h -= alpha * Eigen::MatrixXd::Identity(L, L);
    out.initial.constant += alpha * target.particles + out.residual.constant;
    out.residual.constant = 0.0;
  }
  return out;
}

}  // namespace asp
