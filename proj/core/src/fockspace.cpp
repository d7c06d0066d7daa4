#include "asp/fockspace.hpp"

#include "asp/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <string>

namespace asp {

namespace {

constexpr int kMaxModes = 63;
constexpr double kHermitianTol = 1e-12;

Word low_mask(int n) { return n >= 64 ? ~Word{0} : (Word{1} << n) - 1; }

// All words with `k` bits chosen among the set bits of `mask`, ascending.
std::vector<Word> subsets_of(Word mask, int k) {
  std::vector<int> pos;
  for (int b = 0; b < 64; ++b)
    if (mask >> b & 1) pos.push_back(b);
  const int n = static_cast<int>(pos.size());
  std::vector<Word> out;
  if (k < 0 || k > n) return out;
  // Gosper's hack over n-bit index words, then scatter onto `pos`.
  Word c = low_mask(k);
  const Word limit = Word{1} << n;
  while (c < limit) {
    Word w = 0;
    for (Word r = c; r; r &= r - 1) w |= Word{1} << pos[std::countr_zero(r)];
    out.push_back(w);
    if (c == 0) break;
    const Word u = c & (~c + 1);
    const Word v = c + u;
    c = v + (((v ^ c) / u) >> 2);
  }
  std::sort(out.begin(), out.end());
  return out;
}

OperatorMatrix::Sparse from_triplets(Eigen::Index rows, Eigen::Index cols,
                                     const std::vector<Eigen::Triplet<double>>& t) {
  OperatorMatrix::Sparse s(rows, cols);
  s.setFromTriplets(t.begin(), t.end());
  s.prune(0.0);
  s.makeCompressed();
  return s;
}

OperatorMatrix settle(OperatorMatrix::Sparse s) {
  if (s.rows() < OperatorMatrix::kDenseLimit && s.cols() < OperatorMatrix::kDenseLimit)
    return OperatorMatrix(OperatorMatrix::Dense(s));
  return OperatorMatrix(std::move(s));
}

}  // namespace

std::optional<Excitation> apply_excitation(Word word, std::span<const LadderOp> ops) {
  int sign = 1;
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    const Word bit = Word{1} << it->mode;
    const bool occupied = word & bit;
    if (occupied == (it->action == Action::create)) return std::nullopt;
    if (std::popcount(word & (bit - 1)) & 1) sign = -sign;
    word ^= bit;
  }
  return Excitation{word, sign};
}

int particle_change(std::span<const LadderOp> ops) {
  int d = 0;
  for (const auto& op : ops) d += op.action == Action::create ? 1 : -1;
  return d;
}

FockSector::FockSector(int num_modes, std::vector<OccupationConstraint> constraints)
    : num_modes_(num_modes), constraints_(std::move(constraints)) {
  if (num_modes < 0 || num_modes > kMaxModes)
    throw DomainError("mode count " + std::to_string(num_modes) + " outside [0, 63]");
  const Word all = low_mask(num_modes);
  Word used = 0;
  for (const auto& c : constraints_) {
    if (c.mask & ~all) throw DomainError("constraint mask exceeds mode count");
    if (c.mask & used) throw DomainError("constraint masks overlap");
    used |= c.mask;
    if (c.count < 0 || c.count > std::popcount(c.mask))
      throw DomainError("invalid occupation " + std::to_string(c.count) + " for " +
                        std::to_string(std::popcount(c.mask)) + " modes");
  }
  std::vector<Word> words{0};
  auto combine = [&](const std::vector<Word>& part) {
    std::vector<Word> next;
    next.reserve(words.size() * part.size());
    for (Word a : words)
      for (Word b : part) next.push_back(a | b);
    words.swap(next);
  };
  for (const auto& c : constraints_) combine(subsets_of(c.mask, c.count));
  const Word free = all & ~used;
  if (free) {
    std::vector<Word> part;
    for (int k = 0; k <= std::popcount(free); ++k) {
      auto s = subsets_of(free, k);
      part.insert(part.end(), s.begin(), s.end());
    }
    combine(part);
  }
  std::sort(words.begin(), words.end());
  basis_ = std::move(words);
  particles_ = std::popcount(basis_.front());
  for (Word w : basis_)
    if (std::popcount(w) != particles_) {
      particles_ = -1;
      break;
    }
}

FockSector FockSector::fixed_number(int num_modes, int particles) {
  if (particles < 0 || particles > num_modes)
    throw DomainError("particle number " + std::to_string(particles) + " outside [0, " +
                      std::to_string(num_modes) + "]");
  return FockSector(num_modes, {{low_mask(num_modes), particles}});
}

FockSector FockSector::fixed_spin(int sites, int n_up, int n_down) {
  if (n_up < 0 || n_up > sites || n_down < 0 || n_down > sites)
    throw DomainError("spin occupation outside [0, sites]");
  Word up = 0, down = 0;
  for (int p = 0; p < sites; ++p) {
    up |= Word{1} << (2 * p);
    down |= Word{1} << (2 * p + 1);
  }
  return FockSector(2 * sites, {{up, n_up}, {down, n_down}});
}

FockSector FockSector::constrained(int num_modes, std::vector<OccupationConstraint> constraints) {
  return FockSector(num_modes, std::move(constraints));
}

std::optional<std::size_t> FockSector::index_of(Word w) const {
  auto it = std::lower_bound(basis_.begin(), basis_.end(), w);
  if (it == basis_.end() || *it != w) return std::nullopt;
  return static_cast<std::size_t>(it - basis_.begin());
}

// ---------------------------------------------------------------- matrices

OperatorMatrix::OperatorMatrix(Dense m) : storage_(std::move(m)) { refresh_flag(); }
OperatorMatrix::OperatorMatrix(Sparse m) : storage_(std::move(m)) { refresh_flag(); }

OperatorMatrix OperatorMatrix::zero(Eigen::Index rows, Eigen::Index cols) {
  return settle(Sparse(rows, cols));
}

OperatorMatrix OperatorMatrix::identity(Eigen::Index dim) {
  Sparse s(dim, dim);
  s.setIdentity();
  return settle(std::move(s));
}

void OperatorMatrix::refresh_flag() {
  if (rows() != cols()) {
    hermitian_ = false;
    return;
  }
  if (is_dense()) {
    const auto& d = std::get<Dense>(storage_);
    hermitian_ = d.size() == 0 || (d - d.transpose()).cwiseAbs().maxCoeff() <= kHermitianTol;
  } else {
    const auto& s = std::get<Sparse>(storage_);
    Sparse diff = s - Sparse(s.transpose());
    double worst = 0;
    for (int k = 0; k < diff.outerSize(); ++k)
      for (Sparse::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
    hermitian_ = worst <= kHermitianTol;
  }
}

Eigen::Index OperatorMatrix::rows() const {
  return std::visit([](const auto& m) { return m.rows(); }, storage_);
}
Eigen::Index OperatorMatrix::cols() const {
  return std::visit([](const auto& m) { return m.cols(); }, storage_);
}

bool OperatorMatrix::is_diagonal() const {
  if (rows() != cols()) return false;
  if (is_dense()) {
    const auto& d = std::get<Dense>(storage_);
    Dense off = d;
    off.diagonal().setZero();
    return off.size() == 0 || off.cwiseAbs().maxCoeff() == 0.0;
  }
  const auto& s = std::get<Sparse>(storage_);
  for (int k = 0; k < s.outerSize(); ++k)
    for (Sparse::InnerIterator it(s, k); it; ++it)
      if (it.row() != it.col() && it.value() != 0.0) return false;
  return true;
}

const OperatorMatrix::Dense& OperatorMatrix::dense() const {
  if (!is_dense()) throw std::logic_error("operator stored sparse");
  return std::get<Dense>(storage_);
}

const OperatorMatrix::Sparse& OperatorMatrix::sparse() const {
  if (is_dense()) throw std::logic_error("operator stored dense");
  return std::get<Sparse>(storage_);
}

OperatorMatrix::Dense OperatorMatrix::to_dense() const {
  if (is_dense()) return std::get<Dense>(storage_);
  return Dense(std::get<Sparse>(storage_));
}

OperatorMatrix::Sparse OperatorMatrix::to_sparse() const {
  if (!is_dense()) return std::get<Sparse>(storage_);
  return std::get<Dense>(storage_).sparseView();
}

Eigen::VectorXd OperatorMatrix::diagonal() const {
  return std::visit([](const auto& m) -> Eigen::VectorXd { return m.diagonal(); }, storage_);
}

Eigen::VectorXd OperatorMatrix::apply(const Eigen::VectorXd& v) const {
  return std::visit([&](const auto& m) -> Eigen::VectorXd { return m * v; }, storage_);
}

Eigen::VectorXcd OperatorMatrix::apply(const Eigen::VectorXcd& v) const {
  return std::visit([&](const auto& m) -> Eigen::VectorXcd { return m.template cast<std::complex<double>>() * v; },
                    storage_);
}

OperatorMatrix OperatorMatrix::transpose() const {
  if (is_dense()) return OperatorMatrix(Dense(std::get<Dense>(storage_).transpose()));
  return OperatorMatrix(Sparse(std::get<Sparse>(storage_).transpose()));
}

OperatorMatrix& OperatorMatrix::operator+=(const OperatorMatrix& other) {
  if (rows() != other.rows() || cols() != other.cols())
    throw DomainError("operator dimension mismatch");
  if (is_dense() && other.is_dense()) {
    std::get<Dense>(storage_) += other.dense();
  } else if (is_dense()) {
    std::get<Dense>(storage_) += Dense(other.sparse());
  } else if (other.is_dense()) {
    storage_ = Dense(Dense(std::get<Sparse>(storage_)) + other.dense());
  } else {
    std::get<Sparse>(storage_) += other.sparse();
  }
  refresh_flag();
  return *this;
}

OperatorMatrix& OperatorMatrix::operator*=(double factor) {
  std::visit([&](auto& m) { m *= factor; }, storage_);
  return *this;  // scaling by a real number keeps symmetry
}

OperatorMatrix operator-(OperatorMatrix a, const OperatorMatrix& b) {
  return a += -1.0 * OperatorMatrix(b);
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.cols() != b.rows()) throw DomainError("operator dimension mismatch");
  if (a.is_dense() && b.is_dense()) return OperatorMatrix(OperatorMatrix::Dense(a.dense() * b.dense()));
  OperatorMatrix::Sparse p = a.to_sparse() * b.to_sparse();
  return settle(std::move(p));
}

double OperatorMatrix::frobenius() const {
  return std::visit([](const auto& m) { return m.norm(); }, storage_);
}

double OperatorMatrix::max_abs() const {
  if (is_dense()) {
    const auto& d = std::get<Dense>(storage_);
    return d.size() ? d.cwiseAbs().maxCoeff() : 0.0;
  }
  double worst = 0;
  const auto& s = std::get<Sparse>(storage_);
  for (int k = 0; k < s.outerSize(); ++k)
    for (Sparse::InnerIterator it(s, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

// ---------------------------------------------------------------- builders

OperatorMatrix build_transition(const FockSector& from, const FockSector& to,
                                std::span<const Term> terms) {
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& t : terms) {
    if (t.coefficient == 0.0) continue;
    for (const auto& op : t.ops)
      if (op.mode < 0 || op.mode >= from.num_modes())
        throw DomainError("mode index " + std::to_string(op.mode) + " out of range");
    if (from.particles() >= 0 && to.particles() >= 0 &&
        particle_change(t.ops) != to.particles() - from.particles())
      throw DomainError("operator string does not conserve the particle number of the sector");
    for (std::size_t j = 0; j < from.size(); ++j) {
      auto ex = apply_excitation(from.word(j), t.ops);
      if (!ex) continue;
      auto i = to.index_of(ex->word);
      if (!i) throw DomainError("operator string leaves the target sector");
      trip.emplace_back(static_cast<int>(*i), static_cast<int>(j), t.coefficient * ex->sign);
    }
  }
  return settle(from_triplets(static_cast<Eigen::Index>(to.size()),
                              static_cast<Eigen::Index>(from.size()), trip));
}

OperatorMatrix build_operator(const FockSector& sector, std::span<const Term> terms) {
  for (const auto& t : terms)
    if (t.coefficient != 0.0 && particle_change(t.ops) != 0)
      throw DomainError("operator string does not conserve particle number");
  return build_transition(sector, sector, terms);
}

// ---------------------------------------------------------------- spectra

Eigensystem eigensolve(const OperatorMatrix& m, std::optional<int> lowest) {
  if (!m.hermitian()) throw DomainError("eigensolve needs a hermitian operator");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.to_dense());
  if (es.info() != Eigen::Success) throw DomainError("eigensolver did not converge");
  Eigensystem out{es.eigenvalues(), es.eigenvectors()};
  if (lowest && *lowest < out.values.size()) {
    const int k = std::max(*lowest, 0);
    out.values = out.values.head(k).eval();
    out.vectors = out.vectors.leftCols(k).eval();
  }
  return out;
}

Eigen::VectorXd eigenvalues(const OperatorMatrix& m) {
  if (!m.hermitian()) throw DomainError("eigenvalues need a hermitian operator");
  if (m.is_diagonal()) {
    Eigen::VectorXd d = m.diagonal();
    std::sort(d.data(), d.data() + d.size());
    return d;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.to_dense(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw DomainError("eigensolver did not converge");
  return es.eigenvalues();
}

double operator_norm(const OperatorMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  if (m.is_diagonal()) return m.diagonal().cwiseAbs().maxCoeff();
  if (m.hermitian()) {
    Eigen::VectorXd ev = eigenvalues(m);
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  }
  // Gram matrix on the smaller side.
  Eigen::MatrixXd d = m.to_dense();
  Eigen::MatrixXd gram = d.rows() <= d.cols() ? Eigen::MatrixXd(d * d.transpose())
                                              : Eigen::MatrixXd(d.transpose() * d);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

Eigen::VectorXd slater_determinant(const FockSector& sector,
                                   const std::vector<Eigen::VectorXd>& orbitals) {
  std::map<Word, double> state{{0, 1.0}};
  for (const auto& orb : orbitals) {
    if (orb.size() != sector.num_modes()) throw DomainError("orbital length differs from mode count");
    std::map<Word, double> next;
    for (const auto& [w, a] : state)
      for (int p = 0; p < orb.size(); ++p) {
        if (orb(p) == 0.0) continue;
        const LadderOp op = cre(p);
        if (auto ex = apply_excitation(w, std::span<const LadderOp>(&op, 1)))
          next[ex->word] += a * orb(p) * ex->sign;
      }
    state.swap(next);
  }
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sector.size()));
  for (const auto& [w, a] : state) {
    if (a == 0.0) continue;
    auto i = sector.index_of(w);
    if (!i) {
      if (std::abs(a) > 1e-14) throw DomainError("determinant has weight outside the sector");
      continue;
    }
    v(static_cast<Eigen::Index>(*i)) = a;
  }
  return v;
}

}  // namespace asp
