#pragma once

// Occupation-number bases and operator matrices for fermionic modes.
//
// Convention: bit P of a word is the occupation of mode P, and an operator
// string acts right to left.  A ladder operator on mode P picks up the
// parity of the occupied modes below P.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace asp {

using Word = std::uint64_t;

enum class Action { create, annihilate };

struct LadderOp {
  int mode;
  Action action;
};

inline LadderOp cre(int mode) { return {mode, Action::create}; }
inline LadderOp ann(int mode) { return {mode, Action::annihilate}; }

using OpString = std::vector<LadderOp>;

struct Term {
  double coefficient;
  OpString ops;  // empty string is the identity
};

struct Excitation {
  Word word;
  int sign;
};

std::optional<Excitation> apply_excitation(Word word, std::span<const LadderOp> ops);

// Net number of created minus annihilated particles.
int particle_change(std::span<const LadderOp> ops);

// Fixes the popcount of word & mask.  Masks of one sector must be disjoint;
// modes outside every mask are free.
struct OccupationConstraint {
  Word mask;
  int count;
};

class FockSector {
 public:
  static FockSector fixed_number(int num_modes, int particles);
  // Modes 2p (up) and 2p+1 (down) for p < sites.
  static FockSector fixed_spin(int sites, int n_up, int n_down);
  static FockSector constrained(int num_modes, std::vector<OccupationConstraint> constraints);

  int num_modes() const { return num_modes_; }
  std::size_t size() const { return basis_.size(); }
  const std::vector<Word>& basis() const { return basis_; }
  Word word(std::size_t i) const { return basis_[i]; }
  const std::vector<OccupationConstraint>& constraints() const { return constraints_; }

  // Common popcount of the basis words, or -1 when it varies.
  int particles() const { return particles_; }

  std::optional<std::size_t> index_of(Word w) const;
  bool contains(Word w) const { return index_of(w).has_value(); }

 private:
  FockSector(int num_modes, std::vector<OccupationConstraint> constraints);

  int num_modes_ = 0;
  int particles_ = -1;
  std::vector<OccupationConstraint> constraints_;
  std::vector<Word> basis_;
};

// Real square or rectangular operator, dense below kDenseLimit rows.
class OperatorMatrix {
 public:
  using Dense = Eigen::MatrixXd;
  using Sparse = Eigen::SparseMatrix<double>;
  static constexpr Eigen::Index kDenseLimit = 512;

  OperatorMatrix() = default;
  explicit OperatorMatrix(Dense m);
  explicit OperatorMatrix(Sparse m);

  static OperatorMatrix zero(Eigen::Index rows, Eigen::Index cols);
  static OperatorMatrix identity(Eigen::Index dim);

  Eigen::Index rows() const;
  Eigen::Index cols() const;
  bool is_dense() const { return std::holds_alternative<Dense>(storage_); }
  bool hermitian() const { return hermitian_; }
  // True when every nonzero sits on the diagonal.
  bool is_diagonal() const;

  const Dense& dense() const;    // throws if stored sparse
  const Sparse& sparse() const;  // throws if stored dense
  Dense to_dense() const;
  Sparse to_sparse() const;
  Eigen::VectorXd diagonal() const;

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;

  OperatorMatrix transpose() const;
  OperatorMatrix& operator+=(const OperatorMatrix& other);
  OperatorMatrix& operator*=(double factor);
  friend OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix& b) { return a += b; }
  friend OperatorMatrix operator-(OperatorMatrix a, const OperatorMatrix& b);
  friend OperatorMatrix operator*(double f, OperatorMatrix a) { return a *= f; }
  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);

  double frobenius() const;
  double max_abs() const;

 private:
  void refresh_flag();
  std::variant<Dense, Sparse> storage_ = Dense();
  bool hermitian_ = true;
};

// Matrix of sum_t c_t * ops_t acting within one sector.  Throws DomainError if
// a string changes particle number or leaves the sector.
OperatorMatrix build_operator(const FockSector& sector, std::span<const Term> terms);

// Matrix from `from` into `to`; every image word must lie in `to`.
OperatorMatrix build_transition(const FockSector& from, const FockSector& to,
                                std::span<const Term> terms);

struct Eigensystem {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns
};

// Full (or lowest-k) eigensystem of a hermitian operator.  Throws DomainError
// on non-hermitian input.
Eigensystem eigensolve(const OperatorMatrix& m, std::optional<int> lowest = std::nullopt);
Eigen::VectorXd eigenvalues(const OperatorMatrix& m);

// Spectral norm (largest singular value).
double operator_norm(const OperatorMatrix& m);

// Product of orbital creation operators applied to the vacuum, expressed in
// `sector`.  orbitals[k] holds the mode coefficients of the k-th orbital;
// orbitals[0] is created first.
Eigen::VectorXd slater_determinant(const FockSector& sector,
                                   const std::vector<Eigen::VectorXd>& orbitals);

}  // namespace asp
