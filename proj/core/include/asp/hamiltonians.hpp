#pragma once

// H = sum h_PQ a+_P a_Q + 1/2 sum g_PQRS a+_P a+_R a_S a_Q + constant,
// plus the Hubbard-type model builders and their mean-field counterparts.

#include "asp/fockspace.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace asp {

class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int dim) : dim_(dim), data_(static_cast<std::size_t>(dim) * dim * dim * dim, 0.0) {}

  int dim() const { return dim_; }
  double& operator()(int p, int q, int r, int s) { return data_[offset(p, q, r, s)]; }
  double operator()(int p, int q, int r, int s) const { return data_[offset(p, q, r, s)]; }

  double max_abs() const;
  bool is_zero() const { return max_abs() == 0.0; }

  Tensor4& operator+=(const Tensor4& o);
  Tensor4& operator-=(const Tensor4& o);
  Tensor4& operator*=(double f);

 private:
  std::size_t offset(int p, int q, int r, int s) const {
    return ((static_cast<std::size_t>(p) * dim_ + q) * dim_ + r) * dim_ + s;
  }
  int dim_ = 0;
  std::vector<double> data_;
};

// Modes 2p and 2p+1 are site p with spin up and down.
struct SpinLayout {
  int sites = 0;
  int n_up = 0;
  int n_down = 0;
};

inline int spin_mode(int site, int spin) { return 2 * site + spin; }

// Ordered pairs P < R, row-major: (0,1), (0,2), ..., (1,2), ...
inline int pair_count(int modes) { return modes * (modes - 1) / 2; }
inline int pair_index(int modes, int p, int r) { return p * modes - p * (p + 1) / 2 + (r - p - 1); }
std::vector<std::array<int, 2>> pair_list(int modes);

struct HamiltonianSpec {
  int num_modes = 0;
  Eigen::MatrixXd h;
  Tensor4 g;
  int particles = 0;
  std::optional<SpinLayout> spin;
  double constant = 0.0;
  std::string model = "tensor";

  static HamiltonianSpec zeros(int num_modes, int particles, std::optional<SpinLayout> spin = {});

  // Fixed (N_up, N_down) sector when spin is set, fixed N otherwise.
  FockSector sector() const;
  std::vector<Term> terms() const;
  OperatorMatrix sector_matrix() const { return matrix_in(sector()); }
  OperatorMatrix matrix_in(const FockSector& sector) const;
};

// Tensor-wise difference; sector labels are taken from `a`.
HamiltonianSpec operator-(const HamiltonianSpec& a, const HamiltonianSpec& b);

struct SymmetryViolation {
  std::string relation;  // e.g. "g_PQRS = g_RSPQ"
  std::array<int, 4> index{};
  double deviation = 0.0;
};

struct SymmetryReport {
  bool passed = true;
  double max_deviation = 0.0;
  std::vector<SymmetryViolation> violations;  // worst offender per relation
};

SymmetryReport validate_symmetries(const HamiltonianSpec& spec, double tol = 1e-12);

struct InteractionTensor {
  int num_modes = 0;
  Tensor4 combined;        // G = (w + g) / 2
  Tensor4 antisymmetrised; // G_PQRS - G_RQPS - G_PSRQ + G_RSPQ
};

// Folds the one-body part (and the constant) into a pure two-body tensor
// valid in the spec's N-particle sector.  Needs N >= 2.
InteractionTensor absorb_one_body(const HamiltonianSpec& spec);

// Sector matrix of sum_{P<R, Q<S} Gtilde_PQRS a+_P a+_R a_S a_Q.
OperatorMatrix antisymmetrised_matrix(const InteractionTensor& t, const FockSector& sector);

// ---------------------------------------------------------------- models

HamiltonianSpec build_hubbard_chain(int sites, double j, double U, double mu, bool periodic,
                                    int n_up, int n_down);

// Three sites, one spin-up and one spin-down fermion.  Bonds (0,1) and (1,2)
// carry j, the closing bond (0,2) carries +j13 for up and -j13 for down.
// Sites 0 and 2 interact with U1 and U3, site 1 is free.
HamiltonianSpec build_trimer(double j, double j13, double U1, double U3);
inline HamiltonianSpec build_trimer_split(double j, double j13, double U, double dU = 1e-6) {
  return build_trimer(j, j13, U, U + dU);
}

// Periodic four-site ring at half filling.  Bonds (0,1), (2,3) carry j;
// bonds (1,2), (3,0) carry j + delta for up and j - delta for down.
// Site i interacts with U + i * dU.
HamiltonianSpec build_four_site(double j, double delta, double U, double dU = 0.0);

// On-site interaction strengths if g has pure Hubbard form.
std::optional<Eigen::VectorXd> hubbard_interactions(const HamiltonianSpec& spec, double tol = 1e-12);

// ---------------------------------------------------------------- symmetry

struct ReflectionSymmetry {
  std::vector<int> site_permutation;
  std::vector<int> mode_permutation;
  Eigen::MatrixXd one_body;  // one_body(pi(P), P) = 1

  static ReflectionSymmetry from_sites(std::vector<int> site_permutation);
  static ReflectionSymmetry trimer() { return from_sites({2, 1, 0}); }
  static ReflectionSymmetry four_site() { return from_sites({3, 2, 1, 0}); }

  OperatorMatrix sector_matrix(const FockSector& sector) const;
  // Action on two-particle amplitudes indexed by pairs P < R.
  Eigen::MatrixXd pair_matrix() const;
};

struct SymmetryLabel {
  enum class Kind { symmetric, antisymmetric, mixed };
  Kind kind = Kind::mixed;
  double expectation = 0.0;
  double epsilon = 1.0;  // 1 - |expectation|
  std::string str() const;  // "S", "A" or "M"
};

SymmetryLabel symmetry_label(const Eigen::VectorXd& state, const OperatorMatrix& reflection);
SymmetryLabel symmetry_label(const Eigen::VectorXd& state, const ReflectionSymmetry& sym,
                             const FockSector& sector);

struct SectorGroundEnergies {
  double symmetric;
  double antisymmetric;
};

// Lowest eigenvalue of H restricted to each reflection eigenspace.
SectorGroundEnergies sector_ground_energies(const OperatorMatrix& H, const OperatorMatrix& reflection);

// ---------------------------------------------------------------- mean field

enum class HfAnsatz { trimer_symmetric, trimer_antisymmetric, trimer_best, lowest_orbitals };

struct HartreeFockResult {
  double energy = 0.0;
  Eigen::VectorXd densities;  // per mode
  Eigen::VectorXd state;      // determinant in spec.sector()
  HamiltonianSpec mean_field;
  HfAnsatz family = HfAnsatz::lowest_orbitals;  // the family that won
  std::vector<double> angles;                   // optimal orbital angles
};

// Mean field of a Hubbard-form spec at the given mode densities: g = 0,
// h_(p s)(p s) += U_p <n_(p s')>, constant -= sum_p U_p <n_p up><n_p down>.
HamiltonianSpec mean_field_spec(const HamiltonianSpec& spec, const Eigen::VectorXd& densities);

HartreeFockResult hartree_fock(const HamiltonianSpec& spec, HfAnsatz ansatz);

// Symmetric trimer orbital cos(t)(1,0,1)/sqrt2 + sin(t)(0,1,0) on one spin.
Eigen::VectorXd trimer_symmetric_orbital(double theta, int spin);
Eigen::VectorXd trimer_antisymmetric_orbital(int spin);

// ---------------------------------------------------------------- residual

// How the residual's trace part reaches the decomposition.  spread keeps
// everything in the residual; drop moves tr(h_r)/L * N plus the constant
// into the initial hamiltonian.
enum class ConstantPolicy { spread, drop };

struct ResidualSplit {
  HamiltonianSpec initial;
  HamiltonianSpec residual;
};

ResidualSplit split_residual(const HamiltonianSpec& target, const HamiltonianSpec& initial,
                             ConstantPolicy policy);

}  // namespace asp
