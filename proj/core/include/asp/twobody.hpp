#pragma once

// Two-particle matrix F_(PR)(QS) = Gtilde_PQRS, its eigenmodes and the
// pseudoprojectors Phi_k = b_k^+ b_k built from them.

#include "asp/fockspace.hpp"
#include "asp/hamiltonians.hpp"

#include <Eigen/Dense>

#include <vector>

namespace asp {

struct TwoParticleMatrix {
  int num_modes = 0;
  Eigen::MatrixXd F;  // rows and columns indexed by pair_index
};

// Throws DomainError if the flattened tensor is asymmetric beyond 1e-10.
TwoParticleMatrix build_two_particle_matrix(const InteractionTensor& t);
inline TwoParticleMatrix build_two_particle_matrix(const HamiltonianSpec& spec) {
  return build_two_particle_matrix(absorb_one_body(spec));
}

struct TwoBodyMode {
  double eigenvalue = 0.0;
  Eigen::VectorXd vector;  // unit norm over pairs P < R
  int group = 0;           // degeneracy group id
  int dominant_pair = 0;   // pair row carrying the largest weight
};

// Modes ascending by eigenvalue; equal eigenvalues (within tol * max|lambda|)
// share a group and are ordered by dominant pair.  Uncoupled blocks of F are
// diagonalised separately so that exact zeros in F survive in the modes.
std::vector<TwoBodyMode> eigendecompose(const TwoParticleMatrix& F, double degeneracy_tol = 1e-9);

// b = sum_{Q<S} phi_QS a_S a_Q from `sector` into the fixed N-2 sector.
OperatorMatrix pair_annihilator(const Eigen::VectorXd& phi, const FockSector& sector);

// Phi = b^+ b restricted to `sector`.  Needs N >= 2.
OperatorMatrix pseudoprojector(const Eigen::VectorXd& phi, const FockSector& sector);
inline OperatorMatrix pseudoprojector(const TwoBodyMode& m, const FockSector& sector) {
  return pseudoprojector(m.vector, sector);
}

// The same operator built term by term as sum phi_PR phi_QS a+_P a+_R a_S a_Q.
OperatorMatrix pseudoprojector_from_strings(const Eigen::VectorXd& phi, const FockSector& sector);

struct ResidualTerm {
  int mode = 0;  // index into the mode list
  double eigenvalue = 0.0;
  OperatorMatrix matrix;  // eigenvalue * Phi
};

// lambda_k Phi_k for every mode with |lambda_k| above 1e-12 * max(1, max|lambda|).
std::vector<ResidualTerm> residual_terms(const std::vector<TwoBodyMode>& modes, const FockSector& sector);

}  // namespace asp
