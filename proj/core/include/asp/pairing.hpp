#pragma once

// Pair (Youla) form of two-body vectors, hardcore-boson matrix elements of
// pseudoprojectors, and the operator-norm bounds with their saturating states.

#include "asp/fockspace.hpp"
#include "asp/twobody.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace asp {

// phi_tilde = V Xi V^T with Xi = diag([[0, xi_m], [-xi_m, 0]]) (plus a zero
// for odd L).  Pair m couples rotated modes 2m and 2m+1.
struct PairedForm {
  Eigen::MatrixXd rotation;    // V, L x L orthogonal
  Eigen::VectorXd amplitudes;  // xi, floor(L/2) entries, non-negative, descending
};

// Antisymmetric L x L matrix with phi_tilde(P,R) = phi_PR for P < R.
Eigen::MatrixXd antisymmetric_matrix(const Eigen::VectorXd& phi, int modes);
Eigen::MatrixXd block_form(const Eigen::VectorXd& xi, int modes);

PairedForm youla(const Eigen::VectorXd& phi, int modes);

// HCB configurations: bit m of `pairs` marks an occupied pair site, bit k of
// `unpaired` a singly occupied rotated mode.
double phi_matrix_element(const Eigen::VectorXd& xi, Word pairs, Word unpaired, Word pairs2, Word unpaired2);

// Operator-norm bound for pseudoprojectors in the N-particle sector of L
// modes.  Even N: (n/l)(l-n+1); odd N: n(l-n)/(l-1), with l = floor(L/2),
// n = floor(N/2).  For odd L and odd N the unpaired fermion may also sit in
// the spare mode, so the even form on all l sites is included.
double norm_bound(int modes, int particles);
// The textbook value without the odd-L correction.
double norm_bound_theorem(int modes, int particles);

// Largest eigenvalue of Phi in the full N-particle sector.
double exact_norm(const Eigen::VectorXd& phi, int modes, int particles);
// Same, restricted to configurations with the fewest unpaired fermions.
double exact_norm_paired(const PairedForm& pf, int modes, int particles);

struct HcbState {
  std::vector<Word> pair_sets;
  Word unpaired = 0;  // shared by all configurations
  Eigen::VectorXd amplitudes;
};

struct SaturatingState {
  PairedForm form;  // rotation is the identity
  HcbState state;
  Eigen::VectorXd phi;  // two-body vector in the original modes
};

// Uniform amplitudes on the available pair sites and a uniform superposition
// of all boson placements.  For odd N the unpaired fermion sits on the first
// mode of `unpaired_site` (default: the last pair site, or the spare mode
// when L is odd and that gives the larger value).
SaturatingState saturating_state(int modes, int particles, std::optional<int> unpaired_site = std::nullopt);

// Expands an HCB state of the identity pairing into the fixed-N sector.
Eigen::VectorXd to_fock(const HcbState& s, const FockSector& sector);
// <s| Phi |s> from the HCB matrix elements.
double hcb_expectation(const HcbState& s, const Eigen::VectorXd& xi);

std::vector<std::vector<std::array<int, 2>>> round_robin_pairings(int modes);
Eigen::MatrixXd sylvester_hadamard(int order);

// L(L-1)/2 orthonormal, fully paired modes with eigenvalue 1 (L a power of two).
std::vector<TwoBodyMode> hadamard_maximal_modes(int modes);

}  // namespace asp
