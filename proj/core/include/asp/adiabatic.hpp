#pragma once

// Multi-parameter paths H(s) = H_i + sum_k gamma_k(s) H_k, spectral gap
// traces, Schroedinger propagation and adiabatic time estimates.

#include "asp/fockspace.hpp"
#include "asp/hamiltonians.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace asp {

enum class Side { left, right };

// gamma_k ramps from 0 to 1 across its window [start, end] and is constant
// outside it.  Ramps are linear, or smoothstep 3u^2 - 2u^3 when endpoint-flat.
class PathSchedule {
 public:
  enum class Kind { direct, stepwise, custom };
  struct Window {
    double start;
    double end;
  };

  static PathSchedule direct(int terms, bool endpoint_flat = false);
  // `stages` must partition {0, ..., terms-1}; stage i owns [i/m, (i+1)/m].
  static PathSchedule stepwise(int terms, const std::vector<std::vector<int>>& stages, bool endpoint_flat = false);
  static PathSchedule custom(std::vector<Window> windows, bool endpoint_flat = false);

  int size() const { return static_cast<int>(windows_.size()); }
  Kind kind() const { return kind_; }
  bool endpoint_flat() const { return flat_; }
  const std::vector<Window>& windows() const { return windows_; }

  double value(int k, double s) const;
  double slope(int k, double s, Side side = Side::right) const;
  double curvature(int k, double s, Side side = Side::right) const;
  Eigen::VectorXd values(double s) const;

  // Window boundaries, 0 and 1 included, ascending and unique.
  std::vector<double> breakpoints() const;
  // Interior breakpoints where some slope jumps.
  std::vector<double> kinks() const;

 private:
  PathSchedule(Kind kind, std::vector<Window> windows, bool flat);
  Kind kind_;
  std::vector<Window> windows_;
  bool flat_;
};

struct AdiabaticPath {
  OperatorMatrix initial;
  std::vector<OperatorMatrix> terms;
  PathSchedule schedule = PathSchedule::direct(0);
  std::optional<OperatorMatrix> reflection;  // for symmetry labels

  AdiabaticPath(OperatorMatrix initial, std::vector<OperatorMatrix> terms, PathSchedule schedule,
                std::optional<OperatorMatrix> reflection = std::nullopt);

  OperatorMatrix at(double s) const;
  OperatorMatrix first_derivative(double s, Side side = Side::right) const;
  OperatorMatrix second_derivative(double s, Side side = Side::right) const;
  OperatorMatrix final_hamiltonian() const;
  Eigen::Index dim() const { return initial.rows(); }
};

struct GapMinimum {
  double s;
  double gap;
};

struct SpectrumTrace {
  std::vector<double> s;
  Eigen::MatrixXd energies;  // one row per sample, lowest levels ascending
  std::vector<double> gap;
  std::vector<SymmetryLabel> label0, label1;  // empty without a reflection
  GapMinimum minimum{0.0, 0.0};               // refined global minimum
  std::vector<GapMinimum> local_minima;       // refined interior local minima
};

std::vector<double> uniform_grid(int points);

SpectrumTrace gap_trace(const AdiabaticPath& path, const std::vector<double>& grid, int track = 3);

struct FidelitySample {
  double s;
  double fidelity;  // NaN where the instantaneous ground state is degenerate
  double norm;
};

struct Propagation {
  Eigen::VectorXcd state;
  std::vector<FidelitySample> samples;
  double final_fidelity = 0.0;
  double max_norm_drift = 0.0;
};

// i d/ds psi = T H(s) psi from the ground state of H(0), one midpoint
// exponential per step.  Fidelity is recorded every `sample_every` steps and
// at s = 1.
Propagation propagate(const AdiabaticPath& path, double T, int steps, int sample_every = 0);

// |<ground state of H(1) | state>|.
double ground_fidelity(const AdiabaticPath& path, const Eigen::VectorXcd& state);

// integral of ||dH/ds||^2 over [0,1]; Simpson per smooth segment with about
// `points` nodes per unit length.
double adiabatic_numerator(const AdiabaticPath& path, int points = 400);

struct JansenEstimate {
  double time = 0.0;
  double integral = 0.0;  // smooth part of the integrand
  double kinks = 0.0;     // slope jumps of piecewise-linear ramps
  double boundary = 0.0;  // ||H'(0)||/D(0)^2 + ||H'(1)||/D(1)^2
  double min_gap = 0.0;
};

// T = (integral + kinks + boundary) / delta.  Throws DomainError if the gap
// closes on the integration nodes.
JansenEstimate jansen_time(const AdiabaticPath& path, double delta, int points = 400);

}  // namespace asp
