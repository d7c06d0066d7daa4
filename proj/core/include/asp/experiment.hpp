#pragma once

// Experiment configuration files and the batch runner behind the CLI.
//
//   [model]    model = hubbard_chain | trimer | four_site | tensor, parameters,
//              tensor lines "h P Q v" / "g P Q R S v"
//   [path]     kind = direct | stepwise, stages = site:0 | rest | site:2, ...
//   one of     [gap] [evolve] [numerator] [jansen] [bounds] [decompose]
//   [output]   prefix = ..., seed = ...

#include "asp/adiabatic.hpp"
#include "asp/hamiltonians.hpp"
#include "asp/twobody.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace asp {

// Malformed configuration; the message names the line or block at fault.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ModelConfig {
  std::string kind = "tensor";
  double j = 1.0, j13 = 0.0, U = 0.0, dU = 0.0, delta = 0.0, mu = 0.0, constant = 0.0;
  std::optional<double> U1, U3;
  int sites = 2, n_up = 1, n_down = 1, modes = 0, particles = 0;
  bool periodic = false;
  std::vector<std::pair<std::array<int, 2>, double>> h_entries;
  std::vector<std::pair<std::array<int, 4>, double>> g_entries;
  std::string hf = "best";         // best | symmetric | antisymmetric | lowest_orbitals
  std::string initial;             // hartree_fock | one_body; empty picks the model default
  ConstantPolicy policy = ConstantPolicy::spread;

  bool operator==(const ModelConfig&) const = default;
};

struct PathConfig {
  std::string kind = "direct";  // direct | stepwise
  std::string stages;           // "|"-separated stages of ","-separated selectors
  bool endpoint_flat = false;
  int grid = 401;

  bool operator==(const PathConfig&) const = default;
};

struct GapAnalysis {
  int track = 3;
  bool operator==(const GapAnalysis&) const = default;
};
struct EvolveAnalysis {
  double T = 10.0;
  int steps = 4000;
  int sample_every = 10;
  bool operator==(const EvolveAnalysis&) const = default;
};
struct NumeratorAnalysis {
  int points = 400;
  bool operator==(const NumeratorAnalysis&) const = default;
};
struct JansenAnalysis {
  double delta = 0.1;
  int points = 400;
  bool operator==(const JansenAnalysis&) const = default;
};
struct BoundsAnalysis {
  int L_min = 4, L_max = 10, N_min = 2, N_max = 5, samples = 200;
  bool operator==(const BoundsAnalysis&) const = default;
};
struct DecomposeAnalysis {
  bool operator==(const DecomposeAnalysis&) const = default;
};

using Analysis =
    std::variant<GapAnalysis, EvolveAnalysis, NumeratorAnalysis, JansenAnalysis, BoundsAnalysis, DecomposeAnalysis>;

std::string analysis_name(const Analysis& a);
// Default-initialised analysis for "gap", "evolve", ...; nullopt if unknown.
std::optional<Analysis> analysis_from_name(const std::string& name);

struct ExperimentConfig {
  std::optional<ModelConfig> model;
  std::optional<PathConfig> path;
  std::optional<Analysis> analysis;
  std::string prefix = "asp";
  std::uint64_t seed = 0;

  bool operator==(const ExperimentConfig&) const = default;
};

// Parses config text.  Unless `require_analysis` is false, exactly one
// analysis block must be present.
ExperimentConfig parse_config(const std::string& text, bool require_analysis = true);
ExperimentConfig load_config(const std::string& path, bool require_analysis = true);

// Everything derived from a model block.
struct Problem {
  HamiltonianSpec target;
  HamiltonianSpec initial;   // after the constant policy
  HamiltonianSpec residual;  // after the constant policy
  std::optional<HartreeFockResult> hartree_fock;
  FockSector sector;
  TwoParticleMatrix two_particle;
  std::vector<TwoBodyMode> modes;
  std::vector<ResidualTerm> terms;
  OperatorMatrix initial_matrix;
  OperatorMatrix target_matrix;
  std::optional<ReflectionSymmetry> reflection;
};

Problem build_problem(const ModelConfig& model);

// Stage selectors: "site:i" (mode dominated by pair (2i, 2i+1)), "pair:P:R",
// a term index, "rest" (all terms not named elsewhere, one stage) and
// "each" (remaining terms, one stage apiece).  Returns term indices.
std::vector<std::vector<int>> resolve_stages(const Problem& p, const std::string& stages);

AdiabaticPath build_path(const Problem& p, const PathConfig& path);

struct RunResult {
  std::vector<std::string> files;
  std::string summary;
};

// Runs the configured analysis and writes CSV files named <prefix>_<kind>.csv.
RunResult run_experiment(const ExperimentConfig& cfg);

// The six figure experiments (direct and stepwise for each model), with
// prefixes relative to `out_dir`.
std::vector<std::pair<std::string, ExperimentConfig>> figure_experiments(const std::string& out_dir = "figures/out");

// CSV headers, fixed across releases.
inline constexpr const char* kGapHeader = "s,E0,E1,E2,gap,sym0,sym1";
inline constexpr const char* kFidelityHeader = "s,fidelity,norm";
inline constexpr const char* kDecomposeHeader = "k,lambda,P,R,value";
inline constexpr const char* kBoundsHeader = "L,N,bound,max_random_norm,saturating";
inline constexpr const char* kNumeratorHeader = "schedule,terms,numerator";
inline constexpr const char* kJansenHeader = "delta,time,integral,kinks,boundary,min_gap";

// printf("%.12g") formatting used for every CSV number.
std::string format_number(double v);

}  // namespace asp
