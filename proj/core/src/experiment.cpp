#include "asp/experiment.hpp"

#include "asp/error.hpp"
#include "asp/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace asp {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? "" : cur.substr(b, e - b + 1));
  }
  return out;
}

HamiltonianSpec build_target(const ModelConfig& m) {
  if (m.kind == "hubbard_chain") return build_hubbard_chain(m.sites, m.j, m.U, m.mu, m.periodic, m.n_up, m.n_down);
  if (m.kind == "trimer") {
    const double u1 = m.U1.value_or(m.U);
    return build_trimer(m.j, m.j13, u1, m.U3.value_or(u1 + m.dU));
  }
  if (m.kind == "four_site") return build_four_site(m.j, m.delta, m.U, m.dU);
  if (m.kind != "tensor") throw DomainError("unknown model '" + m.kind + "'");
  std::optional<SpinLayout> spin;
  if (m.n_up >= 0) spin = SpinLayout{m.modes / 2, m.n_up, m.n_down};
  auto s = HamiltonianSpec::zeros(m.modes, m.particles, spin);
  s.constant = m.constant;
  for (const auto& [i, v] : m.h_entries) s.h(i[0], i[1]) = s.h(i[1], i[0]) = v;
  for (const auto& [i, v] : m.g_entries) {
    const auto [p, q, r, t] = i;
    for (auto [a, b] : {std::pair{p, q}, std::pair{q, p}})
      for (auto [c, d] : {std::pair{r, t}, std::pair{t, r}}) {
        s.g(a, b, c, d) = v;
        s.g(c, d, a, b) = v;
      }
  }
  return s;
}

HfAnsatz ansatz_of(const std::string& hf) {
  if (hf == "symmetric") return HfAnsatz::trimer_symmetric;
  if (hf == "antisymmetric") return HfAnsatz::trimer_antisymmetric;
  if (hf == "lowest_orbitals") return HfAnsatz::lowest_orbitals;
  return HfAnsatz::trimer_best;
}

}  // namespace

Problem build_problem(const ModelConfig& m) {
  HamiltonianSpec target = build_target(m);
  std::string initial = m.initial;
  if (initial.empty()) initial = (m.kind == "trimer" || m.kind == "four_site") ? "hartree_fock" : "one_body";

  std::optional<HartreeFockResult> hf;
  HamiltonianSpec start;
  if (initial == "hartree_fock") {
    hf = hartree_fock(target, ansatz_of(m.hf));
    start = hf->mean_field;
  } else {
    start = target;
    start.g = Tensor4(target.num_modes);
    start.model = "one_body";
  }
  auto split = split_residual(target, start, m.policy);
  FockSector sector = target.sector();
  TwoParticleMatrix F = build_two_particle_matrix(absorb_one_body(split.residual));
  auto modes = eigendecompose(F);
  auto terms = residual_terms(modes, sector);
  OperatorMatrix hi = split.initial.matrix_in(sector);
  OperatorMatrix hf_target = target.matrix_in(sector);
  std::optional<ReflectionSymmetry> refl;
  if (m.kind == "trimer") refl = ReflectionSymmetry::trimer();
  if (m.kind == "four_site") refl = ReflectionSymmetry::four_site();
  return Problem{std::move(target),
                 std::move(split.initial),
                 std::move(split.residual),
                 std::move(hf),
                 std::move(sector),
                 std::move(F),
                 std::move(modes),
                 std::move(terms),
                 std::move(hi),
                 std::move(hf_target),
                 std::move(refl)};
}

std::vector<std::vector<int>> resolve_stages(const Problem& p, const std::string& text) {
  const int L = p.target.num_modes;
  const int M = static_cast<int>(p.terms.size());
  auto by_pair = [&](int a, int b, const std::string& sel) {
    if (a > b) std::swap(a, b);
    if (a < 0 || b >= L || a == b) throw DomainError("selector '" + sel + "' names an invalid pair");
    const int row = pair_index(L, a, b);
    for (int t = 0; t < M; ++t)
      if (p.modes[p.terms[t].mode].dominant_pair == row) return t;
    throw DomainError("no residual term is dominated by pair (" + std::to_string(a) + "," + std::to_string(b) + ")");
  };
  auto parse_int = [](const std::string& s, const std::string& sel) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw DomainError("bad stage selector '" + sel + "'");
    }
  };

  // First pass: explicit selectors.
  std::vector<std::vector<std::string>> raw;
  for (const auto& stage : split(text, '|')) raw.push_back(split(stage, ','));
  std::vector<std::vector<int>> named(raw.size());
  std::set<int> used;
  for (std::size_t i = 0; i < raw.size(); ++i)
    for (const auto& sel : raw[i]) {
      if (sel == "rest" || sel == "each" || sel.empty()) continue;
      int t = -1;
      const auto parts = split(sel, ':');
      if (parts[0] == "site" && parts.size() == 2) {
        const int site = parse_int(parts[1], sel);
        t = by_pair(2 * site, 2 * site + 1, sel);
      } else if (parts[0] == "pair" && parts.size() == 3) {
        t = by_pair(parse_int(parts[1], sel), parse_int(parts[2], sel), sel);
      } else if (parts.size() == 1) {
        t = parse_int(sel, sel);
        if (t < 0 || t >= M) throw DomainError("term index " + sel + " out of range");
      } else {
        throw DomainError("bad stage selector '" + sel + "'");
      }
      if (!used.insert(t).second) throw DomainError("term selected twice by '" + sel + "'");
      named[i].push_back(t);
    }
  std::vector<int> remaining;
  for (int t = 0; t < M; ++t)
    if (!used.count(t)) remaining.push_back(t);

  std::vector<std::vector<int>> stages;
  bool consumed = false;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const bool rest = std::count(raw[i].begin(), raw[i].end(), "rest") > 0;
    const bool each = std::count(raw[i].begin(), raw[i].end(), "each") > 0;
    if ((rest || each) && consumed) throw DomainError("'rest' or 'each' used more than once");
    if (each) {
      if (!named[i].empty()) stages.push_back(named[i]);
      for (int t : remaining) stages.push_back({t});
      consumed = true;
      continue;
    }
    std::vector<int> st = named[i];
    if (rest) {
      st.insert(st.end(), remaining.begin(), remaining.end());
      consumed = true;
    }
    stages.push_back(std::move(st));
  }
  return stages;
}

AdiabaticPath build_path(const Problem& p, const PathConfig& cfg) {
  std::vector<OperatorMatrix> terms;
  for (const auto& t : p.terms) terms.push_back(t.matrix);
  const int M = static_cast<int>(terms.size());
  PathSchedule sched = cfg.kind == "stepwise" ? PathSchedule::stepwise(M, resolve_stages(p, cfg.stages), cfg.endpoint_flat)
                                              : PathSchedule::direct(M, cfg.endpoint_flat);
  std::optional<OperatorMatrix> refl;
  if (p.reflection) refl = p.reflection->sector_matrix(p.sector);
  return AdiabaticPath(p.initial_matrix, std::move(terms), std::move(sched), std::move(refl));
}

namespace {

std::ofstream open_csv(const std::string& path, const char* header) {
  const std::filesystem::path fp(path);
  if (fp.has_parent_path()) std::filesystem::create_directories(fp.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << header << '\n';
  return out;
}

std::string summary_line(const std::string& k, double v) { return k + " = " + format_number(v) + "\n"; }

RunResult run_bounds(const ExperimentConfig& cfg, const BoundsAnalysis& b) {
  RunResult r;
  const std::string file = cfg.prefix + "_bounds.csv";
  auto out = open_csv(file, kBoundsHeader);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal;
  int violations = 0;
  double worst_gap = 0.0;
  for (int L = b.L_min; L <= b.L_max; ++L)
    for (int N = b.N_min; N <= std::min(b.N_max, L); ++N) {
      if (N < 2 || (N % 2 == 1 && L / 2 <= 1)) continue;
      const double bound = norm_bound(L, N);
      double worst = 0.0;
      for (int k = 0; k < b.samples; ++k) {
        Eigen::VectorXd phi(pair_count(L));
        for (Eigen::Index i = 0; i < phi.size(); ++i) phi(i) = normal(rng);
        phi.normalize();
        worst = std::max(worst, exact_norm(phi, L, N));
      }
      const auto sat = saturating_state(L, N);
      const FockSector sector = FockSector::fixed_number(L, N);
      const Eigen::VectorXd psi = to_fock(sat.state, sector);
      const double attained = psi.dot(pseudoprojector(sat.phi, sector).apply(psi));
      if (worst > bound + 1e-9) ++violations;
      worst_gap = std::max(worst_gap, std::abs(attained - bound));
      out << L << ',' << N << ',' << format_number(bound) << ',' << format_number(worst) << ','
          << format_number(attained) << '\n';
    }
  r.files.push_back(file);
  r.summary = summary_line("bound_violations", violations) + summary_line("max_saturation_error", worst_gap);
  return r;
}

RunResult run_decompose(const ExperimentConfig& cfg, const Problem& p) {
  RunResult r;
  const std::string file = cfg.prefix + "_decompose.csv";
  auto out = open_csv(file, kDecomposeHeader);
  const auto pairs = pair_list(p.target.num_modes);
  for (std::size_t k = 0; k < p.modes.size(); ++k)
    for (std::size_t a = 0; a < pairs.size(); ++a) {
      const double v = p.modes[k].vector(static_cast<Eigen::Index>(a));
      if (std::abs(v) <= 1e-12) continue;
      out << k << ',' << format_number(p.modes[k].eigenvalue) << ',' << pairs[a][0] << ',' << pairs[a][1] << ','
          << format_number(v) << '\n';
    }
  r.files.push_back(file);
  r.summary = summary_line("modes", static_cast<double>(p.modes.size())) +
              summary_line("nonzero_terms", static_cast<double>(p.terms.size()));
  if (!p.modes.empty()) r.summary += summary_line("lowest_lambda", p.modes.front().eigenvalue);
  return r;
}

RunResult run_gap(const ExperimentConfig& cfg, const AdiabaticPath& path, const GapAnalysis& g) {
  RunResult r;
  const std::string file = cfg.prefix + "_gap.csv";
  auto out = open_csv(file, kGapHeader);
  const auto tr = gap_trace(path, uniform_grid(cfg.path->grid), std::max(g.track, 3));
  for (std::size_t i = 0; i < tr.s.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    out << format_number(tr.s[i]) << ',' << format_number(tr.energies(row, 0)) << ','
        << format_number(tr.energies(row, 1)) << ',';
    if (tr.energies.cols() > 2) out << format_number(tr.energies(row, 2));
    out << ',' << format_number(tr.gap[i]) << ',';
    if (!tr.label0.empty()) out << tr.label0[i].str() << ',' << tr.label1[i].str();
    else out << ',';
    out << '\n';
  }
  r.files.push_back(file);
  r.summary = summary_line("min_gap", tr.minimum.gap) + summary_line("s_star", tr.minimum.s);
  for (const auto& m : tr.local_minima)
    r.summary += "local_minimum = " + format_number(m.s) + " " + format_number(m.gap) + "\n";
  return r;
}

RunResult run_evolve(const ExperimentConfig& cfg, const AdiabaticPath& path, const EvolveAnalysis& e) {
  RunResult r;
  const std::string file = cfg.prefix + "_fidelity.csv";
  auto out = open_csv(file, kFidelityHeader);
  const auto prop = propagate(path, e.T, std::max(e.steps, 1), e.sample_every);
  for (const auto& s : prop.samples)
    out << format_number(s.s) << ',' << format_number(s.fidelity) << ',' << format_number(s.norm) << '\n';
  r.files.push_back(file);
  r.summary = summary_line("final_fidelity", prop.final_fidelity) + summary_line("norm_drift", prop.max_norm_drift);
  return r;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  if (!cfg.analysis) throw ConfigError("missing analysis block");
  const Analysis& a = *cfg.analysis;
  if (const auto* b = std::get_if<BoundsAnalysis>(&a)) return run_bounds(cfg, *b);
  if (!cfg.model) throw ConfigError("missing [model] block");
  const Problem p = build_problem(*cfg.model);
  if (std::holds_alternative<DecomposeAnalysis>(a)) return run_decompose(cfg, p);
  if (!cfg.path) throw ConfigError("missing [path] block");
  const AdiabaticPath path = build_path(p, *cfg.path);
  if (const auto* g = std::get_if<GapAnalysis>(&a)) return run_gap(cfg, path, *g);
  if (const auto* e = std::get_if<EvolveAnalysis>(&a)) return run_evolve(cfg, path, *e);
  RunResult r;
  if (const auto* n = std::get_if<NumeratorAnalysis>(&a)) {
    const std::string file = cfg.prefix + "_numerator.csv";
    auto out = open_csv(file, kNumeratorHeader);
    const double I = adiabatic_numerator(path, n->points);
    out << cfg.path->kind << ',' << path.terms.size() << ',' << format_number(I) << '\n';
    r.files.push_back(file);
    r.summary = summary_line("numerator", I);
    return r;
  }
  const auto& j = std::get<JansenAnalysis>(a);
  const std::string file = cfg.prefix + "_jansen.csv";
  auto out = open_csv(file, kJansenHeader);
  const auto est = jansen_time(path, j.delta, j.points);
  out << format_number(j.delta) << ',' << format_number(est.time) << ',' << format_number(est.integral) << ','
      << format_number(est.kinks) << ',' << format_number(est.boundary) << ',' << format_number(est.min_gap) << '\n';
  r.files.push_back(file);
  r.summary = summary_line("time", est.time) + summary_line("min_gap", est.min_gap);
  return r;
}

std::vector<std::pair<std::string, ExperimentConfig>> figure_experiments(const std::string& out_dir) {
  std::vector<std::pair<std::string, ExperimentConfig>> out;
  auto add = [&](const std::string& name, ModelConfig m, const std::string& stages) {
    for (const bool stepwise : {false, true}) {
      ExperimentConfig c;
      c.model = m;
      c.path = PathConfig{stepwise ? "stepwise" : "direct", stepwise ? stages : "", false, 401};
      c.analysis = GapAnalysis{};
      const std::string tag = name + (stepwise ? "_stepwise" : "_direct");
      c.prefix = out_dir + "/" + tag;
      out.emplace_back(tag, std::move(c));
    }
  };
  ModelConfig trimer;
  trimer.kind = "trimer";
  trimer.j = 1.0;
  trimer.j13 = 0.37;
  trimer.U = -5.0;
  trimer.dU = 1e-6;
  trimer.hf = "best";
  trimer.policy = ConstantPolicy::spread;
  add("fig1_trimer", trimer, "site:0 | rest | site:2");

  ModelConfig four;
  four.kind = "four_site";
  four.j = 1.0;
  four.delta = 0.1;
  four.U = -2.0;
  four.dU = 1e-6;
  four.hf = "lowest_orbitals";
  four.policy = ConstantPolicy::drop;
  add("fig2_four_site", four, "site:0 | rest");
  four.delta = 0.25;
  four.U = 2.0;
  add("fig3_four_site", four, "site:0 | rest");
  return out;
}

}  // namespace asp
