#include "asp/adiabatic.hpp"

#include "asp/error.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <set>

namespace asp {

// ---------------------------------------------------------------- schedule

PathSchedule::PathSchedule(Kind kind, std::vector<Window> windows, bool flat)
    : kind_(kind), windows_(std::move(windows)), flat_(flat) {
  for (const auto& w : windows_)
    if (!(w.start >= 0.0 && w.end <= 1.0 && w.start < w.end))
      throw DomainError("ramp window must satisfy 0 <= start < end <= 1");
}

PathSchedule PathSchedule::direct(int terms, bool endpoint_flat) {
  return PathSchedule(Kind::direct, std::vector<Window>(std::max(terms, 0), Window{0.0, 1.0}), endpoint_flat);
}

PathSchedule PathSchedule::stepwise(int terms, const std::vector<std::vector<int>>& stages, bool endpoint_flat) {
  if (stages.empty()) throw DomainError("stepwise schedule needs at least one stage");
  std::vector<int> owner(std::max(terms, 0), -1);
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (stages[i].empty()) throw DomainError("stepwise stage " + std::to_string(i + 1) + " is empty");
    for (int k : stages[i]) {
      if (k < 0 || k >= terms) throw DomainError("stage refers to term " + std::to_string(k) + " out of range");
      if (owner[k] >= 0) throw DomainError("term " + std::to_string(k) + " appears in two stages");
      owner[k] = static_cast<int>(i);
    }
  }
  for (int k = 0; k < terms; ++k)
    if (owner[k] < 0) throw DomainError("stages do not cover term " + std::to_string(k));
  const double m = static_cast<double>(stages.size());
  std::vector<Window> w(terms);
  for (int k = 0; k < terms; ++k) w[k] = {owner[k] / m, owner[k] + 1 == static_cast<int>(stages.size()) ? 1.0 : (owner[k] + 1) / m};
  return PathSchedule(Kind::stepwise, std::move(w), endpoint_flat);
}

PathSchedule PathSchedule::custom(std::vector<Window> windows, bool endpoint_flat) {
  return PathSchedule(Kind::custom, std::move(windows), endpoint_flat);
}

namespace {

bool active(const PathSchedule::Window& w, double s, Side side) {
  if (s > w.start && s < w.end) return true;
  if (s == w.start) return side == Side::right;
  if (s == w.end) return side == Side::left;
  return false;
}

}  // namespace

double PathSchedule::value(int k, double s) const {
  const auto& w = windows_.at(k);
  if (s <= w.start) return 0.0;
  if (s >= w.end) return 1.0;
  const double u = (s - w.start) / (w.end - w.start);
  return flat_ ? u * u * (3.0 - 2.0 * u) : u;
}

double PathSchedule::slope(int k, double s, Side side) const {
  const auto& w = windows_.at(k);
  if (!active(w, s, side)) return 0.0;
  const double len = w.end - w.start;
  const double u = (s - w.start) / len;
  return flat_ ? 6.0 * u * (1.0 - u) / len : 1.0 / len;
}

double PathSchedule::curvature(int k, double s, Side side) const {
  const auto& w = windows_.at(k);
  if (!flat_ || !active(w, s, side)) return 0.0;
  const double len = w.end - w.start;
  const double u = (s - w.start) / len;
  return (6.0 - 12.0 * u) / (len * len);
}

Eigen::VectorXd PathSchedule::values(double s) const {
  Eigen::VectorXd v(size());
  for (int k = 0; k < size(); ++k) v(k) = value(k, s);
  return v;
}

std::vector<double> PathSchedule::breakpoints() const {
  std::set<double> b{0.0, 1.0};
  for (const auto& w : windows_) {
    b.insert(w.start);
    b.insert(w.end);
  }
  return {b.begin(), b.end()};
}

std::vector<double> PathSchedule::kinks() const {
  std::vector<double> out;
  if (flat_) return out;
  for (double b : breakpoints())
    if (b > 0.0 && b < 1.0) out.push_back(b);
  return out;
}

// ---------------------------------------------------------------- path

AdiabaticPath::AdiabaticPath(OperatorMatrix initial_, std::vector<OperatorMatrix> terms_, PathSchedule schedule_,
                             std::optional<OperatorMatrix> reflection_)
    : initial(std::move(initial_)), terms(std::move(terms_)), schedule(std::move(schedule_)),
      reflection(std::move(reflection_)) {
  if (schedule.size() != static_cast<int>(terms.size()))
    throw DomainError("schedule has " + std::to_string(schedule.size()) + " coefficients for " +
                      std::to_string(terms.size()) + " terms");
  for (const auto& t : terms)
    if (t.rows() != initial.rows() || t.cols() != initial.cols()) throw DomainError("term dimension mismatch");
  if (reflection && reflection->rows() != initial.rows()) throw DomainError("reflection dimension mismatch");
}

namespace {

OperatorMatrix combine(const OperatorMatrix& base, const std::vector<OperatorMatrix>& terms,
                       const Eigen::VectorXd& coef) {
  OperatorMatrix out = base;
  for (std::size_t k = 0; k < terms.size(); ++k)
    if (coef(static_cast<Eigen::Index>(k)) != 0.0) out += coef(static_cast<Eigen::Index>(k)) * OperatorMatrix(terms[k]);
  return out;
}

}  // namespace

OperatorMatrix AdiabaticPath::at(double s) const { return combine(initial, terms, schedule.values(s)); }

OperatorMatrix AdiabaticPath::first_derivative(double s, Side side) const {
  Eigen::VectorXd c(schedule.size());
  for (int k = 0; k < schedule.size(); ++k) c(k) = schedule.slope(k, s, side);
  return combine(OperatorMatrix::zero(initial.rows(), initial.cols()), terms, c);
}

OperatorMatrix AdiabaticPath::second_derivative(double s, Side side) const {
  Eigen::VectorXd c(schedule.size());
  for (int k = 0; k < schedule.size(); ++k) c(k) = schedule.curvature(k, s, side);
  return combine(OperatorMatrix::zero(initial.rows(), initial.cols()), terms, c);
}

OperatorMatrix AdiabaticPath::final_hamiltonian() const {
  return combine(initial, terms, Eigen::VectorXd::Ones(schedule.size()));
}

// ---------------------------------------------------------------- spectra

namespace {

constexpr int kBrentBits = std::numeric_limits<double>::digits;

// Dense copies for repeated evaluation of small paths.
struct DensePath {
  Eigen::MatrixXd initial;
  std::vector<Eigen::MatrixXd> terms;
  const PathSchedule* schedule;

  explicit DensePath(const AdiabaticPath& p) : initial(p.initial.to_dense()), schedule(&p.schedule) {
    for (const auto& t : p.terms) terms.push_back(t.to_dense());
  }
  Eigen::MatrixXd at(double s) const {
    Eigen::MatrixXd h = initial;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const double g = schedule->value(static_cast<int>(k), s);
      if (g != 0.0) h += g * terms[k];
    }
    return h;
  }
};

double gap_of(const Eigen::MatrixXd& h) {
  if (h.rows() < 2) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(1) - es.eigenvalues()(0);
}

GapMinimum refine(const DensePath& dp, const std::vector<double>& grid, const std::vector<double>& gap,
                  std::size_t i) {
  const double lo = grid[i == 0 ? 0 : i - 1];
  const double hi = grid[std::min(i + 1, grid.size() - 1)];
  GapMinimum best{grid[i], gap[i]};
  if (hi <= lo) return best;
  auto f = [&](double s) { return gap_of(dp.at(s)); };
  const auto [s, g] = boost::math::tools::brent_find_minima(f, lo, hi, kBrentBits);
  if (g < best.gap) best = {s, g};
  return best;
}

}  // namespace

std::vector<double> uniform_grid(int points) {
  if (points < 2) throw DomainError("grid needs at least two points");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = static_cast<double>(i) / (points - 1);
  return g;
}

SpectrumTrace gap_trace(const AdiabaticPath& path, const std::vector<double>& grid, int track) {
  if (grid.empty()) throw DomainError("empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.0 || grid[i] > 1.0) throw DomainError("grid point outside [0, 1]");
    if (i && grid[i] <= grid[i - 1]) throw DomainError("grid must increase strictly");
  }
  const DensePath dp(path);
  const Eigen::Index dim = path.dim();
  const int k = static_cast<int>(std::min<Eigen::Index>(std::max(track, 2), dim));
  SpectrumTrace tr;
  tr.s = grid;
  tr.energies.resize(static_cast<Eigen::Index>(grid.size()), k);
  std::optional<Eigen::MatrixXd> refl;
  if (path.reflection) refl = path.reflection->to_dense();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dp.at(grid[i]));
    tr.energies.row(static_cast<Eigen::Index>(i)) = es.eigenvalues().head(k).transpose();
    tr.gap.push_back(dim > 1 ? es.eigenvalues()(1) - es.eigenvalues()(0) : std::numeric_limits<double>::infinity());
    if (refl) {
      for (int lvl = 0; lvl < 2 && lvl < dim; ++lvl) {
        const Eigen::VectorXd v = es.eigenvectors().col(lvl);
        SymmetryLabel l;
        l.expectation = v.dot(*refl * v);
        l.epsilon = 1.0 - std::abs(l.expectation);
        l.kind = l.expectation >= 1.0 - 1e-8    ? SymmetryLabel::Kind::symmetric
                 : l.expectation <= -1.0 + 1e-8 ? SymmetryLabel::Kind::antisymmetric
                                                : SymmetryLabel::Kind::mixed;
        (lvl == 0 ? tr.label0 : tr.label1).push_back(l);
      }
    }
  }
  const auto imin = static_cast<std::size_t>(std::min_element(tr.gap.begin(), tr.gap.end()) - tr.gap.begin());
  tr.minimum = refine(dp, grid, tr.gap, imin);
  for (std::size_t i = 1; i + 1 < grid.size(); ++i)
    if (tr.gap[i] < tr.gap[i - 1] && tr.gap[i] <= tr.gap[i + 1]) tr.local_minima.push_back(refine(dp, grid, tr.gap, i));
  return tr;
}

// ---------------------------------------------------------------- dynamics

Propagation propagate(const AdiabaticPath& path, double T, int steps, int sample_every) {
  if (steps < 1) throw DomainError("propagation needs at least one step");
  using cd = std::complex<double>;
  const DensePath dp(path);
  const double ds = 1.0 / steps;
  Propagation out;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dp.at(0.0));
  Eigen::VectorXd ground = es.eigenvectors().col(0);
  out.state = ground.cast<cd>();
  const auto degenerate = [&] { return es.eigenvalues().size() > 1 && es.eigenvalues()(1) - es.eigenvalues()(0) < 1e-12; };
  out.samples.push_back({0.0, degenerate() ? std::numeric_limits<double>::quiet_NaN() : 1.0, 1.0});

  for (int n = 0; n < steps; ++n) {
    es.compute(dp.at((n + 0.5) * ds));
    const Eigen::MatrixXcd V = es.eigenvectors().cast<cd>();
    Eigen::VectorXcd c = V.adjoint() * out.state;
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::exp(cd(0.0, -T * ds * es.eigenvalues()(i)));
    out.state = V * c;
    const double norm = out.state.norm();
    out.max_norm_drift = std::max(out.max_norm_drift, std::abs(norm - 1.0));

    const bool last = n + 1 == steps;
    if (last || (sample_every > 0 && (n + 1) % sample_every == 0)) {
      const double s = last ? 1.0 : (n + 1) * ds;
      es.compute(dp.at(s));
      Eigen::VectorXd g = es.eigenvectors().col(0);
      if (g.dot(ground) < 0) g = -g;
      ground = g;
      double fid = std::abs(g.cast<cd>().dot(out.state));
      if (degenerate()) fid = std::numeric_limits<double>::quiet_NaN();
      out.samples.push_back({s, fid, norm});
    }
  }
  out.final_fidelity = out.samples.back().fidelity;
  return out;
}

double ground_fidelity(const AdiabaticPath& path, const Eigen::VectorXcd& state) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(path.final_hamiltonian().to_dense());
  return std::abs(es.eigenvectors().col(0).cast<std::complex<double>>().dot(state));
}

// ---------------------------------------------------------------- estimates

namespace {

template <class F>
double simpson(double lo, double hi, int points, F&& f) {
  int n = std::max(2, static_cast<int>(std::ceil(points * (hi - lo))));
  if (n % 2) ++n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = i == n ? hi : lo + (hi - lo) * i / n;
    const Side side = i == n ? Side::left : Side::right;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * f(s, side);
  }
  return acc * (hi - lo) / (3.0 * n);
}

}  // namespace

double adiabatic_numerator(const AdiabaticPath& path, int points) {
  const auto bp = path.schedule.breakpoints();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i)
    total += simpson(bp[i], bp[i + 1], points, [&](double s, Side side) {
      const double n = operator_norm(path.first_derivative(s, side));
      return n * n;
    });
  return total;
}

JansenEstimate jansen_time(const AdiabaticPath& path, double delta, int points) {
  if (!(delta > 0.0)) throw DomainError("target infidelity must be positive");
  const DensePath dp(path);
  JansenEstimate est;
  est.min_gap = std::numeric_limits<double>::infinity();
  auto gap_at = [&](double s) {
    const double g = gap_of(dp.at(s));
    est.min_gap = std::min(est.min_gap, g);
    if (!(g > 1e-12)) throw DomainError("adiabatic time bound diverges: gap closes at s = " + std::to_string(s));
    return g;
  };
  const auto bp = path.schedule.breakpoints();
  for (std::size_t i = 0; i + 1 < bp.size(); ++i)
    est.integral += simpson(bp[i], bp[i + 1], points, [&](double s, Side side) {
      const double g = gap_at(s);
      const double d1 = operator_norm(path.first_derivative(s, side));
      const double d2 = operator_norm(path.second_derivative(s, side));
      return d2 / (g * g) + 7.0 * d1 * d1 / (g * g * g);
    });
  for (double s : path.schedule.kinks()) {
    const double g = gap_at(s);
    const OperatorMatrix jump = path.first_derivative(s, Side::right) - path.first_derivative(s, Side::left);
    est.kinks += operator_norm(jump) / (g * g);
  }
  const double g0 = gap_at(0.0), g1 = gap_at(1.0);
  est.boundary = operator_norm(path.first_derivative(0.0, Side::right)) / (g0 * g0) +
                 operator_norm(path.first_derivative(1.0, Side::left)) / (g1 * g1);
  est.time = (est.integral + est.kinks + est.boundary) / delta;
  return est;
}

}  // namespace asp
