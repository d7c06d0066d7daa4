#include "asp/pairing.hpp"

#include "asp/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace asp {

Eigen::MatrixXd antisymmetric_matrix(const Eigen::VectorXd& phi, int L) {
  if (phi.size() != pair_count(L)) throw DomainError("two-body vector length differs from pair count");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(L, L);
  for (const auto& [p, r] : pair_list(L)) {
    A(p, r) = phi(pair_index(L, p, r));
    A(r, p) = -A(p, r);
  }
  return A;
}

Eigen::MatrixXd block_form(const Eigen::VectorXd& xi, int L) {
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(L, L);
  for (Eigen::Index m = 0; m < xi.size(); ++m) {
    X(2 * m, 2 * m + 1) = xi(m);
    X(2 * m + 1, 2 * m) = -xi(m);
  }
  return X;
}

PairedForm youla(const Eigen::VectorXd& phi, int L) {
  const Eigen::MatrixXd A = antisymmetric_matrix(phi, L);
  const int ell = L / 2;
  PairedForm out{Eigen::MatrixXd::Identity(L, L), Eigen::VectorXd::Zero(ell)};
  if (L < 2) return out;

  Eigen::RealSchur<Eigen::MatrixXd> schur(A);
  const Eigen::MatrixXd& T = schur.matrixT();
  const Eigen::MatrixXd& U = schur.matrixU();
  const double tiny = 1e-14 * std::max(1.0, A.cwiseAbs().maxCoeff());

  struct Plane {
    double xi;
    Eigen::VectorXd a, b;
  };
  std::vector<Plane> planes;
  std::vector<Eigen::VectorXd> zeros;
  for (int i = 0; i < L;) {
    if (i + 1 < L && std::abs(T(i + 1, i)) > tiny) {
      double xi = 0.5 * (T(i, i + 1) - T(i + 1, i));
      Eigen::VectorXd a = U.col(i), b = U.col(i + 1);
      if (xi < 0) {
        std::swap(a, b);
        xi = -xi;
      }
      planes.push_back({xi, a, b});
      i += 2;
    } else {
      zeros.push_back(U.col(i));
      i += 1;
    }
  }
  std::stable_sort(planes.begin(), planes.end(), [](const Plane& x, const Plane& y) { return x.xi > y.xi; });
  for (std::size_t z = 0; z + 1 < zeros.size(); z += 2) planes.push_back({0.0, zeros[z], zeros[z + 1]});

  // Rotate inside each plane so that, on the row of largest plane weight,
  // the first vector is positive and the second vanishes.
  for (std::size_t m = 0; m < planes.size(); ++m) {
    Plane& pl = planes[m];
    const Eigen::VectorXd w = pl.a.cwiseAbs2() + pl.b.cwiseAbs2();
    const double top = w.maxCoeff();
    Eigen::Index r = 0;
    while (w(r) < top - 1e-12) ++r;
    const double ang = std::atan2(pl.b(r), pl.a(r));
    const double c = std::cos(ang), s = std::sin(ang);
    const Eigen::VectorXd a = c * pl.a + s * pl.b;
    const Eigen::VectorXd b = -s * pl.a + c * pl.b;
    out.rotation.col(2 * m) = a;
    out.rotation.col(2 * m + 1) = b;
    out.amplitudes(static_cast<Eigen::Index>(m)) = pl.xi;
  }
  if (L % 2) out.rotation.col(L - 1) = zeros.back();
  return out;
}

double phi_matrix_element(const Eigen::VectorXd& xi, Word P, Word U, Word P2, Word U2) {
  auto check = [&](Word pairs, Word unpaired) {
    for (Word r = pairs; r; r &= r - 1) {
      const int m = std::countr_zero(r);
      if (m >= xi.size()) throw DomainError("pair site out of range");
      if (unpaired >> (2 * m) & 3) throw DomainError("pair site overlaps an unpaired mode");
    }
    for (Eigen::Index m = 0; m < xi.size(); ++m)
      if ((unpaired >> (2 * m) & 3) == 3) throw DomainError("both modes of a pair site marked unpaired");
  };
  check(P, U);
  check(P2, U2);
  if (U != U2 || std::popcount(P) != std::popcount(P2)) return 0.0;
  if (P == P2) {
    double s = 0;
    for (Word r = P; r; r &= r - 1) s += xi(std::countr_zero(r)) * xi(std::countr_zero(r));
    return s;
  }
  const Word only1 = P & ~P2, only2 = P2 & ~P;
  if (std::popcount(only1) != 1 || std::popcount(only2) != 1) return 0.0;
  return xi(std::countr_zero(only1)) * xi(std::countr_zero(only2));
}

namespace {

void check_range(int L, int N) {
  if (N < 2 || N > L)
    throw DomainError("bound needs 2 <= N <= L (got L=" + std::to_string(L) + ", N=" + std::to_string(N) + ")");
}

double even_form(int ell, int n) { return static_cast<double>(n) / ell * (ell - n + 1); }

}  // namespace

double norm_bound_theorem(int L, int N) {
  check_range(L, N);
  const int ell = L / 2, n = N / 2;
  if (N % 2 == 0) return even_form(ell, n);
  if (ell <= 1) throw DomainError("odd-N bound undefined for floor(L/2) <= 1");
  return static_cast<double>(n) * (ell - n) / (ell - 1);
}

double norm_bound(int L, int N) {
  const double t = norm_bound_theorem(L, N);
  if (L % 2 == 1 && N % 2 == 1) return std::max(t, even_form(L / 2, N / 2));
  return t;
}

double exact_norm(const Eigen::VectorXd& phi, int L, int N) {
  if (N < 2) throw DomainError("exact norm needs N >= 2");
  const FockSector sector = FockSector::fixed_number(L, N);
  // ||Phi|| = ||b||^2; diagonalise the smaller Gram matrix.
  const Eigen::MatrixXd B = pair_annihilator(phi, sector).to_dense();
  const Eigen::MatrixXd gram = B.rows() <= B.cols() ? Eigen::MatrixXd(B * B.transpose())
                                                    : Eigen::MatrixXd(B.transpose() * B);
  if (gram.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues().maxCoeff());
}

namespace {

std::vector<Word> choose(Word sites, int k) {
  std::vector<Word> out;
  const int n = std::popcount(sites);
  if (k < 0 || k > n) return out;
  std::vector<int> pos;
  for (Word r = sites; r; r &= r - 1) pos.push_back(std::countr_zero(r));
  for (Word c = 0; c < (Word{1} << n); ++c)
    if (std::popcount(c) == k) {
      Word w = 0;
      for (Word r = c; r; r &= r - 1) w |= Word{1} << pos[std::countr_zero(r)];
      out.push_back(w);
    }
  std::sort(out.begin(), out.end());
  return out;
}

double hcb_top(const Eigen::VectorXd& xi, Word sites, int bosons, Word unpaired) {
  const auto sets = choose(sites, bosons);
  const auto n = static_cast<Eigen::Index>(sets.size());
  if (n == 0) return 0.0;
  Eigen::MatrixXd M(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) M(a, b) = phi_matrix_element(xi, sets[a], unpaired, sets[b], unpaired);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace

double exact_norm_paired(const PairedForm& pf, int L, int N) {
  if (N < 2 || N > L) throw DomainError("exact norm needs 2 <= N <= L");
  const int ell = L / 2, n = N / 2;
  const Word all = (Word{1} << ell) - 1;
  if (N % 2 == 0) return hcb_top(pf.amplitudes, all, n, 0);
  double best = 0.0;
  for (int i = 0; i < ell; ++i)
    best = std::max(best, hcb_top(pf.amplitudes, all & ~(Word{1} << i), n, Word{1} << (2 * i)));
  if (L % 2) best = std::max(best, hcb_top(pf.amplitudes, all, n, Word{1} << (L - 1)));
  return best;
}

SaturatingState saturating_state(int L, int N, std::optional<int> unpaired_site) {
  if (N < 2 || N > L) throw DomainError("saturating state needs 2 <= N <= L");
  const int ell = L / 2, n = N / 2;
  Word sites = (Word{1} << ell) - 1;
  Word unpaired = 0;
  if (N % 2 == 1) {
    bool spare = false;
    if (!unpaired_site) {
      spare = L % 2 == 1 && (ell <= 1 || even_form(ell, n) >= norm_bound_theorem(L, N));
    } else if (*unpaired_site == ell && L % 2 == 1) {
      spare = true;
    } else if (*unpaired_site < 0 || *unpaired_site >= ell) {
      throw DomainError("unpaired site out of range");
    }
    if (spare) {
      unpaired = Word{1} << (L - 1);
    } else {
      const int i = unpaired_site.value_or(ell - 1);
      if (ell - 1 < n) throw DomainError("no room for the paired fermions next to the unpaired one");
      sites &= ~(Word{1} << i);
      unpaired = Word{1} << (2 * i);
    }
  }
  const int used = std::popcount(sites);
  SaturatingState out;
  out.form.rotation = Eigen::MatrixXd::Identity(L, L);
  out.form.amplitudes = Eigen::VectorXd::Zero(ell);
  for (int m = 0; m < ell; ++m)
    if (sites >> m & 1) out.form.amplitudes(m) = 1.0 / std::sqrt(static_cast<double>(used));
  out.phi = Eigen::VectorXd::Zero(pair_count(L));
  for (int m = 0; m < ell; ++m) out.phi(pair_index(L, 2 * m, 2 * m + 1)) = out.form.amplitudes(m);
  out.state.pair_sets = choose(sites, n);
  out.state.unpaired = unpaired;
  const auto cnt = static_cast<Eigen::Index>(out.state.pair_sets.size());
  out.state.amplitudes = Eigen::VectorXd::Constant(cnt, 1.0 / std::sqrt(static_cast<double>(cnt)));
  return out;
}

Eigen::VectorXd to_fock(const HcbState& s, const FockSector& sector) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sector.size()));
  for (std::size_t c = 0; c < s.pair_sets.size(); ++c) {
    OpString ops;
    for (Word r = s.pair_sets[c]; r; r &= r - 1) {
      const int m = std::countr_zero(r);
      ops.push_back(cre(2 * m));
      ops.push_back(cre(2 * m + 1));
    }
    for (Word r = s.unpaired; r; r &= r - 1) ops.push_back(cre(std::countr_zero(r)));
    auto ex = apply_excitation(0, ops);
    auto i = ex ? sector.index_of(ex->word) : std::nullopt;
    if (!i) throw DomainError("HCB configuration outside the sector");
    v(static_cast<Eigen::Index>(*i)) += ex->sign * s.amplitudes(static_cast<Eigen::Index>(c));
  }
  return v;
}

double hcb_expectation(const HcbState& s, const Eigen::VectorXd& xi) {
  double e = 0;
  for (std::size_t a = 0; a < s.pair_sets.size(); ++a)
    for (std::size_t b = 0; b < s.pair_sets.size(); ++b)
      e += s.amplitudes(static_cast<Eigen::Index>(a)) * s.amplitudes(static_cast<Eigen::Index>(b)) *
           phi_matrix_element(xi, s.pair_sets[a], s.unpaired, s.pair_sets[b], s.unpaired);
  return e;
}

std::vector<std::vector<std::array<int, 2>>> round_robin_pairings(int L) {
  if (L < 2 || L % 2) throw DomainError("round-robin pairing needs an even mode count");
  std::vector<std::vector<std::array<int, 2>>> rounds;
  const int ring = L - 1;
  for (int r = 0; r < ring; ++r) {
    std::vector<std::array<int, 2>> round{{0, 1 + r}};
    for (int k = 1; k < L / 2; ++k) {
      const int a = 1 + (r + k) % ring, b = 1 + (r - k + ring) % ring;
      round.push_back({std::min(a, b), std::max(a, b)});
    }
    rounds.push_back(std::move(round));
  }
  return rounds;
}

Eigen::MatrixXd sylvester_hadamard(int order) {
  if (order < 1 || !std::has_single_bit(static_cast<unsigned>(order)))
    throw DomainError("Sylvester construction needs a power-of-two order");
  Eigen::MatrixXd H = Eigen::MatrixXd::Ones(1, 1);
  while (H.rows() < order) {
    const Eigen::Index n = H.rows();
    Eigen::MatrixXd next(2 * n, 2 * n);
    next << H, H, H, -H;
    H = next;
  }
  return H;
}

std::vector<TwoBodyMode> hadamard_maximal_modes(int L) {
  if (L < 4 || !std::has_single_bit(static_cast<unsigned>(L)))
    throw DomainError("Hadamard construction needs L a power of two, L >= 4");
  const int half = L / 2;
  const Eigen::MatrixXd H = sylvester_hadamard(half);
  std::vector<TwoBodyMode> modes;
  for (const auto& round : round_robin_pairings(L))
    for (int c = 0; c < half; ++c) {
      TwoBodyMode m;
      m.eigenvalue = 1.0;
      m.vector = Eigen::VectorXd::Zero(pair_count(L));
      for (int k = 0; k < half; ++k)
        m.vector(pair_index(L, round[k][0], round[k][1])) = H(k, c) / std::sqrt(static_cast<double>(half));
      m.dominant_pair = pair_index(L, round[0][0], round[0][1]);
      modes.push_back(std::move(m));
    }
  return modes;
}

}  // namespace asp
