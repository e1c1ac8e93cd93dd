#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <optional>
#include <vector>

#include "nlts/common.hpp"
#include "nlts/css.hpp"
#include "nlts/error.hpp"
#include "nlts/gf2.hpp"
#include "nlts/quantumsim.hpp"

namespace nlts {

/// The projector (1 - P^support) / 2 with P = X or Z.
struct PauliTerm {
  Basis basis = Basis::Z;
  BitVector support;
};

class StabilizerHamiltonian {
 public:
  /// One term per row of H_z (Z type) followed by one per row of H_x (X type).
  static StabilizerHamiltonian from_code(const CssCode& code) {
    std::vector<PauliTerm> terms;
    for (const auto& r : code.hz().row_vectors()) terms.push_back({Basis::Z, r});
    for (const auto& r : code.hx().row_vectors()) terms.push_back({Basis::X, r});
    return from_terms(code.n(), std::move(terms));
  }

  static StabilizerHamiltonian from_terms(std::size_t n, std::vector<PauliTerm> terms) {
    StabilizerHamiltonian h;
    h.n_ = n;
    h.z_ = BitMatrix(0, n);
    h.x_ = BitMatrix(0, n);
    for (const auto& t : terms) {
      if (t.support.size() != n) throw Error(Errc::DimensionMismatch, "term support length differs from n");
      (t.basis == Basis::Z ? h.z_ : h.x_).append_row(t.support);
    }
    h.terms_ = std::move(terms);
    return h;
  }

  std::size_t n() const noexcept { return n_; }
  const std::vector<PauliTerm>& terms() const noexcept { return terms_; }
  std::size_t term_count() const noexcept { return terms_.size(); }
  const BitMatrix& z_checks() const noexcept { return z_; }
  const BitMatrix& x_checks() const noexcept { return x_; }

  std::size_t locality() const {
    std::size_t w = 0;
    for (const auto& t : terms_) w = std::max(w, t.support.weight());
    return w;
  }

 private:
  std::size_t n_ = 0;
  std::vector<PauliTerm> terms_;
  BitMatrix z_;
  BitMatrix x_;
};

/// Number of violated Z terms on the basis state |y>, i.e. |H_z y|.
inline std::size_t energy_z_basis(const StabilizerHamiltonian& h, const BitVector& y) {
  return gf2::product(h.z_checks(), y).weight();
}

/// Number of violated X terms on the Hadamard-basis state H^n |x>.
inline std::size_t energy_x_basis(const StabilizerHamiltonian& h, const BitVector& x) {
  return gf2::product(h.x_checks(), x).weight();
}

namespace detail {

inline std::vector<gf2::Word> term_words(const BitMatrix& m) {
  if (m.cols() > gf2::kWordBits) throw Error(Errc::CapExceeded, "term words need n <= 64");
  return gf2::words::to_words(m.row_vectors());
}

inline std::size_t violated(const std::vector<gf2::Word>& terms, gf2::Word y) {
  std::size_t c = 0;
  for (auto t : terms) c += static_cast<std::size_t>(std::popcount(t & y) & 1);
  return c;
}

inline void require_state(const StabilizerHamiltonian& h, const StateVector& psi) {
  if (psi.qubits() != h.n())
    throw Error(Errc::DimensionMismatch, "state on " + std::to_string(psi.qubits()) + " qubits, Hamiltonian on " +
                                             std::to_string(h.n()));
  psi.require_normalized(1e-12);
}

}  // namespace detail

struct EnergyBreakdown {
  double z = 0;  // tr(H_z psi) = E_{y ~ D_z} |H_z y|
  double x = 0;  // tr(H_x psi) = E_{x ~ D_x} |H_x x|
  double total() const { return z + x; }
};

inline EnergyBreakdown energy_from_distributions(const StabilizerHamiltonian& h, const MeasurementDistribution& dz,
                                                 const MeasurementDistribution& dx) {
  const auto zt = detail::term_words(h.z_checks()), xt = detail::term_words(h.x_checks());
  EnergyBreakdown e;
  e.z = dz.expectation([&](gf2::Word y) { return static_cast<double>(detail::violated(zt, y)); });
  e.x = dx.expectation([&](gf2::Word x) { return static_cast<double>(detail::violated(xt, x)); });
  return e;
}

/// tr(H psi) through the two measurement distributions.
inline EnergyBreakdown energy_expectation(const StateVector& psi, const StabilizerHamiltonian& h) {
  detail::require_state(h, psi);
  const auto [dz, dx] = measurement_distributions(psi);
  return energy_from_distributions(h, dz, dx);
}

/// <psi|H|psi> by applying each term to psi: Z terms are diagonal, X terms
/// contribute (1 - Re <psi|X^w|psi>) / 2.
inline EnergyBreakdown operator_expectation(const StateVector& psi, const StabilizerHamiltonian& h) {
  detail::require_state(h, psi);
  EnergyBreakdown e;
  for (const auto& t : h.terms()) {
    const gf2::Word w = t.support.to_word();
    if (t.basis == Basis::Z) {
      for (std::size_t y = 0; y < psi.dimension(); ++y)
        if (std::popcount(w & y) & 1) e.z += std::norm(psi[y]);
    } else {
      e.x += 0.5 * (1.0 - psi.inner(psi.apply_x_string(w)).real());
    }
  }
  return e;
}

/// The full 2^n x 2^n matrix of H in the computational basis.
inline Eigen::MatrixXd dense_matrix(const StabilizerHamiltonian& h, std::size_t max_n = kMaxDenseQubits) {
  if (h.n() > max_n) throw Error(Errc::CapExceeded, "dense Hamiltonian needs n <= " + std::to_string(max_n));
  const std::size_t dim = std::size_t{1} << h.n();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& t : h.terms()) {
    const gf2::Word w = t.support.to_word();
    for (std::size_t y = 0; y < dim; ++y) {
      if (t.basis == Basis::Z) {
        if (std::popcount(w & y) & 1) m(y, y) += 1.0;
      } else {
        m(y, y) += 0.5;
        m(y, y ^ w) -= 0.5;
      }
    }
  }
  return m;
}

struct CommutingReport {
  bool commuting = true;
  std::optional<std::pair<std::size_t, std::size_t>> witness;  // term indices
};

/// X^a and Z^b commute iff |a & b| is even; same-type terms always commute.
inline CommutingReport commuting_check(const StabilizerHamiltonian& h) {
  CommutingReport r;
  const auto& t = h.terms();
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      if (t[i].basis != t[j].basis && t[i].support.dot(t[j].support)) {
        r.commuting = false;
        r.witness = std::make_pair(i, j);
        return r;
      }
    }
  }
  return r;
}

struct GroundSpaceReport {
  std::size_t predicted = 0;  // 2^{n - rank(X terms) - rank(Z terms)}
  std::optional<std::size_t> diagonalized;
  double ground_energy = 0;
  double spectral_gap = 0;  // smallest positive eigenvalue seen
  std::size_t sectors = 0;
  bool verified = false;
};

struct GroundSpaceOptions {
  std::size_t ed_max_n = kMaxDenseQubits;
  double tolerance = 1e-9;
};

/// The ground space dimension predicted by the parameter identity and, for
/// n within ed_max_n, an exact diagonalization sector by sector. The X terms
/// only connect y to y + rowspace(H_x), so each coset is a block of size
/// 2^{r_x}. When r_z < r_x the Hadamard-conjugated Hamiltonian (roles of X
/// and Z swapped) has smaller blocks and is used instead.
inline GroundSpaceReport ground_space_dimension(const StabilizerHamiltonian& h, const GroundSpaceOptions& opts = {}) {
  GroundSpaceReport r;
  const std::size_t rx = gf2::rank(h.x_checks()), rz = gf2::rank(h.z_checks());
  if (h.n() - rx - rz >= 63) throw Error(Errc::CapExceeded, "ground space dimension overflows");
  r.predicted = std::size_t{1} << (h.n() - rx - rz);
  if (h.n() > opts.ed_max_n) return r;

  const bool swap = rz < rx;
  const auto diag_terms = detail::term_words(swap ? h.x_checks() : h.z_checks());
  const auto flip_terms = detail::term_words(swap ? h.z_checks() : h.x_checks());
  const gf2::words::WordBasis flip_basis(flip_terms);
  const auto span = gf2::words::span(flip_basis.rows);
  const std::size_t dim = std::size_t{1} << h.n(), block = span.size();

  std::vector<bool> seen(dim, false);
  std::vector<std::size_t> local(dim, 0);
  std::size_t ground = 0;
  double gap = std::numeric_limits<double>::infinity(), emin = std::numeric_limits<double>::infinity();
  const double flip_diag = 0.5 * static_cast<double>(flip_terms.size());
  std::vector<gf2::Word> members(block);
  for (std::size_t rep = 0; rep < dim; ++rep) {
    if (seen[rep]) continue;
    ++r.sectors;
    for (std::size_t i = 0; i < block; ++i) {
      members[i] = rep ^ span[i];
      seen[members[i]] = true;
      local[members[i]] = i;
    }
    std::vector<double> eig;
    if (flip_terms.empty()) {
      for (auto y : members) eig.push_back(static_cast<double>(detail::violated(diag_terms, y)));
    } else {
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(block, block);
      for (std::size_t i = 0; i < block; ++i) {
        m(i, i) = static_cast<double>(detail::violated(diag_terms, members[i])) + flip_diag;
        for (auto w : flip_terms) m(i, local[members[i] ^ w]) -= 0.5;
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
      if (es.info() != Eigen::Success) throw Error(Errc::ConvergenceFailure, "sector eigensolver");
      eig.assign(es.eigenvalues().data(), es.eigenvalues().data() + block);
    }
    for (double v : eig) {
      emin = std::min(emin, v);
      if (std::abs(v) < opts.tolerance)
        ++ground;
      else if (v > 0)
        gap = std::min(gap, v);
    }
  }
  r.diagonalized = ground;
  r.ground_energy = emin;
  r.spectral_gap = gap;
  r.verified = ground == r.predicted && std::abs(emin) < opts.tolerance;
  return r;
}

/// Uniform superposition over the coset y0 + rowspace(H_x), y0 in C_z. It is
/// a zero-energy eigenstate of the code Hamiltonian.
inline StateVector code_state(const CssCode& code, const BitVector& y0) {
  if (gf2::product(code.hz(), y0).any()) throw Error(Errc::PreconditionFailed, "coset representative not in C_z");
  const gf2::words::WordBasis stab(gf2::words::to_words(code.hx().row_vectors()));
  const auto span = gf2::words::span(stab.rows);
  auto s = StateVector::zero(code.n());
  s.amplitudes()[0] = 0;
  const double a = 1.0 / std::sqrt(static_cast<double>(span.size()));
  const gf2::Word base = y0.to_word();
  for (auto w : span) s.amplitudes()[base ^ w] = a;
  return s;
}

}  // namespace nlts
