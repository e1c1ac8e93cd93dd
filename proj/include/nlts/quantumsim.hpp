#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nlts/common.hpp"
#include "nlts/css.hpp"
#include "nlts/error.hpp"
#include "nlts/gf2.hpp"

namespace nlts {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Gates and circuits. Qubit q is bit q of a basis-state index. A two-qubit
// gate on (q0, q1) uses local index 2*bit(q0) + bit(q1), so CNOT's control
// is q0.

enum class GateKind { H, X, Z, T, CNOT, CZ, U };

inline std::string gate_name(GateKind k) {
  switch (k) {
    case GateKind::H: return "H";
    case GateKind::X: return "X";
    case GateKind::Z: return "Z";
    case GateKind::T: return "T";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CZ: return "CZ";
    case GateKind::U: return "U";
  }
  return "?";
}

struct Gate {
  GateKind kind = GateKind::H;
  std::vector<std::size_t> qubits;
  std::vector<Complex> matrix;  // row-major, only for kind U

  static Gate h(std::size_t q) { return {GateKind::H, {q}, {}}; }
  static Gate x(std::size_t q) { return {GateKind::X, {q}, {}}; }
  static Gate z(std::size_t q) { return {GateKind::Z, {q}, {}}; }
  static Gate t(std::size_t q) { return {GateKind::T, {q}, {}}; }
  static Gate cnot(std::size_t control, std::size_t target) { return {GateKind::CNOT, {control, target}, {}}; }
  static Gate cz(std::size_t a, std::size_t b) { return {GateKind::CZ, {a, b}, {}}; }
  static Gate unitary(std::vector<std::size_t> qubits, std::vector<Complex> m) {
    return {GateKind::U, std::move(qubits), std::move(m)};
  }

  std::size_t arity() const noexcept { return qubits.size(); }

  /// Row-major 2x2 or 4x4 matrix.
  std::vector<Complex> unitary_matrix() const {
    const double r = 1.0 / std::sqrt(2.0);
    switch (kind) {
      case GateKind::H: return {r, r, r, -r};
      case GateKind::X: return {0, 1, 1, 0};
      case GateKind::Z: return {1, 0, 0, -1};
      case GateKind::T: return {1, 0, 0, std::polar(1.0, M_PI / 4)};
      case GateKind::CNOT: return {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0};
      case GateKind::CZ: return {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1};
      case GateKind::U: return matrix;
    }
    return {};
  }
};

inline std::size_t expected_arity(GateKind k) { return k == GateKind::CNOT || k == GateKind::CZ ? 2 : 1; }

/// Gates grouped into layers; gates in one layer act on disjoint qubits.
class LayeredCircuit {
 public:
  explicit LayeredCircuit(std::size_t n = 0) : n_(n) {}

  std::size_t qubits() const noexcept { return n_; }
  std::size_t depth() const noexcept { return layers_.size(); }
  const std::vector<std::vector<Gate>>& layers() const noexcept { return layers_; }

  void add_layer(std::vector<Gate> layer) {
    std::vector<bool> used(n_, false);
    for (const auto& g : layer) {
      validate_gate(g);
      for (auto q : g.qubits) {
        if (used[q]) throw Error(Errc::InvalidCircuit, "qubit " + std::to_string(q) + " used twice in one layer");
        used[q] = true;
      }
    }
    layers_.push_back(std::move(layer));
  }

 private:
  void validate_gate(const Gate& g) const {
    const std::size_t ar = g.kind == GateKind::U ? g.qubits.size() : expected_arity(g.kind);
    if (g.qubits.size() != ar || ar < 1 || ar > 2)
      throw Error(Errc::InvalidCircuit, gate_name(g.kind) + " gate with " + std::to_string(g.qubits.size()) + " qubits");
    for (auto q : g.qubits)
      if (q >= n_) throw Error(Errc::InvalidCircuit, "qubit " + std::to_string(q) + " out of range");
    if (ar == 2 && g.qubits[0] == g.qubits[1]) throw Error(Errc::InvalidCircuit, "two-qubit gate on one qubit");
    if (g.kind == GateKind::U) {
      const std::size_t dim = std::size_t{1} << ar;
      if (g.matrix.size() != dim * dim) throw Error(Errc::InvalidCircuit, "custom gate matrix has wrong size");
      Eigen::MatrixXcd m(dim, dim);
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) m(i, j) = g.matrix[i * dim + j];
      const double err = (m.adjoint() * m - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff();
      if (err > 1e-9) throw Error(Errc::InvalidCircuit, "custom gate is not unitary");
    }
  }

  std::size_t n_;
  std::vector<std::vector<Gate>> layers_;
};

// ---------------------------------------------------------------------------
// State vectors

inline constexpr std::size_t kMaxStatevectorQubits = 26;

class StateVector {
 public:
  static StateVector zero(std::size_t n, std::size_t max_n = kMaxStatevectorQubits) {
    if (n > max_n) throw Error(Errc::CapExceeded, "statevector on " + std::to_string(n) + " qubits exceeds cap");
    StateVector s;
    s.n_ = n;
    s.amp_.assign(std::size_t{1} << n, Complex{0, 0});
    s.amp_[0] = 1;
    return s;
  }

  static StateVector basis_state(std::size_t n, gf2::Word index) {
    auto s = zero(n);
    s.amp_[0] = 0;
    s.amp_.at(index) = 1;
    return s;
  }

  static StateVector from_amplitudes(std::vector<Complex> amp) {
    if (amp.empty() || (amp.size() & (amp.size() - 1)) != 0)
      throw Error(Errc::DimensionMismatch, "amplitude count is not a power of two");
    StateVector s;
    s.n_ = static_cast<std::size_t>(std::countr_zero(amp.size()));
    s.amp_ = std::move(amp);
    return s;
  }

  std::size_t qubits() const noexcept { return n_; }
  std::size_t dimension() const noexcept { return amp_.size(); }
  const std::vector<Complex>& amplitudes() const noexcept { return amp_; }
  std::vector<Complex>& amplitudes() noexcept { return amp_; }
  Complex operator[](std::size_t i) const { return amp_[i]; }

  double norm() const {
    double s = 0;
    for (const auto& a : amp_) s += std::norm(a);
    return std::sqrt(s);
  }

  void require_normalized(double tol = 1e-12) const {
    if (std::abs(norm() - 1.0) > tol) throw Error(Errc::NotNormalized, "state norm is " + std::to_string(norm()));
  }

  void normalize() {
    const double nr = norm();
    for (auto& a : amp_) a /= nr;
  }

  void apply(const Gate& g) {
    const auto m = g.unitary_matrix();
    if (g.arity() == 1) {
      const std::size_t bit = std::size_t{1} << g.qubits[0];
      for (std::size_t i = 0; i < amp_.size(); ++i) {
        if (i & bit) continue;
        const Complex a0 = amp_[i], a1 = amp_[i | bit];
        amp_[i] = m[0] * a0 + m[1] * a1;
        amp_[i | bit] = m[2] * a0 + m[3] * a1;
      }
      return;
    }
    const std::size_t b0 = std::size_t{1} << g.qubits[0], b1 = std::size_t{1} << g.qubits[1];
    for (std::size_t i = 0; i < amp_.size(); ++i) {
      if (i & (b0 | b1)) continue;
      const std::size_t idx[4] = {i, i | b1, i | b0, i | b0 | b1};
      Complex in[4], out[4];
      for (int k = 0; k < 4; ++k) in[k] = amp_[idx[k]];
      for (int r = 0; r < 4; ++r) {
        out[r] = 0;
        for (int c = 0; c < 4; ++c) out[r] += m[r * 4 + c] * in[c];
      }
      for (int k = 0; k < 4; ++k) amp_[idx[k]] = out[k];
    }
  }

  void apply(const LayeredCircuit& c) {
    if (c.qubits() != n_) throw Error(Errc::DimensionMismatch, "circuit and state sizes differ");
    for (const auto& layer : c.layers())
      for (const auto& g : layer) apply(g);
  }

  /// X^w |psi>, by permuting basis indices.
  StateVector apply_x_string(gf2::Word w) const {
    StateVector out = *this;
    for (std::size_t i = 0; i < amp_.size(); ++i) out.amp_[i ^ w] = amp_[i];
    return out;
  }

  /// Hadamard on every qubit.
  void hadamard_all() {
    const double r = 1.0 / std::sqrt(2.0);
    for (std::size_t h = 1; h < amp_.size(); h <<= 1) {
      for (std::size_t i = 0; i < amp_.size(); i += h << 1) {
        for (std::size_t j = i; j < i + h; ++j) {
          const Complex a = amp_[j], b = amp_[j + h];
          amp_[j] = (a + b) * r;
          amp_[j + h] = (a - b) * r;
        }
      }
    }
  }

  Complex inner(const StateVector& other) const {
    Complex s = 0;
    for (std::size_t i = 0; i < amp_.size(); ++i) s += std::conj(amp_[i]) * other.amp_[i];
    return s;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Complex> amp_;
};

inline StateVector simulate(const LayeredCircuit& c, std::size_t max_n = kMaxStatevectorQubits) {
  auto s = StateVector::zero(c.qubits(), max_n);
  s.apply(c);
  return s;
}

// ---------------------------------------------------------------------------
// Measurement distributions

struct MeasurementDistribution {
  Basis basis = Basis::Z;
  std::size_t n = 0;
  std::vector<double> p;  // indexed by outcome word

  double total() const { return std::accumulate(p.begin(), p.end(), 0.0); }

  double mass(const std::vector<gf2::Word>& set) const {
    double s = 0;
    for (auto w : set) s += p.at(w);
    return s;
  }

  template <typename Pred>
  double mass_if(Pred&& pred) const {
    double s = 0;
    for (std::size_t w = 0; w < p.size(); ++w)
      if (pred(static_cast<gf2::Word>(w))) s += p[w];
    return s;
  }

  template <typename F>
  double expectation(F&& f) const {
    double s = 0;
    for (std::size_t w = 0; w < p.size(); ++w)
      if (p[w] != 0) s += p[w] * f(static_cast<gf2::Word>(w));
    return s;
  }
};

/// (D_z, D_x): squared magnitudes before and after a global Hadamard.
inline std::pair<MeasurementDistribution, MeasurementDistribution> measurement_distributions(const StateVector& psi) {
  psi.require_normalized(1e-9);
  MeasurementDistribution dz{Basis::Z, psi.qubits(), {}}, dx{Basis::X, psi.qubits(), {}};
  dz.p.resize(psi.dimension());
  for (std::size_t i = 0; i < psi.dimension(); ++i) dz.p[i] = std::norm(psi[i]);
  StateVector h = psi;
  h.hadamard_all();
  dx.p.resize(psi.dimension());
  for (std::size_t i = 0; i < psi.dimension(); ++i) dx.p[i] = std::norm(h[i]);
  return {std::move(dz), std::move(dx)};
}

inline double collision_probability(const MeasurementDistribution& d) {
  double s = 0;
  for (auto v : d.p) s += v * v;
  return s;
}

// ---------------------------------------------------------------------------
// Measurement uncertainty

struct Fact1Report {
  double dz_s = 0;  // D_z(S)
  double dx_t = 0;  // D_x(T)
  double rhs = 0;   // 2 sqrt(1 - D_z(S)) + sqrt(|S||T| / 2^n)
  double slack = 0;
  bool holds = true;
};

inline Fact1Report fact1_check(const MeasurementDistribution& dz, const MeasurementDistribution& dx,
                               const std::vector<gf2::Word>& s, const std::vector<gf2::Word>& t, double tol = 1e-12) {
  Fact1Report r;
  r.dz_s = dz.mass(s);
  r.dx_t = dx.mass(t);
  const double dim = std::ldexp(1.0, static_cast<int>(dz.n));
  r.rhs = 2.0 * std::sqrt(std::max(0.0, 1.0 - r.dz_s)) +
          std::sqrt(static_cast<double>(s.size()) * static_cast<double>(t.size()) / dim);
  r.slack = r.rhs - r.dx_t;
  r.holds = r.slack >= -tol;
  return r;
}

inline Fact1Report fact1_check(const StateVector& psi, const std::vector<gf2::Word>& s,
                               const std::vector<gf2::Word>& t) {
  const auto [dz, dx] = measurement_distributions(psi);
  return fact1_check(dz, dx, s, t);
}

// ---------------------------------------------------------------------------
// Random circuits, lightcones and the dense oracle

template <typename Rng>
Eigen::MatrixXcd haar_unitary(std::size_t dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXcd z(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) z(i, j) = Complex(normal(rng), normal(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (std::size_t j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  return q;
}

template <typename Rng>
Gate random_gate(std::vector<std::size_t> qubits, Rng& rng) {
  const std::size_t dim = std::size_t{1} << qubits.size();
  const auto u = haar_unitary(dim, rng);
  std::vector<Complex> m(dim * dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) m[i * dim + j] = u(i, j);
  return Gate::unitary(std::move(qubits), std::move(m));
}

/// Each layer pairs the qubits in a random order and places a Haar-random
/// two-qubit gate on every pair (a one-qubit gate on a leftover qubit).
template <typename Rng>
LayeredCircuit random_circuit(std::size_t n, std::size_t depth, Rng& rng) {
  LayeredCircuit c(n);
  std::vector<std::size_t> perm(n);
  for (std::size_t l = 0; l < depth; ++l) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Gate> layer;
    for (std::size_t i = 0; i + 1 < n; i += 2) layer.push_back(random_gate({perm[i], perm[i + 1]}, rng));
    if (n % 2 == 1) layer.push_back(random_gate({perm[n - 1]}, rng));
    c.add_layer(std::move(layer));
  }
  return c;
}

/// Input qubits that can influence output qubit q.
inline std::vector<std::size_t> lightcone(const LayeredCircuit& c, std::size_t q) {
  std::vector<bool> in(c.qubits(), false);
  in.at(q) = true;
  for (auto l = c.layers().rbegin(); l != c.layers().rend(); ++l) {
    for (const auto& g : *l) {
      bool touches = false;
      for (auto x : g.qubits) touches = touches || in[x];
      if (touches)
        for (auto x : g.qubits) in[x] = true;
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < in.size(); ++i)
    if (in[i]) out.push_back(i);
  return out;
}

inline constexpr std::size_t kMaxDenseQubits = 12;

/// Full 2^n x 2^n matrix of one gate, built entry by entry.
inline Eigen::MatrixXcd dense_gate(const Gate& g, std::size_t n) {
  const std::size_t dim = std::size_t{1} << n;
  const auto m = g.unitary_matrix();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  auto local = [&](std::size_t idx) {
    std::size_t l = 0;
    for (auto q : g.qubits) l = (l << 1) | ((idx >> q) & 1U);
    return l;
  };
  std::size_t mask = 0;
  for (auto q : g.qubits) mask |= std::size_t{1} << q;
  const std::size_t ld = std::size_t{1} << g.arity();
  for (std::size_t row = 0; row < dim; ++row)
    for (std::size_t col = 0; col < dim; ++col)
      if ((row & ~mask) == (col & ~mask)) out(row, col) = m[local(row) * ld + local(col)];
  return out;
}

inline Eigen::MatrixXcd dense_unitary(const LayeredCircuit& c, std::size_t max_n = 10) {
  if (c.qubits() > max_n) throw Error(Errc::CapExceeded, "dense unitary needs n <= " + std::to_string(max_n));
  const std::size_t dim = std::size_t{1} << c.qubits();
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& layer : c.layers())
    for (const auto& g : layer) u = dense_gate(g, c.qubits()) * u;
  return u;
}

// ---------------------------------------------------------------------------
// Chebyshev AGSP polynomial

/// P(x) = T_f(mu(x)) / T_f(mu(0)) with the affine map mu(x) = (1 + 1/m - 2x)
/// / (1 - 1/m), which sends [1/m, 1] onto [-1, 1]. For m = 1 the interval is
/// a point and P(x) = (1 - x)^f is used instead. In the Chebyshev basis of
/// mu the coefficient vector is zero except for entry f, 1 / T_f(mu(0)).
class AgspPolynomial {
 public:
  AgspPolynomial(std::size_t m, std::size_t f) : m_(m), f_(f) {
    if (m < 1 || f < 1) throw Error(Errc::PreconditionFailed, "chebyshev_agsp needs m >= 1 and f >= 1");
    if (m > 1) normalizer_ = chebyshev(f_, map(0));
  }

  std::size_t m() const noexcept { return m_; }
  std::size_t degree() const noexcept { return f_; }

  std::vector<long double> chebyshev_coefficients() const {
    std::vector<long double> c(f_ + 1, 0.0L);
    c[f_] = m_ > 1 ? 1.0L / normalizer_ : 0.0L;
    return c;
  }

  /// Affine coefficients (scale, shift) of mu(x) = scale * x + shift.
  std::pair<long double, long double> affine_map() const {
    if (m_ == 1) return {0.0L, 0.0L};
    const long double inv = 1.0L / static_cast<long double>(m_);
    return {-2.0L / (1.0L - inv), (1.0L + inv) / (1.0L - inv)};
  }

  long double operator()(long double x) const {
    if (m_ == 1) return std::pow(1.0L - x, static_cast<long double>(f_));
    return chebyshev(f_, map(x)) / normalizer_;
  }

  long double envelope() const {
    return std::exp(-static_cast<long double>(f_ * f_) / (100.0L * static_cast<long double>(m_)));
  }

  static long double chebyshev(std::size_t f, long double t) {
    long double prev = 1.0L, cur = t;
    if (f == 0) return prev;
    for (std::size_t k = 1; k < f; ++k) {
      const long double next = 2.0L * t * cur - prev;
      prev = cur;
      cur = next;
    }
    return cur;
  }

 private:
  long double map(long double x) const {
    const long double inv = 1.0L / static_cast<long double>(m_);
    return (1.0L + inv - 2.0L * x) / (1.0L - inv);
  }

  std::size_t m_;
  std::size_t f_;
  long double normalizer_ = 1.0L;
};

struct EnvelopeReport {
  bool normalized = false;  // P(0) == 1 exactly
  bool holds = true;
  std::size_t worst_point = 0;  // i maximizing |P(i/m)| / envelope
  long double worst_ratio = 0;
};

inline EnvelopeReport verify_envelope(const AgspPolynomial& p) {
  EnvelopeReport r;
  r.normalized = p(0.0L) == 1.0L;
  const long double env = p.envelope();
  for (std::size_t i = 1; i <= p.m(); ++i) {
    const long double ratio =
        std::abs(p(static_cast<long double>(i) / static_cast<long double>(p.m()))) / env;
    if (ratio > r.worst_ratio) {
      r.worst_ratio = ratio;
      r.worst_point = i;
    }
  }
  r.holds = r.normalized && r.worst_ratio <= 1.0L;
  return r;
}

/// Builds the polynomial and verifies it; EnvelopeFailure names the worst point.
inline AgspPolynomial chebyshev_agsp(std::size_t m, std::size_t f) {
  if (m > 64) throw Error(Errc::PreconditionFailed, "chebyshev_agsp supports m <= 64");
  AgspPolynomial p(m, f);
  const auto r = verify_envelope(p);
  if (!r.holds)
    throw Error(Errc::EnvelopeFailure, "m=" + std::to_string(m) + " f=" + std::to_string(f) + " worst point i=" +
                                           std::to_string(r.worst_point));
  return p;
}

struct AgspProjectorReport {
  std::size_t n = 0;
  std::size_t depth = 0;
  std::size_t degree = 0;
  bool spectrum_ok = false;       // spec(G) in {0, 1/n, ..., 1} to 1e-9
  bool unique_ground = false;     // eigenvalue 0 has multiplicity one
  double error_norm = 0;          // || |rho><rho| - P(G) ||
  double bound = 0;               // exp(-f^2 / (100 2^t n))
  bool holds = false;
};

/// G = (1/n) sum_i U |1><1|_i U^dagger for an ancilla-free circuit U. P(G) is
/// formed with the matrix Chebyshev recurrence on mu(G).
inline AgspProjectorReport agsp_projector_check(const LayeredCircuit& c, std::size_t f, std::size_t max_n = 10) {
  const std::size_t n = c.qubits();
  if (n == 0 || n > max_n) throw Error(Errc::CapExceeded, "agsp projector check needs 1 <= n <= " + std::to_string(max_n));
  const std::size_t dim = std::size_t{1} << n;
  const Eigen::MatrixXcd u = dense_unitary(c, max_n);
  Eigen::VectorXd weights(dim);
  for (std::size_t y = 0; y < dim; ++y)
    weights(y) = static_cast<double>(std::popcount(y)) / static_cast<double>(n);
  const Eigen::MatrixXcd g = u * weights.asDiagonal() * u.adjoint();

  AgspProjectorReport r;
  r.n = n;
  r.depth = c.depth();
  r.degree = f;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(Errc::ConvergenceFailure, "eigensolver on G");
  r.spectrum_ok = true;
  std::size_t zeros = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double v = es.eigenvalues()(i) * static_cast<double>(n);
    if (std::abs(v - std::round(v)) > 1e-9 * static_cast<double>(n)) r.spectrum_ok = false;
    if (std::abs(es.eigenvalues()(i)) < 1e-9) ++zeros;
  }
  r.unique_ground = zeros == 1;

  const AgspPolynomial p(n, f);
  Eigen::MatrixXcd pg;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
  if (n == 1) {
    pg = id;
    for (std::size_t k = 0; k < f; ++k) pg = pg * (id - g);
  } else {
    const auto [scale, shift] = p.affine_map();
    const Eigen::MatrixXcd mu = static_cast<double>(scale) * g + static_cast<double>(shift) * id;
    const double norm = static_cast<double>(AgspPolynomial::chebyshev(f, shift));
    // Scaled recurrence: S_k = T_k(mu) / norm keeps entries bounded.
    Eigen::MatrixXcd prev = id / norm, cur = mu / norm;
    for (std::size_t k = 1; k < f; ++k) {
      Eigen::MatrixXcd next = 2.0 * mu * cur - prev;
      prev = std::move(cur);
      cur = std::move(next);
    }
    pg = cur;
  }
  const Eigen::VectorXcd rho = u.col(0);
  const Eigen::MatrixXcd diff = rho * rho.adjoint() - pg;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ed((diff + diff.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  r.error_norm = ed.eigenvalues().cwiseAbs().maxCoeff();
  r.bound = std::exp(-static_cast<double>(f * f) /
                     (100.0 * std::ldexp(1.0, static_cast<int>(c.depth())) * static_cast<double>(n)));
  r.holds = r.spectrum_ok && r.unique_ground && r.error_norm <= r.bound + 1e-9;
  return r;
}

// ---------------------------------------------------------------------------
// Circuit depth lower bound from well-spread distributions

/// (1/3) log2(u^2 / (400 n log2(1/mu))). Non-positive values are vacuous.
inline double depth_lower_bound(double u, double n, double mu) {
  if (!(mu > 0 && mu < 1)) throw Error(Errc::PreconditionFailed, "mu must lie in (0, 1)");
  return std::log2(u * u / (400.0 * n * std::log2(1.0 / mu))) / 3.0;
}

/// min |s xor t| over s in S1, t in S2.
inline std::size_t set_distance(const std::vector<gf2::Word>& s1, const std::vector<gf2::Word>& s2) {
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (auto a : s1)
    for (auto b : s2) best = std::min(best, gf2::words::weight(a ^ b));
  return best;
}

struct Fact2Report {
  std::size_t depth = 0;
  std::size_t n = 0;
  std::size_t u = 0;          // dist(S1, S2)
  double p1 = 0, p2 = 0;      // D_z(S1), D_z(S2)
  double overlap = 0;         // || Pi_1 |rho><rho| Pi_2 || = sqrt(p1 p2)
  double overlap_bound = 0;   // exp(-u^2 / (400 2^{3t} n))
  bool overlap_holds = true;
  double mu = 0;              // min(p1, p2)
  double depth_bound = 0;     // depth_lower_bound(u, n, mu); -inf when vacuous
  bool depth_holds = true;    // t >= depth_bound
  bool rearrangement_holds = true;  // 2^{3t} >= u^2 / (400 n ln(1/mu)) whenever the overlap bound holds
  bool holds = true;
};

inline Fact2Report fact2_check(const LayeredCircuit& c, const std::vector<gf2::Word>& s1,
                               const std::vector<gf2::Word>& s2) {
  const auto psi = simulate(c);
  const auto [dz, dx] = measurement_distributions(psi);
  (void)dx;
  Fact2Report r;
  r.depth = c.depth();
  r.n = c.qubits();
  r.u = s1.empty() || s2.empty() ? 0 : set_distance(s1, s2);
  r.p1 = dz.mass(s1);
  r.p2 = dz.mass(s2);
  // Pi_1 |rho><rho| Pi_2 is the rank-one operator |Pi_1 rho><Pi_2 rho|.
  StateVector a = psi, b = psi;
  std::vector<bool> in1(psi.dimension(), false), in2(psi.dimension(), false);
  for (auto w : s1) in1[w] = true;
  for (auto w : s2) in2[w] = true;
  double na = 0, nb = 0;
  for (std::size_t i = 0; i < psi.dimension(); ++i) {
    if (!in1[i]) a.amplitudes()[i] = 0;
    if (!in2[i]) b.amplitudes()[i] = 0;
    na += std::norm(a[i]);
    nb += std::norm(b[i]);
  }
  r.overlap = std::sqrt(na * nb);
  const double u2 = static_cast<double>(r.u) * static_cast<double>(r.u);
  const double n = static_cast<double>(r.n);
  const double cube = std::ldexp(1.0, static_cast<int>(3 * r.depth));
  r.overlap_bound = std::exp(-u2 / (400.0 * cube * n));
  r.overlap_holds = r.overlap <= r.overlap_bound + 1e-12;
  r.mu = std::min(r.p1, r.p2);
  if (r.mu > 0 && r.mu < 1 && r.u > 0) {
    r.depth_bound = depth_lower_bound(static_cast<double>(r.u), n, r.mu);
    r.depth_holds = static_cast<double>(r.depth) >= r.depth_bound;
    if (r.overlap_holds) r.rearrangement_holds = cube >= u2 / (400.0 * n * std::log(1.0 / r.mu)) * (1 - 1e-12);
  } else {
    r.depth_bound = -std::numeric_limits<double>::infinity();
  }
  r.holds = r.overlap_holds && r.depth_holds && r.rearrangement_holds;
  return r;
}

}  // namespace nlts
