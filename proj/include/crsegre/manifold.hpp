#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "expr.hpp"
#include "rank.hpp"
#include "series.hpp"

namespace crsegre {

enum class ManifoldErrorKind { invalid, reality, ift };

class ManifoldError : public std::runtime_error {
 public:
  ManifoldError(ManifoldErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ManifoldErrorKind kind() const { return kind_; }

 private:
  ManifoldErrorKind kind_;
};

// Names of the slots (zbar, z, w) used by complex defining equations.
inline std::vector<std::string> theta_variable_names(std::size_t m, std::size_t d) {
  std::vector<std::string> names;
  auto family = [&](const std::string& base, std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) names.push_back(count == 1 ? base : base + "_" + std::to_string(k + 1));
  };
  family("zbar", m);
  family("z", m);
  family("w", d);
  return names;
}
inline std::vector<std::string> holomorphic_variable_names(std::size_t m, std::size_t d) {
  auto all = theta_variable_names(m, d);
  return {all.begin() + static_cast<long>(m), all.end()};
}

// A generic submanifold through the origin, given by wbar_j = Theta_j(zeta, z, w)
// with Theta in the slots (zeta_1..zeta_m, z_1..z_m, w_1..w_d).
class GenericManifold {
 public:
  GenericManifold(std::size_t m, std::size_t d, SeriesVector theta)
      : m_(m), d_(d), theta_(std::move(theta)) {
    if (m_ < 1 || d_ < 1) throw ManifoldError(ManifoldErrorKind::invalid, "m and d must be at least 1");
    if (theta_.size() != d_) throw ManifoldError(ManifoldErrorKind::invalid, "need exactly d defining series");
    order_ = min_order(theta_, kMaxOrder);
    for (auto& t : theta_) {
      if (t.arity() != arity()) throw ManifoldError(ManifoldErrorKind::invalid, "defining series has wrong arity");
      if (!t.constant_term().is_zero())
        throw ManifoldError(ManifoldErrorKind::invalid, "defining series must vanish at the origin");
      if (t.order() != order_) t = t.truncated(order_);
    }
    if (order_ < 1) throw ManifoldError(ManifoldErrorKind::invalid, "truncation order must be at least 1");
    Matrix a(d_, std::vector<GaussianRational>(d_));
    for (std::size_t j = 0; j < d_; ++j)
      for (std::size_t l = 0; l < d_; ++l) a[j][l] = theta_[j].coeff(MultiIndex::unit(2 * m_ + l));
    if (exact_rank(a) != static_cast<int>(d_))
      throw ManifoldError(ManifoldErrorKind::invalid, "d Theta / d w is singular at the origin");
  }

  std::size_t m() const { return m_; }
  std::size_t d() const { return d_; }
  std::size_t n() const { return m_ + d_; }
  std::size_t arity() const { return 2 * m_ + d_; }
  int order() const { return order_; }
  const SeriesVector& theta() const { return theta_; }
  const Series& theta(std::size_t j) const { return theta_.at(j); }
  // Coefficientwise conjugate; read in the slots (z, zeta, xi).
  SeriesVector theta_bar() const { return conjugate_coeffs(theta_); }

  Series var(std::size_t slot) const { return Series::variable(arity(), order_, slot); }
  Series zeta(std::size_t k) const { return var(k); }
  Series z(std::size_t k) const { return var(m_ + k); }
  Series w(std::size_t j) const { return var(2 * m_ + j); }

  std::vector<std::string> names() const { return theta_variable_names(m_, d_); }

  // Certificates that Theta (resp. Theta(zeta, z, 0)) is exactly the stored
  // polynomial, of at most the given degree. Without them only the
  // truncation is known, and degeneracy can never be proven.
  std::optional<int> exact_degree() const { return exact_degree_; }
  std::optional<int> exact_degree_at_w0() const { return exact_degree_w0_; }

  void certify_exact(std::optional<int> full, std::optional<int> at_w0) {
    if (full) at_w0 = at_w0 ? std::min(*at_w0, *full) : *full;
    for (const auto& bound : {full, at_w0})
      if (bound && (*bound > order_ || *bound < 0))
        throw ManifoldError(ManifoldErrorKind::invalid, "exactness degree outside the truncation order");
    for (const auto& th : theta_)
      for (const auto& [a, c] : th.terms()) {
        if (full && a.degree() > *full) throw ManifoldError(ManifoldErrorKind::invalid, "Theta exceeds its exact degree");
        if (at_w0 && a.slice(2 * m_, d_).degree() == 0 && a.degree() > *at_w0)
          throw ManifoldError(ManifoldErrorKind::invalid, "Theta at w = 0 exceeds its exact degree");
      }
    exact_degree_ = full;
    exact_degree_w0_ = at_w0;
  }
  void forget_exactness() { exact_degree_ = exact_degree_w0_ = std::nullopt; }

 private:
  std::size_t m_, d_;
  int order_ = 0;
  SeriesVector theta_;
  std::optional<int> exact_degree_, exact_degree_w0_;
};

// Outcome of the two reality functional equations.
struct RealityVerdict {
  bool pass = true;
  int identity = 0;  // 1 or 2 when failing
  std::size_t equation = 0;
  MultiIndex witness;
  GaussianRational coefficient;
  int order = 0;

  std::string describe(std::size_t m, std::size_t d) const {
    if (pass) return "reality identities hold up to order " + std::to_string(order);
    Series mono = Series::monomial(2 * m + d, order, witness, coefficient);
    auto names = theta_variable_names(m, d);
    if (identity == 2)
      for (std::size_t j = 0; j < d; ++j) names[2 * m + j] = d == 1 ? "wbar" : "wbar_" + std::to_string(j + 1);
    return "reality identity " + std::to_string(identity) + " fails in equation " + std::to_string(equation + 1) +
           ": residual term " + to_string(mono, names);
  }
};

// Residuals w - Thetabar(z, zeta, Theta(zeta, z, w)) and
// xi - Theta(zeta, z, Thetabar(z, zeta, xi)), both in the slots of Theta.
inline std::pair<SeriesVector, SeriesVector> reality_residuals(const GenericManifold& M) {
  const std::size_t m = M.m(), d = M.d();
  const SeriesVector bar = M.theta_bar();
  SeriesVector swapped;  // (z, zeta, w) so that Thetabar reads (z, zeta, xi = w)
  for (std::size_t k = 0; k < m; ++k) swapped.push_back(M.z(k));
  for (std::size_t k = 0; k < m; ++k) swapped.push_back(M.zeta(k));
  SeriesVector args1 = swapped, args2;
  for (std::size_t j = 0; j < d; ++j) swapped.push_back(M.w(j));
  SeriesVector inner;
  for (std::size_t j = 0; j < d; ++j) inner.push_back(compose(bar[j], swapped));
  for (std::size_t j = 0; j < d; ++j) args1.push_back(M.theta(j));
  for (std::size_t k = 0; k < m; ++k) args2.push_back(M.zeta(k));
  for (std::size_t k = 0; k < m; ++k) args2.push_back(M.z(k));
  for (const auto& s : inner) args2.push_back(s);
  SeriesVector r1, r2;
  for (std::size_t j = 0; j < d; ++j) {
    r1.push_back(M.w(j) - compose(bar[j], args1));
    r2.push_back(M.w(j) - compose(M.theta(j), args2));
  }
  return {r1, r2};
}

// Reports the grlex-first nonzero residual coefficient, if any.
inline RealityVerdict check_reality(const GenericManifold& M) {
  RealityVerdict v;
  v.order = M.order();
  auto [r1, r2] = reality_residuals(M);
  const SeriesVector* sets[2] = {&r1, &r2};
  for (int s = 0; s < 2; ++s)
    for (std::size_t j = 0; j < M.d(); ++j) {
      const auto& terms = (*sets[s])[j].terms();
      if (terms.empty()) continue;
      v.pass = false;
      v.identity = s + 1;
      v.equation = j;
      v.witness = terms.begin()->first;
      v.coefficient = terms.begin()->second;
      return v;
    }
  return v;
}

inline GenericManifold require_real(GenericManifold M) {
  auto v = check_reality(M);
  if (!v.pass) throw ManifoldError(ManifoldErrorKind::reality, v.describe(M.m(), M.d()));
  return M;
}

inline GenericManifold from_complex_equations(const ManifoldSpec& spec) {
  if (spec.style != EquationStyle::complex_defining)
    throw ManifoldError(ManifoldErrorKind::invalid, "expected complex_defining equations");
  const auto scope = spec.scope();
  SeriesVector theta;
  for (const auto& e : spec.equations) theta.push_back(expand_to_series(*e, scope, spec.order));
  GenericManifold M = require_real(GenericManifold(spec.m, spec.d, theta));
  // polynomial equations of degree <= N are captured in full
  const auto names = theta_variable_names(spec.m, spec.d);
  const std::set<std::string> ws(names.end() - spec.d, names.end());
  auto bound = [&](const std::set<std::string>& zero) -> std::optional<int> {
    int D = 0;
    for (const auto& e : spec.equations) {
      auto deg = polynomial_degree(*e, zero);
      if (!deg || *deg > M.order()) return std::nullopt;
      D = std::max(D, *deg);
    }
    return D;
  };
  M.certify_exact(bound({}), bound(ws));
  return M;
}

// Solves (w - xi)/(2i) = phi((z+zeta)/2, (z-zeta)/(2i), (w+xi)/2) for xi.
inline GenericManifold from_real_equations(const ManifoldSpec& spec) {
  if (spec.style != EquationStyle::real_graph) throw ManifoldError(ManifoldErrorKind::invalid, "expected real_graph equations");
  const std::size_t m = spec.m, d = spec.d, A = 2 * m + d, B = A + d;
  const int N = spec.order;
  const auto scope = spec.scope();
  const GaussianRational half = GaussianRational::ratio(1, 2), I = GaussianRational::i();
  auto v = [&](std::size_t s) { return Series::variable(B, N, s); };
  SeriesVector args;
  for (std::size_t k = 0; k < m; ++k) args.push_back((v(m + k) + v(k)) * half);
  for (std::size_t k = 0; k < m; ++k) args.push_back((v(m + k) - v(k)) * (-I * half));
  for (std::size_t j = 0; j < d; ++j) args.push_back((v(2 * m + j) + v(A + j)) * half);
  SeriesVector H;
  for (std::size_t j = 0; j < d; ++j) {
    Series phi = expand_to_series(*spec.equations[j], scope, N);
    if (!phi.constant_term().is_zero())
      throw ManifoldError(ManifoldErrorKind::invalid, "real equation " + std::to_string(j + 1) + " does not vanish at the origin");
    H.push_back((v(2 * m + j) - v(A + j)) * (-I * half) - compose(phi, args));
  }
  SeriesVector theta;
  try {
    theta = solve_implicit(H, A, d);
  } catch (const SeriesError& e) {
    throw ManifoldError(ManifoldErrorKind::ift, std::string("cannot solve for wbar: ") + e.what());
  }
  return require_real(GenericManifold(m, d, theta));
}

inline GenericManifold from_spec(const ManifoldSpec& spec) {
  return spec.style == EquationStyle::real_graph ? from_real_equations(spec) : from_complex_equations(spec);
}

// Theta'(zeta', t') of the image h(M) for an invertible h(t) = (f, g), with
// h given as n series in t = (z, w).
inline GenericManifold transform_by(const GenericManifold& M, const SeriesVector& h) {
  const std::size_t m = M.m(), d = M.d(), n = M.n(), A = M.arity();
  if (h.size() != n) throw ManifoldError(ManifoldErrorKind::invalid, "coordinate change needs n components");
  for (const auto& c : h)
    if (c.arity() != n || !c.constant_term().is_zero())
      throw ManifoldError(ManifoldErrorKind::invalid, "coordinate change must be a germ at the origin in (z, w)");
  SeriesVector hinv;
  try {
    hinv = invert_map(h);
  } catch (const SeriesError&) {
    throw ManifoldError(ManifoldErrorKind::invalid, "coordinate change is not invertible");
  }
  bool f_is_z = true;
  for (std::size_t k = 0; k < m; ++k)
    if (!h[k].agrees_with(Series::variable(n, h[k].order(), k))) f_is_z = false;
  const int N = std::min(M.order(), min_order(h, kMaxOrder));
  SeriesVector Z;
  if (f_is_z) {
    for (std::size_t k = 0; k < m; ++k) Z.push_back(Series::variable(A, N, k));
  } else {
    // solve fbar(Z, Theta(Z, hinv(t'))) = zeta' for Z(zeta', t')
    const std::size_t B = A + m;
    SeriesVector args;
    for (std::size_t k = 0; k < m; ++k) args.push_back(Series::variable(B, N, A + k));
    for (const auto& c : hinv) args.push_back(embed(c, B, m).truncated(std::min(N, c.order())));
    SeriesVector fargs(args.begin(), args.begin() + static_cast<long>(m));
    for (std::size_t j = 0; j < d; ++j) fargs.push_back(compose(M.theta(j), args));
    SeriesVector P;
    for (std::size_t k = 0; k < m; ++k)
      P.push_back(compose(conjugate_coeffs(h[k]), fargs) - Series::variable(B, N, k));
    try {
      Z = solve_implicit(P, A, m);
    } catch (const SeriesError&) {
      throw ManifoldError(ManifoldErrorKind::invalid, "coordinate change does not preserve a graph over zbar");
    }
  }
  SeriesVector args = Z;
  for (const auto& c : hinv) args.push_back(embed(c, A, m).truncated(std::min(N, c.order())));
  SeriesVector gargs = Z;
  for (std::size_t j = 0; j < d; ++j) gargs.push_back(compose(M.theta(j), args));
  SeriesVector theta;
  for (std::size_t j = 0; j < d; ++j) theta.push_back(compose(conjugate_coeffs(h[m + j]), gargs));
  return GenericManifold(m, d, theta);
}

// Theta(0, z, w) - w and Theta(zeta, 0, w) - w; both vanish in normal coordinates.
inline std::pair<SeriesVector, SeriesVector> normal_residuals(const GenericManifold& M) {
  const std::size_t m = M.m(), d = M.d();
  SeriesVector a1, a2;
  for (std::size_t k = 0; k < m; ++k) a1.push_back(Series(M.arity(), M.order()));
  for (std::size_t k = 0; k < m; ++k) a1.push_back(M.z(k));
  for (std::size_t k = 0; k < m; ++k) a2.push_back(M.zeta(k));
  for (std::size_t k = 0; k < m; ++k) a2.push_back(Series(M.arity(), M.order()));
  for (std::size_t j = 0; j < d; ++j) {
    a1.push_back(M.w(j));
    a2.push_back(M.w(j));
  }
  SeriesVector r1, r2;
  for (std::size_t j = 0; j < d; ++j) {
    r1.push_back(compose(M.theta(j), a1) - M.w(j));
    r2.push_back(compose(M.theta(j), a2) - M.w(j));
  }
  return {r1, r2};
}

inline bool is_normal(const GenericManifold& M) {
  auto [r1, r2] = normal_residuals(M);
  for (std::size_t j = 0; j < M.d(); ++j)
    if (!r1[j].is_zero() || !r2[j].is_zero()) return false;
  return true;
}

// Every component is a linear form (no constant or higher terms).
inline bool is_linear_change(const SeriesVector& h) {
  for (const auto& c : h)
    for (const auto& [a, v] : c.terms())
      if (a.degree() != 1) return false;
  return true;
}

struct Normalization {
  GenericManifold manifold;
  SeriesVector change;  // h(z, w) = (z, g(z, w)) with t' = h(t)
  bool identity = false;
};

// Normal coordinates: first w' = conj(lambda) w + lambda Theta(0, 0, w) makes
// Theta(0, 0, w') = w', then w'' = Theta(0, z, w') finishes the job.
inline Normalization to_normal_coordinates(const GenericManifold& M) {
  const std::size_t m = M.m(), d = M.d(), n = M.n();
  const int N = M.order();
  auto tvar = [&](std::size_t i) { return Series::variable(n, N, i); };
  SeriesVector change = identity_vector<GaussianRational>(n, N);
  GenericManifold cur = M;
  bool identity = true;

  // theta0(w) = Theta(0, 0, w) as series in t = (z, w)
  auto restrict_zero = [&](const GenericManifold& X, bool keep_z) {
    SeriesVector args;
    for (std::size_t k = 0; k < m; ++k) args.push_back(Series(n, N));
    for (std::size_t k = 0; k < m; ++k) args.push_back(keep_z ? tvar(k) : Series(n, N));
    for (std::size_t j = 0; j < d; ++j) args.push_back(tvar(m + j));
    SeriesVector out;
    for (std::size_t j = 0; j < d; ++j) out.push_back(compose(X.theta(j), args));
    return out;
  };

  SeriesVector theta0 = restrict_zero(cur, false);
  bool step1 = false;
  for (std::size_t j = 0; j < d; ++j)
    if (!theta0[j].agrees_with(tvar(m + j))) step1 = true;
  if (step1) {
    const GaussianRational I = GaussianRational::i();
    const std::vector<GaussianRational> lambdas = {GaussianRational(1), I, GaussianRational(1) + I,
                                                   GaussianRational(1) - I, GaussianRational(2) + I,
                                                   GaussianRational(1) + I * GaussianRational(2),
                                                   GaussianRational(2) - I, GaussianRational(3) + I};
    bool done = false;
    for (const auto& lam : lambdas) {
      SeriesVector h1 = identity_vector<GaussianRational>(n, N);
      for (std::size_t j = 0; j < d; ++j) h1[m + j] = tvar(m + j) * lam.conj() + theta0[j] * lam;
      Matrix jac(d, std::vector<GaussianRational>(d));
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t l = 0; l < d; ++l) jac[j][l] = h1[m + j].coeff(MultiIndex::unit(m + l));
      if (exact_rank(jac) != static_cast<int>(d)) continue;
      cur = transform_by(cur, h1);
      change = h1;
      done = true;
      break;
    }
    if (!done) throw ManifoldError(ManifoldErrorKind::invalid, "could not normalize Theta(0, 0, w)");
    identity = false;
  }

  SeriesVector g2 = restrict_zero(cur, true);
  bool step2 = false;
  for (std::size_t j = 0; j < d; ++j)
    if (!g2[j].agrees_with(tvar(m + j))) step2 = true;
  if (step2) {
    SeriesVector h2 = identity_vector<GaussianRational>(n, N);
    for (std::size_t j = 0; j < d; ++j) h2[m + j] = g2[j];
    cur = transform_by(cur, h2);
    change = compose(h2, change);
    identity = false;
  }
  // z' = z, w' = B z + C w maps a polynomial Theta of degree D to one of degree
  // <= D; Theta'(zeta, z, 0) keeps the bound D0 only when B = 0.
  if (!identity && M.exact_degree() && is_linear_change(change)) {
    bool mixes_z = false;
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < m; ++k)
        if (!change[m + j].coeff(MultiIndex::unit(k)).is_zero()) mixes_z = true;
    cur.certify_exact(M.exact_degree(), mixes_z ? M.exact_degree() : M.exact_degree_at_w0());
  }
  return {cur, change, identity};
}

// Theta_{j,beta}(t): coefficient of zeta^beta in Theta_j, a series in t = (z, w)
// known to order N - |beta|.
struct ThetaCoefficients {
  std::size_t m = 0, d = 0;
  int order = 0;
  std::vector<std::map<MultiIndex, Series, GrlexLess>> by_equation;

  Series get(std::size_t j, const MultiIndex& beta) const {
    if (beta.degree() > order) throw SeriesError("coefficient index beyond truncation order");
    auto it = by_equation.at(j).find(beta);
    if (it != by_equation[j].end()) return it->second;
    return Series(m + d, order - beta.degree());
  }
};

inline ThetaCoefficients theta_coefficients(const GenericManifold& M) {
  ThetaCoefficients tc;
  tc.m = M.m();
  tc.d = M.d();
  tc.order = M.order();
  for (std::size_t j = 0; j < M.d(); ++j) tc.by_equation.push_back(split_leading(M.theta(j), M.m()));
  return tc;
}

// Graph z -> Thetabar(z, tau_p) of the complexified Segre variety of tau_p = (zeta_p, xi_p).
inline SeriesVector segre_variety_graph(const GenericManifold& M, const std::vector<GaussianRational>& tau_p) {
  const std::size_t m = M.m(), d = M.d();
  if (tau_p.size() != M.n()) throw SeriesError("tau_p must have n entries");
  const int N = M.order();
  SeriesVector args;
  for (std::size_t k = 0; k < m; ++k) args.push_back(Series::variable(m, N, k));
  for (std::size_t i = 0; i < M.n(); ++i) args.push_back(Series::constant(m, N, tau_p[i]));
  SeriesVector out;
  const SeriesVector bar = M.theta_bar();
  for (std::size_t j = 0; j < d; ++j) out.push_back(compose(bar[j], args, true));
  return out;
}

// Graph zeta -> Theta(zeta, t_p) of the conjugate Segre variety of t_p.
inline SeriesVector conjugate_segre_variety_graph(const GenericManifold& M, const std::vector<GaussianRational>& t_p) {
  const std::size_t m = M.m(), d = M.d();
  if (t_p.size() != M.n()) throw SeriesError("t_p must have n entries");
  const int N = M.order();
  SeriesVector args;
  for (std::size_t k = 0; k < m; ++k) args.push_back(Series::variable(m, N, k));
  for (std::size_t i = 0; i < M.n(); ++i) args.push_back(Series::constant(m, N, t_p[i]));
  SeriesVector out;
  for (std::size_t j = 0; j < d; ++j) out.push_back(compose(M.theta(j), args, true));
  return out;
}

// Lbar_k = d/dzeta_k + sum_j lbar[k][j] d/dxi_j on the complexification, in
// the slots of Theta; L_k = d/dz_k + sum_j l[k][j] d/dw_j in the slots (z, zeta, xi).
struct CRFrame {
  std::vector<SeriesVector> lbar;
  std::vector<SeriesVector> l;
};

inline CRFrame cr_frame(const GenericManifold& M) {
  CRFrame fr;
  for (std::size_t k = 0; k < M.m(); ++k) {
    SeriesVector lb;
    for (std::size_t j = 0; j < M.d(); ++j) lb.push_back(partial_derivative(M.theta(j), k));
    fr.l.push_back(conjugate_coeffs(lb));
    fr.lbar.push_back(std::move(lb));
  }
  return fr;
}

// Lbar_k (w_j - Thetabar_j(z, zeta, xi)) restricted to xi = Theta; vanishes
// identically on a real manifold. Indexed [k][j].
inline std::vector<SeriesVector> frame_tangency_residuals(const GenericManifold& M) {
  const std::size_t m = M.m(), d = M.d();
  const SeriesVector bar = M.theta_bar();
  const CRFrame fr = cr_frame(M);
  SeriesVector args;
  for (std::size_t k = 0; k < m; ++k) args.push_back(M.z(k));
  for (std::size_t k = 0; k < m; ++k) args.push_back(M.zeta(k));
  for (std::size_t j = 0; j < d; ++j) args.push_back(M.theta(j));
  std::vector<SeriesVector> out(m);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t j = 0; j < d; ++j) {
      Series r = -compose(partial_derivative(bar[j], m + k), args);
      for (std::size_t l = 0; l < d; ++l)
        r -= compose(partial_derivative(bar[j], 2 * m + l), args) * fr.lbar[k][l];
      out[k].push_back(r);
    }
  return out;
}

// Coefficients of d/dxi_j in [Lbar_a, Lbar_b]; zero for a genuine frame.
inline SeriesVector frame_commutator(const GenericManifold& M, std::size_t a, std::size_t b) {
  const CRFrame fr = cr_frame(M);
  SeriesVector out;
  for (std::size_t j = 0; j < M.d(); ++j)
    out.push_back(partial_derivative(fr.lbar[b][j], a) - partial_derivative(fr.lbar[a][j], b));
  return out;
}

// A point t_p = (z_p, w_p) of M with exact membership wbar_p = Theta(zbar_p, t_p).
struct SurfacePoint {
  std::size_t m = 0;
  std::vector<GaussianRational> t;

  std::vector<GaussianRational> zbar() const {
    std::vector<GaussianRational> r;
    for (std::size_t k = 0; k < m; ++k) r.push_back(t[k].conj());
    return r;
  }
  std::vector<GaussianRational> tau() const {
    std::vector<GaussianRational> r;
    for (const auto& c : t) r.push_back(c.conj());
    return r;
  }
  // (zbar_p, t_p): the point of the complexification over p.
  std::vector<GaussianRational> complexified() const {
    auto r = zbar();
    r.insert(r.end(), t.begin(), t.end());
    return r;
  }
};

inline bool on_manifold(const GenericManifold& M, const std::vector<GaussianRational>& t) {
  SurfacePoint p{M.m(), t};
  auto pt = p.complexified();
  for (std::size_t j = 0; j < M.d(); ++j)
    if (evaluate(M.theta(j), pt) != t[M.m() + j].conj()) return false;
  return true;
}

// Point over z_p with Re w_p = u_p. Needs Theta affine in w, where the
// membership equation is linear in Im w.
inline SurfacePoint surface_point(const GenericManifold& M, const std::vector<GaussianRational>& z,
                                  const std::vector<GaussianRational>& u) {
  const std::size_t m = M.m(), d = M.d();
  if (z.size() != m || u.size() != d) throw ManifoldError(ManifoldErrorKind::invalid, "point needs m z-values and d u-values");
  for (const auto& c : u)
    if (!c.is_real()) throw ManifoldError(ManifoldErrorKind::invalid, "u-values must be real");
  for (const auto& th : M.theta())
    for (const auto& [a, c] : th.terms())
      if (a.slice(2 * m, d).degree() > 1)
        throw ManifoldError(ManifoldErrorKind::invalid, "surface points require Theta affine in w");
  // Theta_j(zbar_p, z_p, w) = sum_l A_jl w_l + b_j
  std::vector<GaussianRational> base;
  for (std::size_t k = 0; k < m; ++k) base.push_back(z[k].conj());
  base.insert(base.end(), z.begin(), z.end());
  Matrix A(d, std::vector<GaussianRational>(d));
  std::vector<GaussianRational> b(d);
  for (std::size_t j = 0; j < d; ++j) {
    for (const auto& [a, c] : M.theta(j).terms()) {
      GaussianRational t = c;
      for (std::size_t s = 0; s < 2 * m; ++s)
        for (int e = 0; e < a[s]; ++e) t *= base[s];
      const MultiIndex wpart = a.slice(2 * m, d);
      if (wpart.degree() == 0) {
        b[j] += t;
      } else {
        for (std::size_t l = 0; l < d; ++l)
          if (wpart[l]) A[j][l] += t;
      }
    }
  }
  // u - i v = A (u + i v) + b  =>  (I + A) v = i ((A - I) u + b)
  const GaussianRational I = GaussianRational::i();
  Matrix lhs(d, std::vector<GaussianRational>(d));
  std::vector<GaussianRational> rhs(d);
  for (std::size_t j = 0; j < d; ++j) {
    GaussianRational acc = b[j] - u[j];
    for (std::size_t l = 0; l < d; ++l) {
      lhs[j][l] = A[j][l] + GaussianRational(j == l ? 1 : 0);
      acc += A[j][l] * u[l];
    }
    rhs[j] = I * acc;
  }
  Matrix inv;
  try {
    inv = invert_matrix(lhs);
  } catch (const SeriesError&) {
    throw ManifoldError(ManifoldErrorKind::invalid, "membership equation is singular at this point");
  }
  SurfacePoint p;
  p.m = m;
  p.t = z;
  for (std::size_t j = 0; j < d; ++j) {
    GaussianRational v(0);
    for (std::size_t l = 0; l < d; ++l) v += inv[j][l] * rhs[l];
    if (!v.is_real()) throw ManifoldError(ManifoldErrorKind::invalid, "no real solution for Im w at this point");
    p.t.push_back(u[j] + I * v);
  }
  if (!on_manifold(M, p.t)) throw ManifoldError(ManifoldErrorKind::invalid, "point is not on the manifold");
  return p;
}

}  // namespace crsegre
