#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "manifold.hpp"
#include "rank.hpp"
#include "verdict.hpp"

namespace crsegre {

// Index (j, beta) of the coefficient Theta_{j,beta} of zeta^beta in Theta_j.
struct JetLabel {
  std::size_t j = 0;
  MultiIndex beta;
};

inline std::vector<JetLabel> jet_labels(std::size_t m, std::size_t d, int k, int from = 0) {
  std::vector<JetLabel> out;
  for (std::size_t j = 0; j < d; ++j)
    for (const auto& b : monomials_up_to(m, k))
      if (b.degree() >= from) out.push_back({j, b});
  return out;
}

// Q_k: t -> (Theta_{j,beta}(t))_{|beta| <= k}, ordered by (j, grlex beta).
struct SegreMapping {
  int k = 0;
  std::vector<JetLabel> labels;
  SeriesVector components;  // series in t = (z, w)
};

inline SegreMapping segre_mapping(const GenericManifold& M, int k, const ThetaCoefficients& tc) {
  if (k < 0 || k > M.order()) throw ManifoldError(ManifoldErrorKind::invalid, "Segre mapping order exceeds truncation");
  SegreMapping q;
  q.k = k;
  q.labels = jet_labels(M.m(), M.d(), k);
  for (const auto& l : q.labels) q.components.push_back(tc.get(l.j, l.beta));
  return q;
}
inline SegreMapping segre_mapping(const GenericManifold& M, int k) { return segre_mapping(M, k, theta_coefficients(M)); }

// J^k: (zeta, t) -> (zeta, (1/beta!) d_zeta^beta Theta_j(zeta, t))_{|beta| <= k},
// all series in the slots of Theta. The first m components are zeta.
struct JetMap {
  int k = 0;
  std::size_t m = 0;
  std::vector<JetLabel> labels;
  SeriesVector components;
};

namespace detail {

// (1/beta!) d^beta f over the first variables; coefficient C(alpha, beta).
inline Series scaled_derivative(const Series& f, const MultiIndex& beta, std::size_t m) {
  const int b = beta.degree();
  if (f.order() < b) throw SeriesError("truncation order exhausted by differentiation");
  Series r(f.arity(), f.order() - b);
  for (const auto& [a, c] : f.terms()) {
    bool ok = true;
    GaussianRational coef = c;
    MultiIndex e = a;
    for (std::size_t i = 0; i < m && ok; ++i) {
      if (a[i] < beta[i]) {
        ok = false;
        break;
      }
      coef *= GaussianRational(static_cast<long>(binomial(static_cast<std::size_t>(a[i]), static_cast<std::size_t>(beta[i]))));
      e.set(i, a[i] - beta[i]);
    }
    if (ok) r.add_to(e, coef);
  }
  return r;
}

inline JetMap jet_from(const SeriesVector& theta, std::size_t m, std::size_t d, int k) {
  if (theta.empty()) throw SeriesError("empty defining series");
  const int N = theta.front().order();
  if (k < 0 || k > N - 1) throw ManifoldError(ManifoldErrorKind::invalid, "jet order must lie in [0, N-1]");
  JetMap J;
  J.k = k;
  J.m = m;
  for (std::size_t i = 0; i < m; ++i) J.components.push_back(Series::variable(theta.front().arity(), N, i));
  J.labels = jet_labels(m, d, k);
  for (const auto& l : J.labels) J.components.push_back(scaled_derivative(theta[l.j], l.beta, m));
  return J;
}

}  // namespace detail

inline JetMap jet_map(const GenericManifold& M, int k) { return detail::jet_from(M.theta(), M.m(), M.d(), k); }

// J_t^k S_tau built from Thetabar in its slots (z, zeta, xi); coefficientwise
// it is the conjugate of jet_map.
inline JetMap conjugate_jet_map(const GenericManifold& M, int k) {
  return detail::jet_from(M.theta_bar(), M.m(), M.d(), k);
}

namespace detail {

inline Series at_w0(const Series& f_t, std::size_t m) {
  Series r(m, f_t.order());
  for (const auto& [a, c] : f_t.terms())
    if (a.slice(m, f_t.arity() - m).degree() == 0) r.set(a.slice(0, m), c);
  return r;
}

inline SeriesMatrix promoted(const SeriesMatrix& a, int order) {
  SeriesMatrix out = a;
  for (auto& row : out)
    for (auto& e : row) e = crsegre::promoted(e, order);
  return out;
}

inline int max_degree(const SeriesMatrix& a) {
  int D = 0;
  for (const auto& row : a)
    for (const auto& e : row) D = std::max(D, e.max_degree());
  return D;
}

// Generic rank of a matrix of exact polynomials, certified by minors computed
// without loss; nullopt when the symbolic check is out of reach.
inline std::optional<int> exact_polynomial_rank(const SeriesMatrix& a, const RankOptions& opt) {
  if (a.empty() || a[0].empty()) return 0;
  const int small = static_cast<int>(std::min(a.size(), a[0].size()));
  const int P = max_degree(a) * small + 1;
  if (P > kMaxOrder) return std::nullopt;
  auto v = generic_rank(promoted(a, P), opt);
  if (v.confidence != RankConfidence::exact_symbolic) return std::nullopt;
  return v.value;
}

inline RankOptions reseeded(const RankOptions& opt, std::uint64_t salt) {
  RankOptions o = opt;
  o.seed = opt.seed ^ splitmix64(salt);
  return o;
}

// A curve s -> (c_k s^(a_k)) through 0 on which every generator vanishes
// identically: a certificate that the ideal has infinite codimension.
inline std::optional<std::string> monomial_curve(const SeriesVector& gens, std::size_t arity) {
  using Q = GaussianRational;
  std::vector<std::pair<Q, int>> options = {{Q(0), 0}};
  const std::vector<Q> cs = arity <= 3 ? std::vector<Q>{Q(1), Q(-1), Q::i(), -Q::i()} : std::vector<Q>{Q(1)};
  const int amax = arity <= 3 ? 4 : 1;
  for (const auto& c : cs)
    for (int a = 1; a <= amax; ++a) options.push_back({c, a});
  std::vector<std::size_t> pick(arity, 0);
  auto vanishes = [&](const Series& g) {
    std::map<int, Q> acc;
    for (const auto& [alpha, c] : g.terms()) {
      Q t = c;
      int deg = 0;
      for (std::size_t k = 0; k < arity && !t.is_zero(); ++k)
        for (int e = 0; e < alpha[k]; ++e) {
          t *= options[pick[k]].first;
          deg += options[pick[k]].second;
        }
      if (!t.is_zero()) acc[deg] += t;
    }
    for (const auto& kv : acc)
      if (!kv.second.is_zero()) return false;
    return true;
  };
  while (true) {
    std::size_t i = 0;
    while (i < arity && ++pick[i] == options.size()) pick[i++] = 0;
    if (i == arity) return std::nullopt;
    if (std::all_of(gens.begin(), gens.end(), vanishes)) {
      std::string s = "(";
      for (std::size_t k = 0; k < arity; ++k) {
        const auto& [c, a] = options[pick[k]];
        if (k) s += ", ";
        s += c.is_zero() ? "0" : c.to_string() + "*s^" + std::to_string(a);
      }
      return s + ")";
    }
  }
}

inline UPoly upoly_mul(const UPoly& a, const UPoly& b) {
  UPoly out(a.size() + b.size() - 1, GaussianRational(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

inline void upoly_trim(UPoly& a) {
  while (!a.empty() && a.back().is_zero()) a.pop_back();
}

inline UPoly upoly_gcd(UPoly a, UPoly b) {
  upoly_trim(a);
  upoly_trim(b);
  while (!b.empty()) {
    while (a.size() >= b.size()) {
      const GaussianRational f = a.back() / b.back();
      const std::size_t shift = a.size() - b.size();
      for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
      upoly_trim(a);
      if (a.empty()) break;
    }
    std::swap(a, b);
  }
  return a;
}

inline GaussianRational upoly_eval(const UPoly& a, const GaussianRational& x) {
  GaussianRational v(0);
  for (auto it = a.rbegin(); it != a.rend(); ++it) v = v * x + *it;
  return v;
}

// Homogeneous components of exact polynomials, as (exponent, coefficient) lists.
using Form = std::vector<std::pair<MultiIndex, GaussianRational>>;

inline GaussianRational form_at(const Form& f, const std::vector<GaussianRational>& v) {
  GaussianRational acc(0);
  for (const auto& [a, c] : f) {
    GaussianRational t = c;
    for (std::size_t i = 0; i < v.size(); ++i)
      for (int e = 0; e < a[i]; ++e) t *= v[i];
    acc += t;
  }
  return acc;
}

// F(p + t q) as a polynomial in t.
inline UPoly form_on_pencil(const Form& f, const std::vector<GaussianRational>& p, const std::vector<GaussianRational>& q) {
  UPoly out{GaussianRational(0)};
  for (const auto& [a, c] : f) {
    UPoly t{c};
    for (std::size_t i = 0; i < p.size(); ++i)
      for (int e = 0; e < a[i]; ++e) t = upoly_mul(t, UPoly{p[i], q[i]});
    if (t.size() > out.size()) out.resize(t.size(), GaussianRational(0));
    for (std::size_t k = 0; k < t.size(); ++k) out[k] += t[k];
  }
  return out;
}

// A line s -> s v on which every generator vanishes identically: every
// homogeneous component must vanish at v. The linear components cut out a
// subspace; inside it, directions are found exactly on pencils p + t q as
// common roots of the restricted components.
inline std::optional<std::string> vanishing_line(const SeriesVector& gens, std::size_t arity) {
  using Q = GaussianRational;
  std::vector<Form> forms;
  Matrix linear;
  for (const auto& g : gens) {
    std::map<int, Form> by_degree;
    for (const auto& [a, c] : g.terms()) by_degree[a.degree()].push_back({a, c});
    for (auto& [deg, f] : by_degree) {
      if (deg == 1) {
        std::vector<Q> row(arity, Q(0));
        for (const auto& [a, c] : f)
          for (std::size_t i = 0; i < arity; ++i)
            if (a[i]) row[i] = c;
        linear.push_back(row);
      } else if (deg > 1) {
        forms.push_back(std::move(f));
      }
    }
  }
  const auto basis = kernel_basis(linear, arity);
  auto vanishes_at = [&](const std::vector<Q>& v) {
    return std::all_of(forms.begin(), forms.end(), [&](const Form& f) { return form_at(f, v).is_zero(); });
  };
  auto witness = [&](const std::vector<Q>& v) {
    std::string s = "(";
    for (std::size_t k = 0; k < arity; ++k) {
      if (k) s += ", ";
      s += v[k].is_zero() ? "0" : "(" + v[k].to_string() + ")*s";
    }
    return s + ")";
  };
  for (const auto& b : basis)
    if (vanishes_at(b)) return witness(b);
  std::vector<Q> candidates;
  for (long re = -3; re <= 3; ++re)
    for (long im = -3; im <= 3; ++im)
      for (long den = 1; den <= 3; ++den) candidates.push_back(Q::ratio(re, den) + Q::i() * Q::ratio(im, den));
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i + 1; j < basis.size(); ++j) {
      UPoly g;
      for (const auto& f : forms) g = upoly_gcd(g, form_on_pencil(f, basis[i], basis[j]));
      upoly_trim(g);
      std::vector<Q> roots;
      if (g.empty())
        roots.push_back(Q(0));
      else if (g.size() == 2)
        roots.push_back(-g[0] / g[1]);
      else if (g.size() > 2)
        for (const auto& x : candidates)
          if (upoly_eval(g, x).is_zero()) roots.push_back(x);
      for (const auto& t : roots) {
        std::vector<Q> v(arity);
        for (std::size_t k = 0; k < arity; ++k) v[k] = basis[i][k] + t * basis[j][k];
        if (vanishes_at(v)) return witness(v);
      }
    }
  return std::nullopt;
}

// Certificate of infinite codimension: a monomial curve or a line on which
// every exact polynomial generator vanishes.
inline std::optional<std::string> vanishing_curve(const SeriesVector& gens, std::size_t arity) {
  if (auto c = monomial_curve(gens, arity)) return c;
  return vanishing_line(gens, arity);
}

// Codimension of an ideal of exact polynomials, by growing the ambient
// truncation until two consecutive quotient dimensions agree.
struct ExactCodim {
  std::optional<int> codim;
  int last_degree = 0;
  int last_dim = 0;
};

inline ExactCodim exact_codimension(const SeriesVector& gens, std::size_t arity, std::size_t max_monomials = 3000) {
  ExactCodim r;
  if (vanishing_curve(gens, arity)) return r;  // certified infinite, skip the elimination
  int Kcap = 1;
  while (Kcap < kMaxOrder - 1 && binomial(arity + static_cast<std::size_t>(Kcap), arity) <= max_monomials) ++Kcap;
  SeriesVector g;
  for (const auto& s : gens)
    if (!s.is_zero()) g.push_back(crsegre::promoted(s, std::max(Kcap, s.max_degree())));
  int prev = truncated_quotient_dim(g, arity, 1);
  for (int K = 2; K <= Kcap; ++K) {
    const int cur = truncated_quotient_dim(g, arity, K);
    r.last_degree = K;
    r.last_dim = cur;
    if (cur == prev) {
      r.codim = cur;
      return r;
    }
    prev = cur;
  }
  return r;
}

inline Series series_det(const SeriesMatrix& a) {
  const std::size_t n = a.size();
  if (n == 0) throw SeriesError("empty determinant");
  if (n == 1) return a[0][0];
  Series acc(a[0][0].arity(), min_order(a[0], kMaxOrder));
  bool first = true;
  for (std::size_t c = 0; c < n; ++c) {
    if (a[0][c].is_zero()) continue;
    SeriesMatrix sub;
    for (std::size_t r = 1; r < n; ++r) {
      sub.emplace_back();
      for (std::size_t cc = 0; cc < n; ++cc)
        if (cc != c) sub.back().push_back(a[r][cc]);
    }
    Series t = a[0][c] * series_det(sub);
    if (c % 2) t = -t;
    if (first) {
      acc = t;
      first = false;
    } else {
      acc += t;
    }
  }
  if (first) {
    int o = kMaxOrder;
    for (const auto& row : a) o = min_order(row, o);
    return Series(a[0][0].arity(), o);
  }
  return acc;
}

inline std::vector<GaussianRational> random_point(std::uint64_t seed, std::uint64_t idx, std::size_t n) {
  auto rng = sample_stream(seed, idx);
  std::vector<GaussianRational> v(n);
  for (auto& x : v) x = small_rational(rng);
  return v;
}

}  // namespace detail

// Dimension of span{Lbar^beta grad_t r_j at 0 : |beta| <= k} for the
// conjugate defining functions r_j = w_j - Thetabar_j(z, zeta, xi), pulled
// back to the complexification where Lbar^beta is d_zeta^beta. An oracle
// for rk_0 Q_k computed from a different set of defining functions.
inline int gradient_span_rank(const GenericManifold& M, int k) {
  const std::size_t m = M.m(), d = M.d(), n = M.n();
  if (k < 0 || k > M.order() - 1) throw ManifoldError(ManifoldErrorKind::invalid, "gradient span order out of range");
  const SeriesVector bar = M.theta_bar();
  SeriesVector args;
  for (std::size_t i = 0; i < m; ++i) args.push_back(M.z(i));
  for (std::size_t i = 0; i < m; ++i) args.push_back(M.zeta(i));
  for (std::size_t j = 0; j < d; ++j) args.push_back(M.theta(j));
  Matrix rows;
  for (std::size_t j = 0; j < d; ++j) {
    // grad_t r_j = (-d_z Thetabar_j, e_j) pulled back by xi = Theta(zeta, t)
    SeriesVector grad;
    for (std::size_t i = 0; i < m; ++i) grad.push_back(-compose(partial_derivative(bar[j], i), args));
    for (const auto& beta : monomials_up_to(m, k)) {
      std::vector<GaussianRational> row(n, GaussianRational(0));
      for (std::size_t i = 0; i < m; ++i) row[i] = grad[i].coeff(beta);
      if (beta.degree() == 0) row[m + j] = GaussianRational(1);
      // d_zeta^beta at 0 is beta! times the coefficient; the factor does not change the span
      rows.push_back(row);
    }
  }
  return exact_rank(rows);
}

// One of the five conditions with its type. ell0 is the smallest order at
// which the condition was certified; ell0_exact says minimality is proven.
struct ConditionVerdict {
  Verdict verdict = Verdict::inconclusive;
  std::optional<int> ell0;
  bool ell0_exact = false;
  bool by_hierarchy = false;
  std::string basis;
};

struct EssentialType {
  std::optional<int> value;  // epsilon_1 when certified finite
  bool exact = false;        // every generator known exactly
  int beta_bound = 0;        // generators used: 1 <= |beta| <= beta_bound
  int degree_low = 0, degree_high = 0, dim_low = 0, dim_high = 0;
  std::optional<std::string> infinite_witness;
};

struct EssentialHoloDimension {
  int n_M = 0;
  int ell_M = 0;
  std::vector<int> multitype;  // (lambda_0 = d, lambda_1, ..., lambda_{ell_M})
  std::vector<RankVerdict> jet_ranks;  // generic rank of J^k, k = 0, 1, ...
  bool certain = false;
  bool bound_holds = true;  // ell_M <= n_M - d
};

inline EssentialHoloDimension essential_holo_dimension(const GenericManifold& M, const RankOptions& opt = {}) {
  const std::size_t m = M.m(), d = M.d(), n = M.n();
  const int N = M.order();
  const auto D = M.exact_degree();
  const int full = static_cast<int>(m + n);
  EssentialHoloDimension out;
  const int kmax = D ? std::min(N - 1, *D + 1) : N - 1;
  std::vector<bool> exact;
  for (int k = 0; k <= kmax; ++k) {
    auto J = jet_map(M, k);
    SeriesMatrix jac = jacobian(J.components);
    RankVerdict v;
    bool ex = false;
    const RankOptions o = detail::reseeded(opt, 0x400 + static_cast<std::uint64_t>(k));
    if (D) {
      auto r = detail::exact_polynomial_rank(jac, o);
      if (r) {
        v.value = *r;
        v.confidence = RankConfidence::exact_symbolic;
        v.symbolic_ran = true;
        v.order = kMaxOrder;
        for (const auto& row : jac)
          for (const auto& e : row) v.order = std::min(v.order, e.order());
        ex = true;
      } else {
        v = generic_rank(jac, o);
      }
    } else {
      v = generic_rank(jac, o);
    }
    if (v.value == full) ex = true;
    out.jet_ranks.push_back(v);
    exact.push_back(ex);
    const int K = static_cast<int>(out.jet_ranks.size()) - 1;
    const bool maxed = v.value == full;
    const bool stable = K >= 1 && out.jet_ranks[K].value == out.jet_ranks[K - 1].value;
    if (maxed || stable) {
      const int ell = maxed && !stable ? K : K - 1;
      out.ell_M = ell;
      out.n_M = out.jet_ranks[ell].value - static_cast<int>(m);
      out.multitype = {out.jet_ranks[0].value - static_cast<int>(m)};
      for (int i = 1; i <= ell; ++i) out.multitype.push_back(out.jet_ranks[i].value - out.jet_ranks[i - 1].value);
      out.certain = true;
      for (int i = 0; i <= K; ++i) out.certain = out.certain && exact[i];
      out.bound_holds = out.ell_M <= out.n_M - static_cast<int>(d);
      return out;
    }
  }
  // no stabilization within the truncation: report the last lower bound
  out.ell_M = static_cast<int>(out.jet_ranks.size()) - 1;
  out.n_M = out.jet_ranks.back().value - static_cast<int>(m);
  out.multitype = {out.jet_ranks[0].value - static_cast<int>(m)};
  for (std::size_t i = 1; i < out.jet_ranks.size(); ++i)
    out.multitype.push_back(out.jet_ranks[i].value - out.jet_ranks[i - 1].value);
  out.certain = false;
  out.bound_holds = out.ell_M <= out.n_M - static_cast<int>(d);
  return out;
}

struct ClassificationReport {
  int order = 0;
  bool exact_data = false;       // Theta is a fully known polynomial
  bool exact_at_w0 = false;      // Theta(zeta, z, 0) is a fully known polynomial
  std::optional<SurfacePoint> point;
  Verdict levi = Verdict::inconclusive;
  ConditionVerdict finite, essentially_finite, segre, holomorphic;
  EssentialType essential_type;
  std::vector<int> ranks;                     // rk_0 Q_k at the origin, or rk J^k - m at a point
  std::optional<std::vector<int>> levi_multitype;  // (d, lambda_1, ..., lambda_ell0)
  std::optional<int> restricted_generic_rank;      // Segre rank on S_0 (or the second chain)
  bool restricted_rank_exact = false;
  std::optional<EssentialHoloDimension> holo;
  SeriesVector normalization;  // change to the coordinates the tests ran in
  bool normalization_identity = true;
  bool hierarchy_consistent = true;
  std::vector<std::string> hierarchy_notes;
  std::vector<std::string> notes;
};

namespace detail {

inline void finish_multitype(ClassificationReport& r, int d) {
  if (r.finite.verdict != Verdict::yes || !r.finite.ell0) return;
  std::vector<int> mt = {d};
  for (int k = 1; k <= *r.finite.ell0 && k < static_cast<int>(r.ranks.size()); ++k) mt.push_back(r.ranks[k] - r.ranks[k - 1]);
  r.levi_multitype = mt;
}

}  // namespace detail

// Levi => finite => essentially finite => Segre => holomorphic: "yes"
// propagates right, "no" propagates left; contradictions are recorded.
inline void apply_hierarchy(ClassificationReport& r) {
  ConditionVerdict levi;
  levi.verdict = r.levi;
  if (r.levi == Verdict::yes) {
    levi.ell0 = 1;
    levi.ell0_exact = true;
  }
  std::vector<ConditionVerdict*> chain = {&levi, &r.finite, &r.essentially_finite, &r.segre, &r.holomorphic};
  const char* names[] = {"levi", "finite", "essentially_finite", "segre", "holomorphic"};
  for (std::size_t i = 0; i < chain.size(); ++i)
    for (std::size_t j = i + 1; j < chain.size(); ++j)
      if (chain[i]->verdict == Verdict::yes && chain[j]->verdict == Verdict::no) {
        r.hierarchy_consistent = false;
        r.hierarchy_notes.push_back(std::string(names[i]) + " is yes but " + names[j] + " is no");
      }
  for (std::size_t i = 1; i + 1 < chain.size(); ++i)
    for (std::size_t j = i + 1; j < chain.size(); ++j) {
      const auto& a = *chain[i];
      const auto& b = *chain[j];
      if (a.verdict == Verdict::yes && b.verdict == Verdict::yes && a.ell0 && b.ell0 && a.ell0_exact && b.ell0_exact &&
          *b.ell0 > *a.ell0) {
        r.hierarchy_consistent = false;
        r.hierarchy_notes.push_back(std::string(names[j]) + " type exceeds " + names[i] + " type");
      }
    }
  if (r.levi == Verdict::yes && r.finite.verdict == Verdict::yes && r.finite.ell0 != 1) {
    r.hierarchy_consistent = false;
    r.hierarchy_notes.push_back("Levi nondegenerate but finite type is not 1");
  }
  if (!r.hierarchy_consistent) return;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i)
    if (chain[i]->verdict == Verdict::yes && chain[i + 1]->verdict == Verdict::inconclusive) {
      chain[i + 1]->verdict = Verdict::yes;
      chain[i + 1]->by_hierarchy = true;
      chain[i + 1]->ell0 = chain[i]->ell0;
      chain[i + 1]->ell0_exact = false;
      chain[i + 1]->basis = std::string("implied by ") + names[i];
    }
  for (std::size_t i = chain.size(); i-- > 1;)
    if (chain[i]->verdict == Verdict::no && chain[i - 1]->verdict == Verdict::inconclusive) {
      chain[i - 1]->verdict = Verdict::no;
      chain[i - 1]->by_hierarchy = true;
      chain[i - 1]->ell0.reset();
      chain[i - 1]->basis = std::string("implied by ") + names[i];
    }
  r.levi = levi.verdict;
}

namespace detail {

// Linear part of Theta_{j,beta} at the origin: one row of the Jacobian of Q_k at 0.
inline std::vector<GaussianRational> linear_row(const Series& f) {
  std::vector<GaussianRational> row(f.arity());
  for (std::size_t i = 0; i < f.arity(); ++i) row[i] = f.coeff(MultiIndex::unit(i));
  return row;
}

inline SeriesVector restricted_generators(const ThetaCoefficients& tc, std::size_t m, int k, std::optional<int> promote) {
  SeriesVector g;
  for (std::size_t j = 0; j < tc.d; ++j)
    for (const auto& b : monomials_up_to(m, k)) {
      if (b.degree() == 0) continue;
      Series s = at_w0(tc.get(j, b), m);
      if (promote) s = crsegre::promoted(s, std::max(*promote, s.order()));
      g.push_back(s);
    }
  return g;
}

inline GenericManifold with_order(const GenericManifold& M, int order) {
  if (order <= M.order()) return M;
  SeriesVector th;
  for (const auto& t : M.theta()) th.push_back(crsegre::promoted(t, order));
  GenericManifold X(M.m(), M.d(), th);
  X.certify_exact(M.exact_degree(), M.exact_degree_at_w0());
  return X;
}

}  // namespace detail

// The five conditions at the origin, decided in normal coordinates.
inline ClassificationReport classify_at_origin(const GenericManifold& M, const RankOptions& opt = {}) {
  ClassificationReport r;
  r.order = M.order();
  auto norm = to_normal_coordinates(M);
  r.normalization = norm.change;
  r.normalization_identity = norm.identity;
  GenericManifold X = norm.manifold;
  if (M.exact_degree() && !norm.manifold.exact_degree())
    r.notes.push_back("normalization is not the identity: exactness certificates are dropped");
  const auto D = X.exact_degree();
  const auto D0 = X.exact_degree_at_w0();
  r.exact_data = D.has_value();
  r.exact_at_w0 = D0.has_value();
  if (D) X = detail::with_order(X, *D + 1);
  const std::size_t m = X.m(), d = X.d(), n = X.n();
  const int N = X.order();
  const auto tc = theta_coefficients(X);

  // Levi and finite nondegeneracy: rank at 0 of Q_k uses linear coefficients only
  const int kfin = D ? std::min(N - 1, *D) : N - 1;
  Matrix rows;
  for (int k = 0; k <= kfin; ++k) {
    for (std::size_t j = 0; j < d; ++j)
      for (const auto& b : monomials_up_to(m, k))
        if (b.degree() == k) rows.push_back(detail::linear_row(tc.get(j, b)));
    r.ranks.push_back(exact_rank(rows));
    if (r.ranks.back() == static_cast<int>(n) && r.finite.verdict != Verdict::yes) {
      r.finite.verdict = Verdict::yes;
      r.finite.ell0 = k;
      r.finite.ell0_exact = true;
      r.finite.basis = "rank of Q_k at the origin";
    }
  }
  if (r.finite.verdict != Verdict::yes && D) {
    r.finite.verdict = Verdict::no;
    r.finite.basis = "Q_k at the origin stays below rank n up to the polynomial degree";
  }
  if (r.ranks.size() >= 2) r.levi = verdict_of(r.ranks[1] == static_cast<int>(n));

  // essentially finite: codimension of <Theta_{j,beta}(z, 0)> in C{z}
  auto& ef = r.essentially_finite;
  auto& et = r.essential_type;
  if (D0) {
    et.exact = true;
    bool prior_infinite = true;
    for (int k = 1; k <= *D0; ++k) {
      auto gens = detail::restricted_generators(tc, m, k, *D0);
      auto c = detail::exact_codimension(gens, m);
      if (c.codim) {
        if (ef.verdict != Verdict::yes) {
          ef.verdict = Verdict::yes;
          ef.ell0 = k;
          ef.ell0_exact = prior_infinite;
          ef.basis = "quotient dimension stabilizes";
        }
        et.value = c.codim;
        et.beta_bound = k;
        et.degree_low = c.last_degree - 1;
        et.degree_high = c.last_degree;
        et.dim_low = et.dim_high = c.last_dim;
      } else if (prior_infinite && ef.verdict != Verdict::yes) {
        prior_infinite = detail::vanishing_curve(gens, m).has_value();
      }
    }
    if (ef.verdict != Verdict::yes) {
      auto gens = detail::restricted_generators(tc, m, *D0, *D0);
      if (auto w = detail::vanishing_curve(gens, m)) {
        ef.verdict = Verdict::no;
        ef.basis = "every generator vanishes on a curve";
        et.infinite_witness = *w;
      }
    }
  } else {
    for (int k = 1; k <= N - 1; ++k) {
      auto gens = detail::restricted_generators(tc, m, k, std::nullopt);
      auto c = ideal_codimension(gens, m, N - k + 1);
      if (!c.finite) continue;
      if (ef.verdict != Verdict::yes) {
        ef.verdict = Verdict::yes;
        ef.ell0 = k;
        ef.ell0_exact = k == 1;
        ef.basis = "quotient dimension stabilizes";
      }
      et.value = c.codim;
      et.beta_bound = k;
      et.degree_low = c.degree_low;
      et.degree_high = c.degree_high;
      et.dim_low = c.dim_low;
      et.dim_high = c.dim_high;
    }
    if (et.value) r.notes.push_back("essential type uses |beta| <= " + std::to_string(et.beta_bound) + " only");
  }

  // Segre nondegeneracy: generic rank of z -> Theta_{j,beta}(z, 0)
  {
    const int kmax = D0 ? *D0 : N - 1;
    bool prior_exact = true;
    for (int k = 1; k <= kmax; ++k) {
      auto gens = detail::restricted_generators(tc, m, k, std::nullopt);
      auto jac = jacobian(gens);
      const auto o = detail::reseeded(opt, 0x200 + static_cast<std::uint64_t>(k));
      std::optional<int> exact;
      if (D0) exact = detail::exact_polynomial_rank(jac, o);
      const int value = exact ? *exact : generic_rank(jac, o).value;
      r.restricted_generic_rank = value;
      r.restricted_rank_exact = exact.has_value() || value == static_cast<int>(m);
      if (value == static_cast<int>(m)) {
        r.segre.verdict = Verdict::yes;
        r.segre.ell0 = k;
        r.segre.ell0_exact = prior_exact || k == 1;
        r.segre.basis = "generic rank m on the Segre variety of 0";
        break;
      }
      prior_exact = prior_exact && exact.has_value();
      if (k == kmax && D0 && exact) {
        r.segre.verdict = Verdict::no;
        r.segre.basis = "exact generic rank below m with all coefficients known";
      }
    }
  }

  // holomorphic nondegeneracy: generic rank of Q_k
  {
    const int kmax = D ? *D : N - 1;
    bool prior_exact = true;
    for (int k = 1; k <= kmax; ++k) {
      auto q = segre_mapping(X, k, tc);
      auto jac = jacobian(q.components);
      const auto o = detail::reseeded(opt, 0x300 + static_cast<std::uint64_t>(k));
      std::optional<int> exact;
      if (D) exact = detail::exact_polynomial_rank(jac, o);
      const int value = exact ? *exact : generic_rank(jac, o).value;
      if (value == static_cast<int>(n)) {
        r.holomorphic.verdict = Verdict::yes;
        r.holomorphic.ell0 = k;
        r.holomorphic.ell0_exact = prior_exact || k == 1;
        r.holomorphic.basis = "generic rank n of Q_k";
        break;
      }
      prior_exact = prior_exact && exact.has_value();
      if (k == kmax && D && exact) {
        r.holomorphic.verdict = Verdict::no;
        r.holomorphic.basis = "exact generic rank below n with all coefficients known";
      }
    }
  }

  r.holo = essential_holo_dimension(X, opt);
  if (r.holo->certain && r.holomorphic.verdict != Verdict::inconclusive &&
      (r.holo->n_M == static_cast<int>(n)) != (r.holomorphic.verdict == Verdict::yes)) {
    r.hierarchy_consistent = false;
    r.hierarchy_notes.push_back("n_M disagrees with the holomorphic nondegeneracy verdict");
  }
  if (!r.holo->bound_holds) {
    r.hierarchy_consistent = false;
    r.hierarchy_notes.push_back("ell_M exceeds n_M - d");
  }
  apply_hierarchy(r);
  detail::finish_multitype(r, static_cast<int>(d));
  return r;
}

namespace detail {

// Jet components (1/beta!) d_zeta^beta Theta_j at zeta = zbar_p, t = t_p + t1,
// minus their values at t1 = 0: the defining data of the manifold recentred at p.
inline SeriesVector translated_jets(const GenericManifold& M, const SurfacePoint& p, int k, std::optional<int> promote) {
  const std::size_t m = M.m(), n = M.n();
  const int N = promote ? *promote : M.order();
  const auto zb = p.zbar();
  SeriesVector args;
  for (std::size_t i = 0; i < m; ++i) args.push_back(Series::constant(n, N, zb[i]));
  for (std::size_t i = 0; i < n; ++i) args.push_back(Series::variable(n, N, i) + Series::constant(n, N, p.t[i]));
  auto J = jet_map(promote ? with_order(M, *promote + 1) : M, k);
  SeriesVector out;
  for (std::size_t c = m; c < J.components.size(); ++c) {
    Series s = compose(J.components[c], args, true);
    if (!promote) s = s.truncated(J.components[c].order());
    s.set(MultiIndex(), GaussianRational(0));
    out.push_back(s);
  }
  return out;
}

}  // namespace detail

// The manifold recentred at p: Theta_1(zeta1, t1) = Theta(zeta1 + zbar_p, t1 + t_p) - wbar_p.
inline GenericManifold translated_manifold(const GenericManifold& M, const SurfacePoint& p) {
  const std::size_t m = M.m(), A = M.arity();
  const int N = M.order();
  const auto c = p.complexified();
  SeriesVector args;
  for (std::size_t i = 0; i < A; ++i) args.push_back(Series::variable(A, N, i) + Series::constant(A, N, c[i]));
  SeriesVector th;
  for (std::size_t j = 0; j < M.d(); ++j) {
    Series s = compose(M.theta(j), args, true);
    s.set(MultiIndex(), GaussianRational(0));
    th.push_back(s);
  }
  (void)m;
  GenericManifold X(M.m(), M.d(), th);
  if (M.exact_degree()) X.certify_exact(M.exact_degree(), M.exact_degree());
  return X;
}

// The five conditions at a point p of M, read off the jets of Segre
// varieties at (zbar_p, t_p). Without exactness certificates the stored
// polynomials are evaluated as they are: p must lie within the radius where
// the truncation is trusted, and only positive verdicts are reported.
inline ClassificationReport classify_at_point(const GenericManifold& M0, const SurfacePoint& p, const RankOptions& opt = {}) {
  if (p.t.size() != M0.n() || !on_manifold(M0, p.t))
    throw ManifoldError(ManifoldErrorKind::invalid, "point is not on the manifold");
  ClassificationReport r;
  r.order = M0.order();
  r.point = p;
  const auto D = M0.exact_degree();
  r.exact_data = D.has_value();
  r.exact_at_w0 = M0.exact_degree_at_w0().has_value();
  const GenericManifold X = D ? detail::with_order(M0, *D + 1) : M0;
  const std::size_t m = X.m(), d = X.d(), n = X.n();
  const int N = X.order();
  const auto pt = p.complexified();
  if (!D) r.notes.push_back("truncated data evaluated at the point; negative verdicts withheld");

  const int kfin = D ? std::min(N - 1, *D) : N - 1;
  for (int k = 0; k <= kfin; ++k) {
    auto J = jet_map(X, k);
    const int rk = rank_at(jacobian(J.components), pt) - static_cast<int>(m);
    r.ranks.push_back(rk);
    if (rk == static_cast<int>(n)) {
      r.finite.verdict = Verdict::yes;
      r.finite.ell0 = k;
      r.finite.ell0_exact = static_cast<bool>(D);
      r.finite.basis = "rank m + n of the jet map at the point";
      break;
    }
  }
  if (r.finite.verdict != Verdict::yes && D) {
    r.finite.verdict = Verdict::no;
    r.finite.basis = "jet map rank stays below m + n up to the polynomial degree";
  }
  if (r.ranks.size() >= 2) {
    const bool full = r.ranks[1] == static_cast<int>(n);
    r.levi = full ? Verdict::yes : (D ? Verdict::no : Verdict::inconclusive);
  }

  // essentially finite: ideal of the recentred jet components in C{t}
  {
    auto& ef = r.essentially_finite;
    auto& et = r.essential_type;
    et.exact = static_cast<bool>(D);
    const int kmax = D ? *D : N - 1;
    for (int k = 0; k <= kmax; ++k) {
      std::optional<int> codim;
      if (D) {
        auto gens = detail::translated_jets(X, p, k, *D);
        auto c = detail::exact_codimension(gens, n);
        codim = c.codim;
        if (codim) {
          et.degree_high = c.last_degree;
          et.degree_low = c.last_degree - 1;
          et.dim_low = et.dim_high = c.last_dim;
        }
      } else {
        if (N - k + 1 < 2) break;
        auto gens = detail::translated_jets(X, p, k, std::nullopt);
        auto c = ideal_codimension(gens, n, N - k + 1);
        if (c.finite) {
          codim = c.codim;
          et.degree_low = c.degree_low;
          et.degree_high = c.degree_high;
          et.dim_low = c.dim_low;
          et.dim_high = c.dim_high;
        }
      }
      if (!codim) continue;
      if (ef.verdict != Verdict::yes) {
        ef.verdict = Verdict::yes;
        ef.ell0 = k;
        ef.ell0_exact = false;
        ef.basis = "recentred quotient dimension stabilizes";
      }
      et.value = codim;
      et.beta_bound = k;
    }
    if (ef.verdict != Verdict::yes && D) {
      auto gens = detail::translated_jets(X, p, *D, *D);
      if (auto w = detail::vanishing_curve(gens, n)) {
        ef.verdict = Verdict::no;
        ef.basis = "every recentred generator vanishes on a curve";
        et.infinite_witness = *w;
      }
    }
  }

  // Segre nondegeneracy: the jet map along the second Segre chain through p
  {
    const int P = D ? std::min(*D * *D, kMaxOrder) : N;
    const bool exact_ok = D && *D * *D <= 40;
    const SeriesVector bar = X.theta_bar();
    const auto zb = p.zbar();
    const auto tau = p.tau();
    const std::size_t B = 2 * m;
    SeriesVector zargs;
    for (std::size_t i = 0; i < m; ++i) zargs.push_back(Series::variable(B, P, m + i) + Series::constant(B, P, p.t[i]));
    SeriesVector sargs = zargs;
    for (const auto& c : tau) sargs.push_back(Series::constant(B, P, c));
    SeriesVector args;
    for (std::size_t i = 0; i < m; ++i) args.push_back(Series::variable(B, P, i) + Series::constant(B, P, zb[i]));
    for (const auto& z : zargs) args.push_back(z);
    for (std::size_t j = 0; j < d; ++j) {
      Series w = compose(bar[j], sargs, true);
      if (!D) w = w.truncated(N);
      args.push_back(w);
    }
    const int kmax = D ? *D : N - 1;
    for (int k = 1; k <= kmax; ++k) {
      auto J = jet_map(X, k);
      SeriesVector comps;
      for (const auto& c : J.components) {
        Series s = compose(c, args, true);
        if (!D) s = s.truncated(c.order());
        s.set(MultiIndex(), GaussianRational(0));
        comps.push_back(s);
      }
      auto jac = jacobian(comps);
      const auto o = detail::reseeded(opt, 0x500 + static_cast<std::uint64_t>(k));
      std::optional<int> exact;
      if (exact_ok) exact = detail::exact_polynomial_rank(jac, o);
      const int value = (exact ? *exact : generic_rank(jac, o).value) - static_cast<int>(m);
      r.restricted_generic_rank = value;
      r.restricted_rank_exact = exact.has_value() || value == static_cast<int>(m);
      if (value == static_cast<int>(m)) {
        r.segre.verdict = Verdict::yes;
        r.segre.ell0 = k;
        r.segre.basis = "jet map of rank 2m along the second Segre chain";
        break;
      }
      if (k == kmax && exact) {
        r.segre.verdict = Verdict::no;
        r.segre.basis = "exact rank below 2m along the second Segre chain";
      }
    }
  }

  // holomorphic nondegeneracy: generic ranks of the jet maps do not depend on p
  r.holo = essential_holo_dimension(X, opt);
  const int full = static_cast<int>(m + n);
  for (std::size_t k = 0; k < r.holo->jet_ranks.size(); ++k)
    if (r.holo->jet_ranks[k].value == full) {
      r.holomorphic.verdict = Verdict::yes;
      r.holomorphic.ell0 = static_cast<int>(k);
      r.holomorphic.basis = "generic rank m + n of the jet map";
      break;
    }
  if (r.holomorphic.verdict != Verdict::yes && r.holo->certain && D) {
    r.holomorphic.verdict = Verdict::no;
    r.holomorphic.basis = "jet map generic rank stabilizes below m + n";
  }
  apply_hierarchy(r);
  detail::finish_multitype(r, static_cast<int>(d));
  return r;
}

// n - n_M holomorphic vector fields sum_i a_i(t) d/dt_i tangent to M,
// solving sum_i a_i d Theta_{j,beta} / d t_i = 0 by Cramer's rule.
struct HoloFieldBasis {
  int n_M = 0;
  std::vector<SeriesVector> fields;
  std::vector<JetLabel> pivot_rows;
  std::vector<std::size_t> pivot_columns;
  Series minor{1, 0};
  bool annihilation_verified = false;
  bool independent_at_sample = false;
  int verified_order = 0;
};

inline HoloFieldBasis tangent_holomorphic_fields(const GenericManifold& M, const RankOptions& opt = {}) {
  const std::size_t n = M.n();
  HoloFieldBasis out;
  const auto holo = essential_holo_dimension(M, opt);
  out.n_M = holo.n_M;
  const std::size_t r = static_cast<std::size_t>(holo.n_M);
  if (r >= n) {
    out.annihilation_verified = out.independent_at_sample = true;
    return out;
  }
  const int N = M.order();
  auto Q = segre_mapping(M, N - 1);
  SeriesMatrix A = jacobian(Q.components);
  // pivots at a random point
  std::vector<std::size_t> rows, cols;
  for (std::uint64_t attempt = 0; attempt < 8 && rows.size() < r; ++attempt) {
    const auto pt = detail::random_point(opt.seed, 0x600 + attempt, n);
    Matrix a = evaluate(A, pt);
    rows.clear();
    cols.clear();
    Matrix work;
    std::vector<std::size_t> lead;
    for (std::size_t i = 0; i < a.size() && rows.size() < r; ++i) {
      auto v = a[i];
      for (std::size_t t = 0; t < work.size(); ++t)
        if (!v[lead[t]].is_zero()) {
          const GaussianRational f = v[lead[t]] / work[t][lead[t]];
          for (std::size_t c = 0; c < n; ++c) v[c] -= f * work[t][c];
        }
      std::size_t c = 0;
      while (c < n && v[c].is_zero()) ++c;
      if (c == n) continue;
      work.push_back(v);
      lead.push_back(c);
      rows.push_back(i);
      cols.push_back(c);
    }
  }
  if (rows.size() < r) return out;
  std::sort(cols.begin(), cols.end());
  SeriesMatrix S;
  for (auto i : rows) {
    S.emplace_back();
    for (auto c : cols) S.back().push_back(A[i][c]);
  }
  out.minor = detail::series_det(S);
  if (out.minor.is_zero()) return out;
  for (auto i : rows) out.pivot_rows.push_back(Q.labels[i]);
  out.pivot_columns = cols;
  const bool unit = !out.minor.constant_term().is_zero();
  const Series inv = unit ? invert_unit(out.minor) : Series(n, 0);
  for (std::size_t c = 0; c < n; ++c) {
    if (std::find(cols.begin(), cols.end(), c) != cols.end()) continue;
    SeriesVector a(n, Series(n, out.minor.order()));
    a[c] = out.minor;
    for (std::size_t s = 0; s < r; ++s) {
      SeriesMatrix T = S;
      for (std::size_t q = 0; q < r; ++q) T[q][s] = A[rows[q]][c];
      a[cols[s]] = -detail::series_det(T);
    }
    if (unit)
      for (auto& e : a) e = e * inv;
    out.fields.push_back(a);
  }
  // annihilation of every Theta_{j,beta} within the known order
  out.annihilation_verified = true;
  out.verified_order = N;
  for (const auto& row : A)
    for (const auto& a : out.fields) {
      Series acc = a[0] * row[0];
      for (std::size_t i = 1; i < n; ++i) acc += a[i] * row[i];
      out.verified_order = std::min(out.verified_order, acc.order());
      if (!acc.is_zero()) out.annihilation_verified = false;
    }
  Matrix vals;
  const auto pt = detail::random_point(opt.seed, 0x700, n);
  for (const auto& a : out.fields) {
    vals.emplace_back();
    for (const auto& e : a) vals.back().push_back(evaluate(e, pt));
  }
  out.independent_at_sample = exact_rank(vals) == static_cast<int>(out.fields.size());
  return out;
}

// mubar'_j - Theta'_j(lambdabar', h(t)) in the variables (t, lambdabar', mubar').
inline SeriesVector reflection_mapping(const GenericManifold& Mp, const SeriesVector& h) {
  const std::size_t n = Mp.n(), m = Mp.m(), d = Mp.d();
  if (h.size() != n) throw ManifoldError(ManifoldErrorKind::invalid, "map needs n' components");
  const std::size_t src = h.front().arity();
  const std::size_t A = src + m + d;
  const int N = std::min(Mp.order(), min_order(h, kMaxOrder));
  SeriesVector args;
  for (std::size_t k = 0; k < m; ++k) args.push_back(Series::variable(A, N, src + k));
  for (const auto& c : h) {
    if (c.arity() != src || !c.constant_term().is_zero())
      throw ManifoldError(ManifoldErrorKind::invalid, "map must be a germ at the origin");
    args.push_back(embed(c, A, 0).truncated(N));
  }
  SeriesVector out;
  for (std::size_t j = 0; j < d; ++j)
    out.push_back(Series::variable(A, N, src + m + j) - compose(Mp.theta(j), args));
  return out;
}

namespace detail {

// gbar(zeta, Theta(zeta, t)) - Theta'(fbar(zeta, Theta(zeta, t)), h(t)) on the complexification.
inline SeriesVector fundamental_identity_residual(const GenericManifold& M, const GenericManifold& Mp, const SeriesVector& h) {
  const std::size_t m = M.m(), d = M.d(), mp = Mp.m(), dp = Mp.d();
  if (h.size() != Mp.n()) throw ManifoldError(ManifoldErrorKind::invalid, "map needs n' components");
  SeriesVector tau, t;
  for (std::size_t k = 0; k < m; ++k) tau.push_back(M.zeta(k));
  for (std::size_t j = 0; j < d; ++j) tau.push_back(M.theta(j));
  for (std::size_t k = 0; k < m; ++k) t.push_back(M.z(k));
  for (std::size_t j = 0; j < d; ++j) t.push_back(M.w(j));
  SeriesVector args;
  for (std::size_t k = 0; k < mp; ++k) args.push_back(compose(conjugate_coeffs(h[k]), tau));
  for (const auto& c : h) args.push_back(compose(c, t));
  SeriesVector out;
  for (std::size_t j = 0; j < dp; ++j) out.push_back(compose(conjugate_coeffs(h[mp + j]), tau) - compose(Mp.theta(j), args));
  return out;
}

}  // namespace detail

struct TransformationRuleReport {
  Verdict verdict = Verdict::inconclusive;
  bool maps_M_into_Mp = false;
  int k = 0;
  std::pair<int, int> rank_at_origin{0, 0};
  std::pair<RankVerdict, RankVerdict> generic_rank;
  std::pair<int, int> jet_rank_at_center{0, 0};
  int samples_checked = 0;
  int sample_mismatches = 0;
  bool samples_exact = false;
  std::vector<std::string> violations;
  std::vector<std::string> notes;
};

// Consequences of the transformation rules for an invertible h with h(M) in M':
// equal ranks of Q_k at the origin, equal generic ranks, and equal jet ranks
// at corresponding points of the complexifications.
inline TransformationRuleReport transformation_rule_check(const GenericManifold& M, const GenericManifold& Mp,
                                                          const SeriesVector& h, int k, int samples,
                                                          const RankOptions& opt = {}, bool h_is_polynomial = false) {
  TransformationRuleReport r;
  r.k = k;
  if (M.m() != Mp.m() || M.d() != Mp.d()) throw ManifoldError(ManifoldErrorKind::invalid, "manifolds of different type");
  const std::size_t m = M.m(), n = M.n();
  if (k < 0 || k > std::min(M.order(), Mp.order()) - 1)
    throw ManifoldError(ManifoldErrorKind::invalid, "jet order exceeds the truncation");
  r.maps_M_into_Mp = true;
  for (const auto& s : detail::fundamental_identity_residual(M, Mp, h))
    if (!s.is_zero()) r.maps_M_into_Mp = false;
  if (!r.maps_M_into_Mp) {
    r.verdict = Verdict::no;
    r.violations.push_back("h does not map M into M'");
    return r;
  }
  auto q = segre_mapping(M, k), qp = segre_mapping(Mp, k);
  auto jq = jacobian(q.components), jqp = jacobian(qp.components);
  r.rank_at_origin = {rank_at_origin(jq), rank_at_origin(jqp)};
  if (r.rank_at_origin.first != r.rank_at_origin.second)
    r.violations.push_back("rank at 0 of Q_k: " + std::to_string(r.rank_at_origin.first) + " vs " +
                           std::to_string(r.rank_at_origin.second));
  r.generic_rank = {generic_rank(jq, detail::reseeded(opt, 0x800)), generic_rank(jqp, detail::reseeded(opt, 0x801))};
  const auto& [g, gp] = r.generic_rank;
  if (g.value != gp.value) {
    if (g.certain() && gp.certain())
      r.violations.push_back("generic rank of Q_k: " + std::to_string(g.value) + " vs " + std::to_string(gp.value));
    else
      r.notes.push_back("generic ranks differ as lower bounds only");
  }
  auto J = jet_map(M, k), Jp = jet_map(Mp, k);
  auto jj = jacobian(J.components), jjp = jacobian(Jp.components);
  r.jet_rank_at_center = {rank_at_origin(jj), rank_at_origin(jjp)};
  if (r.jet_rank_at_center.first != r.jet_rank_at_center.second)
    r.violations.push_back("jet rank at the center: " + std::to_string(r.jet_rank_at_center.first) + " vs " +
                           std::to_string(r.jet_rank_at_center.second));
  // corresponding points (zeta, t) -> (fbar(zeta, Theta(zeta, t)), h(t))
  r.samples_exact = M.exact_degree() && Mp.exact_degree() && h_is_polynomial;
  for (int s = 0; s < samples; ++s) {
    const auto x = detail::random_point(opt.seed, 0x900 + static_cast<std::uint64_t>(s), M.arity());
    std::vector<GaussianRational> tau(x.begin(), x.begin() + static_cast<long>(m)), t(x.begin() + static_cast<long>(m), x.end());
    for (std::size_t j = 0; j < M.d(); ++j) tau.push_back(evaluate(M.theta(j), x));
    std::vector<GaussianRational> y;
    for (std::size_t i = 0; i < m; ++i) y.push_back(evaluate(conjugate_coeffs(h[i]), tau));
    for (std::size_t i = 0; i < n; ++i) y.push_back(evaluate(h[i], t));
    const int a = rank_at(jj, x), b = rank_at(jjp, y);
    ++r.samples_checked;
    if (a != b) {
      ++r.sample_mismatches;
      if (r.samples_exact)
        r.violations.push_back("jet rank at a sampled point: " + std::to_string(a) + " vs " + std::to_string(b));
    }
  }
  if (r.sample_mismatches && !r.samples_exact)
    r.notes.push_back("sampled points use truncated data; mismatches are not conclusive");
  r.verdict = r.violations.empty() ? Verdict::yes : Verdict::no;
  return r;
}

}  // namespace crsegre
