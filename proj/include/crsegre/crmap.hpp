#pragma once

// Power-series CR mappings h = (f, g): M -> M' and their nondegeneracy
// conditions. On the complexification everything is written in (zeta, t)
// with xi = Theta(zeta, t); the antiholomorphic frame Lbar_k is then the
// derivative d/dzeta_k at fixed t.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nondegen.hpp"

namespace crsegre {

struct CRMapping {
  GenericManifold source;
  GenericManifold target;
  SeriesVector h;                 // n' series in t = (z, w)
  std::optional<int> h_degree;    // h is exactly the stored polynomial
};

inline void check_mapping_shape(const CRMapping& map) {
  if (map.h.size() != map.target.n())
    throw ManifoldError(ManifoldErrorKind::invalid, "map needs n' = " + std::to_string(map.target.n()) + " components");
  for (const auto& c : map.h) {
    if (c.arity() != map.source.n()) throw ManifoldError(ManifoldErrorKind::invalid, "map components must be series in t");
    if (!c.constant_term().is_zero()) throw ManifoldError(ManifoldErrorKind::invalid, "map must send the origin to the origin");
  }
}

// Builds the mapping of a manifest map block; h is expanded to the smaller
// of the two manifold orders.
inline CRMapping mapping_from_spec(const Manifest& manifest, const MapSpec& spec) {
  const ManifoldSpec* src = manifest.find_manifold(spec.source);
  const ManifoldSpec* tgt = manifest.find_manifold(spec.target);
  if (!src || !tgt) throw ManifoldError(ManifoldErrorKind::invalid, "map '" + spec.name + "' names an unknown manifold");
  CRMapping map{from_spec(*src), from_spec(*tgt), {}, std::nullopt};
  const int order = std::min(map.source.order(), map.target.order());
  const VariableScope scope = holomorphic_scope(static_cast<std::size_t>(src->m), static_cast<std::size_t>(src->d));
  int deg = 0;
  bool poly = true;
  for (const auto& e : spec.components) {
    map.h.push_back(expand_to_series(*e, scope, order));
    const auto k = polynomial_degree(*e);
    if (!k || *k > order) poly = false;
    else deg = std::max(deg, *k);
  }
  if (poly) map.h_degree = deg;
  check_mapping_shape(map);
  return map;
}

struct MapVerification {
  bool pass = false;
  int order = 0;
  std::string first_offense;
};

// The fundamental identity gbar(zeta, Theta) = Theta'(fbar(zeta, Theta), h(t)).
inline MapVerification verify_cr_map(const CRMapping& map) {
  check_mapping_shape(map);
  MapVerification v;
  auto res = detail::fundamental_identity_residual(map.source, map.target, map.h);
  v.pass = true;
  v.order = min_order(res, kMaxOrder);
  for (std::size_t j = 0; j < res.size() && v.pass; ++j)
    if (!res[j].is_zero()) {
      v.pass = false;
      const auto& [a, c] = *res[j].terms().begin();
      v.first_offense = "equation " + std::to_string(j + 1) + ": coefficient " + c.to_string() + " at " +
                        to_string(Series::monomial(res[j].arity(), res[j].order(), a, GaussianRational(1)),
                                  map.source.names());
    }
  return v;
}

// z -> f(z, Thetabar(z, 0)): the restriction of h to the Segre variety of 0.
inline SeriesVector cr_horizontal_part(const CRMapping& map) {
  check_mapping_shape(map);
  const auto& M = map.source;
  const std::size_t m = M.m(), d = M.d();
  const int N = std::min(M.order(), min_order(map.h, kMaxOrder));
  SeriesVector bargs;
  for (std::size_t k = 0; k < m; ++k) bargs.push_back(Series::variable(m, N, k));
  for (std::size_t k = 0; k < m + d; ++k) bargs.push_back(Series(m, N));
  SeriesVector t;
  for (std::size_t k = 0; k < m; ++k) t.push_back(Series::variable(m, N, k));
  const SeriesVector bar = M.theta_bar();
  for (std::size_t j = 0; j < d; ++j) t.push_back(compose(bar[j], bargs));
  SeriesVector out;
  for (std::size_t k = 0; k < map.target.m(); ++k) out.push_back(compose(map.h[k], t));
  return out;
}

namespace detail {

// Terms of f free of the slots from `keep` on, as a series in the first `keep` variables.
inline Series leading_slots(const Series& f, std::size_t keep) {
  Series r(keep, f.order());
  for (const auto& [a, c] : f.terms())
    if (a.slice(keep, f.arity() - keep).degree() == 0) r.set(a.slice(0, keep), c);
  return r;
}

// A nonzero polynomial G of degree <= D with G(p) = 0 up to the known
// order, by exact linear algebra on the coefficients of the powers of p.
inline std::optional<std::vector<std::pair<MultiIndex, GaussianRational>>> annihilator(const SeriesVector& p, int D,
                                                                                          int known_order) {
  const std::size_t k = p.size();
  if (k == 0) return std::nullopt;
  auto mons = monomials_up_to(k, D);
  mons.erase(mons.begin());  // G(0) = 0 is forced by p(0) = 0
  std::vector<Series> cols;
  for (const auto& mu : mons) {
    Series s = Series::constant(p[0].arity(), known_order, GaussianRational(1));
    for (std::size_t i = 0; i < k; ++i)
      if (mu[i]) s = s * power(p[i].truncated(std::min(p[i].order(), known_order)), mu[i]);
    cols.push_back(s.truncated(std::min(s.order(), known_order)));
  }
  // rows: monomials of the source up to known_order; kernel of the column matrix
  std::map<MultiIndex, std::size_t, GrlexLess> rowidx;
  for (const auto& c : cols)
    for (const auto& [a, v] : c.terms()) rowidx.emplace(a, 0);
  std::size_t r = 0;
  for (auto& kv : rowidx) kv.second = r++;
  Matrix A(rowidx.size(), std::vector<GaussianRational>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (const auto& [a, v] : cols[j].terms()) A[rowidx[a]][j] = v;
  // reduced row echelon form, then read one kernel vector
  std::vector<int> pivot_col;
  std::size_t row = 0;
  for (std::size_t c = 0; c < cols.size() && row < A.size(); ++c) {
    std::size_t p = row;
    while (p < A.size() && A[p][c].is_zero()) ++p;
    if (p == A.size()) continue;
    std::swap(A[p], A[row]);
    const GaussianRational inv = GaussianRational(1) / A[row][c];
    for (auto& x : A[row]) x *= inv;
    for (std::size_t q = 0; q < A.size(); ++q)
      if (q != row && !A[q][c].is_zero()) {
        const GaussianRational f = A[q][c];
        for (std::size_t cc = 0; cc < cols.size(); ++cc) A[q][cc] -= f * A[row][cc];
      }
    pivot_col.push_back(static_cast<int>(c));
    ++row;
  }
  std::vector<bool> is_pivot(cols.size(), false);
  for (int c : pivot_col) is_pivot[static_cast<std::size_t>(c)] = true;
  for (std::size_t free = 0; free < cols.size(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<std::pair<MultiIndex, GaussianRational>> G = {{mons[free], GaussianRational(1)}};
    for (std::size_t q = 0; q < pivot_col.size(); ++q)
      if (!A[q][free].is_zero()) G.push_back({mons[static_cast<std::size_t>(pivot_col[q])], -A[q][free]});
    std::sort(G.begin(), G.end(), [](const auto& x, const auto& y) { return GrlexLess{}(x.first, y.first); });
    return G;
  }
  return std::nullopt;
}

inline std::string polynomial_text(const std::vector<std::pair<MultiIndex, GaussianRational>>& G, std::size_t k,
                                   const std::vector<std::string>& names) {
  Series s(k, kMaxOrder);
  for (const auto& [a, c] : G) s.set(a, c);
  return to_string(s, names);
}

}  // namespace detail

struct HorizontalConditions {
  Verdict invertible = Verdict::inconclusive;
  Verdict submersive = Verdict::inconclusive;
  Verdict finite = Verdict::inconclusive;
  Verdict dominating = Verdict::inconclusive;
  Verdict transversal = Verdict::inconclusive;
  std::optional<int> finite_codim;
  int annihilator_degree = 0;  // searched up to this degree
  std::optional<std::string> annihilator;
  bool exact = false;
  bool consistent = true;
  std::vector<std::string> notes;
};

// The five classical conditions on the horizontal part f(z, Thetabar(z, 0)).
inline HorizontalConditions horizontal_conditions(const CRMapping& map, int annihilator_degree = -1,
                                                  const RankOptions& opt = {}) {
  HorizontalConditions r;
  const std::size_t m = map.source.m(), mp = map.target.m();
  const auto D = map.source.exact_degree();
  r.exact = D && map.h_degree;
  SeriesVector hor;
  int P = 0;
  if (r.exact) {
    P = std::max(1, *map.h_degree * *D);
    CRMapping big = map;
    big.source = detail::with_order(map.source, P);
    for (auto& c : big.h) c = promoted(c, std::max(P, c.order()));
    hor = cr_horizontal_part(big);
  } else {
    hor = cr_horizontal_part(map);
  }
  const int N = min_order(hor, kMaxOrder);
  std::vector<std::string> tnames;
  for (std::size_t k = 0; k < mp; ++k) tnames.push_back("z'_" + std::to_string(k + 1));

  auto J = jacobian(hor);
  const int r0 = rank_at_origin(J);
  r.invertible = mp == m ? verdict_of(r0 == static_cast<int>(m)) : Verdict::no;
  r.submersive = m >= mp ? verdict_of(r0 == static_cast<int>(mp)) : Verdict::no;

  // dominating: generic rank m' of the Jacobian
  if (m < mp) {
    r.dominating = Verdict::no;
  } else {
    std::optional<int> exact;
    if (r.exact) exact = detail::exact_polynomial_rank(J, detail::reseeded(opt, 0xa00));
    const int g = exact ? *exact : generic_rank(J, detail::reseeded(opt, 0xa00)).value;
    if (g == static_cast<int>(mp))
      r.dominating = Verdict::yes;
    else if (exact)
      r.dominating = Verdict::no;
  }

  // finite: codimension of <hor> in C{z}
  if (mp < m) {
    r.finite = Verdict::no;
  } else if (r.exact) {
    auto c = detail::exact_codimension(hor, m);
    if (c.codim) {
      r.finite = Verdict::yes;
      r.finite_codim = c.codim;
    } else if (detail::vanishing_curve(hor, m)) {
      r.finite = Verdict::no;
    }
  } else if (N >= 1) {
    auto c = ideal_codimension(hor, m, N + 1);
    if (c.finite) {
      r.finite = Verdict::yes;
      r.finite_codim = c.codim;
    }
  }

  // transversal: dominating maps are; otherwise look for an annihilator
  r.annihilator_degree = annihilator_degree >= 0 ? annihilator_degree : std::max(1, N / 2);
  if (r.dominating == Verdict::yes) {
    r.transversal = Verdict::yes;
  } else {
    int known = N;
    SeriesVector p = hor;
    if (r.exact) {
      known = std::min(kMaxOrder, r.annihilator_degree * std::max(1, P));
      for (auto& s : p) s = promoted(s, known);
    }
    auto G = detail::annihilator(p, r.annihilator_degree, known);
    if (G) {
      r.annihilator = detail::polynomial_text(*G, mp, tnames);
      if (r.exact)
        r.transversal = Verdict::no;
      else
        r.notes.push_back("annihilator holds only up to the truncation order");
    } else {
      r.notes.push_back("no annihilator of degree <= " + std::to_string(r.annihilator_degree));
    }
  }

  // invertible => submersive => dominating => transversal; equidimensional: submersive => finite => dominating
  auto bad = [&](Verdict a, Verdict b) { return a == Verdict::yes && b == Verdict::no; };
  if (bad(r.invertible, r.submersive) || bad(r.submersive, r.dominating) || bad(r.dominating, r.transversal) ||
      (m == mp && (bad(r.submersive, r.finite) || bad(r.finite, r.dominating))))
    r.consistent = false;
  return r;
}

// R'_{j',beta}(zeta, t : t') = Lbar^beta gbar_{j'} - sum_gamma Lbar^beta(fbar^gamma) Theta'_{j',gamma}(t').
struct ReflectionJet {
  std::size_t j = 0;
  MultiIndex beta;
  Series driving{1, 0};                                  // Lbar^beta gbar_{j'}
  std::map<MultiIndex, Series, GrlexLess> coefficients;  // gamma -> Lbar^beta(fbar^gamma)
  bool residual_vanishes = false;                        // with t' = h(t)
  int residual_order = 0;
};

struct ReflectionJetFamily {
  int k_max = 0;
  std::vector<ReflectionJet> jets;
  bool all_residuals_vanish = true;
};

namespace detail {

inline Series zeta_derivative(const Series& f, const MultiIndex& beta, std::size_t m) {
  return scaled_derivative(f, beta, m) * GaussianRational(static_cast<long>(beta.factorial()));
}

// fbar(zeta, Theta(zeta, t)) and gbar(zeta, Theta(zeta, t)) in the slots of Theta.
inline SeriesVector conjugate_map_on_complexification(const GenericManifold& M, const SeriesVector& h) {
  SeriesVector tau;
  for (std::size_t k = 0; k < M.m(); ++k) tau.push_back(M.zeta(k));
  for (std::size_t j = 0; j < M.d(); ++j) tau.push_back(M.theta(j));
  SeriesVector out;
  for (const auto& c : h) out.push_back(compose(conjugate_coeffs(c), tau));
  return out;
}

}  // namespace detail

inline ReflectionJetFamily build_reflection_jets(const CRMapping& map, int k_max) {
  check_mapping_shape(map);
  const auto& M = map.source;
  const auto& Mp = map.target;
  const std::size_t m = M.m(), mp = Mp.m(), dp = Mp.d(), A = M.arity();
  const int N = std::min({M.order(), Mp.order(), min_order(map.h, kMaxOrder)});
  if (k_max < 0 || k_max > N - 1) throw ManifoldError(ManifoldErrorKind::invalid, "reflection jet order out of range");
  ReflectionJetFamily fam;
  fam.k_max = k_max;
  const SeriesVector Hb = detail::conjugate_map_on_complexification(M, map.h);
  const SeriesVector F(Hb.begin(), Hb.begin() + static_cast<long>(mp));
  const auto tcp = theta_coefficients(Mp);
  // Theta'_{j',gamma}(h(t)) as series in (zeta, t)
  SeriesVector hz;
  for (const auto& c : map.h) hz.push_back(embed(c, A, m));
  const int G = std::min(N, Mp.order());
  std::map<MultiIndex, Series, GrlexLess> Fpow;
  for (const auto& g : monomials_up_to(mp, G)) {
    Series s = Series::constant(A, N, GaussianRational(1));
    for (std::size_t i = 0; i < mp; ++i)
      if (g[i]) s = s * power(F[i], g[i]);
    Fpow.emplace(g, s);
  }
  for (std::size_t j = 0; j < dp; ++j) {
    std::map<MultiIndex, Series, GrlexLess> theta_h;
    for (const auto& g : monomials_up_to(mp, G)) {
      const Series tj = tcp.get(j, g);
      theta_h.emplace(g, tj.order() >= 0 ? compose(tj, hz) : Series(A, 0));
    }
    for (const auto& beta : monomials_up_to(m, k_max)) {
      ReflectionJet R;
      R.j = j;
      R.beta = beta;
      R.driving = detail::zeta_derivative(Hb[mp + j], beta, m);
      Series res = R.driving;
      for (const auto& [g, s] : Fpow) {
        Series c = detail::zeta_derivative(s, beta, m);
        if (c.is_zero()) continue;
        res -= c * theta_h.at(g);
        R.coefficients.emplace(g, std::move(c));
      }
      // terms with |gamma| > G have valuation > G - |beta|
      R.residual_order = std::max(0, std::min(res.order(), G - beta.degree()));
      R.residual_vanishes = res.truncated(R.residual_order).is_zero();
      fam.all_residuals_vanish = fam.all_residuals_vanish && R.residual_vanishes;
      fam.jets.push_back(std::move(R));
    }
  }
  return fam;
}

// Psi'_{j',beta}(t') = R'_{j',beta}(0, 0 : t') read off a reflection jet family.
inline Series psi_from_jet(const ReflectionJet& R, const GenericManifold& Mp) {
  const auto tcp = theta_coefficients(Mp);
  Series out = Series::constant(Mp.n(), Mp.order(), R.driving.constant_term());
  for (const auto& [g, c] : R.coefficients) {
    const GaussianRational c0 = c.constant_term();
    if (!c0.is_zero()) out -= tcp.get(R.j, g) * c0;
  }
  return out;
}

// The same source and target in normal coordinates, with the map conjugated.
struct NormalizedMapping {
  CRMapping map;
  bool identity = true;
  SeriesVector source_change, target_change;
};

inline NormalizedMapping normalized_mapping(const CRMapping& map) {
  check_mapping_shape(map);
  NormalizedMapping out{map, true, {}, {}};
  auto ns = to_normal_coordinates(map.source);
  auto nt = to_normal_coordinates(map.target);
  out.source_change = ns.change;
  out.target_change = nt.change;
  out.identity = ns.identity && nt.identity;
  if (out.identity) return out;
  out.map.source = ns.manifold;
  out.map.target = nt.manifold;
  const SeriesVector inv = invert_map(ns.change);
  out.map.h = compose(nt.change, compose(map.h, inv));
  // linear changes on both sides keep a polynomial h of the same degree
  if (!is_linear_change(ns.change) || !is_linear_change(nt.change)) out.map.h_degree.reset();
  return out;
}

struct MapClassification {
  HorizontalConditions horizontal;
  ConditionVerdict levi, finite, segre_finite, segre_nondegenerate, holomorphic;  // ell0 holds ell_1
  std::optional<int> segre_finite_codim;
  std::optional<int> segre_rank;  // generic rank of the Segre-variety determinant block
  bool exact = false;
  bool normalization_identity = true;
  bool dimension_warning = false;  // d'(m + 1) < n'
  std::vector<std::string> notes;
};

// The five Segre-type conditions of the map, decided in normal coordinates.
inline MapClassification map_five_conditions(const CRMapping& input, const RankOptions& opt = {},
                                             int annihilator_degree = -1) {
  MapClassification r;
  auto nm = normalized_mapping(input);
  r.normalization_identity = nm.identity;
  CRMapping map = nm.map;
  r.horizontal = horizontal_conditions(map, annihilator_degree, opt);
  const std::size_t m = map.source.m(), n = map.source.n(), mp = map.target.m(), dp = map.target.d(), np = map.target.n();
  r.dimension_warning = dp * (m + 1) < np;
  const auto D = map.source.exact_degree(), Dp = map.target.exact_degree();
  r.exact = D && Dp && map.h_degree;
  int Pbig = 0;
  if (r.exact) {
    const long bound = static_cast<long>(*Dp) * std::max(1, *map.h_degree) * (*D + 1) + 1;
    if (bound > 60) {
      r.exact = false;
      r.notes.push_back("polynomial degrees too large for exact map decisions");
    } else {
      Pbig = static_cast<int>(bound);
    }
  }
  GenericManifold M = r.exact ? detail::with_order(map.source, Pbig) : map.source;
  GenericManifold Mp = r.exact ? detail::with_order(map.target, Pbig) : map.target;
  SeriesVector h = map.h;
  if (r.exact)
    for (auto& c : h) c = promoted(c, Pbig);
  const int N = std::min({M.order(), Mp.order(), min_order(h, kMaxOrder)});

  const SeriesVector Hb = detail::conjugate_map_on_complexification(M, h);
  // restrictions: A(zeta) = fbar(zeta, Theta(zeta, 0)), Fz = fbar(zeta, Theta(zeta, z, 0)), B = gbar(zeta, Theta(zeta, 0))
  SeriesVector Aser, Fz, Bser;
  for (std::size_t i = 0; i < mp; ++i) {
    Aser.push_back(detail::leading_slots(Hb[i], m));
    Fz.push_back(detail::leading_slots(Hb[i], 2 * m));
  }
  for (std::size_t j = 0; j < dp; ++j) Bser.push_back(detail::leading_slots(Hb[mp + j], m));
  int degF = 1;
  for (const auto& s : Fz) degF = std::max(degF, s.max_degree());
  const int Lmax = r.exact ? std::min(N - 1, *Dp * degF) : N - 1;
  const int Gmax = r.exact ? std::min(*Dp, Lmax) : Lmax;
  const auto tcp = theta_coefficients(Mp);

  // powers of A and Fz by gamma
  std::map<MultiIndex, Series, GrlexLess> Apow, Fpow;
  for (const auto& g : monomials_up_to(mp, Gmax)) {
    Series a = Series::constant(m, N, GaussianRational(1)), f = Series::constant(2 * m, N, GaussianRational(1));
    for (std::size_t i = 0; i < mp; ++i)
      if (g[i]) {
        a = a * power(Aser[i], g[i]);
        f = f * power(Fz[i], g[i]);
      }
    Apow.emplace(g, a);
    Fpow.emplace(g, f);
  }
  // H0 = h(z, 0) and h(t) for composing d Theta'_gamma / d t'
  SeriesVector H0;
  {
    SeriesVector args;
    for (std::size_t k = 0; k < m; ++k) args.push_back(Series::variable(m, N, k));
    for (std::size_t j = 0; j < map.source.d(); ++j) args.push_back(Series(m, N));
    for (const auto& c : h) H0.push_back(compose(c, args));
  }
  std::vector<std::map<MultiIndex, SeriesVector, GrlexLess>> grad_cache(dp);
  auto grad = [&](std::size_t j, const MultiIndex& g) -> const SeriesVector& {
    auto it = grad_cache[j].find(g);
    if (it != grad_cache[j].end()) return it->second;
    SeriesVector gv;
    const Series th = tcp.get(j, g);
    for (std::size_t i = 0; i < np; ++i) gv.push_back(th.order() >= 1 ? partial_derivative(th, i) : Series(np, 0));
    return grad_cache[j].emplace(g, gv).first->second;
  };

  // Psi'_{j',beta}(t') and the rows of the two determinant conditions, by |beta|
  struct Row {
    Series psi;
    std::vector<Series> segre;  // entries in z
    std::vector<Series> holo;   // entries in t
  };
  std::vector<std::vector<Row>> by_level(static_cast<std::size_t>(Lmax + 1));
  for (int L = 0; L <= Lmax; ++L)
    for (std::size_t j = 0; j < dp; ++j)
      for (const auto& beta : monomials_up_to(m, L)) {
        if (beta.degree() != L) continue;
        const GaussianRational bf(static_cast<long>(beta.factorial()));
        Row row;
        row.psi = Series::constant(np, Mp.order(), Bser[j].coeff(beta) * bf);
        row.segre.assign(np, Series(m, N));
        row.holo.assign(np, Series(n, N));
        bool first = true;
        for (const auto& [g, apow] : Apow) {
          if (g.degree() > L) break;
          const GaussianRational c0 = apow.coeff(beta) * bf;
          const Series cz = leading_coefficient(Fpow.at(g), m, beta) * bf;
          if (c0.is_zero() && cz.is_zero()) continue;
          const SeriesVector& gv = grad(j, g);
          if (!c0.is_zero()) row.psi -= tcp.get(j, g) * c0;
          for (std::size_t i = 0; i < np; ++i) {
            if (gv[i].is_zero()) continue;
            if (!cz.is_zero()) {
              Series e = cz * compose(gv[i], H0);
              row.segre[i] = first && row.segre[i].is_zero() ? e : row.segre[i] + e;
            }
            if (!c0.is_zero()) row.holo[i] += compose(gv[i], h) * c0;
          }
          first = false;
        }
        by_level[static_cast<std::size_t>(L)].push_back(std::move(row));
      }

  // (1) and (2): rank n' at the origin of (Psi'_{j',beta})_{|beta| <= l}
  {
    Matrix rows;
    for (int L = 0; L <= Lmax; ++L) {
      for (const auto& row : by_level[static_cast<std::size_t>(L)]) rows.push_back(detail::linear_row(row.psi));
      const bool full = exact_rank(rows) == static_cast<int>(np);
      if (L == 1) r.levi.verdict = verdict_of(full);
      if (full && r.finite.verdict != Verdict::yes) {
        r.finite.verdict = Verdict::yes;
        r.finite.ell0 = L;
        r.finite.ell0_exact = true;
        r.finite.basis = "rank n' at the origin";
        if (L == 1) {
          r.levi.ell0 = 1;
          r.levi.ell0_exact = true;
        }
      }
    }
    if (Lmax < 1) r.levi.verdict = Verdict::inconclusive;
    if (r.finite.verdict != Verdict::yes && r.exact) {
      r.finite.verdict = Verdict::no;
      r.finite.basis = "rank stays below n' with all coefficients known";
    }
  }

  // (3) Segre finite: finite codimension of <Psi' - Psi'(0)> in C{t'}
  {
    SeriesVector gens;
    bool prior_infinite = true;
    for (int L = 0; L <= Lmax; ++L) {
      for (const auto& row : by_level[static_cast<std::size_t>(L)]) {
        Series g = row.psi;
        g.set(MultiIndex(), GaussianRational(0));
        if (!g.is_zero()) gens.push_back(g);
      }
      std::optional<int> codim;
      if (r.exact) {
        codim = detail::exact_codimension(gens, np).codim;
      } else if (Mp.order() - L + 1 >= 2) {
        SeriesVector tg;
        for (const auto& g : gens) tg.push_back(g.truncated(std::min(g.order(), Mp.order() - L)));
        auto c = ideal_codimension(tg, np, Mp.order() - L + 1);
        if (c.finite) codim = c.codim;
      }
      if (codim) {
        if (r.segre_finite.verdict != Verdict::yes) {
          r.segre_finite.verdict = Verdict::yes;
          r.segre_finite.ell0 = L;
          r.segre_finite.ell0_exact = r.exact && prior_infinite;
          r.segre_finite.basis = "quotient dimension stabilizes";
        }
        r.segre_finite_codim = codim;
      } else if (r.exact && prior_infinite) {
        prior_infinite = detail::vanishing_curve(gens, np).has_value();
      }
    }
    if (r.segre_finite.verdict != Verdict::yes && r.exact) {
      if (auto w = detail::vanishing_curve(gens, np)) {
        r.segre_finite.verdict = Verdict::no;
        r.segre_finite.basis = "generators vanish on the curve " + *w;
      }
    }
  }

  // (4) and (5): generic rank n' of the gradients along S_0 and along h(t)
  auto decide_rank = [&](ConditionVerdict& out, bool segre, std::uint64_t salt) {
    SeriesMatrix mat;
    bool prior_exact = true;
    for (int L = 0; L <= Lmax; ++L) {
      for (const auto& row : by_level[static_cast<std::size_t>(L)]) {
        const auto& entries = segre ? row.segre : row.holo;
        if (std::any_of(entries.begin(), entries.end(), [](const Series& s) { return !s.is_zero(); }))
          mat.push_back(entries);
      }
      if (mat.empty()) continue;
      const auto o = detail::reseeded(opt, salt + static_cast<std::uint64_t>(L));
      std::optional<int> exact;
      if (r.exact) exact = detail::exact_polynomial_rank(mat, o);
      const int value = exact ? *exact : generic_rank(mat, o).value;
      if (segre) r.segre_rank = value;
      if (value == static_cast<int>(np)) {
        out.verdict = Verdict::yes;
        out.ell0 = L;
        out.ell0_exact = prior_exact;
        out.basis = segre ? "determinant along the Segre variety of 0" : "determinant along h(t)";
        return;
      }
      prior_exact = prior_exact && exact.has_value();
    }
    if (r.exact && prior_exact) {
      out.verdict = Verdict::no;
      out.basis = "exact generic rank below n' with all coefficients known";
    }
  };
  decide_rank(r.segre_nondegenerate, true, 0xb00);
  decide_rank(r.holomorphic, false, 0xc00);
  if (r.dimension_warning) r.notes.push_back("d'(m + 1) < n': Levi nondegeneracy of the map is impossible");
  return r;
}

// Necessary conditions: map condition => target condition, and for
// CR-transversal maps, target condition => map condition.
struct TransferReport {
  int checked = 0;
  int skipped = 0;
  bool cr_transversal = false;
  Verdict h_transversal = Verdict::inconclusive;
  std::vector<std::string> violations;
};

inline TransferReport necessary_and_transfer_checks(const CRMapping& map, const MapClassification& mc,
                                                    const ClassificationReport& target, const RankOptions& opt = {}) {
  TransferReport t;
  auto implication = [&](const std::string& name, const ConditionVerdict& a, const ConditionVerdict& b, int relation) {
    // relation: -1 requires ell(b) <= ell(a), +1 requires ell(b) >= ell(a), 0 no ell check
    if (a.verdict != Verdict::yes) return;
    if (b.verdict == Verdict::inconclusive) {
      ++t.skipped;
      return;
    }
    ++t.checked;
    if (b.verdict == Verdict::no) {
      t.violations.push_back(name + ": consequent fails");
      return;
    }
    if (relation && a.ell0 && b.ell0 && a.ell0_exact && b.ell0_exact) {
      if (relation < 0 && *b.ell0 > *a.ell0) t.violations.push_back(name + ": target type exceeds the map type");
      if (relation > 0 && *b.ell0 < *a.ell0) t.violations.push_back(name + ": map type below the target type");
    }
  };
  ConditionVerdict tlevi;
  tlevi.verdict = target.levi;
  if (target.levi == Verdict::yes) {
    tlevi.ell0 = 1;
    tlevi.ell0_exact = true;
  }
  implication("levi => target levi", mc.levi, tlevi, 0);
  implication("finite => target finite", mc.finite, target.finite, -1);
  implication("segre finite => target essentially finite", mc.segre_finite, target.essentially_finite, -1);
  implication("segre nondegenerate => target segre", mc.segre_nondegenerate, target.segre, -1);
  implication("holomorphic => target holomorphic", mc.holomorphic, target.holomorphic, -1);

  t.cr_transversal = mc.horizontal.transversal == Verdict::yes;
  if (!t.cr_transversal) return t;
  // h itself: dominating implies transversal
  {
    auto J = jacobian(map.h);
    const int g = generic_rank(J, detail::reseeded(opt, 0xd00)).value;
    if (g == static_cast<int>(map.target.n())) t.h_transversal = Verdict::yes;
  }
  implication("target levi => map finite", tlevi, mc.finite, 0);
  if (target.levi == Verdict::yes && mc.finite.verdict == Verdict::yes && mc.finite.ell0 && *mc.finite.ell0 < 1)
    t.violations.push_back("target levi => map finite: ell_1 below 1");
  implication("target finite => map finite", target.finite, mc.finite, +1);
  implication("target essentially finite => map segre finite", target.essentially_finite, mc.segre_finite, +1);
  implication("target segre => map segre nondegenerate", target.segre, mc.segre_nondegenerate, +1);
  if (t.h_transversal == Verdict::yes)
    implication("target holomorphic => map holomorphic", target.holomorphic, mc.holomorphic, +1);
  return t;
}

}  // namespace crsegre
