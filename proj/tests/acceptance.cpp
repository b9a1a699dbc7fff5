// Acceptance run: one PASS/FAIL line per criterion. Derived values are
// checked against oracles written here independently of the library code
// that produces them.

#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "crsegre/crsegre.hpp"

using namespace crsegre;
using Q = GaussianRational;

namespace {

const Q I = Q::i();

struct Outcome {
  bool pass = true;
  std::vector<std::string> failures;
  std::string summary;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (failures.size() < 5) failures.push_back(what);
    }
  }
};

GenericManifold make(std::size_t m, std::size_t d, const std::vector<std::string>& eqs, int order = 12) {
  ManifoldSpec s;
  s.m = static_cast<int>(m);
  s.d = static_cast<int>(d);
  s.order = order;
  s.style = EquationStyle::complex_defining;
  for (const auto& e : eqs) s.equations.push_back(parse_expr(e));
  return from_complex_equations(s);
}

ManifoldSpec real_spec(std::size_t m, std::size_t d, const std::vector<std::string>& eqs, int order) {
  ManifoldSpec s;
  s.m = static_cast<int>(m);
  s.d = static_cast<int>(d);
  s.order = order;
  s.style = EquationStyle::real_graph;
  for (const auto& e : eqs) s.equations.push_back(parse_expr(e));
  return s;
}

Series mt(std::size_t k, const std::string& e, int order = 12) { return expand_to_series(e, holomorphic_scope(k, 0), order); }

std::string qs(long v) { return std::to_string(v); }

// Random hermitian-symmetric P(z, zbar) with rational coefficients; the
// hypersurface is wbar = w + I*P.
std::string random_hermitian(std::mt19937_64& rng, std::size_t m, int max_deg) {
  auto zmono = [&](const std::string& base, const std::vector<int>& e) {
    std::string s;
    for (std::size_t k = 0; k < m; ++k)
      if (e[k]) s += "*" + base + (m == 1 ? "" : "_" + std::to_string(k + 1)) + "^" + std::to_string(e[k]);
    return s;
  };
  std::string P;
  const int terms = 1 + static_cast<int>(rng() % 3);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> a(m), b(m);
    int da = 0, db = 0;
    while (da == 0 || db == 0 || da + db > max_deg) {
      da = db = 0;
      for (std::size_t k = 0; k < m; ++k) {
        a[k] = static_cast<int>(rng() % 3);
        b[k] = static_cast<int>(rng() % 3);
        da += a[k];
        db += b[k];
      }
    }
    const long c = 1 + static_cast<long>(rng() % 3);
    const std::string s = qs(c) + "*(1" + zmono("z", a) + zmono("zbar", b) + " + 1" + zmono("z", b) + zmono("zbar", a) + ")";
    P += (P.empty() ? "" : " + ") + s;
  }
  return "w + I*(" + P + ")";
}

std::vector<GenericManifold> corpus() {
  std::vector<GenericManifold> c = {
      make(1, 1, {"w - 2*I*z*zbar"}),
      make(1, 1, {"w"}),
      make(1, 1, {"w - I*z^2*zbar^2"}),
      make(1, 1, {"w + I*(z^5*zbar + zbar^5*z)"}),
      make(2, 1, {"w + I*(z_1*zbar_1 + z_1^2*zbar_2 + zbar_1^2*z_2)"}, 8),
      make(3, 1, {"w + I*(z_1*zbar_1 + z_1^2*zbar_2 + zbar_1^2*z_2 + z_1^3*zbar_3 + zbar_1^3*z_3)"}, 8),
      make(1, 1, {"w + I*z^2*zbar^2"}),
      make(2, 1, {"w + I*(z_1^3*zbar_1^3 + z_2^4*zbar_2^4)"}, 8),
      make(2, 1, {"-2*I*z_1*zbar_1*(1 + z_1*zbar_2) + w*(1 + z_1*zbar_2)/(1 + zbar_1*z_2)"}, 10),
      make(2, 1, {"w + I*z_1*zbar_1*(1 + z_2*zbar_2)"}, 8),
      make(2, 1, {"w + I*(2*z_1*zbar_1 + z_1^2*zbar_2 + zbar_1^2*z_2)"}, 8),
      make(1, 2, {"w_1 - 2*I*z*zbar", "w_2 - I*(z^2*zbar + z*zbar^2)"}, 8),
  };
  return c;
}

// Number of monomials in `arity` variables outside the monomial ideal.
int staircase(const std::vector<std::vector<int>>& gens, std::size_t arity, int max_deg) {
  int count = 0;
  std::vector<int> e(arity, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i == arity) {
      for (const auto& g : gens) {
        bool div = true;
        for (std::size_t k = 0; k < arity; ++k) div = div && g[k] <= e[k];
        if (div) return;
      }
      ++count;
      return;
    }
    for (int x = 0; x <= left; ++x) {
      e[i] = x;
      rec(i + 1, left - x);
    }
    e[i] = 0;
  };
  rec(0, max_deg);
  return count;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  auto M = make(1, 1, {"w - I*z^2*zbar^2"});
  auto expect = [&](int k, const std::vector<std::string>& comps) {
    auto c = gamma_k(M, k).components();
    o.check(c.size() == comps.size(), "Gamma_" + std::to_string(k) + " size");
    for (std::size_t i = 0; i < c.size() && i < comps.size(); ++i)
      o.check(c[i] == mt(static_cast<std::size_t>(k), comps[i]),
              "Gamma_" + std::to_string(k) + " component " + std::to_string(i));
  };
  const std::string w3 = "I*z_2^2*(z_3^2 + 2*z_1*z_3)";
  const std::string xi4 = w3 + " - I*((z_2 + z_4)*(z_1 + z_3))^2";
  expect(1, {"z_1", "0", "0", "0"});
  expect(2, {"z_1", "0", "z_2", "-I*z_1^2*z_2^2"});
  expect(3, {"z_1 + z_3", w3, "z_2", "-I*z_1^2*z_2^2"});
  expect(4, {"z_1 + z_3", w3, "z_2 + z_4", xi4});
  expect(5, {"z_1 + z_3 + z_5", xi4 + " + I*((z_1 + z_3 + z_5)*(z_2 + z_4))^2", "z_2 + z_4", xi4});

  // the leading minor of Jac Gamma_5 in the (zeta, xi, z) chart at the palindromic point
  auto g5 = gamma_k(M, 5);
  auto chart = chain_chart(g5, 5);
  const std::vector<Q> pt = {Q(1), Q(1), Q(0), Q(-1), Q(-1)};
  for (const auto& c : g5.components()) o.check(evaluate(c, pt).is_zero(), "Gamma_5 vanishes at the point");
  Matrix J = evaluate(jacobian(chart), pt);
  Matrix lead(3, std::vector<Q>(3));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) lead[i][j] = J[i][j];
  // oracle: cofactor expansion
  const Q det = lead[0][0] * (lead[1][1] * lead[2][2] - lead[1][2] * lead[2][1]) -
                lead[0][1] * (lead[1][0] * lead[2][2] - lead[1][2] * lead[2][0]) +
                lead[0][2] * (lead[1][0] * lead[2][1] - lead[1][1] * lead[2][0]);
  o.check(det == Q(2) * I, "leading minor " + det.to_string() + " != 2*I");
  o.check(evaluate_slice(M, 5, pt).leading_minor == Q(2) * I, "library minor at the palindromic point");

  // Gamma_4 at its zeros (0, b, 0, -b) and (a, 0, -a, 0) has rank 2, never 3
  auto g4 = gamma_k(M, 4);
  auto J4 = jacobian(chain_chart(g4, 4));
  std::mt19937_64 rng(11);
  int points = 0;
  for (int it = 0; it < 30; ++it) {
    Q a = Q(static_cast<long>(rng() % 11) - 5) + I * Q(static_cast<long>(rng() % 7) - 3);
    if (a.is_zero()) a = Q(2);
    for (const auto& p : {std::vector<Q>{Q(0), a, Q(0), -a}, std::vector<Q>{a, Q(0), -a, Q(0)}}) {
      for (const auto& c : g4.components()) o.check(evaluate(c, p).is_zero(), "Gamma_4 zero");
      o.check(rank_at(J4, p) == 2, "Gamma_4 rank " + std::to_string(rank_at(J4, p)));
      ++points;
    }
  }
  o.summary = "Gamma_1..5 exact, minor 2i, Gamma_4 rank 2 at " + std::to_string(points) + " zero points";
  return o;
}

Outcome criterion2() {
  Outcome o;
  auto flat = segre_type(make(1, 1, {"w"}));
  auto heis = segre_type(make(1, 1, {"w - 2*I*z*zbar"}));
  auto ex = segre_type(make(1, 1, {"w - I*z^2*zbar^2"}));
  o.check(flat.mu0 == 2 && flat.minimal == Verdict::no, "Levi-flat mu0 " + std::to_string(flat.mu0));
  o.check(heis.mu0 == 3 && heis.minimal == Verdict::yes, "Heisenberg mu0 " + std::to_string(heis.mu0));
  o.check(ex.mu0 == 3 && ex.minimal == Verdict::yes, "chain example mu0 " + std::to_string(ex.mu0));
  o.check(heis.orbit_dim == 3 && flat.orbit_dim == 2, "orbit dimensions");
  o.summary = "flat mu0=" + std::to_string(flat.mu0) + " nonminimal; Heisenberg mu0=" + std::to_string(heis.mu0) +
              ", example mu0=" + std::to_string(ex.mu0) + " minimal";
  return o;
}

Outcome criterion3() {
  Outcome o;
  struct Case {
    std::size_t m;
    std::string eq;
    int ell0;
  };
  const std::vector<Case> cases = {
      {1, "w + I*(z^5*zbar + zbar^5*z)", 5},
      {2, "w + I*(z_1*zbar_1 + z_1^2*zbar_2 + zbar_1^2*z_2)", 2},
      {3, "w + I*(z_1*zbar_1 + z_1^2*zbar_2 + zbar_1^2*z_2 + z_1^3*zbar_3 + zbar_1^3*z_3)", 3},
  };
  std::string got;
  for (const auto& c : cases) {
    auto M = make(c.m, 1, {c.eq}, 8);
    auto r = classify_at_origin(M);
    o.check(r.finite.verdict == Verdict::yes && r.finite.ell0 == c.ell0 && r.finite.ell0_exact, c.eq);
    // oracle: first k with span of d/dt Theta_beta(0), |beta| <= k, equal to C^n
    const auto tc = theta_coefficients(M);
    int first = -1;
    for (int k = 0; k <= 6 && first < 0; ++k) {
      Matrix rows;
      for (const auto& b : monomials_up_to(c.m, k)) {
        const Series th = tc.get(0, b);
        std::vector<Q> row;
        for (std::size_t i = 0; i < M.n(); ++i) row.push_back(th.coeff(MultiIndex::unit(i)));
        rows.push_back(row);
      }
      if (exact_rank(rows) == static_cast<int>(M.n())) first = k;
    }
    o.check(first == c.ell0, "oracle ell0 " + std::to_string(first));
    got += (got.empty() ? "" : "/") + (r.finite.ell0 ? std::to_string(*r.finite.ell0) : "?");
  }
  auto z2 = classify_at_origin(make(1, 1, {"w + I*z^2*zbar^2"}, 8));
  o.check(z2.finite.verdict == Verdict::no, "z^2 zbar^2 finitely nondegenerate verdict");
  o.check(z2.essentially_finite.verdict == Verdict::yes, "z^2 zbar^2 essentially finite verdict");
  o.summary = "ell0 = " + got + "; z^2 zbar^2: finite " + to_string(z2.finite.verdict) + ", essentially finite " +
              to_string(z2.essentially_finite.verdict);
  return o;
}

Outcome criterion4() {
  Outcome o;
  std::string got;
  for (int N : {2, 3, 4}) {
    auto r = classify_at_origin(make(1, 1, {"w + I*z^" + qs(N) + "*zbar^" + qs(N)}, 2 * N));
    const int oracle = staircase({{N}}, 1, 3 * N);
    const auto& e = r.essential_type;
    o.check(e.value == oracle, "essential type of z^N zbar^N, N = " + qs(N));
    o.check(e.dim_low == e.dim_high && e.dim_high == oracle, "stabilization for N = " + qs(N));
    got += (e.value ? std::to_string(*e.value) : "?") + ",";
  }
  auto r = classify_at_origin(make(2, 1, {"w + I*(z_1^3*zbar_1^3 + z_2^4*zbar_2^4)"}, 8));
  const int oracle = staircase({{3, 0}, {0, 4}}, 2, 12);
  o.check(oracle == 12, "staircase oracle for (z_1^3, z_2^4)");
  o.check(r.essential_type.value == 12, "essential type of the two-term example");
  o.check(r.essential_type.dim_low == r.essential_type.dim_high && r.essential_type.dim_high == 12,
          "stabilization at two consecutive truncations");
  got += r.essential_type.value ? std::to_string(*r.essential_type.value) : "?";
  o.summary = "epsilon_1 = " + got + " (staircase oracle 2,3,4,12)";
  return o;
}

Outcome criterion5() {
  Outcome o;
  auto split = classify_at_origin(
      make(2, 1, {"-2*I*z_1*zbar_1*(1 + z_1*zbar_2) + w*(1 + z_1*zbar_2)/(1 + zbar_1*z_2)"}, 10));
  o.check(split.holomorphic.verdict == Verdict::yes, "split: holomorphically nondegenerate");
  o.check(split.segre.verdict == Verdict::no, "split: not Segre nondegenerate");
  o.check(split.restricted_generic_rank == 1 && split.restricted_rank_exact, "split: restricted generic rank 1");
  // oracle: on S_0 the jets reduce to (-2i z_1, -2i z_1^2), whose Jacobian has rank 1
  SeriesVector q = {mt(2, "-2*I*z_1"), mt(2, "-2*I*z_1^2")};
  o.check(symbolic_generic_rank(jacobian(q)) == 1, "oracle rank");
  auto prod = classify_at_origin(make(2, 1, {"w + I*z_1*zbar_1*(1 + z_2*zbar_2)"}, 8));
  o.check(prod.segre.verdict == Verdict::yes, "product: Segre nondegenerate");
  o.check(prod.essentially_finite.verdict == Verdict::no, "product: not essentially finite");
  o.summary = "split: holo " + std::string(to_string(split.holomorphic.verdict)) + ", segre " +
              to_string(split.segre.verdict) + ", rank " +
              (split.restricted_generic_rank ? std::to_string(*split.restricted_generic_rank) : "?") +
              "; z1 zbar1 (1 + z2 zbar2): segre " + to_string(prod.segre.verdict) + ", essentially finite " +
              to_string(prod.essentially_finite.verdict);
  return o;
}

Outcome criterion6() {
  Outcome o;
  auto M = make(2, 1, {"w + I*(2*z_1*zbar_1 + z_1^2*zbar_2 + zbar_1^2*z_2)"}, 8);
  // oracle Levi matrix of P = 2 z1 zbar1 + z1^2 zbar2 + zbar1^2 z2 in the (zbar, z, w) slots
  const Series P = expand_to_series("2*z_1*zbar_1 + z_1^2*zbar_2 + zbar_1^2*z_2", complex_scope(2, 1), 8);
  SeriesMatrix H(2, std::vector<Series>(2));
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t k = 0; k < 2; ++k) H[j][k] = partial_derivative(partial_derivative(P, 2 + j), k);
  auto levi_rank = [&](const SurfacePoint& p) {
    std::vector<Q> pt = p.zbar();
    for (const auto& x : p.t) pt.push_back(x);
    return rank_at(H, pt);
  };
  auto p0 = surface_point(M, {Q(0), Q(0)}, {Q(0)});
  auto r0 = classify_at_point(M, p0);
  o.check(r0.levi == Verdict::no, "Levi degenerate at the origin");
  o.check(r0.ranks.size() >= 2 && r0.ranks[1] == 2, "Q_1 rank 2 at the origin");
  o.check(levi_rank(p0) == 1, "oracle Levi rank 1 at the origin");
  std::mt19937_64 rng(31);
  int nondeg = 0, deg = 0;
  for (int it = 0; it < 12; ++it) {
    auto small = [&] { return Q::ratio(static_cast<long>(rng() % 9) - 4, 8 + static_cast<long>(rng() % 5)); };
    Q z1 = small() + I * small(), z2 = small() + I * small(), u = small();
    if (it % 4 == 3) z1 = Q(0);
    auto p = surface_point(M, {z1, z2}, {u});
    auto r = classify_at_point(M, p);
    const bool oracle_nondeg = levi_rank(p) == 2;
    o.check(oracle_nondeg == !z1.is_zero(), "oracle Levi matrix rank pattern");
    o.check(r.levi == verdict_of(oracle_nondeg) || (!oracle_nondeg && r.levi == Verdict::inconclusive),
            "Levi verdict at sampled point");
    (oracle_nondeg ? nondeg : deg)++;
  }
  o.summary = "origin Levi degenerate (Q_1 rank 2); " + std::to_string(nondeg) + " points with z_1 != 0 Levi nondegenerate, " +
              std::to_string(deg) + " points with z_1 = 0 degenerate";
  return o;
}

Outcome criterion7() {
  Outcome o;
  std::mt19937_64 rng(7007);
  int manifolds = 0, changes = 0;
  while (manifolds < 20) {
    const std::size_t m = 1 + rng() % 2;
    const std::string eq = random_hermitian(rng, m, m == 1 ? 5 : 4);
    GenericManifold M = make(m, 1, {eq}, 8);
    auto base = classify_at_origin(M);
    auto base_holo = essential_holo_dimension(M);
    ++manifolds;
    for (int c = 0; c < 5; ++c) {
      // block-triangular linear change z' = A z, w' = B z + r w keeps Theta polynomial of the same degree
      const std::size_t n = M.n();
      Matrix A;
      do {
        A.assign(m, std::vector<Q>(m));
        for (auto& row : A)
          for (auto& x : row) x = Q(static_cast<long>(rng() % 5) - 2) + I * Q(static_cast<long>(rng() % 3) - 1);
      } while (exact_rank(A) != static_cast<int>(m));
      const Q r(1 + static_cast<long>(rng() % 3));
      SeriesVector h;
      for (std::size_t i = 0; i < m; ++i) {
        Series s(n, 8);
        for (std::size_t j = 0; j < m; ++j) s += Series::variable(n, 8, j) * A[i][j];
        h.push_back(s);
      }
      Series g = Series::variable(n, 8, m) * r;
      for (std::size_t j = 0; j < m; ++j) g += Series::variable(n, 8, j) * Q(static_cast<long>(rng() % 3) - 1);
      h.push_back(g);
      auto Mp = transform_by(M, h);
      if (M.exact_degree()) Mp.certify_exact(M.exact_degree(), M.exact_degree());
      ++changes;
      auto other = classify_at_origin(Mp);
      const std::string tag = eq + " change " + std::to_string(c);
      o.check(base.levi == other.levi, tag + ": Levi");
      o.check(base.finite.verdict == other.finite.verdict && base.finite.ell0 == other.finite.ell0, tag + ": finite");
      o.check(base.essentially_finite.verdict == other.essentially_finite.verdict, tag + ": essentially finite");
      o.check(base.segre.verdict == other.segre.verdict, tag + ": Segre");
      o.check(base.holomorphic.verdict == other.holomorphic.verdict, tag + ": holomorphic");
      o.check(base.essential_type.value == other.essential_type.value, tag + ": essential type");
      o.check(base.ranks == other.ranks, tag + ": ranks of Q_k at the origin");
      o.check(essential_holo_dimension(Mp).n_M == base_holo.n_M, tag + ": n_M");
      for (int k = 0; k <= 2; ++k) {
        auto tr = transformation_rule_check(M, Mp, h, k, 2, {}, true);
        o.check(tr.maps_M_into_Mp, tag + ": maps into the image");
        o.check(tr.violations.empty(), tag + ": rank equality k = " + std::to_string(k) +
                                           (tr.violations.empty() ? "" : " " + tr.violations.front()));
      }
    }
  }
  o.summary = std::to_string(manifolds) + " manifolds x 5 changes (" + std::to_string(changes) +
              " pairs): verdicts, ell0, epsilon_1, n_M and rank equalities unchanged";
  return o;
}

Outcome criterion8() {
  Outcome o;
  std::mt19937_64 rng(8080);
  int built = 0, normalized = 0, nonzero = 0;
  for (int it = 0; it < 25; ++it) {
    const std::size_t m = 1 + rng() % 2, d = 1 + rng() % 2;
    std::vector<std::string> vars;
    for (std::size_t k = 1; k <= m; ++k) {
      vars.push_back("x_" + std::to_string(k));
      vars.push_back("y_" + std::to_string(k));
    }
    for (std::size_t j = 1; j <= d; ++j) vars.push_back("u_" + std::to_string(j));
    std::vector<std::string> eqs;
    for (std::size_t j = 0; j < d; ++j) {
      std::string s = "0";
      for (int t = 0; t < 3; ++t) {
        std::string mono = std::to_string(static_cast<long>(rng() % 5) - 2);
        for (int k = 0; k < 2 + static_cast<int>(rng() % 2); ++k) mono += "*" + vars[rng() % vars.size()];
        s += " + " + mono;
      }
      eqs.push_back(s);
    }
    const int N = 6;
    auto spec = real_spec(m, d, eqs, N);
    GenericManifold M = from_real_equations(spec);
    ++built;
    const std::size_t A = 2 * m + d;
    // oracle 1: Thetabar(z, zeta, Theta(zeta, z, w)) = w
    SeriesVector args;
    for (std::size_t k = 0; k < m; ++k) args.push_back(Series::variable(A, N, m + k));
    for (std::size_t k = 0; k < m; ++k) args.push_back(Series::variable(A, N, k));
    for (std::size_t j = 0; j < d; ++j) args.push_back(M.theta(j));
    for (std::size_t j = 0; j < d; ++j) {
      const Series r = compose(conjugate_coeffs(M.theta(j)), args) - Series::variable(A, N, 2 * m + j);
      nonzero += static_cast<int>(r.terms().size());
    }
    // oracle 2: (w - xi)/(2i) = phi((z + zeta)/2, (z - zeta)/(2i), (w + xi)/2) with xi = Theta
    const VariableScope rs = real_scope(m, d);
    for (std::size_t j = 0; j < d; ++j) {
      const Series phi = expand_to_series(*spec.equations[j], rs, N);
      SeriesVector xa;
      for (std::size_t k = 0; k < m; ++k)
        xa.push_back((Series::variable(A, N, m + k) + Series::variable(A, N, k)) * Q::ratio(1, 2));
      for (std::size_t k = 0; k < m; ++k)
        xa.push_back((Series::variable(A, N, m + k) - Series::variable(A, N, k)) * (Q::ratio(1, 2) / I));
      for (std::size_t l = 0; l < d; ++l)
        xa.push_back((Series::variable(A, N, 2 * m + l) + M.theta(l)) * Q::ratio(1, 2));
      const Series lhs = (Series::variable(A, N, 2 * m + j) - M.theta(j)) * (Q(1) / (Q(2) * I));
      const Series r = lhs - compose(phi, xa);
      nonzero += static_cast<int>(r.truncated(N).terms().size());
    }
    // normal coordinates: Theta'(0, z, w) = Theta'(zeta, 0, w) = w
    auto nf = to_normal_coordinates(M);
    ++normalized;
    for (std::size_t j = 0; j < d; ++j)
      for (const auto& [a, c] : nf.manifold.theta(j).terms()) {
        const bool no_zeta = a.slice(0, m).degree() == 0, no_z = a.slice(m, m).degree() == 0;
        if ((no_zeta || no_z) && a != MultiIndex::unit(2 * m + j)) ++nonzero;
        if ((no_zeta || no_z) && a == MultiIndex::unit(2 * m + j) && c != Q(1)) ++nonzero;
      }
    for (std::size_t j = 0; j < d; ++j)
      if (nf.manifold.theta(j).coeff(MultiIndex::unit(2 * m + j)) != Q(1)) ++nonzero;
  }
  o.check(nonzero == 0, std::to_string(nonzero) + " nonzero residual coefficients");
  o.summary = std::to_string(built) + " real-graph manifolds, " + std::to_string(normalized) +
              " normalizations, " + std::to_string(nonzero) + " nonzero residual coefficients";
  return o;
}

int hierarchy_violations(const ClassificationReport& r, std::string& why) {
  int v = 0;
  auto imp = [&](Verdict a, Verdict b, const char* name) {
    if (a == Verdict::yes && b != Verdict::yes) {
      ++v;
      why = name;
    }
  };
  imp(r.levi, r.finite.verdict, "levi => finite");
  imp(r.finite.verdict, r.essentially_finite.verdict, "finite => essentially finite");
  imp(r.essentially_finite.verdict, r.segre.verdict, "essentially finite => segre");
  imp(r.segre.verdict, r.holomorphic.verdict, "segre => holomorphic");
  if (!r.hierarchy_consistent) {
    ++v;
    why = "report flagged inconsistent";
  }
  auto le = [&](const ConditionVerdict& a, const ConditionVerdict& b, const char* name) {
    if (a.ell0 && b.ell0 && a.ell0_exact && b.ell0_exact && *b.ell0 > *a.ell0) {
      ++v;
      why = name;
    }
  };
  le(r.finite, r.essentially_finite, "ell0 order finite/essentially finite");
  le(r.essentially_finite, r.segre, "ell0 order essentially finite/segre");
  return v;
}

Outcome criterion9() {
  Outcome o;
  int classified = 0, violations = 0;
  std::string why;
  for (const auto& M : corpus()) {
    violations += hierarchy_violations(classify_at_origin(M), why);
    ++classified;
  }
  std::mt19937_64 rng(9090);
  for (int it = 0; it < 50; ++it) {
    const std::size_t m = 1 + rng() % 2;
    auto M = make(m, 1, {random_hermitian(rng, m, 4)}, 6);
    if (it % 3 == 0) M.forget_exactness();
    violations += hierarchy_violations(classify_at_origin(M), why);
    ++classified;
  }
  o.check(violations == 0, why);
  o.summary = std::to_string(classified) + " manifolds (corpus + 50 random), " + std::to_string(violations) + " violations";
  return o;
}

Outcome criterion10() {
  Outcome o;
  auto src = make(1, 1, {"w + I*z^2*zbar^2"}, 10);
  auto tgt = make(2, 1, {"w + I*(z_1^2*zbar_1^2 + z_1*zbar_2^2 + zbar_1*z_2^2)"}, 10);
  // h(z, w) = (z, 0, w)
  CRMapping ex{src, tgt, {Series::variable(2, 10, 0), Series(2, 10), Series::variable(2, 10, 1)}, 1};
  auto v = verify_cr_map(ex);
  o.check(v.pass, "example map verifies");
  // oracle: gbar(zeta, Theta) - Theta'(fbar(zeta, Theta), h) computed directly
  {
    const Series th = src.theta(0);
    const std::size_t A = src.arity();
    SeriesVector a = {Series::variable(A, 10, 0), Series(A, 10), Series::variable(A, 10, 1), Series(A, 10), Series::variable(A, 10, 2)};
    const Series direct = compose(tgt.theta(0), a) - th;
    o.check(direct.is_zero(), "direct residual of the example map");
  }
  auto mc = map_five_conditions(ex);
  o.check(mc.segre_finite.verdict == Verdict::yes, "example map Segre finite");
  o.check(mc.segre_nondegenerate.verdict == Verdict::no, "example map not Segre nondegenerate");
  // oracle for the Segre-finite ideal (w, z_2^2, z_1^2): staircase count 4
  o.check(mc.segre_finite_codim == staircase({{0, 0, 1}, {0, 2, 0}, {2, 0, 0}}, 3, 6), "Segre-finite codimension");

  // identity map: Psi_{j,beta}(T) = beta! (Theta_{j,beta}(0) - Theta_{j,beta}(T)) on the corpus
  int identities = 0;
  for (const auto& M : corpus()) {
    CRMapping id{M, M, identity_vector<Q>(M.n(), M.order()), 1};
    const int k = std::min(2, M.order() - 2);
    auto fam = build_reflection_jets(id, k);
    o.check(fam.all_residuals_vanish, "reflection identity residuals");
    const auto tc = theta_coefficients(M);
    for (const auto& R : fam.jets) {
      const Series th = tc.get(R.j, R.beta);
      Series expect = Series::constant(M.n(), th.order(), th.constant_term()) - th;
      expect *= Q(static_cast<long>(R.beta.factorial()));
      const Series got = psi_from_jet(R, M);
      const int ord = std::min(expect.order(), got.order());
      o.check(got.truncated(ord) == expect.truncated(ord), "identity-map formula");
      ++identities;
    }
  }

  // randomized invertible maps: necessary conditions and transfer under CR-transversality
  std::mt19937_64 rng(1010);
  int pairs = 0, checked = 0, violations = 0;
  for (int it = 0; it < 24; ++it) {
    auto M = make(1, 1, {random_hermitian(rng, 1, 5)}, 8);
    const long a = 1 + static_cast<long>(rng() % 3), r = 1 + static_cast<long>(rng() % 3), b = static_cast<long>(rng() % 3);
    const bool linear = it % 2 == 0;
    const std::string f = qs(a) + "*z" + (linear ? "" : " + " + qs(b) + "*z*w");
    const std::string g = qs(r) + "*w" + (linear ? "" : " + " + qs(b) + "*w^2");
    SeriesVector h = {expand_to_series(f, holomorphic_scope(1, 1), 8), expand_to_series(g, holomorphic_scope(1, 1), 8)};
    auto Mp = transform_by(M, h);
    if (linear && M.exact_degree()) Mp.certify_exact(M.exact_degree(), M.exact_degree());
    CRMapping map{M, Mp, h, linear ? std::optional<int>(1) : std::nullopt};
    o.check(verify_cr_map(map).pass, "random map verifies");
    auto mcr = map_five_conditions(map);
    auto tr = necessary_and_transfer_checks(map, mcr, classify_at_origin(Mp));
    o.check(tr.cr_transversal, "invertible map is CR-transversal");
    violations += static_cast<int>(tr.violations.size());
    for (const auto& s : tr.violations) o.check(false, s);
    checked += tr.checked;
    ++pairs;
  }
  o.summary = "example map: pass, Segre finite (codim " +
              (mc.segre_finite_codim ? std::to_string(*mc.segre_finite_codim) : "?") +
              "), not Segre nondegenerate; " + std::to_string(identities) + " identity jets exact; " +
              std::to_string(pairs) + " random pairs, " + std::to_string(checked) + " implications checked, " +
              std::to_string(violations) + " violations";
  return o;
}

Outcome criterion11() {
  Outcome o;
  std::mt19937_64 rng(1111);
  auto rq = [&] { return Q(static_cast<long>(rng() % 7) - 3) + I * Q(static_cast<long>(rng() % 3) - 1); };
  // solve_implicit against fixed-point iteration phi <- phi - A^{-1} H(x, phi)
  int systems = 0;
  for (int it = 0; it < 100; ++it) {
    const std::size_t nx = 1 + rng() % 2, ny = 1 + rng() % 2, ar = nx + ny;
    const int N = 8;
    Matrix A;
    do {
      A.assign(ny, std::vector<Q>(ny));
      for (auto& row : A)
        for (auto& x : row) x = rq();
    } while (exact_rank(A) != static_cast<int>(ny));
    SeriesVector H;
    for (std::size_t j = 0; j < ny; ++j) {
      Series s(ar, N);
      for (std::size_t l = 0; l < ny; ++l) s += Series::variable(ar, N, nx + l) * A[j][l];
      for (std::size_t i = 0; i < nx; ++i) s += Series::variable(ar, N, i) * rq();
      for (int t = 0; t < 3; ++t) {
        std::vector<int> e(ar);
        int deg = 0;
        while (deg < 2) {
          deg = 0;
          for (auto& x : e) {
            x = static_cast<int>(rng() % 3);
            deg += x;
          }
        }
        s.add_to(MultiIndex(e), rq());
      }
      H.push_back(s);
    }
    auto phi = solve_implicit(H, nx, ny);
    // oracle: inverse of A by Cramer (ny <= 2) and N + 1 fixed-point steps
    Matrix Ainv(ny, std::vector<Q>(ny));
    if (ny == 1) {
      Ainv[0][0] = Q(1) / A[0][0];
    } else {
      const Q det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
      Ainv = {{A[1][1] / det, -A[0][1] / det}, {-A[1][0] / det, A[0][0] / det}};
    }
    SeriesVector psi(ny, Series(nx, N));
    for (int step = 0; step <= N; ++step) {
      SeriesVector args;
      for (std::size_t i = 0; i < nx; ++i) args.push_back(Series::variable(nx, N, i));
      for (const auto& p : psi) args.push_back(p);
      SeriesVector val;
      for (const auto& h : H) val.push_back(compose(h, args));
      SeriesVector next = psi;
      for (std::size_t l = 0; l < ny; ++l)
        for (std::size_t j = 0; j < ny; ++j) next[l] -= val[j] * Ainv[l][j];
      psi = next;
    }
    for (std::size_t l = 0; l < ny; ++l) o.check(phi[l] == psi[l], "solve_implicit system " + std::to_string(it));
    ++systems;
  }
  // ideal_codimension against the staircase count on monomial ideals
  int ideals = 0;
  for (int it = 0; it < 60; ++it) {
    const std::size_t arity = 1 + rng() % 3;
    std::vector<std::vector<int>> gens;
    const bool finite = it % 4 != 3;
    if (finite)
      for (std::size_t k = 0; k < arity; ++k) {
        std::vector<int> e(arity, 0);
        e[k] = 1 + static_cast<int>(rng() % 4);
        gens.push_back(e);
      }
    for (int g = 0; g < 2; ++g) {
      std::vector<int> e(arity);
      int deg = 0;
      while (deg == 0) {
        deg = 0;
        for (auto& x : e) {
          x = static_cast<int>(rng() % 3);
          deg += x;
        }
      }
      if (!finite) e[0] = std::max(e[0], 1);  // ideal inside (z_1): infinite codimension once arity >= 2
      gens.push_back(e);
    }
    SeriesVector sg;
    for (const auto& e : gens) sg.push_back(Series::monomial(arity, 14, MultiIndex(e), rq() + Q(5)));
    auto r = ideal_codimension(sg, arity, 13);
    const bool truly_finite = finite || arity == 1;
    if (truly_finite) {
      o.check(r.finite && r.codim == staircase(gens, arity, 13), "ideal codimension " + std::to_string(it));
    } else {
      o.check(!r.finite, "infinite ideal reported finite " + std::to_string(it));
    }
    ++ideals;
  }
  // generic_rank: sampled never exceeds symbolic, and they agree where both run
  int matrices = 0, agree = 0, both = 0;
  for (int it = 0; it < 60; ++it) {
    const int N = 4;
    const std::size_t rows = 2 + rng() % 3, cols = 2 + rng() % 3, inner = 1 + rng() % std::min(rows, cols);
    auto rnd = [&] {
      Series s(2, N);
      for (int k = 0; k < 3; ++k)
        s.add_to(MultiIndex{static_cast<int>(rng() % 3), static_cast<int>(rng() % 2)}, Q(static_cast<long>(rng() % 5) - 2));
      return s;
    };
    SeriesMatrix L(rows, std::vector<Series>(inner)), R(inner, std::vector<Series>(cols));
    for (auto& row : L)
      for (auto& e : row) e = rnd();
    for (auto& row : R)
      for (auto& e : row) e = rnd();
    SeriesMatrix P(rows, std::vector<Series>(cols, Series(2, N)));
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t k = 0; k < inner; ++k) P[i][j] += L[i][k] * R[k][j];
    const int sym = symbolic_generic_rank(P);
    const int smp = sampled_generic_rank(P, static_cast<std::uint64_t>(it), 8);
    o.check(smp <= sym, "sampled rank exceeds symbolic rank");
    auto gv = generic_rank(P, RankOptions{static_cast<std::uint64_t>(it), 8});
    if (gv.symbolic_ran) {
      ++both;
      if (gv.value == sym) ++agree;
      o.check(gv.value == sym, "generic_rank disagrees with the symbolic rank");
    }
    ++matrices;
  }
  o.summary = std::to_string(systems) + " implicit systems, " + std::to_string(ideals) + " monomial ideals, " +
              std::to_string(matrices) + " matrices (" + std::to_string(agree) + "/" + std::to_string(both) +
              " symbolic agreements)";
  return o;
}

}  // namespace

// Optional arguments select criteria by number; default runs all.
int main(int argc, char** argv) {
  std::set<std::size_t> only;
  for (int a = 1; a < argc; ++a) only.insert(std::stoul(argv[a]));
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"Segre chains of the worked example", criterion1}, {"minimality dichotomy", criterion2},
      {"finite nondegeneracy fixtures", criterion3},     {"essential types", criterion4},
      {"Segre / holomorphic split", criterion5},         {"pointwise Levi rank", criterion6},
      {"invariance under linear changes", criterion7},   {"functional equations", criterion8},
      {"hierarchy", criterion9},                         {"CR mappings", criterion10},
      {"kernel oracles", criterion11},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && !only.count(i + 1)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream line;
    line << "criterion " << (i + 1) << " [" << criteria[i].first << "]: " << (o.pass ? "PASS" : "FAIL") << " - "
         << o.summary;
    line.precision(2);
    line << std::fixed << " (" << secs << " s)";
    std::cout << line.str() << "\n";
    for (const auto& f : o.failures) std::cout << "    " << f << "\n";
    if (!o.pass) ++failed;
  }
  std::cout << (failed ? "FAILED: " + std::to_string(failed) + " criteria" : std::string("ALL CRITERIA PASS")) << "\n";
  return failed ? 1 : 0;
}
