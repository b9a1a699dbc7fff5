#include <gtest/gtest.h>

#include <random>

#include "crsegre/nondegen.hpp"

using namespace crsegre;
using Q = GaussianRational;

namespace {

const Q I = Q::i();

GenericManifold make(std::size_t m, std::size_t d, const std::vector<std::string>& eqs, int order = 12) {
  ManifoldSpec s;
  s.m = static_cast<int>(m);
  s.d = static_cast<int>(d);
  s.order = order;
  s.style = EquationStyle::complex_defining;
  for (const auto& e : eqs) s.equations.push_back(parse_expr(e));
  return from_complex_equations(s);
}

GenericManifold make_real(std::size_t m, std::size_t d, const std::vector<std::string>& eqs, int order) {
  ManifoldSpec s;
  s.m = static_cast<int>(m);
  s.d = static_cast<int>(d);
  s.order = order;
  s.style = EquationStyle::real_graph;
  for (const auto& e : eqs) s.equations.push_back(parse_expr(e));
  return from_spec(s);
}

Series tser(std::size_t m, std::size_t d, const std::string& e, int order) {
  return expand_to_series(e, holomorphic_scope(m, d), order);
}

GenericManifold heisenberg(int order = 8) { return make(1, 1, {"w - 2*I*z*zbar"}, order); }
GenericManifold levi_flat(int order = 8) { return make(1, 1, {"w"}, order); }
GenericManifold cubic(int order = 8) { return make(2, 1, {"w + I*(2*z_1*zbar_1 + z_1^2*zbar_2 + zbar_1^2*z_2)"}, order); }
GenericManifold split_example(int order = 10) {
  return make(2, 1, {"-2*I*z_1*zbar_1*(1 + z_1*zbar_2) + w*(1 + z_1*zbar_2)/(1 + zbar_1*z_2)"}, order);
}

}  // namespace

TEST(Nondegen, SegreMappingComponents) {
  auto q = segre_mapping(heisenberg(), 1);
  ASSERT_EQ(q.components.size(), 2u);
  EXPECT_EQ(q.components[0], tser(1, 1, "w", 8));
  EXPECT_EQ(q.components[1], tser(1, 1, "-2*I*z", 7));
  EXPECT_EQ(rank_at_origin(jacobian(q.components)), 2);

  auto c = segre_mapping(cubic(), 1);
  ASSERT_EQ(c.components.size(), 3u);
  EXPECT_EQ(c.components[0], tser(2, 1, "w", 8));
  EXPECT_EQ(c.components[1], tser(2, 1, "2*I*z_1", 7));
  EXPECT_EQ(c.components[2], tser(2, 1, "I*z_1^2", 7));

  // d * #{|beta| <= k} components
  EXPECT_EQ(segre_mapping(cubic(), 3).components.size(), 10u);
  for (int k = 0; k <= 4; ++k)
    for (const auto& s : segre_mapping(levi_flat(), k).components)
      if (!s.is_zero()) {
        EXPECT_EQ(s, tser(1, 1, "w", 8));
      }
  EXPECT_THROW(segre_mapping(levi_flat(), 9), ManifoldError);
}

TEST(Nondegen, JetMapHeisenbergAndRestriction) {
  auto M = heisenberg();
  auto J = jet_map(M, 1);
  ASSERT_EQ(J.components.size(), 3u);
  const auto scope = complex_scope(1, 1);
  EXPECT_EQ(J.components[0], expand_to_series("zbar", scope, 8));
  EXPECT_EQ(J.components[1], expand_to_series("w - 2*I*z*zbar", scope, 8));
  EXPECT_EQ(J.components[2], expand_to_series("-2*I*z", scope, 7));
  EXPECT_EQ(rank_at_origin(jacobian(J.components)), 3);
  EXPECT_THROW(jet_map(M, 8), ManifoldError);

  // zeta = 0 restores the Segre mapping
  auto C = cubic();
  for (int k = 0; k <= 3; ++k) {
    auto Jk = jet_map(C, k);
    auto Qk = segre_mapping(C, k);
    SeriesVector args = {Series(3, 8), Series(3, 8)};
    for (std::size_t i = 0; i < 3; ++i) args.push_back(Series::variable(3, 8, i));
    for (std::size_t c = 0; c < Qk.components.size(); ++c)
      EXPECT_EQ(compose(Jk.components[2 + c], args), Qk.components[c]);
  }
}

TEST(Nondegen, ConjugateJetMapIsCoefficientConjugate) {
  auto C = cubic();
  for (int k = 0; k <= 2; ++k) {
    auto J = jet_map(C, k), Jb = conjugate_jet_map(C, k);
    ASSERT_EQ(J.components.size(), Jb.components.size());
    for (std::size_t i = 0; i < J.components.size(); ++i)
      EXPECT_EQ(conjugate_coeffs(J.components[i]), Jb.components[i]);
  }
}

TEST(Nondegen, FiniteNondegeneracyFixtures) {
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
  for (const auto& c : cases) {
    auto r = classify_at_origin(make(c.m, 1, {c.eq}, 8));
    EXPECT_EQ(r.finite.verdict, Verdict::yes) << c.eq;
    ASSERT_TRUE(r.finite.ell0.has_value());
    EXPECT_EQ(*r.finite.ell0, c.ell0) << c.eq;
    EXPECT_TRUE(r.finite.ell0_exact);
    EXPECT_EQ(r.levi, Verdict::no);
    EXPECT_TRUE(r.hierarchy_consistent);
    EXPECT_EQ(r.essentially_finite.verdict, Verdict::yes);
    EXPECT_EQ(r.holomorphic.verdict, Verdict::yes);
    ASSERT_TRUE(r.levi_multitype.has_value());
    EXPECT_EQ(r.levi_multitype->front(), 1);
    int total = 0;
    for (int v : *r.levi_multitype) total += v;
    EXPECT_EQ(total, static_cast<int>(c.m) + 1);
  }
}

TEST(Nondegen, ZSquaredZetaSquaredIsEssentiallyFiniteOnly) {
  auto r = classify_at_origin(make(1, 1, {"w + I*z^2*zbar^2"}, 8));
  EXPECT_TRUE(r.exact_data);
  EXPECT_EQ(r.levi, Verdict::no);
  EXPECT_EQ(r.finite.verdict, Verdict::no);
  EXPECT_FALSE(r.finite.by_hierarchy);
  EXPECT_EQ(r.essentially_finite.verdict, Verdict::yes);
  EXPECT_EQ(r.essentially_finite.ell0, 2);
  EXPECT_EQ(r.essential_type.value, 2);
  EXPECT_EQ(r.segre.verdict, Verdict::yes);
  EXPECT_EQ(r.holomorphic.verdict, Verdict::yes);
  EXPECT_TRUE(r.hierarchy_consistent);
  // without the exactness certificate the negative verdict is withheld
  auto M = make(1, 1, {"w + I*z^2*zbar^2"}, 8);
  M.forget_exactness();
  auto t = classify_at_origin(M);
  EXPECT_EQ(t.finite.verdict, Verdict::inconclusive);
  EXPECT_EQ(t.essentially_finite.verdict, Verdict::yes);
}

TEST(Nondegen, EssentialTypeFixtures) {
  for (int N : {2, 3, 4}) {
    const std::string e = "w + I*z^" + std::to_string(N) + "*zbar^" + std::to_string(N);
    auto r = classify_at_origin(make(1, 1, {e}, 2 * N));
    EXPECT_EQ(r.essentially_finite.verdict, Verdict::yes) << e;
    EXPECT_EQ(r.essential_type.value, N) << e;
    EXPECT_TRUE(r.essential_type.exact);
  }
  auto r = classify_at_origin(make(2, 1, {"w + I*(z_1^3*zbar_1^3 + z_2^4*zbar_2^4)"}, 8));
  EXPECT_EQ(r.essentially_finite.verdict, Verdict::yes);
  EXPECT_EQ(r.essential_type.value, 12);
  EXPECT_EQ(r.essentially_finite.ell0, 4);
  EXPECT_TRUE(r.essentially_finite.ell0_exact);
}

TEST(Nondegen, SegreHolomorphicSplit) {
  auto M = split_example();
  EXPECT_FALSE(M.exact_degree().has_value());
  EXPECT_EQ(M.exact_degree_at_w0(), 4);
  auto r = classify_at_origin(M);
  EXPECT_EQ(r.holomorphic.verdict, Verdict::yes);
  EXPECT_EQ(r.segre.verdict, Verdict::no);
  EXPECT_FALSE(r.segre.by_hierarchy);
  ASSERT_TRUE(r.restricted_generic_rank.has_value());
  EXPECT_EQ(*r.restricted_generic_rank, 1);
  EXPECT_TRUE(r.restricted_rank_exact);
  EXPECT_EQ(r.essentially_finite.verdict, Verdict::no);
  EXPECT_EQ(r.finite.verdict, Verdict::no);
  EXPECT_EQ(r.levi, Verdict::no);
  EXPECT_TRUE(r.hierarchy_consistent);
  ASSERT_TRUE(r.holo.has_value());
  EXPECT_EQ(r.holo->n_M, 3);
}

TEST(Nondegen, SegreNondegenerateButNotEssentiallyFinite) {
  auto r = classify_at_origin(make(2, 1, {"w + I*z_1*zbar_1*(1 + z_2*zbar_2)"}, 8));
  EXPECT_EQ(r.segre.verdict, Verdict::yes);
  EXPECT_EQ(r.segre.ell0, 2);
  EXPECT_EQ(r.essentially_finite.verdict, Verdict::no);
  EXPECT_FALSE(r.essentially_finite.by_hierarchy);
  EXPECT_TRUE(r.essential_type.infinite_witness.has_value());
  EXPECT_EQ(r.finite.verdict, Verdict::no);
  EXPECT_EQ(r.holomorphic.verdict, Verdict::yes);
  EXPECT_TRUE(r.hierarchy_consistent);
}

TEST(Nondegen, LeviFlatAndHeisenberg) {
  auto h = classify_at_origin(heisenberg());
  EXPECT_EQ(h.levi, Verdict::yes);
  EXPECT_EQ(h.finite.ell0, 1);
  EXPECT_EQ(h.essential_type.value, 1);
  EXPECT_EQ(h.levi_multitype, (std::vector<int>{1, 1}));
  ASSERT_TRUE(h.holo.has_value());
  EXPECT_EQ(h.holo->n_M, 2);
  EXPECT_EQ(h.holo->ell_M, 1);
  EXPECT_EQ(h.holo->multitype, (std::vector<int>{1, 1}));
  EXPECT_TRUE(h.holo->certain);

  auto f = classify_at_origin(levi_flat());
  EXPECT_EQ(f.levi, Verdict::no);
  for (const auto* c : {&f.finite, &f.essentially_finite, &f.segre, &f.holomorphic}) EXPECT_EQ(c->verdict, Verdict::no);
  ASSERT_TRUE(f.holo.has_value());
  EXPECT_EQ(f.holo->n_M, 1);
  EXPECT_EQ(f.holo->ell_M, 0);
  EXPECT_EQ(f.holo->multitype, (std::vector<int>{1}));
  EXPECT_TRUE(f.hierarchy_consistent);
}

TEST(Nondegen, EssentialHoloDimensionBound) {
  for (const auto& M : {heisenberg(), levi_flat(), cubic(), split_example(8)}) {
    auto h = essential_holo_dimension(M);
    EXPECT_TRUE(h.bound_holds);
    EXPECT_EQ(h.multitype.front(), static_cast<int>(M.d()));
    EXPECT_GE(h.n_M, static_cast<int>(M.d()));
    EXPECT_LE(h.n_M, static_cast<int>(M.n()));
  }
}

TEST(Nondegen, CubicPointwise) {
  auto M = cubic();
  auto at0 = classify_at_point(M, surface_point(M, {Q(0), Q(0)}, {Q(0)}));
  EXPECT_EQ(at0.levi, Verdict::no);
  ASSERT_GE(at0.ranks.size(), 2u);
  EXPECT_EQ(at0.ranks[1], 2);
  for (auto [z1, z2, u] : std::vector<std::tuple<Q, Q, Q>>{{Q::ratio(1, 2), Q(0), Q(0)},
                                                          {Q::ratio(1, 2), Q::ratio(1, 3), Q::ratio(1, 5)},
                                                          {Q::ratio(-1, 4) + I * Q::ratio(1, 4), Q(0), Q(0)},
                                                          {I * Q::ratio(1, 3), Q::ratio(1, 7), Q::ratio(-1, 2)}}) {
    auto p = surface_point(M, {z1, z2}, {u});
    auto r = classify_at_point(M, p);
    EXPECT_EQ(r.levi, Verdict::yes);
    EXPECT_EQ(r.finite.ell0, 1);
    EXPECT_EQ(rank_at(jacobian(jet_map(M, 1).components), p.complexified()), 5);
    EXPECT_TRUE(r.hierarchy_consistent);
  }
  // points on z_1 = 0 stay Levi degenerate
  auto q = classify_at_point(M, surface_point(M, {Q(0), Q::ratio(1, 2)}, {Q::ratio(1, 3)}));
  EXPECT_EQ(q.levi, Verdict::no);
  EXPECT_EQ(q.finite.verdict, Verdict::yes);
  EXPECT_EQ(q.finite.ell0, 2);
}

TEST(Nondegen, LeviFlatPointwiseMatchesOrigin) {
  auto M = levi_flat();
  for (auto [z, u] : std::vector<std::pair<Q, Q>>{{Q(0), Q(0)}, {Q::ratio(1, 3), Q::ratio(1, 2)}, {I, Q(-1)}}) {
    auto r = classify_at_point(M, surface_point(M, {z}, {u}));
    EXPECT_EQ(r.levi, Verdict::no);
    for (const auto* c : {&r.finite, &r.essentially_finite, &r.segre, &r.holomorphic}) EXPECT_EQ(c->verdict, Verdict::no);
  }
}

TEST(Nondegen, PointwiseEssentiallyFiniteAndSegre) {
  auto M = make(1, 1, {"w + I*z^2*zbar^2"}, 8);
  auto r0 = classify_at_point(M, surface_point(M, {Q(0)}, {Q(0)}));
  EXPECT_EQ(r0.finite.verdict, Verdict::no);
  EXPECT_EQ(r0.essentially_finite.verdict, Verdict::yes);
  EXPECT_EQ(r0.essential_type.value, 2);
  EXPECT_EQ(r0.segre.verdict, Verdict::yes);
  auto r1 = classify_at_point(M, surface_point(M, {Q::ratio(1, 2)}, {Q(0)}));
  EXPECT_EQ(r1.levi, Verdict::yes);
  EXPECT_EQ(r1.essential_type.value, 1);
  EXPECT_TRUE(r1.hierarchy_consistent);
}

TEST(Nondegen, GradientSpanMatchesSegreRank) {
  std::vector<GenericManifold> ms = {heisenberg(), levi_flat(), cubic(),
                                     make(1, 1, {"w + I*(z^5*zbar + zbar^5*z)"}, 8),
                                     make(2, 1, {"w + I*(z_1*zbar_1 + z_1^2*zbar_2 + zbar_1^2*z_2)"}, 8),
                                     make(1, 2, {"w_1 - 2*I*z*zbar", "w_2 - I*(z^2*zbar + z*zbar^2)"}, 8),
                                     make_real(1, 1, {"x^2 + y^2 + u*x*y + u^2*x^3"}, 8)};
  for (const auto& M : ms) {
    auto r = classify_at_origin(M);
    auto N = to_normal_coordinates(M).manifold;
    for (int k = 0; k < 6; ++k) {
      const int direct = k < static_cast<int>(r.ranks.size()) ? r.ranks[k] : r.ranks.back();
      EXPECT_EQ(gradient_span_rank(M, k), direct) << "k = " << k;
      EXPECT_EQ(gradient_span_rank(N, k), direct) << "k = " << k;
    }
  }
}

TEST(Nondegen, BlockIdentityAtSampledPoints) {
  std::vector<GenericManifold> ms = {cubic(), heisenberg(), make(1, 1, {"w + I*z^2*zbar^2"}, 8),
                                     make(2, 1, {"w + I*z_1*zbar_1*(1 + z_2*zbar_2)"}, 8)};
  std::mt19937_64 rng(11);
  for (const auto& M : ms) {
    for (int s = 0; s < 3; ++s) {
      std::vector<Q> z;
      for (std::size_t i = 0; i < M.m(); ++i)
        z.push_back(Q::ratio(static_cast<long>(rng() % 7) - 3, 4) + I * Q::ratio(static_cast<long>(rng() % 5) - 2, 4));
      auto p = surface_point(M, z, {Q::ratio(static_cast<long>(rng() % 5) - 2, 3)});
      auto T = translated_manifold(M, p);
      auto tc = theta_coefficients(T);
      for (int k = 0; k <= 3; ++k) {
        const int lhs = rank_at(jacobian(jet_map(M, k).components), p.complexified());
        const int rhs = rank_at_origin(jacobian(segre_mapping(T, k, tc).components));
        EXPECT_EQ(lhs, static_cast<int>(M.m()) + rhs);
      }
    }
  }
}

TEST(Nondegen, HierarchyPropagation) {
  ClassificationReport r;
  r.levi = Verdict::yes;
  r.finite.verdict = Verdict::yes;
  r.finite.ell0 = 1;
  r.finite.ell0_exact = true;
  apply_hierarchy(r);
  EXPECT_TRUE(r.hierarchy_consistent);
  EXPECT_EQ(r.essentially_finite.verdict, Verdict::yes);
  EXPECT_TRUE(r.essentially_finite.by_hierarchy);
  EXPECT_EQ(r.holomorphic.verdict, Verdict::yes);

  ClassificationReport s;
  s.holomorphic.verdict = Verdict::no;
  apply_hierarchy(s);
  EXPECT_EQ(s.levi, Verdict::no);
  EXPECT_EQ(s.finite.verdict, Verdict::no);
  EXPECT_TRUE(s.segre.by_hierarchy);

  ClassificationReport bad;
  bad.finite.verdict = Verdict::yes;
  bad.segre.verdict = Verdict::no;
  apply_hierarchy(bad);
  EXPECT_FALSE(bad.hierarchy_consistent);

  ClassificationReport order;
  order.segre = {Verdict::yes, 3, true, false, ""};
  order.essentially_finite = {Verdict::yes, 2, true, false, ""};
  apply_hierarchy(order);
  EXPECT_FALSE(order.hierarchy_consistent);
}

TEST(Nondegen, TangentHolomorphicFields) {
  auto emb = make(2, 1, {"w + I*z_1*zbar_1"}, 8);
  auto b = tangent_holomorphic_fields(emb);
  EXPECT_EQ(b.n_M, 2);
  ASSERT_EQ(b.fields.size(), 1u);
  EXPECT_TRUE(b.annihilation_verified);
  EXPECT_TRUE(b.independent_at_sample);
  EXPECT_TRUE(b.fields[0][0].is_zero());
  EXPECT_EQ(b.fields[0][1], Series::constant(3, b.fields[0][1].order(), Q(1)));
  EXPECT_TRUE(b.fields[0][2].is_zero());

  auto flat = tangent_holomorphic_fields(levi_flat());
  ASSERT_EQ(flat.fields.size(), 1u);
  EXPECT_EQ(flat.fields[0][0], Series::constant(2, flat.fields[0][0].order(), Q(1)));
  EXPECT_TRUE(flat.fields[0][1].is_zero());

  auto split = tangent_holomorphic_fields(split_example(8));
  EXPECT_EQ(split.n_M, 3);
  EXPECT_TRUE(split.fields.empty());

  // a nonconstant field: Theta depends on z only through z_1 + z_2
  auto diag = make(2, 1, {"w + I*(z_1 + z_2)*(zbar_1 + zbar_2)"}, 8);
  auto db = tangent_holomorphic_fields(diag);
  ASSERT_EQ(db.fields.size(), 1u);
  EXPECT_TRUE(db.annihilation_verified);
  EXPECT_EQ(db.fields[0][0], -db.fields[0][1]);
}

TEST(Nondegen, ReflectionMapping) {
  auto H = heisenberg();
  SeriesVector id = identity_vector<Q>(2, 8);
  auto R = reflection_mapping(H, id);
  ASSERT_EQ(R.size(), 1u);
  // variables (z, w, lambdabar, mubar)
  const auto s = [](std::size_t i) { return Series::variable(4, 8, i); };
  EXPECT_EQ(R[0], s(3) - s(1) + s(0) * s(2) * (Q(2) * I));
  SeriesVector zero = {Series(2, 8), Series(2, 8)};
  EXPECT_EQ(reflection_mapping(H, zero)[0], s(3));

  // (z_1, w) -> (z_1, 0, w) into the cubic-free target w + i z_1 zbar_1
  auto Mp = make(2, 1, {"w + I*z_1*zbar_1"}, 8);
  SeriesVector h = {Series::variable(2, 8, 0), Series(2, 8), Series::variable(2, 8, 1)};
  auto Rh = reflection_mapping(Mp, h);
  const auto v = [](std::size_t i) { return Series::variable(5, 8, i); };
  EXPECT_EQ(Rh[0], v(4) - v(1) - v(0) * v(2) * I);
}

TEST(Nondegen, TransformationRules) {
  auto H = heisenberg();
  // linear h(z, w) = (2z + w, 3w)
  SeriesVector h = {Series::variable(2, 8, 0) * Q(2) + Series::variable(2, 8, 1), Series::variable(2, 8, 1) * Q(3)};
  auto Hp = transform_by(H, h);
  for (int k = 0; k <= 3; ++k) {
    auto r = transformation_rule_check(H, Hp, h, k, 4);
    EXPECT_TRUE(r.maps_M_into_Mp);
    EXPECT_EQ(r.verdict, Verdict::yes) << (r.violations.empty() ? "" : r.violations.front());
    EXPECT_EQ(r.samples_checked, 4);
  }
  // normalization of w - (i/2)(z + zeta)^2 onto Heisenberg-type coordinates
  auto P = make(1, 1, {"w - I/2*(z + zbar)^2"}, 8);
  auto norm = to_normal_coordinates(P);
  auto r = transformation_rule_check(P, norm.manifold, norm.change, 1, 3);
  EXPECT_TRUE(r.maps_M_into_Mp);
  EXPECT_EQ(r.rank_at_origin, std::make_pair(2, 2));
  EXPECT_EQ(r.verdict, Verdict::yes);
  // identity
  auto idr = transformation_rule_check(H, H, identity_vector<Q>(2, 8), 2, 2, {}, true);
  EXPECT_TRUE(idr.samples_exact);
  EXPECT_EQ(idr.verdict, Verdict::yes);
  // a map that does not send M into M'
  auto bad = transformation_rule_check(H, levi_flat(), identity_vector<Q>(2, 8), 1, 1);
  EXPECT_FALSE(bad.maps_M_into_Mp);
  EXPECT_EQ(bad.verdict, Verdict::no);
}

TEST(Nondegen, InvarianceUnderLinearChanges) {
  std::vector<GenericManifold> ms = {heisenberg(7), cubic(7),
                                     make(2, 1, {"w + I*(z_1*zbar_1 + z_1^2*zbar_2 + zbar_1^2*z_2)"}, 7)};
  std::mt19937_64 rng(3);
  for (auto M : ms) {
    M.forget_exactness();
    auto base = classify_at_origin(M);
    for (int it = 0; it < 2; ++it) {
      const std::size_t n = M.n();
      SeriesVector h;
      Matrix A;
      do {
        A.assign(n, std::vector<Q>(n));
        for (auto& row : A)
          for (auto& x : row) x = Q(static_cast<long>(rng() % 5) - 2);
      } while (exact_rank(A) != static_cast<int>(n));
      for (std::size_t i = 0; i < n; ++i) {
        Series s(n, 7);
        for (std::size_t j = 0; j < n; ++j) s += Series::variable(n, 7, j) * A[i][j];
        h.push_back(s);
      }
      GenericManifold Mp = [&] {
        try {
          return transform_by(M, h);
        } catch (const ManifoldError&) {
          return M;
        }
      }();
      auto other = classify_at_origin(Mp);
      EXPECT_EQ(base.levi, other.levi);
      EXPECT_EQ(base.finite.verdict, other.finite.verdict);
      EXPECT_EQ(base.finite.ell0, other.finite.ell0);
      EXPECT_EQ(base.ranks, other.ranks);
      EXPECT_EQ(base.essential_type.value, other.essential_type.value);
      EXPECT_EQ(base.holomorphic.verdict, other.holomorphic.verdict);
    }
  }
}

TEST(Nondegen, VanishingLineInSkewDirection) {
  const int N = 8;
  const Series z1 = Series::variable(2, N, 0), z2 = Series::variable(2, N, 1);
  const Q c = Q(2) + I;
  const Series L = z1 - z2 * c;  // vanishes on s -> (c s, s)
  const SeriesVector gens = {L * z1, L * z2 * z2 * z2};
  EXPECT_FALSE(detail::monomial_curve(gens, 2).has_value());
  auto w = detail::vanishing_line(gens, 2);
  ASSERT_TRUE(w.has_value());
  // oracle: every generator vanishes on the line through (c, 1)
  for (const auto& g : gens) {
    Series on_line = compose(g, {Series::variable(1, N, 0) * c, Series::variable(1, N, 0)});
    EXPECT_TRUE(on_line.is_zero());
  }
  EXPECT_FALSE(detail::exact_codimension(gens, 2).codim.has_value());

  // (z1^2, z2^2 + z1 z2) has finite codimension 4 and no vanishing line
  const SeriesVector finite = {z1 * z1, z2 * z2 + z1 * z2};
  EXPECT_FALSE(detail::vanishing_line(finite, 2).has_value());
  EXPECT_EQ(detail::exact_codimension(finite, 2).codim, 4);
}
