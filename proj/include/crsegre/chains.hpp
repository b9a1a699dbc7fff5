#pragma once

#include <optional>
#include <vector>

#include "manifold.hpp"
#include "rank.hpp"
#include "verdict.hpp"

namespace crsegre {

// A point of the complexification parametrized by multitime variables:
// components (z, w, zeta, xi), each a series in the multitime ring.
struct ChainState {
  SeriesVector z, w, zeta, xi;

  std::size_t arity() const { return z.front().arity(); }
  int order() const {
    int o = kMaxOrder;
    for (const auto* v : {&z, &w, &zeta, &xi}) o = min_order(*v, o);
    return o;
  }
  // (z, w, zeta, xi)
  SeriesVector components() const {
    SeriesVector c = z;
    c.insert(c.end(), w.begin(), w.end());
    c.insert(c.end(), zeta.begin(), zeta.end());
    c.insert(c.end(), xi.begin(), xi.end());
    return c;
  }
  SeriesVector t_part() const {
    SeriesVector c = z;
    c.insert(c.end(), w.begin(), w.end());
    return c;
  }
  SeriesVector tau_part() const {
    SeriesVector c = zeta;
    c.insert(c.end(), xi.begin(), xi.end());
    return c;
  }
};

namespace detail {

inline bool has_constants(const SeriesVector& v) {
  for (const auto& s : v)
    if (!s.constant_term().is_zero()) return true;
  return false;
}

}  // namespace detail

// The complexified base point (t_p, conj t_p) as constants in `arity` variables.
inline ChainState chain_base(const GenericManifold& M, std::size_t arity, int order,
                             const std::optional<SurfacePoint>& p = std::nullopt) {
  ChainState s;
  auto c = [&](const GaussianRational& v) { return Series::constant(arity, order, v); };
  for (std::size_t k = 0; k < M.m(); ++k) {
    s.z.push_back(c(p ? p->t[k] : GaussianRational(0)));
    s.zeta.push_back(c(p ? p->t[k].conj() : GaussianRational(0)));
  }
  for (std::size_t j = 0; j < M.d(); ++j) {
    s.w.push_back(c(p ? p->t[M.m() + j] : GaussianRational(0)));
    s.xi.push_back(c(p ? p->t[M.m() + j].conj() : GaussianRational(0)));
  }
  return s;
}

// exp(s L)(state): z += s, w = Thetabar(z + s, zeta, xi); s occupies the
// multitime slots [offset, offset + m).
inline ChainState flow_L(const GenericManifold& M, const ChainState& st, std::size_t offset) {
  const std::size_t m = M.m(), ar = st.arity();
  const int N = st.order();
  if (N < 1) throw SeriesError("truncation order exhausted along the chain");
  ChainState out = st;
  SeriesVector args;
  for (std::size_t k = 0; k < m; ++k) {
    out.z[k] = st.z[k].truncated(N) + Series::variable(ar, N, offset + k);
    args.push_back(out.z[k]);
  }
  for (const auto& s : st.zeta) args.push_back(s.truncated(N));
  for (const auto& s : st.xi) args.push_back(s.truncated(N));
  const bool shift = detail::has_constants(args);
  const SeriesVector bar = M.theta_bar();
  for (std::size_t j = 0; j < M.d(); ++j) out.w[j] = compose(bar[j], args, shift).truncated(N);
  return out;
}

// exp(s Lbar)(state): zeta += s, xi = Theta(zeta + s, z, w).
inline ChainState flow_Lbar(const GenericManifold& M, const ChainState& st, std::size_t offset) {
  const std::size_t m = M.m(), ar = st.arity();
  const int N = st.order();
  if (N < 1) throw SeriesError("truncation order exhausted along the chain");
  ChainState out = st;
  SeriesVector args;
  for (std::size_t k = 0; k < m; ++k) {
    out.zeta[k] = st.zeta[k].truncated(N) + Series::variable(ar, N, offset + k);
    args.push_back(out.zeta[k]);
  }
  for (const auto& s : st.z) args.push_back(s.truncated(N));
  for (const auto& s : st.w) args.push_back(s.truncated(N));
  const bool shift = detail::has_constants(args);
  for (std::size_t j = 0; j < M.d(); ++j) out.xi[j] = compose(M.theta(j), args, shift).truncated(N);
  return out;
}

// Gamma_k (or the conjugate chain starting with Lbar) in the multitime
// variables z_(k), m per step, at the complexified base point.
inline ChainState gamma_k(const GenericManifold& M, int k, bool conjugate = false,
                          const std::optional<SurfacePoint>& p = std::nullopt, int order = -1) {
  if (k < 1) throw SeriesError("chain length must be at least 1");
  const std::size_t ar = M.m() * static_cast<std::size_t>(k);
  ChainState st = chain_base(M, ar, order < 0 ? M.order() : order, p);
  for (int i = 0; i < k; ++i) {
    const bool use_L = (i % 2 == 0) != conjugate;
    st = use_L ? flow_L(M, st, M.m() * static_cast<std::size_t>(i)) : flow_Lbar(M, st, M.m() * static_cast<std::size_t>(i));
  }
  return st;
}

// xi - Theta(zeta, z, w) along the chain; zero when the chain lies on the complexification.
inline SeriesVector chain_membership_residual(const GenericManifold& M, const ChainState& st) {
  SeriesVector args = st.zeta;
  args.insert(args.end(), st.z.begin(), st.z.end());
  args.insert(args.end(), st.w.begin(), st.w.end());
  const bool shift = detail::has_constants(args);
  SeriesVector r;
  for (std::size_t j = 0; j < M.d(); ++j) r.push_back(st.xi[j] - compose(M.theta(j), args, shift));
  return r;
}

// Chart on the complexification used for square minors: (z, zeta, xi) after
// an odd number of steps of Gamma, (z, w, zeta) after an even number.
inline SeriesVector chain_chart(const ChainState& st, int k) {
  SeriesVector c = st.z;
  if (k % 2 == 1) {
    c.insert(c.end(), st.zeta.begin(), st.zeta.end());
    c.insert(c.end(), st.xi.begin(), st.xi.end());
  } else {
    c.insert(c.end(), st.w.begin(), st.w.end());
    c.insert(c.end(), st.zeta.begin(), st.zeta.end());
  }
  return c;
}

struct SegreTypeReport {
  int order = 0;
  std::vector<RankVerdict> gamma_ranks;  // k = 1, 2, ...
  std::vector<int> multitype;            // (m, m, e_3, ..., e_mu0)
  int mu0 = 0;
  int nu0 = 0;
  Verdict minimal = Verdict::inconclusive;
  bool stabilized = false;
  int orbit_dim = 0;            // complex dimension of the complexified orbit
  int intrinsic_orbit_dim = 0;  // m + e_3 + ... + e_mu0
  std::vector<RankVerdict> psi_ranks;  // k = 1, 2, ...
  bool psi_identity_holds = true;      // m + genrk psi^{k+1} = genrk Gamma_{k+2}
  bool conjugate_symmetry_holds = true;
};

inline SeriesMatrix chain_jacobian(const ChainState& st) { return jacobian(st.components()); }

// Generic ranks of Gamma_k until stabilization (capped at k = d + 2 as the
// bound on the Segre type), then the psi maps and their identity.
inline SegreTypeReport segre_type(const GenericManifold& M, const RankOptions& opt = {},
                                  const std::optional<SurfacePoint>& p = std::nullopt) {
  SegreTypeReport rep;
  rep.order = M.order();
  const int m = static_cast<int>(M.m()), d = static_cast<int>(M.d());
  const int full = 2 * m + d;
  const int cap = d + 2;
  std::vector<ChainState> chains;
  for (int k = 1; k <= cap + 1; ++k) {
    chains.push_back(gamma_k(M, k, false, p));
    RankOptions o = opt;
    o.seed = opt.seed ^ static_cast<std::uint64_t>(k);
    rep.gamma_ranks.push_back(generic_rank(chain_jacobian(chains.back()), o));
    const int r = rep.gamma_ranks.back().value;
    if (k >= 2 && r == rep.gamma_ranks[static_cast<std::size_t>(k) - 2].value) {
      rep.mu0 = k - 1;
      rep.stabilized = true;
      break;
    }
    if (r == full) {
      rep.mu0 = k;
      rep.stabilized = true;
      break;
    }
  }
  if (!rep.stabilized) rep.mu0 = cap;
  const auto& R = rep.gamma_ranks;
  rep.orbit_dim = R[static_cast<std::size_t>(rep.mu0) - 1].value;
  rep.multitype.push_back(R[0].value);
  for (int k = 2; k <= rep.mu0; ++k)
    rep.multitype.push_back(R[static_cast<std::size_t>(k) - 1].value - R[static_cast<std::size_t>(k) - 2].value);
  rep.nu0 = rep.mu0 - 1;
  rep.intrinsic_orbit_dim = rep.orbit_dim - m;
  // Sampled ranks are exact lower bounds, so reaching 2m + d is certain.
  bool all_certain = rep.stabilized;
  for (const auto& r : R) all_certain = all_certain && r.certain();
  if (rep.orbit_dim == full)
    rep.minimal = Verdict::yes;
  else
    rep.minimal = all_certain ? Verdict::no : Verdict::inconclusive;

  // psi^k = pi_tau(Gamma_k) for even k, pi_t(Gamma_k) for odd k
  const int kmax = std::min<int>(static_cast<int>(chains.size()), rep.mu0 + 1);
  for (int k = 1; k <= kmax; ++k) {
    const auto& st = chains[static_cast<std::size_t>(k) - 1];
    RankOptions o = opt;
    o.seed = opt.seed ^ (0x100u + static_cast<std::uint64_t>(k));
    rep.psi_ranks.push_back(generic_rank(jacobian(k % 2 ? st.t_part() : st.tau_part()), o));
  }
  for (int k = 0; k + 2 <= static_cast<int>(R.size()) && k + 1 <= static_cast<int>(rep.psi_ranks.size()); ++k)
    if (m + rep.psi_ranks[static_cast<std::size_t>(k)].value != R[static_cast<std::size_t>(k) + 1].value)
      rep.psi_identity_holds = false;
  for (int k = 1; k <= std::min<int>(rep.mu0 + 1, static_cast<int>(R.size())); ++k) {
    RankOptions o = opt;
    o.seed = opt.seed ^ (0x200u + static_cast<std::uint64_t>(k));
    if (generic_rank(chain_jacobian(gamma_k(M, k, true, p)), o).value != R[static_cast<std::size_t>(k) - 1].value)
      rep.conjugate_symmetry_holds = false;
  }
  return rep;
}

// Generic ranks of psi^1..psi^{k_max} and nu0 (smallest k with equal consecutive ranks).
struct PsiReport {
  std::vector<RankVerdict> ranks;
  int nu0 = 0;
};

inline PsiReport psi_generic_ranks(const GenericManifold& M, int k_max, const RankOptions& opt = {}) {
  PsiReport rep;
  for (int k = 1; k <= k_max + 1; ++k) {
    auto st = gamma_k(M, k);
    RankOptions o = opt;
    o.seed = opt.seed ^ (0x100u + static_cast<std::uint64_t>(k));
    rep.ranks.push_back(generic_rank(jacobian(k % 2 ? st.t_part() : st.tau_part()), o));
    if (k >= 2 && rep.nu0 == 0 && rep.ranks[static_cast<std::size_t>(k) - 1].value == rep.ranks[static_cast<std::size_t>(k) - 2].value)
      rep.nu0 = k - 1;
  }
  rep.ranks.pop_back();
  return rep;
}

// Palindromic return point (z_1, ..., z_{mu0-1}, 0, -z_{mu0-1}, ..., -z_1).
inline std::vector<GaussianRational> palindromic_point(const std::vector<std::vector<GaussianRational>>& half,
                                                       std::size_t m) {
  std::vector<GaussianRational> pt;
  for (const auto& b : half) pt.insert(pt.end(), b.begin(), b.end());
  for (std::size_t k = 0; k < m; ++k) pt.push_back(GaussianRational(0));
  for (auto it = half.rbegin(); it != half.rend(); ++it)
    for (const auto& c : *it) pt.push_back(-c);
  return pt;
}

struct SliceWitness {
  bool found = false;
  int length = 0;                           // 2 mu0 - 1
  std::vector<GaussianRational> point;      // multitime point, m per step
  std::vector<GaussianRational> value;      // chain components at the point
  int rank = 0;                             // rank of the full chain Jacobian there
  int projected_rank = 0;                   // rank of pi_t of the chain there
  GaussianRational leading_minor;           // first (2m+d) columns of the chart Jacobian
  std::vector<std::size_t> minor_columns;   // first column set with a nonzero chart minor
  GaussianRational minor;
  // Shortest odd palindromic chain whose t-projection is submersive at its
  // return point, with n multitime coordinates spanning the affine slice.
  int slice_length = 0;
  std::vector<GaussianRational> slice_point;
  std::vector<std::size_t> slice_columns;
  int trials_used = 0;
  std::string reason;
};

namespace detail {

inline GaussianRational det(Matrix a) {
  const std::size_t n = a.size();
  GaussianRational d(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c].is_zero()) ++p;
    if (p == n) return GaussianRational(0);
    if (p != c) {
      std::swap(a[p], a[c]);
      d = -d;
    }
    d *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (a[r][c].is_zero()) continue;
      const GaussianRational f = a[r][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  return d;
}

inline Matrix columns(const Matrix& a, const std::vector<std::size_t>& cols) {
  Matrix out;
  for (const auto& row : a) {
    out.emplace_back();
    for (std::size_t c : cols) out.back().push_back(row[c]);
  }
  return out;
}

// First k-subset of the columns of a with a nonzero k x k determinant.
inline std::optional<std::pair<std::vector<std::size_t>, GaussianRational>> first_nonzero_minor(const Matrix& a,
                                                                                                std::size_t k) {
  const std::size_t cols = a.empty() ? 0 : a[0].size();
  if (cols < k || a.size() != k) return std::nullopt;
  std::vector<std::size_t> comb;
  next_combination_init(comb, k);
  do {
    auto v = det(columns(a, comb));
    if (!v.is_zero()) return std::make_pair(comb, v);
  } while (next_combination(comb, cols));
  return std::nullopt;
}

}  // namespace detail

inline GaussianRational determinant(const Matrix& a) { return detail::det(a); }

// Palindromic point of odd length 2h + 1 built from the first h blocks.
inline std::vector<GaussianRational> palindromic_prefix_point(const std::vector<std::vector<GaussianRational>>& blocks,
                                                              std::size_t h, std::size_t m) {
  return palindromic_point({blocks.begin(), blocks.begin() + static_cast<long>(h)}, m);
}

// Evaluates the chain of the given odd length and its Jacobians at a point.
inline SliceWitness evaluate_slice(const GenericManifold& M, int length, const std::vector<GaussianRational>& point) {
  SliceWitness w;
  w.length = length;
  w.point = point;
  const std::size_t n = M.n(), full = 2 * M.m() + M.d();
  auto st = gamma_k(M, length);
  for (const auto& c : st.components()) w.value.push_back(evaluate(c, point));
  w.rank = exact_rank(evaluate(jacobian(st.components()), point));
  const Matrix Jt = evaluate(jacobian(st.t_part()), point);
  w.projected_rank = exact_rank(Jt);
  const Matrix C = evaluate(jacobian(chain_chart(st, length)), point);
  if (!C.empty() && C[0].size() >= full) {
    std::vector<std::size_t> lead(full);
    for (std::size_t i = 0; i < full; ++i) lead[i] = i;
    w.leading_minor = detail::det(detail::columns(C, lead));
    if (auto mn = detail::first_nonzero_minor(C, full)) {
      w.minor_columns = mn->first;
      w.minor = mn->second;
    }
  }
  if (auto mn = detail::first_nonzero_minor(Jt, n)) {
    w.slice_length = length;
    w.slice_point = point;
    w.slice_columns = mn->first;
  }
  bool zero = true;
  for (const auto& v : w.value) zero = zero && v.is_zero();
  w.found = zero && w.rank == static_cast<int>(full);
  return w;
}

// Samples palindromic points of length 2 mu0 - 1 until the chain has full
// rank there, and records the shortest palindromic length whose
// t-projection is already submersive. Requires a minimal manifold.
inline SliceWitness find_submersive_slice(const GenericManifold& M, int mu0, Verdict minimal, int trials,
                                          std::uint64_t seed) {
  SliceWitness w;
  w.length = 2 * mu0 - 1;
  if (minimal != Verdict::yes) {
    w.reason = "manifold is not known to be minimal";
    return w;
  }
  const std::size_t m = M.m();
  const std::size_t h = static_cast<std::size_t>(mu0) - 1;
  for (int t = 0; t < trials; ++t) {
    auto rng = detail::sample_stream(seed ^ 0x5151u, static_cast<std::uint64_t>(t));
    std::vector<std::vector<GaussianRational>> half(h, std::vector<GaussianRational>(m));
    for (auto& b : half)
      for (auto& c : b) {
        c = detail::small_rational(rng);
        if (c.is_zero()) c = GaussianRational(1);
      }
    auto cand = evaluate_slice(M, w.length, palindromic_point(half, m));
    cand.trials_used = t + 1;
    if (!cand.found) {
      w = cand;
      continue;
    }
    for (std::size_t k = 1; k < h; ++k) {
      auto shorter = evaluate_slice(M, static_cast<int>(2 * k + 1), palindromic_prefix_point(half, k, m));
      if (!shorter.slice_columns.empty()) {
        cand.slice_length = shorter.slice_length;
        cand.slice_point = shorter.slice_point;
        cand.slice_columns = shorter.slice_columns;
        break;
      }
    }
    return cand;
  }
  w.found = false;
  w.reason = "no full-rank palindromic point among " + std::to_string(trials) + " samples";
  return w;
}

}  // namespace crsegre
