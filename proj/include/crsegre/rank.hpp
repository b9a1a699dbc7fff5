#pragma once

// Exact ranks of constant matrices, generic ranks of truncated-series
// matrices, and codimensions of truncated ideals.
//
// Generic rank protocol. All entries are first truncated to the smallest
// order P present. Sampling restricts the matrix to a random line t = s*v and
// runs Smith elimination over Q(i)[s]/(s^(P+1)); the valuations v_1 <= v_2 ...
// of the pivots give rank r as soon as v_1 + ... + v_r <= P, i.e. some r-minor
// of the truncated matrix has a nonzero, fully determined coefficient. A
// sampled rank is therefore always a true lower bound. When the matrix is
// small, all minors are also expanded symbolically to certify the value.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "crsegre/series.hpp"

namespace crsegre {

using Matrix = std::vector<std::vector<GaussianRational>>;
using SeriesMatrix = std::vector<std::vector<Series>>;

enum class RankConfidence { exact_symbolic, sampled_agreement, lower_bound };

inline const char* to_string(RankConfidence c) {
  switch (c) {
    case RankConfidence::exact_symbolic: return "exact-symbolic";
    case RankConfidence::sampled_agreement: return "sampled-agreement";
    case RankConfidence::lower_bound: return "lower-bound";
  }
  return "?";
}

struct RankVerdict {
  int value = 0;
  RankConfidence confidence = RankConfidence::exact_symbolic;
  int order = 0;           // truncation order the decision was made at
  int samples = 0;         // lines sampled per set
  int sampled_a = 0;       // rank seen by the first sample set
  int sampled_b = 0;       // rank seen by the second sample set
  bool symbolic_ran = false;

  bool certain() const { return confidence != RankConfidence::lower_bound; }
};

struct RankOptions {
  std::uint64_t seed = 0;
  int trials = 8;
  std::size_t symbolic_max_small = 6;     // min(rows, cols) cap for minor expansion
  std::size_t symbolic_max_large = 20;    // max(rows, cols) cap
  std::size_t symbolic_max_minors = 4000; // DP entries per row subset times row subsets
};

// Rank by fraction-free (Bareiss) elimination.
inline int exact_rank(Matrix a) {
  using Q = GaussianRational;
  const std::size_t rows = a.size();
  if (rows == 0) return 0;
  const std::size_t cols = a[0].size();
  Q prev(1);
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && a[piv][c].is_zero()) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        Q v = a[r][c] * a[i][j] - a[i][c] * a[r][j];
        v /= prev;
        a[i][j] = std::move(v);
      }
      a[i][c] = Q(0);
    }
    prev = a[r][c];
    ++r;
  }
  return static_cast<int>(r);
}

// Basis of {x : a x = 0} by reduced row echelon form; `cols` fixes the width
// when a has no rows.
inline std::vector<std::vector<GaussianRational>> kernel_basis(Matrix a, std::size_t cols) {
  using Q = GaussianRational;
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < a.size(); ++c) {
    std::size_t piv = r;
    while (piv < a.size() && a[piv][c].is_zero()) ++piv;
    if (piv == a.size()) continue;
    std::swap(a[piv], a[r]);
    const Q inv = Q(1) / a[r][c];
    for (auto& x : a[r]) x *= inv;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (i != r && !a[i][c].is_zero()) {
        const Q f = a[i][c];
        for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
      }
    pivots.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<std::vector<Q>> out;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Q> v(cols, Q(0));
    v[f] = Q(1);
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -a[i][f];
    out.push_back(std::move(v));
  }
  return out;
}

inline Matrix evaluate(const SeriesMatrix& m, const std::vector<GaussianRational>& point) {
  Matrix out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (const auto& e : m[i]) out[i].push_back(evaluate(e, point));
  return out;
}

inline Matrix constant_part(const SeriesMatrix& m) {
  Matrix out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (const auto& e : m[i]) out[i].push_back(e.constant_term());
  return out;
}

inline int rank_at_origin(const SeriesMatrix& m) { return exact_rank(constant_part(m)); }
inline int rank_at(const SeriesMatrix& m, const std::vector<GaussianRational>& p) { return exact_rank(evaluate(m, p)); }

// Jacobian d f_i / d x_vars[j].
inline SeriesMatrix jacobian(const std::vector<Series>& f, const std::vector<std::size_t>& vars) {
  SeriesMatrix j(f.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t v : vars) j[i].push_back(partial_derivative(f[i], v));
  return j;
}
inline SeriesMatrix jacobian(const std::vector<Series>& f) {
  std::vector<std::size_t> vars;
  if (!f.empty())
    for (std::size_t v = 0; v < f[0].arity(); ++v) vars.push_back(v);
  return jacobian(f, vars);
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream per (seed, index).
inline std::mt19937_64 sample_stream(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(index + 0x51ed2701ULL)));
}

// Small-height rational: numerator in [-7, 7], denominator in [1, 5].
inline GaussianRational small_rational(std::mt19937_64& rng) {
  const long num = static_cast<long>(rng() % 15) - 7;
  const long den = static_cast<long>(rng() % 5) + 1;
  return GaussianRational::ratio(num, den);
}

// Truncated univariate polynomial over Q(i): c[k] is the coefficient of s^k.
using UPoly = std::vector<GaussianRational>;

inline int uval(const UPoly& p) {
  for (std::size_t k = 0; k < p.size(); ++k)
    if (!p[k].is_zero()) return static_cast<int>(k);
  return static_cast<int>(p.size());
}

inline UPoly restrict_to_line(const Series& f, const std::vector<GaussianRational>& v, int P) {
  UPoly out(P + 1, GaussianRational(0));
  std::vector<std::vector<GaussianRational>> pw(v.size());
  for (const auto& [a, c] : f.terms()) {
    if (a.degree() > P) break;
    GaussianRational t = c;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!a[i]) continue;
      auto& cache = pw[i];
      if (cache.empty()) cache.push_back(GaussianRational(1));
      while (static_cast<int>(cache.size()) <= a[i]) cache.push_back(cache.back() * v[i]);
      t *= cache[a[i]];
    }
    out[a.degree()] += t;
  }
  return out;
}

// Smith-type elimination over Q(i)[s]/(s^(P+1)); returns the rank certified at P.
inline int line_rank(std::vector<std::vector<UPoly>> a, int P) {
  using Q = GaussianRational;
  const std::size_t rows = a.size();
  if (rows == 0) return 0;
  const std::size_t cols = a[0].size();
  std::vector<bool> row_used(rows, false), col_used(cols, false);
  int used_budget = 0, rank = 0;
  for (std::size_t step = 0; step < std::min(rows, cols); ++step) {
    int best = P + 1;
    std::size_t br = 0, bc = 0;
    for (std::size_t i = 0; i < rows; ++i) {
      if (row_used[i]) continue;
      for (std::size_t j = 0; j < cols; ++j) {
        if (col_used[j]) continue;
        const int v = uval(a[i][j]);
        if (v < best) {
          best = v;
          br = i;
          bc = j;
        }
      }
    }
    if (best > P) break;
    used_budget += best;
    if (used_budget > P) break;
    ++rank;
    row_used[br] = col_used[bc] = true;
    // unit part of the pivot: a = s^best * u
    UPoly u(a[br][bc].begin() + best, a[br][bc].end());
    // inverse of u modulo s^(P+1-best)
    const int L = static_cast<int>(u.size());
    UPoly uinv(L, Q(0));
    const Q inv0 = Q(1) / u[0];
    uinv[0] = inv0;
    for (int k = 1; k < L; ++k) {
      Q acc(0);
      for (int j = 1; j <= k; ++j)
        if (!u[j].is_zero() && !uinv[k - j].is_zero()) acc += u[j] * uinv[k - j];
      uinv[k] = -(acc * inv0);
    }
    for (std::size_t i = 0; i < rows; ++i) {
      if (row_used[i]) continue;
      const UPoly& e = a[i][bc];
      const int ve = uval(e);
      if (ve > P) continue;
      // factor = e / pivot = (e / s^best) * uinv, known modulo s^(P+1-best)
      UPoly q(P + 1 - best, Q(0));
      for (int k = 0; k + best <= P; ++k) {
        Q acc(0);
        for (int j = 0; j <= k; ++j)
          if (!e[j + best].is_zero() && !uinv[k - j].is_zero()) acc += e[j + best] * uinv[k - j];
        q[k] = acc;
      }
      for (std::size_t j = 0; j < cols; ++j) {
        if (col_used[j] && j != bc) continue;
        const UPoly& prow = a[br][j];
        UPoly& tgt = a[i][j];
        for (int k = 0; k <= P; ++k) {
          Q acc(0);
          for (int l = 0; l <= k && l < static_cast<int>(q.size()); ++l)
            if (!q[l].is_zero() && !prow[k - l].is_zero()) acc += q[l] * prow[k - l];
          if (!acc.is_zero()) tgt[k] -= acc;
        }
      }
    }
  }
  return rank;
}

inline void next_combination_init(std::vector<std::size_t>& c, std::size_t k) {
  c.resize(k);
  for (std::size_t i = 0; i < k; ++i) c[i] = i;
}
inline bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
  const std::size_t k = c.size();
  for (std::size_t i = k; i-- > 0;) {
    if (c[i] < n - k + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

inline std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > (1u << 30)) return r;
  }
  return r;
}

// True when some k-minor of a (rows <= cols) is a nonzero truncated series.
// Laplace expansion along rows with memoized column-subset minors.
inline bool some_minor_nonzero(const SeriesMatrix& a, std::size_t k) {
  const std::size_t rows = a.size(), cols = a[0].size();
  std::vector<std::size_t> rs;
  next_combination_init(rs, k);
  do {
    // level j: minors of rows rs[0..j) over column subsets of size j (bitmask)
    std::unordered_map<std::uint64_t, Series> cur;
    cur.emplace(0, Series::constant(a[0][0].arity(), a[0][0].order(), 1));
    for (std::size_t j = 0; j < k; ++j) {
      std::unordered_map<std::uint64_t, Series> nxt;
      for (const auto& [mask, minor] : cur) {
        if (minor.is_zero()) continue;
        // sign by number of chosen columns above c
        for (std::size_t c = 0; c < cols; ++c) {
          if (mask & (1ULL << c)) continue;
          const Series& e = a[rs[j]][c];
          if (e.is_zero()) continue;
          int above = 0;
          for (std::size_t c2 = c + 1; c2 < cols; ++c2)
            if (mask & (1ULL << c2)) ++above;
          Series term = minor * e;
          if (above % 2) term = -term;
          auto [it, fresh] = nxt.try_emplace(mask | (1ULL << c), term);
          if (!fresh) it->second += term;
        }
      }
      cur = std::move(nxt);
    }
    for (const auto& kv : cur)
      if (!kv.second.is_zero()) return true;
  } while (next_combination(rs, rows));
  return false;
}

}  // namespace detail

namespace detail {

// Drops zero rows/columns, truncates to the smallest order P and transposes
// so that rows <= cols. Empty result means rank 0.
struct Prepared {
  SeriesMatrix a;
  int P = 0;
  std::size_t arity = 0;
};

inline Prepared prepare(const SeriesMatrix& input) {
  Prepared out;
  const std::size_t R0 = input.size(), C0 = R0 ? input[0].size() : 0;
  int P = kMaxOrder;
  for (std::size_t i = 0; i < R0; ++i)
    for (std::size_t j = 0; j < C0; ++j) {
      P = std::min(P, input[i][j].order());
      out.arity = input[i][j].arity();
    }
  out.P = R0 && C0 ? P : 0;
  std::vector<std::size_t> keep_r, keep_c;
  auto live = [&](const Series& s) { return s.valuation() <= P; };
  for (std::size_t i = 0; i < R0; ++i)
    for (std::size_t j = 0; j < C0; ++j)
      if (live(input[i][j])) {
        keep_r.push_back(i);
        break;
      }
  for (std::size_t j = 0; j < C0; ++j)
    for (std::size_t i = 0; i < R0; ++i)
      if (live(input[i][j])) {
        keep_c.push_back(j);
        break;
      }
  if (keep_r.empty() || keep_c.empty()) return out;
  const bool transpose = keep_r.size() > keep_c.size();
  const auto& outer = transpose ? keep_c : keep_r;
  const auto& inner = transpose ? keep_r : keep_c;
  for (std::size_t x : outer) {
    out.a.emplace_back();
    for (std::size_t y : inner) out.a.back().push_back((transpose ? input[y][x] : input[x][y]).truncated(P));
  }
  return out;
}

inline int sampled_line_rank(const Prepared& p, std::uint64_t seed, int first, int trials) {
  const std::size_t small = p.a.size(), large = p.a[0].size();
  int best = 0;
  for (int t = 0; t < trials && best < static_cast<int>(small); ++t) {
    auto rng = sample_stream(seed, static_cast<std::uint64_t>(first + t));
    std::vector<GaussianRational> v(p.arity);
    for (auto& x : v) x = small_rational(rng);
    std::vector<std::vector<UPoly>> m(small);
    for (std::size_t i = 0; i < small; ++i)
      for (std::size_t j = 0; j < large; ++j) m[i].push_back(restrict_to_line(p.a[i][j], v, p.P));
    best = std::max(best, line_rank(std::move(m), p.P));
  }
  return best;
}

inline int symbolic_rank_from(const Prepared& p, int start) {
  int r = start;
  const int small = static_cast<int>(p.a.size());
  while (r < small && some_minor_nonzero(p.a, static_cast<std::size_t>(r) + 1)) ++r;
  return r;
}

}  // namespace detail

// Largest k with a nonzero k-minor (as a series truncated at the smallest
// entry order), by exhaustive minor expansion. Exponential; for small inputs.
inline int symbolic_generic_rank(const SeriesMatrix& input) {
  auto p = detail::prepare(input);
  if (p.a.empty()) return 0;
  if (p.a[0].size() >= 64) throw SeriesError("symbolic rank: too many columns");
  return detail::symbolic_rank_from(p, 0);
}

// Sampling-only rank over `trials` lines starting at sample index `first`.
inline int sampled_generic_rank(const SeriesMatrix& input, std::uint64_t seed, int trials, int first = 0) {
  auto p = detail::prepare(input);
  if (p.a.empty()) return 0;
  return detail::sampled_line_rank(p, seed, first, trials);
}

// Generic rank of a truncated-series matrix (see the protocol above).
inline RankVerdict generic_rank(const SeriesMatrix& input, const RankOptions& opt = {}) {
  RankVerdict out;
  out.samples = opt.trials;
  auto p = detail::prepare(input);
  out.order = p.P;
  if (p.a.empty()) return out;
  const std::size_t small = p.a.size(), large = p.a[0].size();
  out.sampled_a = detail::sampled_line_rank(p, opt.seed, 0, opt.trials);
  out.sampled_b = detail::sampled_line_rank(p, opt.seed, opt.trials, opt.trials);
  int r = std::max(out.sampled_a, out.sampled_b);
  out.value = r;
  if (r == static_cast<int>(small)) {
    out.confidence = RankConfidence::exact_symbolic;
    return out;
  }
  std::size_t work = 0;
  for (std::size_t k = static_cast<std::size_t>(r) + 1; k <= small; ++k)
    work = std::max(work, detail::binomial(small, k) * detail::binomial(large, k));
  if (small <= opt.symbolic_max_small && large <= opt.symbolic_max_large && work <= opt.symbolic_max_minors) {
    out.symbolic_ran = true;
    out.value = detail::symbolic_rank_from(p, r);
    out.confidence = RankConfidence::exact_symbolic;
    return out;
  }
  out.confidence = out.sampled_a == out.sampled_b ? RankConfidence::sampled_agreement : RankConfidence::lower_bound;
  return out;
}

// Codimension of <gens> + m^K inside C[t]/m^K, with m the maximal ideal.
// Every generator must vanish at 0 and be known to order >= K-1.
inline int truncated_quotient_dim(const std::vector<Series>& gens, std::size_t arity, int K) {
  using Q = GaussianRational;
  if (K <= 0) return 0;
  for (const auto& g : gens) {
    if (g.arity() != arity) throw SeriesError("ideal generators have mismatched arity");
    if (!g.constant_term().is_zero()) throw SeriesError("ideal generator does not vanish at the origin");
    if (g.order() < K - 1) throw SeriesError("ideal truncation degree exceeds generator order");
  }
  const auto mons = monomials_up_to(arity, K - 1);
  std::unordered_map<MultiIndex, int, MultiIndexHash> col;
  for (std::size_t i = 0; i < mons.size(); ++i) col.emplace(mons[i], static_cast<int>(i));
  using Row = std::vector<std::pair<int, Q>>;  // sorted by column
  std::map<int, Row> pivots;                   // lead column -> reduced row

  auto reduce_and_insert = [&](Row row) {
    std::map<int, Q> work(row.begin(), row.end());
    while (!work.empty()) {
      auto lead = work.begin();
      auto p = pivots.find(lead->first);
      if (p == pivots.end()) {
        const Q inv = Q(1) / lead->second;
        Row norm;
        for (auto& [c, v] : work) norm.emplace_back(c, v * inv);
        pivots.emplace(norm.front().first, std::move(norm));
        return;
      }
      const Q f = lead->second;
      for (const auto& [c, v] : p->second) {
        auto it = work.find(c);
        Q delta = f * v;
        if (it == work.end())
          work.emplace(c, -delta);
        else {
          it->second -= delta;
          if (it->second.is_zero()) work.erase(it);
        }
      }
    }
  };

  for (const auto& g : gens) {
    if (g.is_zero() || g.valuation() > K - 1) continue;
    const int v = g.valuation();
    for (const auto& mu : monomials_up_to(arity, K - 1 - v)) {
      Row row;
      for (const auto& [a, c] : g.terms()) {
        MultiIndex e = a + mu;
        if (e.degree() > K - 1) break;
        row.emplace_back(col.at(e), c);
      }
      if (row.empty()) continue;
      std::sort(row.begin(), row.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
      reduce_and_insert(std::move(row));
    }
  }
  return static_cast<int>(mons.size() - pivots.size());
}

struct CodimensionResult {
  bool finite = false;  // stabilization certified: m^(K-1) lies in the ideal
  int codim = 0;        // exact when finite, otherwise the count at the top degree (a lower bound)
  int degree_low = 0;   // the two ambient truncations compared
  int degree_high = 0;
  int dim_low = 0;
  int dim_high = 0;
};

// Compares the truncated quotient at K-1 and K. Equal counts mean
// m^(K-1) is contained in I + m^K, hence in I (Nakayama): the ideal has
// finite codimension equal to the common count.
inline CodimensionResult ideal_codimension(const std::vector<Series>& gens, std::size_t arity, int K) {
  CodimensionResult r;
  r.degree_low = K - 1;
  r.degree_high = K;
  r.dim_low = truncated_quotient_dim(gens, arity, K - 1);
  r.dim_high = truncated_quotient_dim(gens, arity, K);
  r.finite = K >= 2 && r.dim_low == r.dim_high;
  r.codim = r.dim_high;
  return r;
}

}  // namespace crsegre
