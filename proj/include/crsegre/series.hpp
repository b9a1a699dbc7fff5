#pragma once

// Truncated multivariate formal power series over an exact coefficient field.
//
// A series carries its arity and a truncation order N: every stored monomial
// has total degree <= N and every coefficient up to N is known exactly.
// Binary operations return the minimum order of their inputs.

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "crsegre/gaussian_rational.hpp"
#include "crsegre/multi_index.hpp"

namespace crsegre {

class SeriesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class K>
class BasicSeries {
 public:
  using Coeff = K;
  using Terms = std::map<MultiIndex, K, GrlexLess>;

  BasicSeries() = default;
  BasicSeries(std::size_t arity, int order) : arity_(arity), order_(order) { check_shape(); }

  static BasicSeries zero(std::size_t arity, int order) { return BasicSeries(arity, order); }
  static BasicSeries constant(std::size_t arity, int order, const K& c) {
    BasicSeries s(arity, order);
    s.set(MultiIndex(), c);
    return s;
  }
  static BasicSeries variable(std::size_t arity, int order, std::size_t i) {
    if (i >= arity) throw SeriesError("variable index out of range");
    BasicSeries s(arity, order);
    s.set(MultiIndex::unit(i), K(1));
    return s;
  }
  static BasicSeries monomial(std::size_t arity, int order, const MultiIndex& a, const K& c) {
    BasicSeries s(arity, order);
    s.set(a, c);
    return s;
  }

  std::size_t arity() const { return arity_; }
  int order() const { return order_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  K coeff(const MultiIndex& a) const {
    auto it = terms_.find(a);
    return it == terms_.end() ? K(0) : it->second;
  }
  K constant_term() const { return coeff(MultiIndex()); }

  // Stores c at a (dropping zeros and anything beyond the truncation order).
  void set(const MultiIndex& a, const K& c) {
    if (a.degree() > order_) return;
    if (c.is_zero())
      terms_.erase(a);
    else
      terms_[a] = c;
  }
  void add_to(const MultiIndex& a, const K& c) {
    if (a.degree() > order_ || c.is_zero()) return;
    auto it = terms_.find(a);
    if (it == terms_.end()) {
      terms_.emplace(a, c);
      return;
    }
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }

  // Lowest total degree carrying a nonzero coefficient, or order+1 for the zero series.
  int valuation() const { return terms_.empty() ? order_ + 1 : terms_.begin()->first.degree(); }
  int max_degree() const { return terms_.empty() ? -1 : terms_.rbegin()->first.degree(); }

  BasicSeries truncated(int new_order) const {
    if (new_order > order_) throw SeriesError("cannot raise truncation order");
    BasicSeries r(arity_, new_order);
    for (const auto& [a, c] : terms_) {
      if (a.degree() > new_order) break;
      r.terms_.emplace_hint(r.terms_.end(), a, c);
    }
    return r;
  }
  BasicSeries homogeneous_part(int k) const {
    BasicSeries r(arity_, order_);
    for (const auto& [a, c] : terms_)
      if (a.degree() == k) r.terms_.emplace_hint(r.terms_.end(), a, c);
    return r;
  }
  // Same coefficients viewed at a larger arity (new variables appended, absent).
  BasicSeries widened(std::size_t new_arity) const {
    if (new_arity < arity_) throw SeriesError("cannot shrink arity");
    BasicSeries r = *this;
    r.arity_ = new_arity;
    r.check_shape();
    return r;
  }

  BasicSeries operator-() const {
    BasicSeries r = *this;
    for (auto& kv : r.terms_) kv.second = -kv.second;
    return r;
  }
  BasicSeries& operator+=(const BasicSeries& b) {
    same_arity(b);
    if (b.order_ < order_) *this = truncated(b.order_);
    for (const auto& [a, c] : b.terms_) {
      if (a.degree() > order_) break;
      add_to(a, c);
    }
    return *this;
  }
  BasicSeries& operator-=(const BasicSeries& b) {
    same_arity(b);
    if (b.order_ < order_) *this = truncated(b.order_);
    for (const auto& [a, c] : b.terms_) {
      if (a.degree() > order_) break;
      add_to(a, -c);
    }
    return *this;
  }
  BasicSeries& operator*=(const K& k) {
    if (k.is_zero()) {
      terms_.clear();
      return *this;
    }
    for (auto& kv : terms_) kv.second *= k;
    return *this;
  }

  friend BasicSeries operator+(BasicSeries a, const BasicSeries& b) { return a += b; }
  friend BasicSeries operator-(BasicSeries a, const BasicSeries& b) { return a -= b; }
  friend BasicSeries operator*(BasicSeries a, const K& k) { return a *= k; }
  friend BasicSeries operator*(const K& k, BasicSeries a) { return a *= k; }
  friend BasicSeries operator*(const BasicSeries& a, const BasicSeries& b) {
    a.same_arity(b);
    return mul_trunc(a, b, std::min(a.order_, b.order_));
  }

  // Product truncated at an explicit degree bound (internal bookkeeping helper).
  static BasicSeries mul_trunc(const BasicSeries& a, const BasicSeries& b, int bound) {
    BasicSeries r(a.arity_, bound);
    if (a.terms_.empty() || b.terms_.empty()) return r;
    std::unordered_map<MultiIndex, K, MultiIndexHash> acc;
    acc.reserve(std::min<std::size_t>(a.size() * b.size(), 1u << 16));
    for (const auto& [ea, ca] : a.terms_) {
      const int room = bound - ea.degree();
      if (room < 0) break;
      for (const auto& [eb, cb] : b.terms_) {
        if (eb.degree() > room) break;
        K p = ca;
        p *= cb;
        auto [it, fresh] = acc.try_emplace(ea + eb, std::move(p));
        if (!fresh) it->second += p;
      }
    }
    for (auto& [e, c] : acc)
      if (!c.is_zero()) r.terms_.emplace(e, std::move(c));
    return r;
  }

  friend bool operator==(const BasicSeries& a, const BasicSeries& b) {
    return a.arity_ == b.arity_ && a.order_ == b.order_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const BasicSeries& a, const BasicSeries& b) { return !(a == b); }

  // Coefficientwise equality up to min order, ignoring the order tags.
  bool agrees_with(const BasicSeries& b) const {
    if (arity_ != b.arity_) return false;
    const int n = std::min(order_, b.order_);
    return truncated(n).terms_ == b.truncated(n).terms_;
  }

  void same_arity(const BasicSeries& b) const {
    if (arity_ != b.arity_)
      throw SeriesError("arity mismatch: " + std::to_string(arity_) + " vs " + std::to_string(b.arity_));
  }

 private:
  void check_shape() const {
    if (arity_ > kMaxVars) throw SeriesError("arity exceeds supported maximum");
    if (order_ < 0) throw SeriesError("truncation order exhausted");
    if (order_ > kMaxOrder) throw SeriesError("truncation order too large");
  }

  std::size_t arity_ = 0;
  int order_ = 0;
  Terms terms_;
};

using Series = BasicSeries<GaussianRational>;
using SeriesVector = std::vector<Series>;

template <class K>
int min_order(const std::vector<BasicSeries<K>>& v, int start) {
  int o = start;
  for (const auto& s : v) o = std::min(o, s.order());
  return o;
}

template <class K>
BasicSeries<K> add(const BasicSeries<K>& a, const BasicSeries<K>& b) {
  return a + b;
}
template <class K>
BasicSeries<K> mul(const BasicSeries<K>& a, const BasicSeries<K>& b) {
  return a * b;
}

template <class K>
BasicSeries<K> power(const BasicSeries<K>& a, int e) {
  if (e < 0) throw SeriesError("negative exponent");
  BasicSeries<K> r = BasicSeries<K>::constant(a.arity(), a.order(), K(1));
  BasicSeries<K> base = a;
  while (e > 0) {
    if (e & 1) r = r * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return r;
}

// Formal derivative; the result is known one degree less.
template <class K>
BasicSeries<K> partial_derivative(const BasicSeries<K>& f, std::size_t var) {
  if (var >= f.arity()) throw SeriesError("derivative variable out of range");
  if (f.order() < 1) throw SeriesError("truncation order exhausted by differentiation");
  BasicSeries<K> r(f.arity(), f.order() - 1);
  for (const auto& [a, c] : f.terms()) {
    const int e = a[var];
    if (e == 0) continue;
    MultiIndex b = a;
    b.set(var, e - 1);
    r.set(b, c * K(static_cast<long>(e)));
  }
  return r;
}

// Raises the truncation order of a series known to be an exact polynomial.
template <class K>
BasicSeries<K> promoted(const BasicSeries<K>& f, int order) {
  if (f.max_degree() > order) throw SeriesError("promotion below the polynomial degree");
  BasicSeries<K> r(f.arity(), order);
  for (const auto& [a, c] : f.terms()) r.set(a, c);
  return r;
}

template <class K>
BasicSeries<K> conjugate_coeffs(const BasicSeries<K>& f) {
  BasicSeries<K> out(f.arity(), f.order());
  for (const auto& [a, c] : f.terms()) out.set(a, conj(c));
  return out;
}

template <class K>
std::vector<BasicSeries<K>> conjugate_coeffs(const std::vector<BasicSeries<K>>& v) {
  std::vector<BasicSeries<K>> r;
  r.reserve(v.size());
  for (const auto& s : v) r.push_back(conjugate_coeffs(s));
  return r;
}

// Re-homes f into new_arity variables: old variable i becomes variable map[i].
template <class K>
BasicSeries<K> reindex(const BasicSeries<K>& f, std::size_t new_arity, const std::vector<std::size_t>& map) {
  if (map.size() != f.arity()) throw SeriesError("reindex map has wrong length");
  BasicSeries<K> r(new_arity, f.order());
  for (const auto& [a, c] : f.terms()) {
    MultiIndex b;
    for (std::size_t i = 0; i < f.arity(); ++i) {
      if (!a[i]) continue;
      if (map[i] >= new_arity) throw SeriesError("reindex target out of range");
      b.set(map[i], b[map[i]] + a[i]);
    }
    r.add_to(b, c);
  }
  return r;
}

// Embeds f (arity k) into new_arity variables starting at `offset`.
template <class K>
BasicSeries<K> embed(const BasicSeries<K>& f, std::size_t new_arity, std::size_t offset) {
  std::vector<std::size_t> map(f.arity());
  for (std::size_t i = 0; i < f.arity(); ++i) map[i] = offset + i;
  return reindex(f, new_arity, map);
}

template <class K>
K evaluate(const BasicSeries<K>& f, const std::vector<K>& point) {
  if (point.size() != f.arity()) throw SeriesError("evaluation point has wrong length");
  std::vector<std::vector<K>> pw(f.arity());
  auto pow_of = [&](std::size_t i, int e) -> const K& {
    auto& v = pw[i];
    if (v.empty()) v.push_back(K(1));
    while (static_cast<int>(v.size()) <= e) v.push_back(v.back() * point[i]);
    return v[e];
  };
  K acc(0);
  for (const auto& [a, c] : f.terms()) {
    K t = c;
    for (std::size_t i = 0; i < f.arity(); ++i)
      if (a[i]) t *= pow_of(i, a[i]);
    acc += t;
  }
  return acc;
}

namespace detail {

template <class K>
struct ComposeCtx {
  const std::vector<BasicSeries<K>>* args;
  std::vector<int> val;                          // valuation of each argument (0 in shift mode)
  std::vector<std::vector<BasicSeries<K>>> pw;  // cached powers, truncated at the result bound
  int bound;
  std::size_t out_arity;

  const BasicSeries<K>& power_of(std::size_t i, int e) {
    auto& v = pw[i];
    if (v.empty()) v.push_back(BasicSeries<K>::constant(out_arity, bound, K(1)));
    while (static_cast<int>(v.size()) <= e)
      v.push_back(BasicSeries<K>::mul_trunc(v.back(), (*args)[i].truncated(std::min((*args)[i].order(), bound)), bound));
    return v[e];
  }
};

// Terms sorted lexicographically (variable 0 most significant).
template <class K>
using LexTerms = std::vector<std::pair<MultiIndex, K>>;

template <class K>
BasicSeries<K> compose_rec(ComposeCtx<K>& ctx, const LexTerms<K>& t, std::size_t lo, std::size_t hi, std::size_t var,
                           std::size_t nvars, int budget) {
  BasicSeries<K> acc(ctx.out_arity, std::max(budget, 0));
  if (budget < 0) return acc;
  if (var == nvars) {
    for (std::size_t k = lo; k < hi; ++k) acc.add_to(MultiIndex(), t[k].second);
    return acc;
  }
  std::size_t k = lo;
  while (k < hi) {
    const int e = t[k].first[var];
    std::size_t j = k;
    while (j < hi && t[j].first[var] == e) ++j;
    const int used = e * ctx.val[var];
    if (used <= budget) {
      BasicSeries<K> sub = compose_rec(ctx, t, k, j, var + 1, nvars, budget - used);
      if (!sub.is_zero()) {
        if (e == 0) {
          acc += sub.widened(ctx.out_arity);
        } else {
          const BasicSeries<K>& p = ctx.power_of(var, e);
          BasicSeries<K> prod = BasicSeries<K>::mul_trunc(p.truncated(std::min(p.order(), budget)),
                                                          sub, budget);
          acc += prod;
        }
      }
    }
    k = j;
  }
  return acc;
}

}  // namespace detail

// Substitutes args into f. Without shift every argument must have a zero
// constant term and the result order is the minimum of all orders. With
// shift, constant terms are substituted exactly: f is then treated as the
// exact polynomial it stores and the result order is the minimum over args.
template <class K>
BasicSeries<K> compose(const BasicSeries<K>& f, const std::vector<BasicSeries<K>>& args, bool shift = false) {
  if (args.size() != f.arity()) throw SeriesError("composition argument count mismatch");
  std::size_t out_arity = 0;
  int bound = shift ? kMaxOrder : f.order();
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i == 0)
      out_arity = args[i].arity();
    else if (args[i].arity() != out_arity)
      throw SeriesError("composition arguments have different arities");
    bound = std::min(bound, args[i].order());
    if (!shift && !args[i].constant_term().is_zero())
      throw SeriesError("nonzero constant term in composition argument " + std::to_string(i) +
                        " (use shift mode)");
  }
  if (args.empty()) {
    // constant outer series
    return BasicSeries<K>::constant(0, f.order(), f.constant_term());
  }
  detail::ComposeCtx<K> ctx;
  ctx.args = &args;
  ctx.bound = bound;
  ctx.out_arity = out_arity;
  ctx.pw.resize(args.size());
  ctx.val.resize(args.size());
  for (std::size_t i = 0; i < args.size(); ++i) ctx.val[i] = shift ? 0 : std::max(1, args[i].valuation());
  detail::LexTerms<K> t(f.terms().begin(), f.terms().end());
  std::sort(t.begin(), t.end(), [](const auto& x, const auto& y) {
    return std::memcmp(x.first.data(), y.first.data(), kMaxVars) > 0;
  });
  return detail::compose_rec(ctx, t, 0, t.size(), 0, f.arity(), bound);
}

template <class K>
std::vector<BasicSeries<K>> compose(const std::vector<BasicSeries<K>>& fs, const std::vector<BasicSeries<K>>& args,
                                    bool shift = false) {
  std::vector<BasicSeries<K>> r;
  r.reserve(fs.size());
  for (const auto& f : fs) r.push_back(compose(f, args, shift));
  return r;
}

// g with f*g = 1 up to the order of f.
template <class K>
BasicSeries<K> invert_unit(const BasicSeries<K>& f) {
  const K c0 = f.constant_term();
  if (c0.is_zero()) throw SeriesError("invert_unit: zero constant term (not a unit)");
  const K inv0 = K(1) / c0;
  // f = c0 (1 + u) with u(0) = 0; 1/f = inv0 * sum (-u)^k
  BasicSeries<K> u = f * inv0;
  u.set(MultiIndex(), K(0));
  BasicSeries<K> neg_u = -u;
  BasicSeries<K> term = BasicSeries<K>::constant(f.arity(), f.order(), K(1));
  BasicSeries<K> acc = term;
  const int steps = u.is_zero() ? 0 : (f.order() / std::max(1, u.valuation()));
  for (int k = 1; k <= steps; ++k) {
    term = term * neg_u;
    if (term.is_zero()) break;
    acc += term;
  }
  return acc * inv0;
}

// sqrt(1 + e) by the binomial series; e must vanish at the origin.
template <class K>
BasicSeries<K> sqrt1p(const BasicSeries<K>& e) {
  if (!e.constant_term().is_zero()) throw SeriesError("sqrt1p: argument must have zero constant term");
  BasicSeries<K> acc = BasicSeries<K>::constant(e.arity(), e.order(), K(1));
  BasicSeries<K> term = acc;
  K binom(1);  // binom(1/2, k)
  const int steps = e.is_zero() ? 0 : e.order() / std::max(1, e.valuation());
  for (int k = 1; k <= steps; ++k) {
    binom = binom * (GaussianRational::ratio(1, 2) - K(static_cast<long>(k - 1))) / K(static_cast<long>(k));
    term = term * e;
    if (term.is_zero()) break;
    acc += term * binom;
  }
  return acc;
}

// Square matrix inverse over the coefficient field (Gauss-Jordan).
template <class K>
std::vector<std::vector<K>> invert_matrix(std::vector<std::vector<K>> a) {
  const std::size_t n = a.size();
  std::vector<std::vector<K>> inv(n, std::vector<K>(n, K(0)));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = K(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col].is_zero()) ++piv;
    if (piv == n) throw SeriesError("singular matrix");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const K p = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= p;
      inv[col][j] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col].is_zero()) continue;
      const K f = a[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

// Implicit function theorem. H has n_y entries in n_x + n_y variables (x
// first). Returns the unique phi(x), phi(0) = 0, with H(x, phi(x)) = 0 up to
// the order of H, built degree by degree.
template <class K>
std::vector<BasicSeries<K>> solve_implicit(const std::vector<BasicSeries<K>>& H, std::size_t n_x, std::size_t n_y) {
  if (H.size() != n_y) throw SeriesError("solve_implicit: need exactly n_y equations");
  const std::size_t ar = n_x + n_y;
  for (const auto& h : H) {
    if (h.arity() != ar) throw SeriesError("solve_implicit: equation arity mismatch");
    if (!h.constant_term().is_zero()) throw SeriesError("solve_implicit: H(0,0) != 0");
  }
  const int N = min_order(H, kMaxOrder);
  std::vector<std::vector<K>> A(n_y, std::vector<K>(n_y));
  for (std::size_t j = 0; j < n_y; ++j)
    for (std::size_t l = 0; l < n_y; ++l) A[j][l] = H[j].coeff(MultiIndex::unit(n_x + l));
  std::vector<std::vector<K>> Ainv;
  try {
    Ainv = invert_matrix(A);
  } catch (const SeriesError&) {
    throw SeriesError("solve_implicit: singular linear part in the unknowns");
  }
  std::vector<BasicSeries<K>> phi(n_y, BasicSeries<K>(n_x, N));
  for (int k = 1; k <= N; ++k) {
    std::vector<BasicSeries<K>> args;
    args.reserve(ar);
    for (std::size_t i = 0; i < n_x; ++i) args.push_back(BasicSeries<K>::variable(n_x, k, i));
    for (std::size_t l = 0; l < n_y; ++l) args.push_back(phi[l].truncated(k));
    std::vector<BasicSeries<K>> Hk;
    Hk.reserve(n_y);
    for (std::size_t j = 0; j < n_y; ++j) Hk.push_back(compose(H[j].truncated(k), args).homogeneous_part(k));
    // the degree-k part of H(x, phi) is R_k + A phi_k, so phi_k = -A^{-1} R_k
    for (std::size_t l = 0; l < n_y; ++l)
      for (std::size_t j = 0; j < n_y; ++j) {
        if (Ainv[l][j].is_zero()) continue;
        for (const auto& [a, c] : Hk[j].terms()) phi[l].add_to(a.slice(0, n_x), -(c * Ainv[l][j]));
      }
  }
  return phi;
}

// Inverse of an invertible map germ h: C^n -> C^n with h(0) = 0.
template <class K>
std::vector<BasicSeries<K>> invert_map(const std::vector<BasicSeries<K>>& h) {
  const std::size_t n = h.size();
  std::vector<BasicSeries<K>> H;
  H.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (h[i].arity() != n) throw SeriesError("invert_map: map must be square");
    BasicSeries<K> e = embed(h[i], 2 * n, n);
    e -= BasicSeries<K>::variable(2 * n, h[i].order(), i);
    H.push_back(e);
  }
  try {
    return solve_implicit(H, n, n);
  } catch (const SeriesError&) {
    throw SeriesError("invert_map: map is not invertible at the origin");
  }
}

// Identity vector in `arity` variables.
template <class K>
std::vector<BasicSeries<K>> identity_vector(std::size_t arity, int order) {
  std::vector<BasicSeries<K>> v;
  for (std::size_t i = 0; i < arity; ++i) v.push_back(BasicSeries<K>::variable(arity, order, i));
  return v;
}

// Splits f by the exponents of its first `split` variables: key beta, value
// the coefficient series in the remaining variables, known to order N - |beta|.
template <class K>
std::map<MultiIndex, BasicSeries<K>, GrlexLess> split_leading(const BasicSeries<K>& f, std::size_t split) {
  std::map<MultiIndex, BasicSeries<K>, GrlexLess> out;
  const std::size_t rest = f.arity() - split;
  for (const auto& [a, c] : f.terms()) {
    MultiIndex beta = a.slice(0, split);
    MultiIndex gamma = a.slice(split, rest);
    auto it = out.find(beta);
    if (it == out.end()) it = out.emplace(beta, BasicSeries<K>(rest, f.order() - beta.degree())).first;
    it->second.set(gamma, c);
  }
  return out;
}

// Coefficient series of zeta^beta (zeta = the first `split` variables).
template <class K>
BasicSeries<K> leading_coefficient(const BasicSeries<K>& f, std::size_t split, const MultiIndex& beta) {
  const std::size_t rest = f.arity() - split;
  if (beta.degree() > f.order()) throw SeriesError("coefficient index beyond truncation order");
  BasicSeries<K> r(rest, f.order() - beta.degree());
  for (const auto& [a, c] : f.terms()) {
    bool ok = true;
    for (std::size_t i = 0; i < split; ++i)
      if (a[i] != beta[i]) {
        ok = false;
        break;
      }
    if (ok) r.set(a.slice(split, rest), c);
  }
  return r;
}

// Human readable polynomial text using the given variable names.
template <class K>
std::string to_string(const BasicSeries<K>& f, const std::vector<std::string>& names) {
  if (f.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [a, c] : f.terms()) {
    std::string mono;
    for (std::size_t i = 0; i < f.arity(); ++i) {
      if (!a[i]) continue;
      if (!mono.empty()) mono += "*";
      mono += i < names.size() ? names[i] : ("v" + std::to_string(i + 1));
      if (a[i] > 1) mono += "^" + std::to_string(a[i]);
    }
    std::string cs;
    bool neg = false;
    K cc = c;
    if (cc.is_real() && sgn(cc.re()) < 0) {
      neg = true;
      cc = -cc;
    } else if (sgn(cc.re()) == 0 && sgn(cc.im()) < 0) {
      neg = true;
      cc = -cc;
    }
    if (mono.empty())
      cs = cc.is_real() || sgn(cc.re()) == 0 ? cc.to_string() : "(" + cc.to_string() + ")";
    else if (cc.is_one())
      cs = mono;
    else if (cc.is_real() || sgn(cc.re()) == 0)
      cs = cc.to_string() + "*" + mono;
    else
      cs = "(" + cc.to_string() + ")*" + mono;
    if (first)
      out += neg ? "-" + cs : cs;
    else
      out += neg ? " - " + cs : " + " + cs;
    first = false;
  }
  return out;
}

}  // namespace crsegre
