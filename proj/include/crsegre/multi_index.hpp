#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace crsegre {

// Upper bound on the number of variables any series may carry. Chains at the
// largest supported depth and reflection families stay well inside it.
inline constexpr std::size_t kMaxVars = 48;
// Exponents and total degrees are stored in a byte; orders above this are rejected.
inline constexpr int kMaxOrder = 250;

class MultiIndex {
 public:
  MultiIndex() { e_.fill(0); }
  MultiIndex(std::initializer_list<int> exps) {
    e_.fill(0);
    if (exps.size() > kMaxVars) throw std::length_error("too many variables");
    std::size_t i = 0;
    for (int x : exps) set(i++, x);
  }
  explicit MultiIndex(const std::vector<int>& exps) {
    e_.fill(0);
    if (exps.size() > kMaxVars) throw std::length_error("too many variables");
    for (std::size_t i = 0; i < exps.size(); ++i) set(i, exps[i]);
  }

  static MultiIndex unit(std::size_t i) {
    MultiIndex m;
    m.set(i, 1);
    return m;
  }

  int operator[](std::size_t i) const { return e_[i]; }
  int degree() const { return deg_; }

  void set(std::size_t i, int v) {
    if (i >= kMaxVars) throw std::out_of_range("variable index");
    if (v < 0 || v > kMaxOrder) throw std::out_of_range("exponent");
    deg_ = deg_ - e_[i] + v;
    e_[i] = static_cast<std::uint8_t>(v);
  }
  void bump(std::size_t i, int by = 1) { set(i, e_[i] + by); }

  friend MultiIndex operator+(MultiIndex a, const MultiIndex& b) {
    for (std::size_t i = 0; i < kMaxVars; ++i)
      if (b.e_[i]) a.set(i, a.e_[i] + b.e_[i]);
    return a;
  }

  // True when b - a has no negative entry.
  bool divides(const MultiIndex& b) const {
    for (std::size_t i = 0; i < kMaxVars; ++i)
      if (e_[i] > b.e_[i]) return false;
    return true;
  }
  MultiIndex minus(const MultiIndex& b) const {
    MultiIndex r = *this;
    for (std::size_t i = 0; i < kMaxVars; ++i)
      if (b.e_[i]) r.set(i, e_[i] - b.e_[i]);
    return r;
  }

  // Sub-index over variables [from, from+count), shifted to start at 0.
  MultiIndex slice(std::size_t from, std::size_t count) const {
    MultiIndex r;
    for (std::size_t i = 0; i < count; ++i) r.set(i, e_[from + i]);
    return r;
  }

  std::vector<int> to_vector(std::size_t arity) const {
    std::vector<int> v(arity);
    for (std::size_t i = 0; i < arity; ++i) v[i] = e_[i];
    return v;
  }

  // beta! = prod beta_i!
  long long factorial() const {
    long long f = 1;
    for (std::size_t i = 0; i < kMaxVars; ++i)
      for (int k = 2; k <= e_[i]; ++k) f *= k;
    return f;
  }

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
    return a.deg_ == b.deg_ && a.e_ == b.e_;
  }
  friend bool operator!=(const MultiIndex& a, const MultiIndex& b) { return !(a == b); }

  const std::uint8_t* data() const { return e_.data(); }

 private:
  std::array<std::uint8_t, kMaxVars> e_;
  int deg_ = 0;
};

// Graded lexicographic order: lower total degree first; within a degree the
// lexicographically larger exponent vector comes first (so z1 precedes z2).
struct GrlexLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    return std::memcmp(a.data(), b.data(), kMaxVars) > 0;
  }
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& m) const {
    std::uint64_t h = 1469598103934665603ULL;
    const std::uint8_t* p = m.data();
    for (std::size_t i = 0; i < kMaxVars; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

// All multi-indices in `arity` variables with total degree <= max_degree, in grlex order.
inline std::vector<MultiIndex> monomials_up_to(std::size_t arity, int max_degree) {
  std::vector<MultiIndex> out;
  if (max_degree < 0) return out;
  for (int deg = 0; deg <= max_degree; ++deg) {
    if (arity == 0) {
      if (deg == 0) out.emplace_back();
      continue;
    }
    // lexicographically decreasing enumeration of compositions of deg
    std::vector<int> e(arity, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
      if (i + 1 == arity) {
        e[i] = left;
        out.emplace_back(e);
        return;
      }
      for (int v = left; v >= 0; --v) {
        e[i] = v;
        rec(i + 1, left - v);
      }
    };
    rec(0, deg);
  }
  return out;
}

}  // namespace crsegre
