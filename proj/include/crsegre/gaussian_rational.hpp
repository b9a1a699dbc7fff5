#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

namespace crsegre {

// Exact element a + b*i of Q(i). All arithmetic is exact; no rounding ever.
class GaussianRational {
 public:
  GaussianRational() : re_(0), im_(0) {}
  GaussianRational(long v) : re_(v), im_(0) {}  // NOLINT: implicit from integers is intended
  GaussianRational(mpq_class re) : re_(std::move(re)), im_(0) { re_.canonicalize(); }  // NOLINT
  GaussianRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }

  static GaussianRational i() { return {mpq_class(0), mpq_class(1)}; }
  static GaussianRational ratio(long p, long q) {
    if (q == 0) throw std::domain_error("zero denominator");
    mpq_class r(p, q);
    r.canonicalize();
    return GaussianRational(r);
  }

  const mpq_class& re() const { return re_; }
  const mpq_class& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }
  bool is_one() const { return sgn(im_) == 0 && re_ == 1; }

  GaussianRational conj() const { return {re_, -im_}; }
  mpq_class norm() const { return re_ * re_ + im_ * im_; }

  GaussianRational operator-() const { return {-re_, -im_}; }

  GaussianRational& operator+=(const GaussianRational& o) {
    re_ += o.re_;
    if (sgn(o.im_) != 0) im_ += o.im_;
    return *this;
  }
  GaussianRational& operator-=(const GaussianRational& o) {
    re_ -= o.re_;
    if (sgn(o.im_) != 0) im_ -= o.im_;
    return *this;
  }
  GaussianRational& operator*=(const GaussianRational& o) {
    if (sgn(im_) == 0 && sgn(o.im_) == 0) {
      re_ *= o.re_;
      return *this;
    }
    if (sgn(o.im_) == 0) {
      re_ *= o.re_;
      im_ *= o.re_;
      return *this;
    }
    if (sgn(o.re_) == 0) {
      mpq_class nr = -im_ * o.im_;
      im_ = re_ * o.im_;
      re_ = std::move(nr);
      return *this;
    }
    mpq_class nr = re_ * o.re_ - im_ * o.im_;
    mpq_class ni = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(nr);
    im_ = std::move(ni);
    return *this;
  }
  GaussianRational& operator/=(const GaussianRational& o) {
    if (o.is_zero()) throw std::domain_error("division by zero in Q(i)");
    if (sgn(o.im_) == 0) {
      re_ /= o.re_;
      im_ /= o.re_;
      return *this;
    }
    mpq_class n = o.norm();
    GaussianRational c = o.conj();
    *this *= c;
    re_ /= n;
    im_ /= n;
    return *this;
  }

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }

  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

  // Height: max bit size of the numerators and denominators involved.
  std::size_t height_bits() const {
    auto bits = [](const mpz_class& z) { return mpz_sizeinbase(z.get_mpz_t(), 2); };
    std::size_t h = bits(re_.get_num());
    h = std::max(h, bits(re_.get_den()));
    h = std::max(h, bits(im_.get_num()));
    h = std::max(h, bits(im_.get_den()));
    return h;
  }

  // Canonical text: "3/2", "-I", "1/2+3*I", "-2/3*I".
  std::string to_string() const {
    auto q = [](const mpq_class& v) { return v.get_str(); };
    if (sgn(im_) == 0) return q(re_);
    std::string ip;
    if (im_ == 1)
      ip = "I";
    else if (im_ == -1)
      ip = "-I";
    else
      ip = q(im_) + "*I";
    if (sgn(re_) == 0) return ip;
    if (ip[0] == '-') return q(re_) + ip;
    return q(re_) + "+" + ip;
  }

  friend std::ostream& operator<<(std::ostream& os, const GaussianRational& g) { return os << g.to_string(); }

 private:
  mpq_class re_;
  mpq_class im_;
};

inline GaussianRational conj(const GaussianRational& g) { return g.conj(); }
inline bool is_zero(const GaussianRational& g) { return g.is_zero(); }

}  // namespace crsegre
