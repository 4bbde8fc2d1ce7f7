// SPDX-License-Identifier: Apache-2.0

#include "wste/bitvector.hpp"

#include <algorithm>
#include <stdexcept>

namespace wste {

BigUint width_mask(unsigned width) {
  BigUint m = 1;
  m <<= width;
  return m - 1;
}

BitVector::BitVector(unsigned width, BigUint value) : width_(width), value_(std::move(value)) {
  if (width_ == 0) throw std::invalid_argument("bit-vector width must be positive");
  if (value_ < 0) throw std::invalid_argument("bit-vector value must be non-negative");
  if (width_ < 64) {
    value_ &= (std::uint64_t{1} << width_) - 1;
  } else if (boost::multiprecision::msb(value_ == 0 ? BigUint(1) : value_) >= width_) {
    value_ &= width_mask(width_);
  }
}

BitVector BitVector::from_u64(unsigned width, std::uint64_t value) {
  return BitVector(width, BigUint(value));
}

BitVector BitVector::ones(unsigned width) { return BitVector(width, width_mask(width)); }

std::uint64_t BitVector::to_u64() const {
  return static_cast<std::uint64_t>(value_ & BigUint(std::numeric_limits<std::uint64_t>::max()));
}

bool BitVector::bit(unsigned i) const { return i < width_ && boost::multiprecision::bit_test(value_, i); }

bool BitVector::is_ones() const { return value_ == width_mask(width_); }

std::string BitVector::to_binary() const {
  std::string s(width_, '0');
  for (unsigned i = 0; i < width_; ++i)
    if (bit(i)) s[width_ - 1 - i] = '1';
  return s;
}

std::string BitVector::to_hex() const {
  static const char* digits = "0123456789abcdef";
  unsigned n = (width_ + 3) / 4;
  std::string s(n, '0');
  for (unsigned d = 0; d < n; ++d) {
    unsigned v = 0;
    for (unsigned b = 0; b < 4; ++b)
      if (bit(d * 4 + b)) v |= 1u << b;
    s[n - 1 - d] = digits[v];
  }
  return s;
}

std::string BitVector::to_decimal() const { return value_.str(); }

namespace {

void require_same_width(const BitVector& a, const BitVector& b, const char* op) {
  if (a.width() != b.width())
    throw std::invalid_argument(std::string(op) + ": width mismatch " + std::to_string(a.width()) +
                                " vs " + std::to_string(b.width()));
}

}  // namespace

BitVector bv_add(const BitVector& a, const BitVector& b) {
  require_same_width(a, b, "bvadd");
  return BitVector(a.width(), a.value() + b.value());
}

BitVector bv_sub(const BitVector& a, const BitVector& b) {
  require_same_width(a, b, "bvsub");
  BigUint modulus = BigUint(1) << a.width();
  return BitVector(a.width(), a.value() + modulus - b.value());
}

BitVector bv_mul(const BitVector& a, const BitVector& b) {
  require_same_width(a, b, "bvmul");
  return BitVector(a.width(), a.value() * b.value());
}

BitVector bv_udiv(const BitVector& a, const BitVector& b) {
  require_same_width(a, b, "bvudiv");
  if (b.is_zero()) return BitVector::ones(a.width());
  return BitVector(a.width(), a.value() / b.value());
}

BitVector bv_urem(const BitVector& a, const BitVector& b) {
  require_same_width(a, b, "bvurem");
  if (b.is_zero()) return a;
  return BitVector(a.width(), a.value() % b.value());
}

BitVector bv_and(const BitVector& a, const BitVector& b) {
  require_same_width(a, b, "bvand");
  return BitVector(a.width(), a.value() & b.value());
}

BitVector bv_or(const BitVector& a, const BitVector& b) {
  require_same_width(a, b, "bvor");
  return BitVector(a.width(), a.value() | b.value());
}

BitVector bv_xor(const BitVector& a, const BitVector& b) {
  require_same_width(a, b, "bvxor");
  return BitVector(a.width(), a.value() ^ b.value());
}

BitVector bv_not(const BitVector& a) { return BitVector(a.width(), a.value() ^ width_mask(a.width())); }

BitVector bv_shl(const BitVector& a, unsigned amount) {
  if (amount >= a.width()) return BitVector::zeros(a.width());
  return BitVector(a.width(), a.value() << amount);
}

BitVector bv_lshr(const BitVector& a, unsigned amount) {
  if (amount >= a.width()) return BitVector::zeros(a.width());
  return BitVector(a.width(), a.value() >> amount);
}

BitVector bv_shl(const BitVector& a, const BitVector& amount) {
  require_same_width(a, amount, "bvshl");
  if (amount.value() >= a.width()) return BitVector::zeros(a.width());
  return bv_shl(a, static_cast<unsigned>(amount.to_u64()));
}

BitVector bv_lshr(const BitVector& a, const BitVector& amount) {
  require_same_width(a, amount, "bvlshr");
  if (amount.value() >= a.width()) return BitVector::zeros(a.width());
  return bv_lshr(a, static_cast<unsigned>(amount.to_u64()));
}

BitVector bv_extract(const BitVector& a, unsigned hi, unsigned lo) {
  if (lo > hi || hi >= a.width())
    throw std::invalid_argument("extract [" + std::to_string(hi) + ":" + std::to_string(lo) +
                                "] out of range for width " + std::to_string(a.width()));
  return BitVector(hi - lo + 1, a.value() >> lo);
}

BitVector bv_concat(const BitVector& hi, const BitVector& lo) {
  return BitVector(hi.width() + lo.width(), (hi.value() << lo.width()) | lo.value());
}

BitVector bv_zext(const BitVector& a, unsigned width) {
  if (width < a.width()) throw std::invalid_argument("zext to a narrower width");
  return BitVector(width, a.value());
}

bool bv_ult(const BitVector& a, const BitVector& b) {
  require_same_width(a, b, "bvult");
  return a.value() < b.value();
}

bool bv_ule(const BitVector& a, const BitVector& b) {
  require_same_width(a, b, "bvule");
  return a.value() <= b.value();
}

}  // namespace wste
