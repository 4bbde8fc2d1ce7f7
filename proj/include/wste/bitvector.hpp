// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace wste {

using BigUint = boost::multiprecision::cpp_int;

/// Fixed-width unsigned bit-vector value. The stored integer is always
/// reduced modulo 2^width.
class BitVector {
 public:
  BitVector() = default;
  BitVector(unsigned width, BigUint value);

  static BitVector from_u64(unsigned width, std::uint64_t value);
  static BitVector zeros(unsigned width) { return BitVector(width, 0); }
  static BitVector ones(unsigned width);

  unsigned width() const { return width_; }
  const BigUint& value() const { return value_; }
  std::uint64_t to_u64() const;

  bool bit(unsigned i) const;
  bool is_zero() const { return value_ == 0; }
  bool is_ones() const;

  std::string to_binary() const;
  std::string to_hex() const;
  std::string to_decimal() const;

  friend bool operator==(const BitVector& a, const BitVector& b) {
    return a.width_ == b.width_ && a.value_ == b.value_;
  }
  friend bool operator!=(const BitVector& a, const BitVector& b) { return !(a == b); }

 private:
  unsigned width_ = 0;
  BigUint value_ = 0;
};

BigUint width_mask(unsigned width);

// Unsigned modular arithmetic. Binary operations require equal widths.
BitVector bv_add(const BitVector& a, const BitVector& b);
BitVector bv_sub(const BitVector& a, const BitVector& b);
BitVector bv_mul(const BitVector& a, const BitVector& b);
// Division by zero follows SMT-LIB: udiv yields all-ones, urem the dividend.
BitVector bv_udiv(const BitVector& a, const BitVector& b);
BitVector bv_urem(const BitVector& a, const BitVector& b);
BitVector bv_and(const BitVector& a, const BitVector& b);
BitVector bv_or(const BitVector& a, const BitVector& b);
BitVector bv_xor(const BitVector& a, const BitVector& b);
BitVector bv_not(const BitVector& a);
BitVector bv_shl(const BitVector& a, const BitVector& amount);
BitVector bv_lshr(const BitVector& a, const BitVector& amount);
BitVector bv_shl(const BitVector& a, unsigned amount);
BitVector bv_lshr(const BitVector& a, unsigned amount);
BitVector bv_extract(const BitVector& a, unsigned hi, unsigned lo);
BitVector bv_concat(const BitVector& hi, const BitVector& lo);
BitVector bv_zext(const BitVector& a, unsigned width);
bool bv_ult(const BitVector& a, const BitVector& b);
bool bv_ule(const BitVector& a, const BitVector& b);

}  // namespace wste
