#pragma once

#include <cmath>
#include <complex>

#ifdef __FAST_MATH__
#error "compensated summation is defeated by -ffast-math"
#endif

namespace magcas {

/// Neumaier's variant of Kahan summation: the running compensation also
/// captures the error when the addend is larger than the partial sum.
template <typename T = double>
class BasicCompensatedSum {
 public:
  void add(T value) {
    const T t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }

  BasicCompensatedSum& operator+=(T value) {
    add(value);
    return *this;
  }

  T value() const { return sum_ + compensation_; }

 private:
  T sum_ = 0;
  T compensation_ = 0;
};

/// Component-wise compensated sum of complex values.
template <typename T = double>
class BasicCompensatedComplexSum {
 public:
  void add(std::complex<T> value) {
    re_.add(value.real());
    im_.add(value.imag());
  }

  BasicCompensatedComplexSum& operator+=(std::complex<T> value) {
    add(value);
    return *this;
  }

  std::complex<T> value() const { return {re_.value(), im_.value()}; }

 private:
  BasicCompensatedSum<T> re_;
  BasicCompensatedSum<T> im_;
};

using CompensatedSum = BasicCompensatedSum<double>;
using CompensatedComplexSum = BasicCompensatedComplexSum<double>;

}  // namespace magcas
