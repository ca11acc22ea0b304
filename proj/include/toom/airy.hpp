#pragma once

namespace toom::rmt {

/// Lower/upper end of the range served by airy_ai.
inline constexpr double kAiryMin = -20.0;
inline constexpr double kAiryMax = 40.0;

/// Airy function Ai(x) on [-20, 40]. Absolute error below 1e-12 for x <= 0,
/// relative error below 1e-12 for x > 0. Throws DomainError outside the range.
double airy_ai(double x);

/// Ai'(x) on the same range and with the same accuracy.
double airy_ai_prime(double x);

/// Ai(x) exp(2/3 x^{3/2}) for x >= 0, finite for arbitrarily large x.
/// Kernels that multiply Ai by a growing exponential use this form so the
/// product never under- or overflows.
double airy_ai_scaled(double x);

/// Ai(x) for any x >= -20 (underflows to 0 in the far right tail).
double airy_ai_unbounded(double x);

}  // namespace toom::rmt
