// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dscat {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

/// Base of every error raised by the library. `kind()` names the failure
/// class so callers (the CLI in particular) can map it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error("domain", w) {}
};
struct ValidationError : Error {
  explicit ValidationError(const std::string& w) : Error("validation", w) {}
};
struct SizeError : Error {
  explicit SizeError(const std::string& w) : Error("size", w) {}
};
struct SolverError : Error {
  explicit SolverError(const std::string& w) : Error("solver", w) {}
};
struct ParseError : Error {
  explicit ParseError(const std::string& w) : Error("parse", w) {}
};
struct RangeError : Error {
  explicit RangeError(const std::string& w) : Error("range", w) {}
};

/// Unconjugated bilinear product a.b of complex 3-vectors.
inline cplx bilinear_dot(const CVec3& a, const CVec3& b) {
  return a(0) * b(0) + a(1) * b(1) + a(2) * b(2);
}

inline cplx bilinear_dot(const CVec3& a, const Vec3& x) {
  return a(0) * x(0) + a(1) * x(1) + a(2) * x(2);
}

/// 64-bit FNV-1a, used for config and mesh digests embedded in outputs.
inline std::uint64_t fnv1a(const void* data, std::size_t n,
                           std::uint64_t h = 1469598103934665603ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) s[static_cast<std::size_t>(i)] = digits[h & 0xf];
  return s;
}

}  // namespace dscat
