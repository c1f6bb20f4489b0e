#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace mibie {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }

// Argument outside the supported domain of a special function or kernel.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Physically or numerically inadmissible input (parameters, config values).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Degenerate numerical situation, e.g. coalescing roots.
class DegenerateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Discretisation cannot be honoured, e.g. a QBX disk crosses the boundary.
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mibie
