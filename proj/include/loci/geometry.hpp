#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

namespace loci {

using Complex = std::complex<double>;

/// Base class for all geometric evaluation failures.
struct GeometryError : std::runtime_error {
    explicit GeometryError(const std::string& msg) : std::runtime_error(msg) {}
};

/// An operation received inputs it cannot act on (coincident points,
/// zero vectors, non-finite values, ...).
struct DegenerateInput : GeometryError {
    explicit DegenerateInput(const std::string& msg) : GeometryError(msg) {}
};

/// Thresholds shared by the geometric predicates. All strictly positive.
struct Tolerances {
    double tol_real = 1e-9;        // max |Im| per component after normalization
    double tol_degenerate = 1e-12; // relative zero-vector / zero-discriminant threshold
    double tol_return = 1e-6;      // loop-closure threshold for traces
};

/// Homogeneous 3-vector over the complex field.
struct Vec3c {
    Complex x{}, y{}, z{};

    Complex& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    const Complex& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

/// Projective plane point (x : y : z). Never the zero vector.
struct HomPoint {
    Vec3c v;
    HomPoint() = default;
    HomPoint(Complex x, Complex y, Complex z) : v{x, y, z} {}
    explicit HomPoint(const Vec3c& w) : v(w) {}
    static HomPoint affine(double x, double y) { return HomPoint{Complex(x), Complex(y), Complex(1.0)}; }
};

/// Projective line a·x + b·y + c·z = 0. Never the zero vector.
struct HomLine {
    Vec3c v;
    HomLine() = default;
    HomLine(Complex a, Complex b, Complex c) : v{a, b, c} {}
    explicit HomLine(const Vec3c& w) : v(w) {}
};

/// Circle with a (possibly complex) finite center and a squared radius that
/// is real nonnegative at declaration time but stays complex-typed so that
/// derived expressions remain closed under complex evaluation.
struct Circle {
    HomPoint center;   // z must be nonzero
    Complex radius_sq;
};

Complex dot(const Vec3c& a, const Vec3c& b);       // bilinear, no conjugation
Vec3c cross(const Vec3c& a, const Vec3c& b);
double norm2(const Vec3c& a);                      // Euclidean norm (sqrt of sum |.|^2)

/// Incidence form <l, P> = a·Px + b·Py + c·Pz.
Complex incidence(const HomLine& l, const HomPoint& p);

Vec3c normalize_vec(const Vec3c& v, double tol_degenerate = 1e-12);
/// Divide by the component of maximum modulus; that component becomes exactly 1.
HomPoint normalize(const HomPoint& p, double tol_degenerate = 1e-12);
HomLine normalize(const HomLine& l, double tol_degenerate = 1e-12);

/// Chordal projective distance ||P x Q|| / (||P||·||Q||). Zero iff the two
/// representatives describe the same projective point; invariant under
/// rescaling of either argument.
double projective_distance(const HomPoint& p, const HomPoint& q);
double projective_distance(const HomLine& l, const HomLine& m);

/// True iff after max-modulus normalization every component has |Im| <= tol_real
/// (projective realness: real up to a global complex phase).
bool is_real_point(const HomPoint& p, double tol_real);

/// Line through two projectively distinct points.
HomLine join(const HomPoint& p, const HomPoint& q, double tol_degenerate = 1e-12);
/// Intersection of two projectively distinct lines (z = 0 for real parallels).
HomPoint meet(const HomLine& l, const HomLine& m, double tol_degenerate = 1e-12);

/// Line through P perpendicular to l: (-l2·Pz, l1·Pz, l2·Px - l1·Py).
HomLine perpendicular_through(const HomLine& l, const HomPoint& p, double tol_degenerate = 1e-12);

/// Both intersections of a circle and a line, order unspecified. Complex
/// outputs are legal; tangency yields a double point. Uses the numerically
/// stable quadratic root pairing (q-formula).
std::pair<HomPoint, HomPoint> circle_line_meet(const Circle& c, const HomLine& l,
                                               double tol_degenerate = 1e-12);

/// Both intersections of two circles via the radical line.
std::pair<HomPoint, HomPoint> circle_circle_meet(const Circle& c1, const Circle& c2,
                                                 double tol_degenerate = 1e-12);

/// Midpoint of two finite points: (Px·Qz + Qx·Pz, Py·Qz + Qy·Pz, 2·Pz·Qz).
HomPoint midpoint(const HomPoint& p, const HomPoint& q, double tol_degenerate = 1e-12);

bool finite(const Vec3c& v);
void require_finite(const Vec3c& v, const char* what);

} // namespace loci
