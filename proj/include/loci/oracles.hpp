#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "loci/tracer.hpp"

namespace loci {

/// A plane curve f(x, y) = 0 with a positive normalizer for residuals
/// (gradient norm + 1, meaningful near both flat and steep regions).
struct ImplicitCurve {
    std::string name;
    std::vector<double> parameters;
    std::function<double(double, double)> evaluator;
    std::function<double(double, double)> natural_scale;
};

ImplicitCurve projline_curve();
ImplicitCurve conchoid_curve(double a, double b);
ImplicitCurve watt_curve(double a, double b, double c);
ImplicitCurve fourbar_sextic_curve();
ImplicitCurve conic_curve(const std::array<double, 6>& coeffs);

struct ResidualReport {
    double max_residual = 0.0;
    std::size_t points_checked = 0;
    std::size_t infinite_skipped = 0;
};

/// Max over finite locus points of |f(x,y)| / natural_scale(x,y).
ResidualReport residual_implicit(const ImplicitCurve& curve, const Locus& locus);

struct DegenerateConfiguration : GeometryError {
    explicit DegenerateConfiguration(const std::string& msg) : GeometryError(msg) {}
};

/// Conic coefficients (x^2, xy, y^2, x, y, 1) through five points: the kernel
/// direction of the 5x6 design matrix, unit norm, first nonzero coefficient
/// positive. Throws DegenerateConfiguration when the kernel is not 1-dimensional.
std::array<double, 6> conic_through_five(const std::array<std::pair<double, double>, 5>& pts);

/// Symmetric Hausdorff distance between two finite point sets (brute force).
double hausdorff(const std::vector<std::pair<double, double>>& a,
                 const std::vector<std::pair<double, double>>& b);

/// Brute-force four-bar sampler: ground [(-a,0), (a,0)], crank b1 at (-a, 0),
/// coupler 2c, rocker b2 at (a, 0); emits the coupler midpoint for every real
/// assembly over n_samples uniform crank angles.
std::vector<std::pair<double, double>> linkage_oracle(double a, double b1, double two_c,
                                                      double b2, int n_samples);

/// Angle at `apex` between the rays to p and q, in [0, pi].
double angle_at(std::pair<double, double> p, std::pair<double, double> apex,
                std::pair<double, double> q);

/// Real intersections of the locus polyline (finite points, per arc) with a
/// real circle; parameter-sorted, consecutive duplicates merged.
std::vector<std::pair<double, double>> polyline_circle_intersections(
    const Locus& locus, std::pair<double, double> center, double radius,
    double merge_tol = 1e-9);

} // namespace loci
