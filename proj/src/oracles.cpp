#include "loci/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace loci {

ImplicitCurve projline_curve() {
    return ImplicitCurve{
        "projline",
        {},
        [](double x, double) { return (x - 2.0) * (x - 2.0); },
        [](double x, double) { return std::hypot(2.0 * (x - 2.0), 0.0) + 1.0; },
    };
}

ImplicitCurve conchoid_curve(double a, double b) {
    auto f = [a, b](double x, double y) {
        double ya = y + a;
        return ya * ya * (x * x + y * y) - b * b * y * y;
    };
    auto scale = [a, b](double x, double y) {
        double ya = y + a;
        double fx = 2.0 * x * ya * ya;
        double fy = 2.0 * ya * (x * x + y * y) + 2.0 * y * ya * ya - 2.0 * b * b * y;
        return std::hypot(fx, fy) + 1.0;
    };
    return ImplicitCurve{"conchoid", {a, b}, f, scale};
}

ImplicitCurve watt_curve(double a, double b, double c) {
    double k = a * a + b * b - c * c;
    auto f = [a, b, k](double x, double y) {
        double u = x * x + y * y;
        double v = u - k;
        return u * v * v + 4.0 * a * a * y * y * (u - b * b);
    };
    auto scale = [a, b, k](double x, double y) {
        double u = x * x + y * y;
        double v = u - k;
        double du = v * v + 2.0 * u * v; // d f / d u without the second term
        double fx = du * 2.0 * x + 4.0 * a * a * y * y * 2.0 * x;
        double fy = du * 2.0 * y + 8.0 * a * a * y * (u - b * b) + 8.0 * a * a * y * y * y;
        return std::hypot(fx, fy) + 1.0;
    };
    return ImplicitCurve{"watt", {a, b, c}, f, scale};
}

ImplicitCurve fourbar_sextic_curve() {
    auto f = [](double x, double y) {
        double p = 6.0 + 5.0 * x - 2.0 * x * x * x;
        double q = -45.0 + 4.0 * x * (-2.0 + 2.0 * x + x * x * x);
        double y2 = y * y;
        return p * p + 3.0 * q * y2 + 4.0 * (11.0 + 3.0 * x * x) * y2 * y2 +
               4.0 * y2 * y2 * y2;
    };
    auto scale = [](double x, double y) {
        double p = 6.0 + 5.0 * x - 2.0 * x * x * x;
        double q = -45.0 + 4.0 * x * (-2.0 + 2.0 * x + x * x * x);
        double y2 = y * y;
        double fx = 2.0 * p * (5.0 - 6.0 * x * x) +
                    3.0 * y2 * (4.0 * (-2.0 + 2.0 * x + x * x * x) + 4.0 * x * (2.0 + 3.0 * x * x)) +
                    24.0 * x * y2 * y2;
        double fy = 6.0 * q * y + 16.0 * y * y2 * (11.0 + 3.0 * x * x) + 24.0 * y * y2 * y2;
        return std::hypot(fx, fy) + 1.0;
    };
    return ImplicitCurve{"fourbar-sextic", {}, f, scale};
}

ImplicitCurve conic_curve(const std::array<double, 6>& co) {
    auto f = [co](double x, double y) {
        return co[0] * x * x + co[1] * x * y + co[2] * y * y + co[3] * x + co[4] * y + co[5];
    };
    auto scale = [co](double x, double y) {
        double fx = 2.0 * co[0] * x + co[1] * y + co[3];
        double fy = co[1] * x + 2.0 * co[2] * y + co[4];
        return std::hypot(fx, fy) + 1.0;
    };
    return ImplicitCurve{"conic5", {co.begin(), co.end()}, f, scale};
}

ResidualReport residual_implicit(const ImplicitCurve& curve, const Locus& locus) {
    ResidualReport rep;
    for (const auto& arc : locus.arcs) {
        for (const auto& p : arc.points) {
            if (p.at_infinity) {
                ++rep.infinite_skipped;
                continue;
            }
            double r = std::abs(curve.evaluator(p.x, p.y)) / curve.natural_scale(p.x, p.y);
            rep.max_residual = std::max(rep.max_residual, r);
            ++rep.points_checked;
        }
    }
    return rep;
}

std::array<double, 6> conic_through_five(const std::array<std::pair<double, double>, 5>& pts) {
    Eigen::Matrix<double, 5, 6> m;
    for (int i = 0; i < 5; ++i) {
        double x = pts[i].first, y = pts[i].second;
        m(i, 0) = x * x;
        m(i, 1) = x * y;
        m(i, 2) = y * y;
        m(i, 3) = x;
        m(i, 4) = y;
        m(i, 5) = 1.0;
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 5, 6>> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv(0) <= 0.0 || sv(4) <= 1e-10 * sv(0)) {
        throw DegenerateConfiguration("conic_through_five: kernel is not 1-dimensional");
    }
    Eigen::Matrix<double, 6, 1> k = svd.matrixV().col(5);
    k.normalize();
    for (int i = 0; i < 6; ++i) {
        if (std::abs(k(i)) > 1e-14) {
            if (k(i) < 0.0) k = -k;
            break;
        }
    }
    std::array<double, 6> out;
    for (int i = 0; i < 6; ++i) out[i] = k(i);
    return out;
}

double hausdorff(const std::vector<std::pair<double, double>>& a,
                 const std::vector<std::pair<double, double>>& b) {
    auto one_sided = [](const std::vector<std::pair<double, double>>& from,
                        const std::vector<std::pair<double, double>>& to) {
        double sup = 0.0;
        for (const auto& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to) {
                best = std::min(best, std::hypot(p.first - q.first, p.second - q.second));
            }
            sup = std::max(sup, best);
        }
        return sup;
    };
    if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
    return std::max(one_sided(a, b), one_sided(b, a));
}

std::vector<std::pair<double, double>> linkage_oracle(double a, double b1, double two_c,
                                                      double b2, int n_samples) {
    std::vector<std::pair<double, double>> out;
    if (n_samples < 8) return out;
    const double bx = a, by = 0.0; // rocker anchor
    for (int i = 0; i < n_samples; ++i) {
        double th = 2.0 * 3.14159265358979323846 * i / n_samples;
        double cx = -a + b1 * std::cos(th);
        double cy = b1 * std::sin(th);
        // intersections of circle(B, b2) and circle(C, two_c)
        double dx = cx - bx, dy = cy - by;
        double d2 = dx * dx + dy * dy;
        if (d2 <= 0.0) continue;
        double d = std::sqrt(d2);
        double u = (d2 + b2 * b2 - two_c * two_c) / (2.0 * d); // along B->C
        double h2 = b2 * b2 - u * u;
        if (h2 < 0.0) continue; // complex configuration: linkage not assemblable
        double h = std::sqrt(h2);
        double ux = dx / d, uy = dy / d;
        double fx = bx + u * ux, fy = by + u * uy;
        for (double sign : {1.0, -1.0}) {
            double px = fx - sign * h * uy;
            double py = fy + sign * h * ux;
            out.emplace_back(0.5 * (cx + px), 0.5 * (cy + py));
            if (h == 0.0) break;
        }
    }
    return out;
}

double angle_at(std::pair<double, double> p, std::pair<double, double> apex,
                std::pair<double, double> q) {
    double ax = p.first - apex.first, ay = p.second - apex.second;
    double bx = q.first - apex.first, by = q.second - apex.second;
    double na = std::hypot(ax, ay), nb = std::hypot(bx, by);
    if (na == 0.0 || nb == 0.0) throw DegenerateInput("angle_at: zero-length arm");
    double c = (ax * bx + ay * by) / (na * nb);
    c = std::clamp(c, -1.0, 1.0);
    return std::acos(c);
}

std::vector<std::pair<double, double>> polyline_circle_intersections(
    const Locus& locus, std::pair<double, double> center, double radius, double merge_tol) {
    std::vector<std::pair<double, double>> hits;
    for (const auto& arc : locus.arcs) {
        const LocusPoint* prev = nullptr;
        for (const auto& p : arc.points) {
            if (p.at_infinity) {
                prev = nullptr;
                continue;
            }
            if (prev) {
                double ex = prev->x - center.first, ey = prev->y - center.second;
                double dx = p.x - prev->x, dy = p.y - prev->y;
                double A = dx * dx + dy * dy;
                if (A > 0.0) {
                    double B = 2.0 * (dx * ex + dy * ey);
                    double C = ex * ex + ey * ey - radius * radius;
                    double disc = B * B - 4.0 * A * C;
                    if (disc >= 0.0) {
                        double sq = std::sqrt(disc);
                        for (double sg : {-1.0, 1.0}) {
                            double s = (-B + sg * sq) / (2.0 * A);
                            if (s >= 0.0 && s <= 1.0) {
                                hits.emplace_back(prev->x + s * dx, prev->y + s * dy);
                            }
                        }
                    }
                }
            }
            prev = &p;
        }
    }
    // merge consecutive near-duplicates (tangency, shared segment endpoints)
    std::vector<std::pair<double, double>> merged;
    for (const auto& h : hits) {
        if (!merged.empty() &&
            std::hypot(h.first - merged.back().first, h.second - merged.back().second) <=
                std::max(merge_tol, 1e-7 * (1.0 + radius))) {
            continue;
        }
        merged.push_back(h);
    }
    return merged;
}

} // namespace loci
