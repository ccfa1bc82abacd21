#include "loci/geometry.hpp"

#include <cmath>

namespace loci {

Complex dot(const Vec3c& a, const Vec3c& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

Vec3c cross(const Vec3c& a, const Vec3c& b) {
    return Vec3c{a.y * b.z - a.z * b.y,
                 a.z * b.x - a.x * b.z,
                 a.x * b.y - a.y * b.x};
}

double norm2(const Vec3c& a) {
    return std::sqrt(std::norm(a.x) + std::norm(a.y) + std::norm(a.z));
}

Complex incidence(const HomLine& l, const HomPoint& p) {
    return dot(l.v, p.v);
}

bool finite(const Vec3c& v) {
    for (int i = 0; i < 3; ++i) {
        if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) return false;
    }
    return true;
}

void require_finite(const Vec3c& v, const char* what) {
    if (!finite(v)) throw DegenerateInput(std::string(what) + ": non-finite value");
}

Vec3c normalize_vec(const Vec3c& v, double tol_degenerate) {
    require_finite(v, "normalize");
    int best = 0;
    double best_mod = std::abs(v[0]);
    for (int i = 1; i < 3; ++i) {
        double m = std::abs(v[i]);
        if (m > best_mod) {
            best = i;
            best_mod = m;
        }
    }
    if (best_mod <= tol_degenerate) throw DegenerateInput("normalize: zero vector");
    Complex d = v[best];
    Vec3c out{v.x / d, v.y / d, v.z / d};
    out[best] = Complex(1.0, 0.0); // exact by construction
    require_finite(out, "normalize");
    return out;
}

HomPoint normalize(const HomPoint& p, double tol_degenerate) {
    return HomPoint{normalize_vec(p.v, tol_degenerate)};
}

HomLine normalize(const HomLine& l, double tol_degenerate) {
    return HomLine{normalize_vec(l.v, tol_degenerate)};
}

static double projective_distance_vec(const Vec3c& a, const Vec3c& b) {
    double na = norm2(a);
    double nb = norm2(b);
    if (na == 0.0 || nb == 0.0) throw DegenerateInput("projective_distance: zero vector");
    return norm2(cross(a, b)) / (na * nb);
}

double projective_distance(const HomPoint& p, const HomPoint& q) {
    return projective_distance_vec(p.v, q.v);
}

double projective_distance(const HomLine& l, const HomLine& m) {
    return projective_distance_vec(l.v, m.v);
}

bool is_real_point(const HomPoint& p, double tol_real) {
    Vec3c n = normalize_vec(p.v);
    for (int i = 0; i < 3; ++i) {
        if (std::abs(n[i].imag()) > tol_real) return false;
    }
    return true;
}

HomLine join(const HomPoint& p, const HomPoint& q, double tol_degenerate) {
    require_finite(p.v, "join");
    require_finite(q.v, "join");
    Vec3c c = cross(p.v, q.v);
    if (norm2(c) <= tol_degenerate * norm2(p.v) * norm2(q.v)) {
        throw DegenerateInput("join: projectively identical points");
    }
    require_finite(c, "join");
    return HomLine{c};
}

HomPoint meet(const HomLine& l, const HomLine& m, double tol_degenerate) {
    require_finite(l.v, "meet");
    require_finite(m.v, "meet");
    Vec3c c = cross(l.v, m.v);
    if (norm2(c) <= tol_degenerate * norm2(l.v) * norm2(m.v)) {
        throw DegenerateInput("meet: projectively identical lines");
    }
    require_finite(c, "meet");
    return HomPoint{c};
}

HomLine perpendicular_through(const HomLine& l, const HomPoint& p, double tol_degenerate) {
    require_finite(l.v, "perpendicular_through");
    require_finite(p.v, "perpendicular_through");
    Vec3c a{-l.v.y * p.v.z, l.v.x * p.v.z, l.v.y * p.v.x - l.v.x * p.v.y};
    if (norm2(a) <= tol_degenerate * norm2(l.v) * norm2(p.v)) {
        throw DegenerateInput("perpendicular_through: degenerate configuration");
    }
    require_finite(a, "perpendicular_through");
    return HomLine{a};
}

namespace {

// Roots of A s^2 + B s + C with the stable pairing: q = -(B + sgn*sqrt(disc))/2,
// sgn chosen so B and sgn*sqrt(disc) do not cancel; roots q/A and C/q.
std::pair<Complex, Complex> stable_quadratic_roots(Complex A, Complex B, Complex C) {
    Complex disc = B * B - 4.0 * A * C;
    Complex sq = std::sqrt(disc);
    double sgn = 1.0;
    if (std::real(std::conj(B) * sq) < 0.0) sgn = -1.0;
    Complex q = -0.5 * (B + sgn * sq);
    double scale = std::abs(A) * std::abs(C);
    if (std::norm(q) <= 1e-300 || std::norm(q) * 1e12 < scale) {
        // Both |B| and |disc| tiny: the q-formula loses; direct form is safe here.
        return {(-B + sq) / (2.0 * A), (-B - sq) / (2.0 * A)};
    }
    return {q / A, C / q};
}

struct AffineCircle {
    Complex cx, cy, r2;
};

AffineCircle affine_circle(const Circle& c, double tol_degenerate) {
    require_finite(c.center.v, "circle");
    double n = norm2(c.center.v);
    if (std::abs(c.center.v.z) <= tol_degenerate * n) {
        throw DegenerateInput("circle: center at infinity");
    }
    return AffineCircle{c.center.v.x / c.center.v.z, c.center.v.y / c.center.v.z, c.radius_sq};
}

} // namespace

std::pair<HomPoint, HomPoint> circle_line_meet(const Circle& c, const HomLine& l,
                                               double tol_degenerate) {
    require_finite(l.v, "circle_line_meet");
    AffineCircle ac = affine_circle(c, tol_degenerate);

    Complex a = l.v.x, b = l.v.y, cc = l.v.z;
    double nl = norm2(l.v);
    if (nl <= tol_degenerate) throw DegenerateInput("circle_line_meet: zero line");

    // Base point on the line, choosing the larger of a, b as the pivot.
    Complex p0x, p0y;
    if (std::abs(a) >= std::abs(b)) {
        if (std::abs(a) <= tol_degenerate * nl) {
            throw DegenerateInput("circle_line_meet: line at infinity");
        }
        p0x = -cc / a;
        p0y = Complex(0.0);
    } else {
        p0x = Complex(0.0);
        p0y = -cc / b;
    }
    Complex dx = b, dy = -a; // direction of the line

    Complex ex = p0x - ac.cx;
    Complex ey = p0y - ac.cy;
    Complex A = dx * dx + dy * dy; // vanishes only for isotropic directions
    Complex B = 2.0 * (dx * ex + dy * ey);
    Complex C = ex * ex + ey * ey - ac.r2;
    if (std::abs(A) <= tol_degenerate * (std::abs(B) + std::abs(C) + 1.0)) {
        throw DegenerateInput("circle_line_meet: degenerate quadratic (isotropic line)");
    }

    auto [s1, s2] = stable_quadratic_roots(A, B, C);
    HomPoint r1{p0x + s1 * dx, p0y + s1 * dy, Complex(1.0)};
    HomPoint r2{p0x + s2 * dx, p0y + s2 * dy, Complex(1.0)};
    require_finite(r1.v, "circle_line_meet");
    require_finite(r2.v, "circle_line_meet");
    return {r1, r2};
}

std::pair<HomPoint, HomPoint> circle_circle_meet(const Circle& c1, const Circle& c2,
                                                 double tol_degenerate) {
    AffineCircle a1 = affine_circle(c1, tol_degenerate);
    AffineCircle a2 = affine_circle(c2, tol_degenerate);

    // Radical line: difference of the two membership equations.
    Complex la = 2.0 * (a2.cx - a1.cx);
    Complex lb = 2.0 * (a2.cy - a1.cy);
    Complex lc = (a1.cx * a1.cx + a1.cy * a1.cy - a1.r2) -
                 (a2.cx * a2.cx + a2.cy * a2.cy - a2.r2);
    double scale = std::abs(a1.cx) + std::abs(a1.cy) + std::abs(a2.cx) + std::abs(a2.cy) + 1.0;
    if (std::abs(la) + std::abs(lb) <= tol_degenerate * scale) {
        throw DegenerateInput("circle_circle_meet: concentric circles");
    }
    return circle_line_meet(c1, HomLine{la, lb, lc}, tol_degenerate);
}

HomPoint midpoint(const HomPoint& p, const HomPoint& q, double tol_degenerate) {
    require_finite(p.v, "midpoint");
    require_finite(q.v, "midpoint");
    if (std::abs(p.v.z) <= tol_degenerate * norm2(p.v) ||
        std::abs(q.v.z) <= tol_degenerate * norm2(q.v)) {
        throw DegenerateInput("midpoint: point at infinity");
    }
    Vec3c m{p.v.x * q.v.z + q.v.x * p.v.z,
            p.v.y * q.v.z + q.v.y * p.v.z,
            2.0 * p.v.z * q.v.z};
    require_finite(m, "midpoint");
    return HomPoint{m};
}

} // namespace loci
