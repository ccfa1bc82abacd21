#include <doctest.h>

#include <cmath>
#include <random>

#include "loci/geometry.hpp"

using namespace loci;

namespace {

const double kSqrt3 = 1.7320508075688772;

bool proj_eq(const HomPoint& a, const HomPoint& b, double tol = 1e-12) {
    return projective_distance(a, b) <= tol;
}

bool proj_eq(const HomLine& a, const HomLine& b, double tol = 1e-12) {
    return projective_distance(a, b) <= tol;
}

} // namespace

TEST_CASE("join basic cases") {
    CHECK(proj_eq(join(HomPoint{0, 0, 1}, HomPoint{1, 0, 1}), HomLine{0, -1, 0}));
    CHECK(proj_eq(join(HomPoint{1, 0, 1}, HomPoint{0, 1, 1}), HomLine{-1, -1, 1}));
    CHECK_THROWS_AS(join(HomPoint{1, 2, 1}, HomPoint{2, 4, 2}), DegenerateInput);
}

TEST_CASE("meet basic cases") {
    CHECK(proj_eq(meet(HomLine{0, 1, 0}, HomLine{1, 0, 0}), HomPoint{0, 0, -1}));
    // parallel vertical lines meet at the vertical direction at infinity
    CHECK(proj_eq(meet(HomLine{1, 0, -1}, HomLine{1, 0, -2}), HomPoint{0, 1, 0}));
    CHECK_THROWS_AS(meet(HomLine{1, 2, 3}, HomLine{2, 4, 6}), DegenerateInput);
}

TEST_CASE("meet reproduces the circle-to-line projection formula") {
    // a = (0, 1+t^2, -2t), b = (1, 0, -2)  =>  B ~ (2(1+t^2), 2t, 1+t^2)
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        Complex t(u(rng), u(rng));
        HomLine a{Complex(0.0), 1.0 + t * t, -2.0 * t};
        HomLine b{1, 0, -2};
        HomPoint expected{2.0 * (1.0 + t * t), 2.0 * t, 1.0 + t * t};
        CHECK(proj_eq(meet(a, b), expected, 1e-10));
    }
}

TEST_CASE("perpendicular_through matches the worked instance") {
    // l = (1,0,-2), P = (1-t^2, 2t, 1+t^2)  =>  (0, 1+t^2, -2t)
    double t = 0.73;
    HomLine l{1, 0, -2};
    HomPoint p{1 - t * t, 2 * t, 1 + t * t};
    CHECK(proj_eq(perpendicular_through(l, p), HomLine{0.0, 1 + t * t, -2 * t}));
    CHECK(proj_eq(perpendicular_through(HomLine{0, 1, 0}, HomPoint{0, 0, 1}),
                  HomLine{-1, 0, 0}));
    CHECK(proj_eq(perpendicular_through(HomLine{1, 0, 0}, HomPoint{2, 3, 1}),
                  HomLine{0, 1, -3}));
}

TEST_CASE("circle_line_meet on the unit circle") {
    Circle unit{HomPoint{0, 0, 1}, Complex(1.0)};

    auto [a1, a2] = circle_line_meet(unit, HomLine{0, 1, 0}); // x-axis
    bool ordered = proj_eq(a1, HomPoint{1, 0, 1}, 1e-10);
    CHECK(proj_eq(ordered ? a1 : a2, HomPoint{1, 0, 1}, 1e-10));
    CHECK(proj_eq(ordered ? a2 : a1, HomPoint{-1, 0, 1}, 1e-10));

    auto [t1, t2] = circle_line_meet(unit, HomLine{1, 0, -1}); // tangent x=1
    CHECK(proj_eq(t1, HomPoint{1, 0, 1}, 1e-7));
    CHECK(proj_eq(t2, HomPoint{1, 0, 1}, 1e-7));

    auto [c1, c2] = circle_line_meet(unit, HomLine{1, 0, -2}); // x=2, complex pair
    HomPoint up{2.0, Complex(0.0, kSqrt3), 1.0};
    HomPoint dn{2.0, Complex(0.0, -kSqrt3), 1.0};
    bool first_up = projective_distance(c1, up) < projective_distance(c1, dn);
    CHECK(proj_eq(first_up ? c1 : c2, up, 1e-10));
    CHECK(proj_eq(first_up ? c2 : c1, dn, 1e-10));

    CHECK_THROWS_AS(circle_line_meet(unit, HomLine{0, 0, 1}), DegenerateInput);
}

TEST_CASE("circle_circle_meet lens, tangency, complex pair") {
    auto mk = [](double cx, double cy, double r) {
        return Circle{HomPoint{cx, cy, 1}, Complex(r * r)};
    };
    auto [p1, p2] = circle_circle_meet(mk(0, 0, 2), mk(2, 0, 2));
    HomPoint up{1.0, kSqrt3, 1.0};
    HomPoint dn{1.0, -kSqrt3, 1.0};
    bool fu = projective_distance(p1, up) < projective_distance(p1, dn);
    CHECK(proj_eq(fu ? p1 : p2, up, 1e-10));
    CHECK(proj_eq(fu ? p2 : p1, dn, 1e-10));

    auto [t1, t2] = circle_circle_meet(mk(0, 0, 1), mk(2, 0, 1));
    CHECK(proj_eq(t1, HomPoint{1, 0, 1}, 1e-7));
    CHECK(proj_eq(t2, HomPoint{1, 0, 1}, 1e-7));

    auto [i1, i2] = circle_circle_meet(mk(0, 0, 1), mk(4, 0, 1));
    HomPoint iu{2.0, Complex(0.0, kSqrt3), 1.0};
    HomPoint id{2.0, Complex(0.0, -kSqrt3), 1.0};
    bool fiu = projective_distance(i1, iu) < projective_distance(i1, id);
    CHECK(proj_eq(fiu ? i1 : i2, iu, 1e-10));
    CHECK(proj_eq(fiu ? i2 : i1, id, 1e-10));

    CHECK_THROWS_AS(circle_circle_meet(mk(1, 1, 1), mk(1, 1, 2)), DegenerateInput);
}

TEST_CASE("midpoint") {
    CHECK(proj_eq(midpoint(HomPoint{0, 0, 1}, HomPoint{2, 0, 1}), HomPoint{1, 0, 1}));
    CHECK(proj_eq(midpoint(HomPoint{1, 1, 1}, HomPoint{1, 1, 1}), HomPoint{1, 1, 1}));
    // affine average of (1,0) and (1,3)
    CHECK(proj_eq(midpoint(HomPoint{2, 0, 2}, HomPoint{1, 3, 1}), HomPoint{1, 1.5, 1}));
    CHECK_THROWS_AS(midpoint(HomPoint{1, 0, 0}, HomPoint{0, 0, 1}), DegenerateInput);
}

TEST_CASE("normalize") {
    HomPoint a = normalize(HomPoint{2, 0, 2});
    CHECK(std::abs(a.v.x - Complex(1.0)) < 1e-15);
    CHECK(std::abs(a.v.z - Complex(1.0)) < 1e-15);

    HomPoint b = normalize(HomPoint{Complex(0), Complex(0, 2), Complex(0)});
    CHECK(std::abs(b.v.y - Complex(1.0)) == 0.0);

    CHECK_THROWS_AS(normalize(HomPoint{0, 0, 0}), DegenerateInput);
}

TEST_CASE("projective_distance") {
    HomPoint p{0.3, -1.2, 0.7};
    Complex lambda(0.4, -1.9);
    HomPoint scaled{p.v.x * lambda, p.v.y * lambda, p.v.z * lambda};
    CHECK(projective_distance(p, scaled) < 1e-14);
    CHECK(projective_distance(HomPoint{1, 0, 0}, HomPoint{0, 1, 0}) == doctest::Approx(1.0));

    double prev = 0.0;
    for (double eps : {1e-3, 1e-5, 1e-7}) {
        double d = projective_distance(HomPoint{1, 0, 1}, HomPoint{1, eps, 1});
        CHECK(d < (prev == 0.0 ? 1.0 : prev));
        prev = d;
    }
}

TEST_CASE("is_real_point") {
    // B(t) = (2(1+t^2), 2t, 1+t^2) at t = i gives (0, 2i, 0) ~ (0,1,0)
    CHECK(is_real_point(HomPoint{Complex(0), Complex(0, 2), Complex(0)}, 1e-9));
    CHECK_FALSE(is_real_point(HomPoint{Complex(1), Complex(0, 1), Complex(0)}, 1e-9));
    CHECK(is_real_point(HomPoint{Complex(0, 1), Complex(0, 1), Complex(0, 1)}, 1e-9));
}

TEST_CASE("non-finite inputs are rejected") {
    double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(join(HomPoint{Complex(inf), 0, 1}, HomPoint{0, 0, 1}), DegenerateInput);
    CHECK_THROWS_AS(normalize(HomPoint{Complex(std::nan("")), 0, 1}), DegenerateInput);
}
