#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "loci/examples.hpp"
#include "loci/parser.hpp"
#include "loci/tracer.hpp"

using namespace loci;

namespace {

Construction parse_ok(std::string_view text) {
    ParseResult r = parse_construction(text);
    REQUIRE(std::holds_alternative<Construction>(r));
    return std::get<Construction>(std::move(r));
}

// Two-valued projection construction: the mover runs on the line x = 2 and a
// horizontal line through it cuts the unit circle. The reconstructed point
// ramifies where the horizontal is tangent (mover height +-1).
constexpr std::string_view kTwoValued = R"(point O = (0, 0)
circle c0 = circle(O, 1)
line b = (1, 0, -2)
point M = mover on_line(b)
line a = perp(b, M)
point P = meet_cl(c0, a, branch=0)
trace mover=M tracer=P
)";

} // namespace

TEST_CASE("detour_circle geometry") {
    auto [c1, r1] = detour_circle(Complex(0.0), Complex(1.0), 0.1);
    CHECK(std::abs(c1 - Complex(0.05)) < 1e-15);
    CHECK(r1 == doctest::Approx(0.05));

    auto [c2, r2] = detour_circle(Complex(0.0), Complex(-1.0), 0.1);
    CHECK(std::abs(c2 - Complex(-0.05)) < 1e-15);
    CHECK(r2 == doctest::Approx(0.05));

    auto [c3, r3] = detour_circle(Complex(0.0, 1.0), Complex(0.0, 1.0), 0.2);
    CHECK(std::abs(c3 - Complex(0.0, 1.1)) < 1e-15);
    CHECK(r3 == doctest::Approx(0.1));
}

TEST_CASE("step_on_detour reaches antipode and closes the circle") {
    Construction c = parse_ok(examples::projline());
    TraceConfig cfg;
    cfg.detour_steps = 16;

    DetourState ds;
    ds.state = initial_state(c, 0.2);
    ds.t = Complex(0.2);
    ds.s = Complex(1.0);
    auto [center, rho] = detour_circle(ds.t, ds.s, cfg.eps);
    ds.center = center;
    ds.theta = std::arg(ds.t - center);
    (void)rho;

    Complex t_start = ds.t;
    for (int k = 0; k < 8; ++k) ds = step_on_detour(ds, c, cfg);
    CHECK(std::abs(ds.t - (t_start + cfg.eps)) < 1e-12);
    for (int k = 0; k < 8; ++k) ds = step_on_detour(ds, c, cfg);
    CHECK(std::abs(ds.t - t_start) < 1e-12);
}

TEST_CASE("a full detour around a ramification point swaps the branch") {
    Construction c = parse_ok(kTwoValued);
    // Mover height y = 2t/(1-t^2) reaches 1 at t = sqrt(2)-1: the tangency of
    // the horizontal line with the unit circle ramifies the reconstruction.
    double t_ram = std::sqrt(2.0) - 1.0;
    double t0 = t_ram - 0.02;
    ConstructionState s = initial_state(c, t0);
    Complex x_before = normalize(s.tracer(c)).v.x;

    TraceConfig cfg;
    DetourState ds;
    ds.state = s;
    ds.t = Complex(t0);
    ds.s = Complex(1.0);
    auto [center, rho] = detour_circle(ds.t, ds.s, 0.08); // circle encloses t_ram
    (void)rho;
    ds.center = center;
    ds.theta = std::arg(ds.t - center);
    for (int k = 0; k < cfg.detour_steps; ++k) ds = step_on_detour(ds, c, cfg);
    CHECK(std::abs(ds.t - Complex(t0)) < 1e-9);

    Complex x_after = normalize(ds.state.tracer(c)).v.x;
    // the reconstructed point lands on the mirrored intersection
    CHECK(std::abs(x_after + x_before) < 1e-6);
    CHECK(std::abs(x_after - x_before) > 0.1);
}

TEST_CASE("refine_real_crossing") {
    Construction c = parse_ok(examples::projline());
    TraceConfig cfg;

    // detour straddling t = 1: the tracer has real crossings where the circle
    // meets |t| = 1
    ConstructionState s = initial_state(c, 0.95);
    DetourState ds;
    ds.state = s;
    ds.t = Complex(0.95);
    ds.s = Complex(1.0);
    auto [center, rho] = detour_circle(ds.t, ds.s, 0.1);
    (void)rho;
    ds.center = center;
    ds.theta = std::arg(ds.t - center);

    SUBCASE("endpoint already real returns the endpoint") {
        auto rc = refine_real_crossing(c, ds, ds.theta, ds.theta + 0.3, cfg);
        REQUIRE(rc.has_value());
        CHECK(rc->theta_star == doctest::Approx(ds.theta));
    }

    SUBCASE("finds the unit-circle crossing on the lower arc") {
        double lo = ds.theta + 0.8;
        double hi = ds.theta + 1.8;
        auto rc = refine_real_crossing(c, ds, lo, hi, cfg);
        REQUIRE(rc.has_value());
        Complex t_star = rc->state.t();
        CHECK(std::abs(std::abs(t_star) - 1.0) < 1e-7);
        CHECK(is_real_point(rc->state.tracer(c), 1e-8));
    }

    SUBCASE("no crossing on a short early arc") {
        auto rc = refine_real_crossing(c, ds, ds.theta + 0.2, ds.theta + 0.5, cfg);
        CHECK_FALSE(rc.has_value());
    }
}

TEST_CASE("variant A on the circle-to-line projection") {
    Construction c = parse_ok(examples::projline());
    TraceConfig cfg;
    Locus loc = trace_variant_a(c, 0.0, cfg);

    CHECK(loc.closed);
    CHECK(loc.reversal_count == 0); // single-valued construction: no s-flips

    std::vector<double> ys;
    for (const auto& arc : loc.arcs) {
        for (const auto& p : arc.points) {
            REQUIRE_FALSE(p.at_infinity);
            CHECK(std::abs(p.x - 2.0) < 1e-9);
            CHECK(std::abs(p.t_at.imag()) < 1e-12); // records at real t only
            ys.push_back(p.y);
        }
    }
    CHECK(*std::min_element(ys.begin(), ys.end()) < -0.98);
    CHECK(*std::max_element(ys.begin(), ys.end()) > 0.98);
    for (double y : ys) CHECK(std::abs(y) <= 1.0 + 1e-9);

    // the tracer sweeps the segment twice, turning around at y = +-1
    int turns = 0;
    for (std::size_t i = 1; i + 1 < ys.size(); ++i) {
        if ((ys[i + 1] - ys[i]) * (ys[i] - ys[i - 1]) < 0.0) ++turns;
    }
    CHECK(turns == 2);
}

TEST_CASE("variant A on the Watt linkage bounces at the fold") {
    Construction c = parse_ok(examples::watt());
    TraceConfig cfg;
    TraceDiagnostics diag;
    Locus loc = trace_variant_a(c, 0.0, cfg, &diag);

    CHECK(loc.closed);
    CHECK(loc.reversal_count >= 2);
    CHECK(loc.reversal_count % 2 == 0);
    REQUIRE(diag.reversals.size() == static_cast<std::size_t>(loc.reversal_count));

    // every s-flip happened on a detour whose circle contains a parameter
    // where circles c1 and c2 are tangent: |dist(centers)^2 - (b+2c)^2| small
    for (const auto& rev : diag.reversals) {
        double best = 1e18;
        for (int k = 0; k < 64; ++k) {
            double th = 2.0 * 3.14159265358979323846 * k / 64;
            Complex t = rev.detour_center + rev.radius * std::polar(1.0, th);
            // mover position on circle(A=(-2,0), 2.5), rocker anchor B=(2,0)
            Complex den = 1.0 + t * t;
            Complex cx = (-2.0 * den + 2.5 * (1.0 - t * t)) / den;
            Complex cy = (2.5 * 2.0 * t) / den;
            Complex d2 = (cx - 2.0) * (cx - 2.0) + cy * cy;
            best = std::min(best, std::abs(d2 - Complex(5.5 * 5.5)));
        }
        CHECK(best < cfg.eps * 30.0); // |d^2 - (b+2c)^2| scale ~ 2*d*delta
    }
}

TEST_CASE("variant B records the complex-time branch and the infinite point") {
    Construction c = parse_ok(examples::projline());
    TraceConfig cfg;
    cfg.variant = Variant::B;
    Locus loc = trace_variant_b(c, 0.0, cfg);

    CHECK(loc.closed);
    bool big_y = false, infinity_seen = false;
    for (const auto& arc : loc.arcs) {
        for (const auto& p : arc.points) {
            if (p.at_infinity) {
                infinity_seen = true;
                CHECK(std::abs(p.triple[0]) < 1e-6);
                CHECK(std::abs(p.triple[1] - 1.0) < 1e-6);
                CHECK(std::abs(p.triple[2]) < 1e-6);
                CHECK(std::abs(std::abs(p.t_at) - 1.0) < 1e-3); // near t = +-i
                continue;
            }
            if (std::abs(p.y) >= 5.0) {
                big_y = true;
                CHECK(std::abs(p.x - 2.0) < 1e-9);
            }
            bool on_unit = std::abs(std::abs(p.t_at) - 1.0) <= 1e-6;
            bool on_axis = std::abs(p.t_at.imag()) <= 1e-6;
            CHECK((on_unit || on_axis));
        }
    }
    CHECK(big_y);
    CHECK(infinity_seen);

    // t-values at |y| = 2 satisfy t = (1 +- i sqrt(3))/2 (both on |t| = 1)
    double best = 1e18;
    Complex t_at_2{};
    for (const auto& arc : loc.arcs) {
        for (const auto& p : arc.points) {
            if (p.at_infinity) continue;
            if (std::abs(p.y - 2.0) < best) {
                best = std::abs(p.y - 2.0);
                t_at_2 = p.t_at;
            }
        }
    }
    REQUIRE(best < 0.2);
    Complex cand1(0.5, 0.8660254037844386);
    Complex cand2(0.5, -0.8660254037844386);
    double d = std::min(std::abs(t_at_2 - cand1), std::abs(t_at_2 - cand2));
    CHECK(d < 0.2);
}

TEST_CASE("variant B point set covers variant A's") {
    Construction c = parse_ok(examples::projline());
    TraceConfig cfg;
    Locus a = trace_variant_a(c, 0.0, cfg);
    cfg.variant = Variant::B;
    Locus b = trace_variant_b(c, 0.0, cfg);
    auto bp = b.finite_points();
    double sup = 0.0;
    for (auto [x, y] : a.finite_points()) {
        double bestd = 1e18;
        for (auto [u, v] : bp) bestd = std::min(bestd, std::hypot(x - u, y - v));
        sup = std::max(sup, bestd);
    }
    CHECK(sup <= 2.5 * cfg.eps); // one-sided Hausdorff within sampling density
}

TEST_CASE("max_detours exhaustion surfaces a partial open locus") {
    Construction c = parse_ok(examples::watt());
    TraceConfig cfg;
    cfg.max_detours = 20;
    Locus loc = trace_variant_a(c, 0.0, cfg);
    CHECK_FALSE(loc.closed);
    CHECK(loc.detours_used == 20);
    CHECK(loc.total_points() > 0);
}

TEST_CASE("clockwise run is the complex conjugate of the anticlockwise run") {
    Construction c = parse_ok(examples::watt());
    std::vector<std::pair<Complex, HomPoint>> acw, cw;
    TraceConfig cfg;
    cfg.substep_observer = [&](const DetourState& ds) {
        acw.emplace_back(ds.t, ds.state.point(7));
    };
    (void)trace_variant_a(c, 0.0, cfg);
    cfg.orientation = Orientation::Clockwise;
    cfg.substep_observer = [&](const DetourState& ds) {
        cw.emplace_back(ds.t, ds.state.point(7));
    };
    (void)trace_variant_a(c, 0.0, cfg);

    REQUIRE(acw.size() == cw.size());
    for (std::size_t i = 0; i < acw.size(); ++i) {
        CHECK(std::abs(std::conj(acw[i].first) - cw[i].first) < 1e-10);
        HomPoint conj_p{std::conj(acw[i].second.v.x), std::conj(acw[i].second.v.y),
                        std::conj(acw[i].second.v.z)};
        CHECK(projective_distance(conj_p, cw[i].second) < 1e-8);
    }
}

TEST_CASE("loop closure: first and last recorded points coincide") {
    for (std::string_view text : {examples::projline(), examples::watt()}) {
        Construction c = parse_ok(text);
        TraceConfig cfg;
        Locus loc = trace_variant_a(c, 0.0, cfg);
        REQUIRE(loc.closed);
        const LocusPoint& first = loc.arcs.front().points.front();
        const LocusPoint& last = loc.arcs.back().points.back();
        CHECK(std::hypot(first.x - last.x, first.y - last.y) <= 1e-6);
    }
}

TEST_CASE("config validation") {
    Construction c = parse_ok(examples::projline());
    TraceConfig cfg;
    cfg.eps = -1.0;
    CHECK_THROWS_AS((void)trace_variant_a(c, 0.0, cfg), std::invalid_argument);
    cfg = TraceConfig{};
    cfg.detour_steps = 2;
    CHECK_THROWS_AS((void)trace_variant_a(c, 0.0, cfg), std::invalid_argument);
}
