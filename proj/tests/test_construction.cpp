#include <doctest.h>

#include <cmath>
#include <cstring>

#include "loci/construction.hpp"
#include "loci/parser.hpp"
#include "loci/examples.hpp"

using namespace loci;

namespace {

Construction parse_ok(std::string_view text) {
    ParseResult r = parse_construction(text);
    REQUIRE(std::holds_alternative<Construction>(r));
    return std::get<Construction>(std::move(r));
}

Construction projline() { return parse_ok(examples::projline()); }
Construction watt() { return parse_ok(examples::watt()); }
Construction conchoid() { return parse_ok(examples::conchoid()); }

} // namespace

TEST_CASE("mover on the unit circle") {
    Construction c = projline();
    ConstructionState s = initial_state(c, 0.0);
    const MoverParam& mp = std::get<MoverNode>(c.nodes[c.mover_index]).param;

    auto at = [&](Complex t) {
        return std::get<HomPoint>(
            mover_position(mp, TimePoint::direct(t), c, s.values, Tolerances{}));
    };
    CHECK(projective_distance(at(Complex(0.0)), HomPoint{1, 0, 1}) < 1e-12);
    CHECK(projective_distance(at(Complex(1.0)), HomPoint{0, 2, 2}) < 1e-12);
    // complex point at infinity: (2, 2i, 0)
    CHECK(projective_distance(at(Complex(0.0, 1.0)),
                              HomPoint{Complex(2), Complex(0, 2), Complex(0)}) < 1e-12);
}

TEST_CASE("mover chart evaluation is exact at t = infinity") {
    Construction c = projline();
    ConstructionState s = initial_state(c, 0.0);
    const MoverParam& mp = std::get<MoverNode>(c.nodes[c.mover_index]).param;
    HomPoint at_inf = std::get<HomPoint>(
        mover_position(mp, TimePoint{Complex(0.0), true}, c, s.values, Tolerances{}));
    // leftmost point of the unit circle
    CHECK(projective_distance(at_inf, HomPoint{-1, 0, 1}) < 1e-14);
}

TEST_CASE("initial_state of the projection construction") {
    Construction c = projline();
    ConstructionState s = initial_state(c, 0.0);
    CHECK(projective_distance(s.tracer(c), HomPoint{2, 0, 1}) < 1e-12);
    CHECK_THROWS_AS(initial_state(c, Complex(0.0, 1.0)), SingularStart);
}

TEST_CASE("initial_state rejects a tangent start (Watt)") {
    Construction c = watt();
    // tangency of c1 and c2: |C - B| = b + 2c = 5.5 with |C-B|^2 = 22.25 - 20 cos(phi)
    double phi = std::acos((22.25 - 30.25) / 20.0);
    double t0 = std::tan(phi / 2.0);
    CHECK_THROWS_AS(initial_state(c, Complex(t0)), SingularStart);
    CHECK_NOTHROW(initial_state(c, Complex(0.0)));
}

TEST_CASE("initial_state branch selection is deterministic") {
    Construction c = watt();
    ConstructionState s0 = initial_state(c, 0.0);
    Construction c1 = c;
    c1.initial_branches[0] = 1;
    ConstructionState s1 = initial_state(c1, 0.0);
    int d_node = -1;
    for (int i = 0; i < static_cast<int>(c.nodes.size()); ++i) {
        if (std::holds_alternative<CircleCircleMeetNode>(c.nodes[i])) d_node = i;
    }
    REQUIRE(d_node >= 0);
    // the two branches are the two circle intersections, mirrored in y
    CHECK(projective_distance(s0.point(d_node), s1.point(d_node)) > 0.1);
}

TEST_CASE("evaluate follows the worked projection value") {
    Construction c = projline();
    ConstructionState s = initial_state(c, 0.0);
    for (double t = 0.01; t <= 0.1 + 1e-12; t += 0.01) {
        s = evaluate(c, Complex(t), s);
    }
    CHECK(projective_distance(s.tracer(c), HomPoint{2.0, 0.2 / 1.01, 1.0}) < 1e-12);
}

TEST_CASE("evaluate is a fixpoint at the same t") {
    Construction c = watt();
    ConstructionState s = initial_state(c, 0.3);
    ConstructionState again = evaluate(c, Complex(0.3), s);
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (auto* p = std::get_if<HomPoint>(&s.values[i])) {
            CHECK(projective_distance(*p, std::get<HomPoint>(again.values[i])) < 1e-14);
        }
    }
}

TEST_CASE("evaluate is deterministic bit for bit") {
    Construction c = watt();
    ConstructionState s = initial_state(c, 0.2);
    ConstructionState a = evaluate(c, Complex(0.21, 0.004), s);
    ConstructionState b = evaluate(c, Complex(0.21, 0.004), s);
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        if (auto* p = std::get_if<HomPoint>(&a.values[i])) {
            const HomPoint& q = std::get<HomPoint>(b.values[i]);
            CHECK(std::memcmp(&p->v, &q.v, sizeof(Vec3c)) == 0);
        }
    }
}

TEST_CASE("branch continuity on the conchoid") {
    Construction c = conchoid();
    ConstructionState s = initial_state(c, 0.0);
    for (double t = 0.005; t < 0.5; t += 0.005) {
        ConstructionState next = evaluate(c, Complex(t), s);
        CHECK(projective_distance(next.tracer(c), s.tracer(c)) < 0.05);
        s = next;
    }
}

TEST_CASE("branch stability as the step shrinks") {
    Construction c = watt();
    ConstructionState at = initial_state(c, 0.4);
    double prev = 1e9;
    for (double h : {1e-2, 1e-4, 1e-6}) {
        ConstructionState stepped = evaluate(c, Complex(0.4 + h), at);
        double d = projective_distance(stepped.tracer(c), at.tracer(c));
        CHECK(d < prev);
        prev = d;
    }
    CHECK(prev < 1e-4);
}

TEST_CASE("evaluate reports AmbiguousStep when proximity cannot decide") {
    Construction c = watt();
    ConstructionState s = initial_state(c, 0.0);
    // jump straight past the tangency: the candidates become a complex
    // conjugate pair, exactly equidistant from the old real value
    double t_past = std::tan(1.1);
    CHECK_THROWS_AS((void)evaluate(c, Complex(t_past), s), AmbiguousStep);
}

TEST_CASE("re-evaluation consistency of states") {
    Construction c = watt();
    ConstructionState s = initial_state(c, 0.1);
    CHECK(state_residual(c, s) < 1e-9);
    s = evaluate(c, Complex(0.12, 0.01), s);
    CHECK(state_residual(c, s) < 1e-9);
}

TEST_CASE("conjugation symmetry of evaluate") {
    Construction c = watt();
    ConstructionState s = initial_state(c, 0.25);
    Complex t(0.27, 0.015);
    ConstructionState up = evaluate(c, t, s);
    ConstructionState dn = evaluate(c, std::conj(t), s);
    for (std::size_t i = 0; i < up.values.size(); ++i) {
        if (auto* p = std::get_if<HomPoint>(&up.values[i])) {
            const HomPoint& q = std::get<HomPoint>(dn.values[i]);
            HomPoint conj_p{std::conj(p->v.x), std::conj(p->v.y), std::conj(p->v.z)};
            CHECK(projective_distance(conj_p, q) < 1e-10);
        }
    }
}
