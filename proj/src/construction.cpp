#include "loci/construction.hpp"

#include <algorithm>
#include <cmath>

namespace loci {

std::vector<int> Construction::ambiguous_nodes() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
        if (std::holds_alternative<CircleLineMeetNode>(nodes[i]) ||
            std::holds_alternative<CircleCircleMeetNode>(nodes[i])) {
            out.push_back(i);
        }
    }
    return out;
}

ValueType Construction::value_type(int node) const {
    const NodeKind& k = nodes[node];
    if (std::holds_alternative<FreeLineNode>(k) || std::holds_alternative<JoinNode>(k) ||
        std::holds_alternative<PerpThroughNode>(k)) {
        return ValueType::Line;
    }
    if (std::holds_alternative<MoverNode>(k)) {
        return std::get<MoverNode>(k).param.kind == MoverKind::LineThroughPoint
                   ? ValueType::Line
                   : ValueType::Point;
    }
    if (std::holds_alternative<CircleCRNode>(k)) return ValueType::CircleValue;
    return ValueType::Point;
}

namespace {

// Degree-2 numerator coefficients of a rational mover path: P(t) = V2 t^2 + V1 t + V0.
// Inverted chart (t = -1/w): P ~ V2 - V1 w + V0 w^2, finite at w = 0 (t = infinity).
Vec3c eval_chart(const Vec3c& v2, const Vec3c& v1, const Vec3c& v0, const TimePoint& tp) {
    Vec3c out;
    if (!tp.inverted) {
        Complex t = tp.w;
        for (int i = 0; i < 3; ++i) out[i] = (v2[i] * t + v1[i]) * t + v0[i];
    } else {
        Complex w = tp.w;
        for (int i = 0; i < 3; ++i) out[i] = (v0[i] * w - v1[i]) * w + v2[i];
    }
    return out;
}

std::pair<Complex, Complex> affine_of_point(const HomPoint& p, int node) {
    double n = norm2(p.v);
    if (std::abs(p.v.z) <= 1e-12 * n) {
        throw DegenerateOp(node, "mover target point at infinity");
    }
    return {p.v.x / p.v.z, p.v.y / p.v.z};
}

} // namespace

NodeValue mover_position(const MoverParam& param, const TimePoint& tp,
                         const Construction& c, const std::vector<NodeValue>& state_values,
                         const Tolerances& tol) {
    const int self = c.mover_index;
    switch (param.kind) {
    case MoverKind::PointOnCircle: {
        const auto& circ = std::get<Circle>(state_values[param.target]);
        auto [cx, cy] = affine_of_point(circ.center, self);
        double r = std::get<CircleCRNode>(c.nodes[param.target]).radius;
        Vec3c v2{cx - r, cy, Complex(1.0)};
        Vec3c v1{Complex(0.0), Complex(2.0 * r), Complex(0.0)};
        Vec3c v0{cx + r, cy, Complex(1.0)};
        Vec3c pos = eval_chart(v2, v1, v0, tp);
        if (norm2(pos) <= tol.tol_degenerate) throw DegenerateOp(self, "mover position zero vector");
        return HomPoint{normalize_vec(pos, tol.tol_degenerate)};
    }
    case MoverKind::LineThroughPoint: {
        const auto& f = std::get<HomPoint>(state_values[param.target]);
        auto [fx, fy] = affine_of_point(f, self);
        // join(F, F + (1 - t^2, 2t, 0)) expanded symbolically.
        Vec3c v2{Complex(0.0), Complex(-1.0), fy};
        Vec3c v1{Complex(-2.0), Complex(0.0), 2.0 * fx};
        Vec3c v0{Complex(0.0), Complex(1.0), -fy};
        Vec3c pos = eval_chart(v2, v1, v0, tp);
        if (norm2(pos) <= tol.tol_degenerate) throw DegenerateOp(self, "mover line zero vector");
        return HomLine{normalize_vec(pos, tol.tol_degenerate)};
    }
    case MoverKind::PointOnLine: {
        const auto& l = std::get<HomLine>(state_values[param.target]);
        Complex a = l.v.x, b = l.v.y, cc = l.v.z;
        Complex n2 = a * a + b * b;
        if (std::abs(n2) <= tol.tol_degenerate * norm2(l.v)) {
            throw DegenerateOp(self, "mover line has isotropic direction");
        }
        Complex p0x = -a * cc / n2, p0y = -b * cc / n2; // foot of perpendicular from origin
        Complex s = std::sqrt(n2);
        Complex dx = b / s, dy = -a / s;               // unit direction
        Vec3c v2{-p0x, -p0y, Complex(-1.0)};
        Vec3c v1{2.0 * dx, 2.0 * dy, Complex(0.0)};
        Vec3c v0{p0x, p0y, Complex(1.0)};
        Vec3c pos = eval_chart(v2, v1, v0, tp);
        if (norm2(pos) <= tol.tol_degenerate) throw DegenerateOp(self, "mover position zero vector");
        return HomPoint{normalize_vec(pos, tol.tol_degenerate)};
    }
    }
    throw DegenerateOp(self, "unknown mover kind");
}

namespace {

struct EvalContext {
    const Construction& c;
    const Tolerances& tol;
};

NodeValue eval_plain_node(const EvalContext& ctx, int i, const TimePoint& tp,
                          const std::vector<NodeValue>& values) {
    const Construction& c = ctx.c;
    const Tolerances& tol = ctx.tol;
    const NodeKind& k = c.nodes[i];
    try {
        if (auto* fp = std::get_if<FreePointNode>(&k)) {
            return HomPoint{normalize_vec(Vec3c{fp->x, fp->y, Complex(1.0)}, tol.tol_degenerate)};
        }
        if (auto* fl = std::get_if<FreeLineNode>(&k)) {
            return HomLine{normalize_vec(Vec3c{fl->a, fl->b, fl->c}, tol.tol_degenerate)};
        }
        if (auto* cn = std::get_if<CircleCRNode>(&k)) {
            const auto& center = std::get<HomPoint>(values[cn->center]);
            double n = norm2(center.v);
            if (std::abs(center.v.z) <= tol.tol_degenerate * n) {
                throw DegenerateInput("circle center at infinity");
            }
            return Circle{center, Complex(cn->radius * cn->radius)};
        }
        if (auto* mv = std::get_if<MoverNode>(&k)) {
            return mover_position(mv->param, tp, c, values, tol);
        }
        if (auto* jn = std::get_if<JoinNode>(&k)) {
            return HomLine{normalize_vec(
                join(std::get<HomPoint>(values[jn->p]), std::get<HomPoint>(values[jn->q]),
                     tol.tol_degenerate).v, tol.tol_degenerate)};
        }
        if (auto* mn = std::get_if<MeetNode>(&k)) {
            return HomPoint{normalize_vec(
                meet(std::get<HomLine>(values[mn->l]), std::get<HomLine>(values[mn->m]),
                     tol.tol_degenerate).v, tol.tol_degenerate)};
        }
        if (auto* pn = std::get_if<PerpThroughNode>(&k)) {
            return HomLine{normalize_vec(
                perpendicular_through(std::get<HomLine>(values[pn->line]),
                                      std::get<HomPoint>(values[pn->point]),
                                      tol.tol_degenerate).v, tol.tol_degenerate)};
        }
        if (auto* mp = std::get_if<MidpointNode>(&k)) {
            return HomPoint{normalize_vec(
                midpoint(std::get<HomPoint>(values[mp->p]), std::get<HomPoint>(values[mp->q]),
                         tol.tol_degenerate).v, tol.tol_degenerate)};
        }
    } catch (const DegenerateInput& e) {
        throw DegenerateOp(i, e.what());
    }
    throw DegenerateOp(i, "ambiguous node evaluated as plain");
}

std::pair<HomPoint, HomPoint> eval_candidates(const EvalContext& ctx, int i,
                                              const std::vector<NodeValue>& values) {
    const NodeKind& k = ctx.c.nodes[i];
    const double td = ctx.tol.tol_degenerate;
    try {
        std::pair<HomPoint, HomPoint> cands;
        if (auto* cl = std::get_if<CircleLineMeetNode>(&k)) {
            cands = circle_line_meet(std::get<Circle>(values[cl->circle]),
                                     std::get<HomLine>(values[cl->line]), td);
        } else {
            auto* cc = std::get_if<CircleCircleMeetNode>(&k);
            cands = circle_circle_meet(std::get<Circle>(values[cc->c1]),
                                       std::get<Circle>(values[cc->c2]), td);
        }
        cands.first = normalize(cands.first, td);
        cands.second = normalize(cands.second, td);
        return cands;
    } catch (const DegenerateInput& e) {
        throw DegenerateOp(i, e.what());
    }
}

// Candidate ordering for initial branch selection: lexicographic on the
// normalized components (re x, im x, re y, im y, re z, im z).
bool lex_less(const HomPoint& a, const HomPoint& b) {
    for (int i = 0; i < 3; ++i) {
        if (a.v[i].real() != b.v[i].real()) return a.v[i].real() < b.v[i].real();
        if (a.v[i].imag() != b.v[i].imag()) return a.v[i].imag() < b.v[i].imag();
    }
    return false;
}

} // namespace

ConstructionState initial_state(const Construction& c, Complex t0, const Tolerances& tol) {
    if (std::abs(t0.imag()) > 0.0) throw SingularStart("t0 must be real");
    EvalContext ctx{c, tol};
    ConstructionState s;
    s.param = TimePoint::direct(t0);
    s.values.resize(c.nodes.size());
    s.margins.assign(c.ambiguous_nodes().size(), 0.0);

    int amb = 0;
    try {
        for (int i = 0; i < static_cast<int>(c.nodes.size()); ++i) {
            if (std::holds_alternative<CircleLineMeetNode>(c.nodes[i]) ||
                std::holds_alternative<CircleCircleMeetNode>(c.nodes[i])) {
                auto [c0, c1] = eval_candidates(ctx, i, s.values);
                if (projective_distance(c0, c1) <= tol.tol_real) {
                    throw SingularStart("coincident intersection candidates at node " +
                                        c.names[i] + " (singular start)");
                }
                if (lex_less(c1, c0)) std::swap(c0, c1);
                bool branch = amb < static_cast<int>(c.initial_branches.size()) &&
                              c.initial_branches[amb] != 0;
                s.values[i] = branch ? c1 : c0;
                ++amb;
            } else {
                s.values[i] = eval_plain_node(ctx, i, s.param, s.values);
            }
        }
    } catch (const DegenerateOp& e) {
        throw SingularStart(std::string("degenerate evaluation at t0: ") + e.what());
    }
    if (!is_real_point(s.tracer(c), tol.tol_real)) {
        throw SingularStart("tracer is not real at t0");
    }
    return s;
}

ConstructionState evaluate(const Construction& c, const TimePoint& tp,
                           const ConstructionState& prev, const Tolerances& tol,
                           double margin_floor) {
    EvalContext ctx{c, tol};
    ConstructionState s;
    s.param = tp;
    s.values.resize(c.nodes.size());
    s.margins.clear();

    for (int i = 0; i < static_cast<int>(c.nodes.size()); ++i) {
        if (std::holds_alternative<CircleLineMeetNode>(c.nodes[i]) ||
            std::holds_alternative<CircleCircleMeetNode>(c.nodes[i])) {
            auto [c0, c1] = eval_candidates(ctx, i, s.values);
            const HomPoint& ref = std::get<HomPoint>(prev.values[i]);
            double d0 = projective_distance(c0, ref);
            double d1 = projective_distance(c1, ref);
            const HomPoint& chosen = (d0 <= d1) ? c0 : c1;
            double margin = std::abs(d1 - d0);
            double separation = projective_distance(c0, c1);
            // Proximity is only meaningful when the old value sits well inside
            // the chosen candidate's basin: the margin must be resolvable and
            // the step must be small against the candidate separation.
            if (separation > margin_floor &&
                (margin < margin_floor || std::min(d0, d1) > 0.5 * separation)) {
                throw AmbiguousStep(i, margin);
            }
            s.values[i] = chosen;
            s.margins.push_back(margin);
        } else {
            s.values[i] = eval_plain_node(ctx, i, tp, s.values);
        }
    }
    return s;
}

ConstructionState evaluate(const Construction& c, Complex t, const ConstructionState& prev,
                           const Tolerances& tol, double margin_floor) {
    return evaluate(c, TimePoint::direct(t), prev, tol, margin_floor);
}

double state_residual(const Construction& c, const ConstructionState& s) {
    double worst = 0.0;
    auto upd = [&worst](double r) { worst = std::max(worst, r); };
    for (int i = 0; i < static_cast<int>(c.nodes.size()); ++i) {
        const NodeKind& k = c.nodes[i];
        if (auto* jn = std::get_if<JoinNode>(&k)) {
            const auto& l = std::get<HomLine>(s.values[i]);
            upd(std::abs(incidence(l, std::get<HomPoint>(s.values[jn->p]))) / (norm2(l.v) + 1.0));
            upd(std::abs(incidence(l, std::get<HomPoint>(s.values[jn->q]))) / (norm2(l.v) + 1.0));
        } else if (auto* mn = std::get_if<MeetNode>(&k)) {
            const auto& p = std::get<HomPoint>(s.values[i]);
            upd(std::abs(incidence(std::get<HomLine>(s.values[mn->l]), p)) / (norm2(p.v) + 1.0));
            upd(std::abs(incidence(std::get<HomLine>(s.values[mn->m]), p)) / (norm2(p.v) + 1.0));
        } else if (auto* pn = std::get_if<PerpThroughNode>(&k)) {
            const auto& l = std::get<HomLine>(s.values[i]);
            upd(std::abs(incidence(l, std::get<HomPoint>(s.values[pn->point]))) / (norm2(l.v) + 1.0));
        } else if (std::holds_alternative<CircleLineMeetNode>(k) ||
                   std::holds_alternative<CircleCircleMeetNode>(k)) {
            const auto& p = std::get<HomPoint>(s.values[i]);
            Complex px = p.v.x / p.v.z, py = p.v.y / p.v.z;
            auto membership = [&](const Circle& circ) {
                Complex cx = circ.center.v.x / circ.center.v.z;
                Complex cy = circ.center.v.y / circ.center.v.z;
                Complex m = (px - cx) * (px - cx) + (py - cy) * (py - cy) - circ.radius_sq;
                double scale = std::norm(px - cx) + std::norm(py - cy) + std::abs(circ.radius_sq) + 1.0;
                return std::abs(m) / scale;
            };
            if (std::abs(p.v.z) <= 1e-9 * norm2(p.v)) continue; // skip near-infinite points
            if (auto* cl = std::get_if<CircleLineMeetNode>(&k)) {
                upd(membership(std::get<Circle>(s.values[cl->circle])));
                const auto& l = std::get<HomLine>(s.values[cl->line]);
                upd(std::abs(incidence(l, p)) / (norm2(l.v) * norm2(p.v)));
            } else {
                auto* cc = std::get_if<CircleCircleMeetNode>(&k);
                upd(membership(std::get<Circle>(s.values[cc->c1])));
                upd(membership(std::get<Circle>(s.values[cc->c2])));
            }
        } else if (auto* mp = std::get_if<MidpointNode>(&k)) {
            const auto& m = std::get<HomPoint>(s.values[i]);
            const auto& p = std::get<HomPoint>(s.values[mp->p]);
            const auto& q = std::get<HomPoint>(s.values[mp->q]);
            Complex mx = m.v.x / m.v.z, my = m.v.y / m.v.z;
            Complex ax = 0.5 * (p.v.x / p.v.z + q.v.x / q.v.z);
            Complex ay = 0.5 * (p.v.y / p.v.z + q.v.y / q.v.z);
            double scale = std::abs(ax) + std::abs(ay) + 1.0;
            upd((std::abs(mx - ax) + std::abs(my - ay)) / scale);
        }
    }
    return worst;
}

} // namespace loci
