#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "loci/geometry.hpp"

namespace loci {

/// Some operation of the construction degenerated while evaluating node `node`.
struct DegenerateOp : GeometryError {
    int node;
    DegenerateOp(int node_, const std::string& msg)
        : GeometryError("node " + std::to_string(node_) + ": " + msg), node(node_) {}
};

/// Proximity could not distinguish the two candidates of an ambiguous node:
/// the step was too large or a singularity was hit exactly.
struct AmbiguousStep : GeometryError {
    int node;
    double margin;
    AmbiguousStep(int node_, double margin_)
        : GeometryError("ambiguous step at node " + std::to_string(node_)),
          node(node_), margin(margin_) {}
};

/// The evaluation at the requested start time degenerated or produced a
/// non-real tracer; the caller must pick a different t0.
struct SingularStart : GeometryError {
    explicit SingularStart(const std::string& msg) : GeometryError(msg) {}
};

/// Time parameter value. The walk near t = infinity uses the inverted chart
/// w = -1/t; mover formulas evaluate exactly in either chart.
struct TimePoint {
    Complex w{};
    bool inverted = false;

    Complex t() const { return inverted ? -1.0 / w : w; }
    static TimePoint direct(Complex t) { return TimePoint{t, false}; }
};

enum class MoverKind { PointOnCircle, LineThroughPoint, PointOnLine };

/// One-dimensional rational parameterization of the mover; `target` names the
/// node (circle, point or line) the mover is attached to.
struct MoverParam {
    MoverKind kind;
    int target;
};

struct FreePointNode { Complex x, y; };
struct FreeLineNode { Complex a, b, c; };
struct CircleCRNode { int center; double radius; };
struct MoverNode { MoverParam param; };
struct JoinNode { int p, q; };
struct MeetNode { int l, m; };
struct PerpThroughNode { int line, point; };
struct CircleLineMeetNode { int circle, line; };
struct CircleCircleMeetNode { int c1, c2; };
struct MidpointNode { int p, q; };

using NodeKind = std::variant<FreePointNode, FreeLineNode, CircleCRNode, MoverNode,
                              JoinNode, MeetNode, PerpThroughNode, CircleLineMeetNode,
                              CircleCircleMeetNode, MidpointNode>;

enum class ValueType { Point, Line, CircleValue };

/// Straight-line program of geometric nodes with one mover and one tracer.
/// Operand indices always refer to earlier nodes.
struct Construction {
    std::vector<NodeKind> nodes;
    std::vector<std::string> names; // parallel to nodes, for diagnostics
    int mover_index = -1;
    int tracer_index = -1;
    std::vector<std::uint8_t> initial_branches; // one bit per ambiguous node, in node order

    std::vector<int> ambiguous_nodes() const;
    ValueType value_type(int node) const;
};

using NodeValue = std::variant<HomPoint, HomLine, Circle>;

/// Per-node current values at a time parameter, used for branch tracking.
struct ConstructionState {
    TimePoint param;
    std::vector<NodeValue> values;
    std::vector<double> margins; // per ambiguous node: d(rejected) - d(chosen)

    Complex t() const { return param.t(); }
    const HomPoint& point(int node) const { return std::get<HomPoint>(values[node]); }
    const HomPoint& tracer(const Construction& c) const { return point(c.tracer_index); }
};

inline constexpr double kMarginFloor = 1e-9;

/// Position of the mover at time t (point movers) or the moving line
/// (line-pencil movers). `state_values` supplies the operand node values.
NodeValue mover_position(const MoverParam& param, const TimePoint& tp,
                         const Construction& c, const std::vector<NodeValue>& state_values,
                         const Tolerances& tol);

/// Evaluate the whole construction at t0 (real), selecting ambiguous branches
/// by `initial_branches` over a deterministic candidate ordering.
ConstructionState initial_state(const Construction& c, Complex t0,
                                const Tolerances& tol = {});

/// Evaluate at a nearby time, resolving each ambiguous node by proximity to
/// its value in `prev`. Throws AmbiguousStep when the proximity margin falls
/// below `margin_floor` while the candidates are distinct.
ConstructionState evaluate(const Construction& c, const TimePoint& tp,
                           const ConstructionState& prev, const Tolerances& tol = {},
                           double margin_floor = kMarginFloor);

ConstructionState evaluate(const Construction& c, Complex t,
                           const ConstructionState& prev, const Tolerances& tol = {},
                           double margin_floor = kMarginFloor);

/// Residual of every node's defining equations in a state (max, relative).
/// Used by tests to check re-evaluation consistency.
double state_residual(const Construction& c, const ConstructionState& s);

} // namespace loci
