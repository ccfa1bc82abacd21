#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "loci/construction.hpp"

namespace loci {

enum class Variant { A, B };
enum class Orientation { Anticlockwise, Clockwise };

/// Adaptive refinement could not resolve a step: a true singularity sits on
/// the detour circle itself.
struct RefinementExhausted : GeometryError {
    explicit RefinementExhausted(const std::string& msg) : GeometryError(msg) {}
};

struct TraceConfig {
    Variant variant = Variant::A;
    double eps = 0.05;          // detour diameter scale (step at t = 0)
    int detour_steps = 32;      // substeps per full detour circle, >= 4
    Orientation orientation = Orientation::Anticlockwise;
    long max_detours = 200000;
    Tolerances tolerances{};
    int max_refine_depth = 60;
    int bounce_halvings = 8;    // eps halvings toward a fold before flipping s
    bool strict_stop = false;   // opt-in: closure also compares the full state

    // Test hook: called after every accepted substep with the detour state.
    std::function<void(const struct DetourState&)> substep_observer;
};

/// Walk position on the current detour circle. `t` is the chart-local
/// coordinate; |t - center| equals the current detour radius while walking.
struct DetourState {
    Complex t{};
    Complex s{1.0, 0.0};   // direction, |s| = 1 (Variant A: +1/-1)
    Complex center{};      // detour circle center a
    double theta = 0.0;    // current angle on the circle
    ConstructionState state;
};

/// (center, radius) of the circle having the segment [t, t + s*eps] as diameter.
std::pair<Complex, double> detour_circle(Complex t, Complex s, double eps);

/// One anticlockwise/clockwise substep on the current detour circle, with
/// angular halving on AmbiguousStep up to cfg.max_refine_depth.
DetourState step_on_detour(const DetourState& ds, const Construction& c,
                           const TraceConfig& cfg);

struct LocusPoint {
    bool at_infinity = false;
    double x = 0.0, y = 0.0;            // affine coords, finite points only
    std::array<double, 3> triple{};     // normalized real homogeneous triple
    Complex t_at{};
};

struct LocusArc {
    std::vector<LocusPoint> points;
};

/// Ordered arcs of recorded real tracer positions.
struct Locus {
    std::vector<LocusArc> arcs;
    int reversal_count = 0;
    long detours_used = 0;
    bool closed = false;

    std::size_t total_points() const;
    std::vector<std::pair<double, double>> finite_points() const;
};

struct ReversalInfo {
    Complex detour_center; // true t of the bounce detour's center
    double radius = 0.0;
};

struct TraceDiagnostics {
    std::vector<ReversalInfo> reversals;
    long evaluations = 0;
};

/// Bisection on the detour angle for a real crossing of the tracer between
/// two walk angles. Returns the refined state, or nullopt for a near-miss.
struct RealCrossing {
    double theta_star;
    ConstructionState state;
};
std::optional<RealCrossing> refine_real_crossing(const Construction& c, const DetourState& ds,
                                                 double theta_lo, double theta_hi,
                                                 const TraceConfig& cfg);

/// Algorithm variant A: record the tracer at real t only; reverse the mover
/// (s := -s) when a full detour circle returns with a real tracer.
/// A trace that exhausts max_detours returns its partial locus with
/// closed = false.
Locus trace_variant_a(const Construction& c, double t0, const TraceConfig& cfg,
                      TraceDiagnostics* diag = nullptr);

/// Algorithm variant B: record every real tracer position, including at
/// complex t (located by bisection); steer with s = (t - a)/|t - a|.
Locus trace_variant_b(const Construction& c, double t0, const TraceConfig& cfg,
                      TraceDiagnostics* diag = nullptr);

Locus trace(const Construction& c, double t0, const TraceConfig& cfg,
            TraceDiagnostics* diag = nullptr);

} // namespace loci
