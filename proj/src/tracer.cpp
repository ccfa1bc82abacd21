#include "loci/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace loci {

namespace {

constexpr double kPi = 3.14159265358979323846;

void validate_config(const TraceConfig& cfg) {
    if (!(cfg.eps > 0.0)) throw std::invalid_argument("TraceConfig: eps must be > 0");
    if (cfg.detour_steps < 4) throw std::invalid_argument("TraceConfig: detour_steps must be >= 4");
    if (cfg.max_detours < 1) throw std::invalid_argument("TraceConfig: max_detours must be >= 1");
    if (cfg.max_refine_depth < 1) throw std::invalid_argument("TraceConfig: max_refine_depth >= 1");
    if (!(cfg.tolerances.tol_real > 0.0) || !(cfg.tolerances.tol_degenerate > 0.0) ||
        !(cfg.tolerances.tol_return > 0.0)) {
        throw std::invalid_argument("TraceConfig: tolerances must be strictly positive");
    }
}

// Imaginary-part signature of the tracer, phase-fixed by dividing by the
// component of max modulus (pivot). Comparable across nearby states when the
// pivot index agrees.
struct ImSignature {
    int pivot = 0;
    std::array<double, 3> im{};
    double defect = 0.0;
};

ImSignature im_signature(const HomPoint& p) {
    ImSignature sig;
    double best = -1.0;
    for (int i = 0; i < 3; ++i) {
        double m = std::abs(p.v[i]);
        if (m > best) {
            best = m;
            sig.pivot = i;
        }
    }
    Complex d = p.v[sig.pivot];
    for (int i = 0; i < 3; ++i) {
        Complex q = p.v[i] / d;
        sig.im[i] = q.imag();
        sig.defect = std::max(sig.defect, std::abs(q.imag()));
    }
    sig.im[sig.pivot] = 0.0;
    return sig;
}

ImSignature im_signature_with_pivot(const HomPoint& p, int pivot) {
    ImSignature sig;
    sig.pivot = pivot;
    Complex d = p.v[pivot];
    if (std::abs(d) < 1e-300) return im_signature(p);
    for (int i = 0; i < 3; ++i) {
        Complex q = p.v[i] / d;
        sig.im[i] = q.imag();
        sig.defect = std::max(sig.defect, std::abs(q.imag()));
    }
    sig.im[sig.pivot] = 0.0;
    return sig;
}

struct ArcWalkResult {
    bool arrived = false;   // reached theta_to and evaluated there
    bool aborted = false;   // substep callback stopped the walk
    double theta_reached = 0.0;
    ConstructionState state;
};

// Substep callback: return false to stop the walk at the current substep.
using SubstepFn = std::function<bool(double th_prev, double th_cur,
                                     const ConstructionState& prev,
                                     const ConstructionState& cur)>;

struct Walker {
    const Construction& c;
    const TraceConfig& cfg;
    TraceDiagnostics* diag;
    std::vector<int> ambiguous;

    Walker(const Construction& c_, const TraceConfig& cfg_, TraceDiagnostics* diag_)
        : c(c_), cfg(cfg_), diag(diag_), ambiguous(c_.ambiguous_nodes()) {}

    bool inverted = false;
    Complex w{};
    Complex s{1.0, 0.0};
    ConstructionState state;
    HomPoint initial_tracer;
    ConstructionState initial_state_copy;

    Locus locus;
    bool have_last = false;
    LocusPoint last;
    double avg_gap = 0.0;
    long detours = 0;
    double phi_progress = 0.0;

    ConstructionState eval(Complex wpos, const ConstructionState& prev) const {
        if (diag) ++diag->evaluations;
        return evaluate(c, TimePoint{wpos, inverted}, prev, cfg.tolerances);
    }

    double defect_of(const ConstructionState& st) const {
        return im_signature(normalize(st.tracer(c))).defect;
    }

    bool tracer_real(const ConstructionState& st) const {
        return is_real_point(st.tracer(c), cfg.tolerances.tol_real);
    }

    // Affine tracer motion between two states, or -1 when either endpoint is
    // too close to the line at infinity for an affine distance to mean much.
    double tracer_motion(const ConstructionState& from, const ConstructionState& to) const {
        HomPoint a = normalize(from.tracer(c));
        HomPoint b = normalize(to.tracer(c));
        if (std::abs(a.v.z) < 0.1 || std::abs(b.v.z) < 0.1) return -1.0;
        Complex ax = a.v.x / a.v.z, ay = a.v.y / a.v.z;
        Complex bx = b.v.x / b.v.z, by = b.v.y / b.v.z;
        return std::abs(Complex(bx - ax)) + std::abs(Complex(by - ay));
    }

    void notify(double theta, Complex center, const ConstructionState& st) const {
        if (!cfg.substep_observer) return;
        DetourState ds;
        ds.t = st.param.t();
        ds.s = s;
        ds.center = center;
        ds.theta = theta;
        ds.state = st;
        cfg.substep_observer(ds);
    }

    // Predictor for the proximity reference: extrapolate each ambiguous node
    // from the last two accepted states. Removes the common-mode motion from
    // the candidate comparison, which otherwise mis-picks where the two
    // branches converge (e.g. conchoid tails near the mover's infinity).
    ConstructionState predict(const ConstructionState& cur, const ConstructionState& older,
                              double ratio) const {
        ConstructionState pred = cur;
        double r = std::clamp(ratio, 0.0, 2.0);
        for (int idx : ambiguous) {
            const HomPoint& v1 = std::get<HomPoint>(cur.values[idx]);
            const HomPoint& v2 = std::get<HomPoint>(older.values[idx]);
            int piv = 0;
            double best = -1.0;
            for (int i = 0; i < 3; ++i) {
                double m = std::abs(v1.v[i]);
                if (m > best) {
                    best = m;
                    piv = i;
                }
            }
            Complex d2 = v2.v[piv];
            if (std::abs(d2) < 1e-8) continue; // pivots disagree: skip extrapolation
            Vec3c ext;
            for (int i = 0; i < 3; ++i) {
                Complex a = v1.v[i];
                Complex b = v2.v[i] / d2;
                ext[i] = a + (a - b) * r;
            }
            if (norm2(ext) < 1e-8) continue;
            pred.values[idx] = HomPoint{ext};
        }
        return pred;
    }

    // Walk the detour circle (a, rho) from th_from to th_to, halving the
    // angular step on AmbiguousStep/DegenerateOp. The final arrival uses the
    // exact coordinate when provided (eliminates drift at real-axis points).
    ArcWalkResult walk_arc(Complex a, double rho, double th_from, double th_to,
                           const ConstructionState& st_from,
                           std::optional<Complex> exact_arrival,
                           const SubstepFn& on_substep) {
        ArcWalkResult out;
        double dir = (th_to >= th_from) ? 1.0 : -1.0;
        double base = dir * 2.0 * kPi / cfg.detour_steps;
        double th = th_from;
        ConstructionState st = st_from;
        ConstructionState older;
        bool have_older = false;
        double h_prev = 0.0;
        int arrival_failures = 0;
        double step_hint = 0.0; // per-walk controller: grow back gently after halving

        while (dir * (th_to - th) > 1e-13) {
            double step = base;
            if (step_hint != 0.0 && std::abs(2.0 * step_hint) < std::abs(base)) {
                step = 2.0 * step_hint;
            }
            if (dir * (th + step - th_to) >= 0.0) step = th_to - th;
            int depth = 0;
            ConstructionState next;
            double th_new = 0.0;
            bool accepted = false;
            while (!accepted) {
                double th_next = th + step;
                bool is_arrival = std::abs(th_next - th_to) <= 1e-12;
                if (is_arrival) th_next = th_to;
                Complex wpos = (is_arrival && exact_arrival)
                                   ? *exact_arrival
                                   : a + rho * std::polar(1.0, th_next);
                try {
                    if (have_older && h_prev > 0.0 && !ambiguous.empty()) {
                        ConstructionState pred = predict(st, older, std::abs(step) / h_prev);
                        next = eval(wpos, pred);
                    } else {
                        next = eval(wpos, st);
                    }
                    th_new = th_next;
                    accepted = true;
                    step_hint = is_arrival ? step_hint : step;
                } catch (const AmbiguousStep&) {
                    if (is_arrival && ++arrival_failures > 24) {
                        out.theta_reached = th;
                        out.state = std::move(st);
                        return out;
                    }
                    if (++depth > cfg.max_refine_depth || std::abs(step) < 1e-14) {
                        throw RefinementExhausted(
                            "substep refinement exhausted on detour circle");
                    }
                    step *= 0.5;
                } catch (const DegenerateOp&) {
                    if (is_arrival && ++arrival_failures > 24) {
                        out.theta_reached = th;
                        out.state = std::move(st);
                        return out;
                    }
                    if (++depth > cfg.max_refine_depth || std::abs(step) < 1e-14) {
                        throw RefinementExhausted(
                            "degenerate evaluation persists on detour circle");
                    }
                    step *= 0.5;
                }
            }
            notify(th_new, a, next);
            if (on_substep && !on_substep(th, th_new, st, next)) {
                out.aborted = true;
                out.theta_reached = th_new;
                out.state = std::move(next);
                return out;
            }
            older = std::move(st);
            have_older = true;
            h_prev = std::abs(th_new - th);
            st = std::move(next);
            th = th_new;
        }
        out.arrived = true;
        out.theta_reached = th_to;
        out.state = std::move(st);
        return out;
    }

    // ---- recording -------------------------------------------------------

    void push_point(const LocusPoint& pt, bool allow_split) {
        if (locus.arcs.empty()) locus.arcs.emplace_back();
        if (have_last && !last.at_infinity && !pt.at_infinity) {
            double gap = std::hypot(pt.x - last.x, pt.y - last.y);
            if (allow_split && avg_gap > 0.0 && gap > 10.0 * std::max(avg_gap, cfg.eps)) {
                locus.arcs.emplace_back();
            }
            avg_gap = (avg_gap > 0.0) ? 0.5 * avg_gap + 0.5 * gap : gap;
        }
        locus.arcs.back().points.push_back(pt);
        last = pt;
        have_last = true;
    }

    void record(const ConstructionState& st) {
        HomPoint n = normalize(st.tracer(c));
        LocusPoint pt;
        pt.t_at = st.param.t();
        for (int i = 0; i < 3; ++i) pt.triple[i] = n.v[i].real();
        double maxmod = std::max({std::abs(pt.triple[0]), std::abs(pt.triple[1]),
                                  std::abs(pt.triple[2])});
        pt.at_infinity = std::abs(pt.triple[2]) <= cfg.tolerances.tol_real * maxmod;
        if (!pt.at_infinity) {
            pt.x = pt.triple[0] / pt.triple[2];
            pt.y = pt.triple[1] / pt.triple[2];
        }

        if (have_last) {
            // Dedup exact revisits (e.g. a full-circle return on the same branch).
            bool same_t = std::abs(pt.t_at - last.t_at) <= 1e-10 * (1.0 + std::abs(pt.t_at));
            bool same_pos = pt.at_infinity == last.at_infinity &&
                            (pt.at_infinity
                                 ? (std::abs(pt.triple[0] - last.triple[0]) +
                                    std::abs(pt.triple[1] - last.triple[1])) < 1e-9
                                 : std::hypot(pt.x - last.x, pt.y - last.y) <= 1e-10);
            if (same_t && same_pos) return;

            // The locus passes through infinity between two recordings when the
            // normalized z changes sign while small: insert the interpolated
            // infinite point so the arc stays connected.
            if (!pt.at_infinity && !last.at_infinity && last.triple[2] * pt.triple[2] < 0.0 &&
                std::abs(last.triple[2]) < 0.5 && std::abs(pt.triple[2]) < 0.5) {
                double lam = last.triple[2] / (last.triple[2] - pt.triple[2]);
                std::array<double, 3> tri{};
                double big = 0.0;
                for (int i = 0; i < 3; ++i) {
                    tri[i] = last.triple[i] + lam * (pt.triple[i] - last.triple[i]);
                    big = std::max(big, std::abs(tri[i]));
                }
                if (big > 0.0) {
                    int piv = 0;
                    for (int i = 1; i < 3; ++i)
                        if (std::abs(tri[i]) > std::abs(tri[piv])) piv = i;
                    double d = tri[piv];
                    for (int i = 0; i < 3; ++i) {
                        tri[i] /= d;
                        if (std::abs(tri[i]) <= 1e-9) tri[i] = 0.0;
                    }
                    LocusPoint inf;
                    inf.at_infinity = true;
                    inf.triple = tri;
                    inf.t_at = last.t_at + lam * (pt.t_at - last.t_at);
                    push_point(inf, false);
                    push_point(pt, false);
                    return;
                }
            }
        }
        push_point(pt, true);
    }

    // ---- stop rule / landing marks ----------------------------------------

    struct Mark {
        double w;
        bool inverted;
    };
    std::vector<Mark> marks;

    void build_marks(double t0) {
        if (std::abs(t0) <= 1.3) marks.push_back({t0, false});
        if (std::abs(t0) >= 0.77) marks.push_back({-1.0 / t0, true});
    }

    bool tracer_matches_start(const ConstructionState& st) const {
        if (projective_distance(st.tracer(c), initial_tracer) > cfg.tolerances.tol_return)
            return false;
        if (!cfg.strict_stop) return true;
        for (std::size_t i = 0; i < st.values.size(); ++i) {
            const NodeValue& av = st.values[i];
            const NodeValue& bv = initial_state_copy.values[i];
            double d = 0.0;
            if (auto* p = std::get_if<HomPoint>(&av)) {
                d = projective_distance(*p, std::get<HomPoint>(bv));
            } else if (auto* l = std::get_if<HomLine>(&av)) {
                d = projective_distance(*l, std::get<HomLine>(bv));
            } else {
                const Circle& ca = std::get<Circle>(av);
                const Circle& cb = std::get<Circle>(bv);
                d = projective_distance(ca.center, cb.center) +
                    std::abs(ca.radius_sq - cb.radius_sq);
            }
            if (d > cfg.tolerances.tol_return) return false;
        }
        return true;
    }

    void maybe_switch_chart() {
        if (std::abs(w) > 1.25) {
            Complex wn = -1.0 / w;
            Complex phase = std::conj(w) / std::abs(w);
            s = s * phase * phase;
            double mag = std::abs(s);
            if (mag > 0.0) s /= mag;
            w = wn;
            inverted = !inverted;
            state.param = TimePoint{w, inverted};
        }
    }
};

double chart_phase_delta(double w_from, double w_to) {
    return 2.0 * (std::atan(w_to) - std::atan(w_from));
}

// ---- Variant A -------------------------------------------------------------

struct AttemptA {
    // Blocked: the antipode itself would not evaluate (pointwise degeneracy);
    // shrinking the detour moves the arrival off the bad spot.
    enum Kind { Advanced, RealAtFull, Neither, Blocked } kind = Neither;
    Complex w_end{};
    ConstructionState st;
    Complex center{};
    double rho = 0.0;
};

AttemptA attempt_detour_a(Walker& wk, double eps_here) {
    AttemptA out;
    Complex a = wk.w + wk.s * (eps_here / 2.0);
    double rho = eps_here / 2.0;
    double theta0 = std::arg(wk.w - a);
    double dir = (wk.cfg.orientation == Orientation::Anticlockwise) ? 1.0 : -1.0;
    out.center = a;
    out.rho = rho;

    Complex w_half = wk.w + wk.s * eps_here;
    w_half = Complex(w_half.real(), 0.0); // real-axis arrival, snapped
    ArcWalkResult half = wk.walk_arc(a, rho, theta0, theta0 + dir * kPi, wk.state,
                                     w_half, nullptr);
    if (half.arrived && wk.tracer_real(half.state)) {
        out.kind = AttemptA::Advanced;
        out.w_end = w_half;
        out.st = std::move(half.state);
        return out;
    }

    Complex w_full = Complex(wk.w.real(), 0.0);
    ArcWalkResult full = wk.walk_arc(a, rho, half.theta_reached, theta0 + dir * 2.0 * kPi,
                                     half.state, w_full, nullptr);
    if (full.arrived && wk.tracer_real(full.state)) {
        out.kind = half.arrived ? AttemptA::RealAtFull : AttemptA::Blocked;
        out.w_end = w_full;
        out.st = std::move(full.state);
        return out;
    }
    out.kind = AttemptA::Neither;
    return out;
}

// ---- Variant B -------------------------------------------------------------

struct CrossingHit {
    double theta = 0.0;
    ConstructionState st;
};

struct AttemptB {
    enum Kind { Crossing, Bounce, Neither } kind = Neither;
    Complex w_end{};
    Complex s_new{};
    ConstructionState st;
    bool is_new_point = false;
};

std::optional<CrossingHit> bisect_crossing(Walker& wk, Complex a, double rho,
                                           double th_lo, double th_hi,
                                           const ConstructionState& st_lo,
                                           const ConstructionState& st_hi) {
    const double tol_real = wk.cfg.tolerances.tol_real;
    ImSignature sig_lo = im_signature(normalize(st_lo.tracer(wk.c)));
    ImSignature sig_hi = im_signature_with_pivot(normalize(st_hi.tracer(wk.c)), sig_lo.pivot);

    int flip = -1;
    double flip_size = 0.0;
    for (int i = 0; i < 3; ++i) {
        if (sig_lo.im[i] * sig_hi.im[i] < 0.0) {
            double size = std::min(std::abs(sig_lo.im[i]), std::abs(sig_hi.im[i]));
            if (size > flip_size) {
                flip_size = size;
                flip = i;
            }
        }
    }

    double lo = th_lo, hi = th_hi;
    ConstructionState slo = st_lo, shi = st_hi;
    double dlo = sig_lo.defect, dhi = sig_hi.defect;
    double best_defect = std::min(dlo, dhi);
    CrossingHit best{dlo <= dhi ? lo : hi, dlo <= dhi ? slo : shi};

    for (int depth = 0; depth < wk.cfg.max_refine_depth; ++depth) {
        if (best_defect <= tol_real) break;
        double mid = 0.5 * (lo + hi);
        Complex wpos = a + rho * std::polar(1.0, mid);
        ConstructionState smid;
        try {
            smid = wk.eval(wpos, (std::abs(mid - lo) <= std::abs(hi - mid)) ? slo : shi);
        } catch (const GeometryError&) {
            double shifted = lo + 0.45 * (hi - lo);
            try {
                smid = wk.eval(a + rho * std::polar(1.0, shifted), slo);
                mid = shifted;
            } catch (const GeometryError&) {
                break;
            }
        }
        ImSignature sig_mid = im_signature_with_pivot(normalize(smid.tracer(wk.c)), sig_lo.pivot);
        if (sig_mid.defect < best_defect) {
            best_defect = sig_mid.defect;
            best = CrossingHit{mid, smid};
        }
        if (flip >= 0) {
            ImSignature sl = im_signature_with_pivot(normalize(slo.tracer(wk.c)), sig_lo.pivot);
            if (sl.im[flip] * sig_mid.im[flip] <= 0.0) {
                hi = mid;
                shi = std::move(smid);
            } else {
                lo = mid;
                slo = std::move(smid);
            }
        } else {
            // no sign change available: shrink toward the smaller-defect side
            ImSignature sl = im_signature_with_pivot(normalize(slo.tracer(wk.c)), sig_lo.pivot);
            ImSignature sh = im_signature_with_pivot(normalize(shi.tracer(wk.c)), sig_lo.pivot);
            if (sl.defect <= sh.defect) {
                hi = mid;
                shi = std::move(smid);
            } else {
                lo = mid;
                slo = std::move(smid);
            }
        }
    }

    if (best_defect <= std::sqrt(tol_real)) return best;
    return std::nullopt;
}

AttemptB attempt_detour_b(Walker& wk, double eps_here) {
    AttemptB out;
    Complex a = wk.w + wk.s * (eps_here / 2.0);
    double rho = eps_here / 2.0;
    double theta0 = std::arg(wk.w - a);
    double dir = (wk.cfg.orientation == Orientation::Anticlockwise) ? 1.0 : -1.0;
    const double tol_real = wk.cfg.tolerances.tol_real;
    const double base_step = 2.0 * kPi / wk.cfg.detour_steps;

    HomPoint start_tracer = normalize(wk.state.tracer(wk.c));
    std::optional<CrossingHit> crossing;

    auto on_substep = [&](double th_prev, double th_cur, const ConstructionState& prev,
                          const ConstructionState& cur) -> bool {
        ImSignature sig_cur = im_signature(normalize(cur.tracer(wk.c)));
        bool near_start = std::abs(th_cur - theta0) <= 0.26 * base_step;
        if (sig_cur.defect <= tol_real) {
            if (!near_start ||
                projective_distance(cur.tracer(wk.c), start_tracer) >
                    10.0 * wk.cfg.tolerances.tol_return) {
                crossing = CrossingHit{th_cur, cur};
                return false;
            }
            return true;
        }
        ImSignature sig_prev = im_signature_with_pivot(normalize(prev.tracer(wk.c)),
                                                       sig_cur.pivot);
        if (sig_prev.defect <= tol_real) return true; // handled when prev was current
        bool flip = false;
        for (int i = 0; i < 3; ++i) {
            if (sig_prev.im[i] * sig_cur.im[i] < 0.0 &&
                std::abs(sig_prev.im[i]) > tol_real && std::abs(sig_cur.im[i]) > tol_real) {
                flip = true;
                break;
            }
        }
        if (!flip) return true;
        auto hit = bisect_crossing(wk, a, rho, th_prev, th_cur, prev, cur);
        if (!hit) return true;
        bool hit_near_start = std::abs(hit->theta - theta0) <= 0.26 * base_step;
        if (hit_near_start && projective_distance(hit->st.tracer(wk.c), start_tracer) <=
                                  10.0 * wk.cfg.tolerances.tol_return) {
            return true;
        }
        crossing = std::move(hit);
        return false;
    };

    double th_cur = theta0;
    ConstructionState st_cur = wk.state;
    for (int loop = 0; loop < 2; ++loop) {
        double th_end = theta0 + dir * 2.0 * kPi * (loop + 1);
        ArcWalkResult res = wk.walk_arc(a, rho, th_cur, th_end, st_cur, wk.w, on_substep);
        if (res.aborted && crossing) {
            out.kind = AttemptB::Crossing;
            out.w_end = a + rho * std::polar(1.0, crossing->theta);
            Complex radial = out.w_end - a;
            out.s_new = radial / std::abs(radial);
            out.st = std::move(crossing->st);
            out.is_new_point = true;
            return out;
        }
        if (!res.arrived) {
            // arrival point itself failed to evaluate; treat as no progress
            out.kind = AttemptB::Neither;
            return out;
        }
        double defect = wk.defect_of(res.state);
        if (defect <= 10.0 * tol_real) {
            out.kind = AttemptB::Bounce;
            out.w_end = wk.w;
            out.s_new = -wk.s;
            out.is_new_point = projective_distance(res.state.tracer(wk.c), start_tracer) >
                               wk.cfg.tolerances.tol_return;
            out.st = std::move(res.state);
            return out;
        }
        th_cur = th_end;
        st_cur = std::move(res.state);
    }
    out.kind = AttemptB::Neither;
    return out;
}

} // namespace

// ---- public helpers ---------------------------------------------------------

std::pair<Complex, double> detour_circle(Complex t, Complex s, double eps) {
    return {t + s * (eps / 2.0), eps / 2.0};
}

DetourState step_on_detour(const DetourState& ds, const Construction& c,
                           const TraceConfig& cfg) {
    double rho = std::abs(ds.t - ds.center);
    double dir = (cfg.orientation == Orientation::Anticlockwise) ? 1.0 : -1.0;
    double step = dir * 2.0 * kPi / cfg.detour_steps;
    int depth = 0;
    while (true) {
        double theta = ds.theta + step;
        Complex t = ds.center + rho * std::polar(1.0, theta);
        try {
            DetourState out;
            out.state = evaluate(c, TimePoint{t, ds.state.param.inverted}, ds.state,
                                 cfg.tolerances);
            out.t = t;
            out.s = ds.s;
            out.center = ds.center;
            out.theta = theta;
            double mag = std::abs(out.s);
            if (mag > 0.0) out.s /= mag;
            return out;
        } catch (const AmbiguousStep&) {
            if (++depth > cfg.max_refine_depth) {
                throw RefinementExhausted("step_on_detour: refinement exhausted");
            }
            step *= 0.5;
        }
    }
}

std::optional<RealCrossing> refine_real_crossing(const Construction& c, const DetourState& ds,
                                                 double theta_lo, double theta_hi,
                                                 const TraceConfig& cfg) {
    TraceDiagnostics scratch;
    Walker wk{c, cfg, &scratch};
    wk.inverted = ds.state.param.inverted;
    double rho = std::abs(ds.t - ds.center);

    ConstructionState st_lo = ds.state;
    if (std::abs(ds.theta - theta_lo) > 1e-12) {
        st_lo = wk.eval(ds.center + rho * std::polar(1.0, theta_lo), ds.state);
    }
    if (im_signature(normalize(st_lo.tracer(c))).defect <= cfg.tolerances.tol_real) {
        return RealCrossing{theta_lo, st_lo};
    }
    ConstructionState st_hi = wk.eval(ds.center + rho * std::polar(1.0, theta_hi), st_lo);
    if (im_signature(normalize(st_hi.tracer(c))).defect <= cfg.tolerances.tol_real) {
        return RealCrossing{theta_hi, st_hi};
    }
    auto hit = bisect_crossing(wk, ds.center, rho, theta_lo, theta_hi, st_lo, st_hi);
    if (!hit) return std::nullopt;
    return RealCrossing{hit->theta, std::move(hit->st)};
}

std::size_t Locus::total_points() const {
    std::size_t n = 0;
    for (const auto& a : arcs) n += a.points.size();
    return n;
}

std::vector<std::pair<double, double>> Locus::finite_points() const {
    std::vector<std::pair<double, double>> out;
    for (const auto& a : arcs) {
        for (const auto& p : a.points) {
            if (!p.at_infinity) out.emplace_back(p.x, p.y);
        }
    }
    return out;
}

// ---- trace drivers ----------------------------------------------------------

Locus trace_variant_a(const Construction& c, double t0, const TraceConfig& cfg,
                      TraceDiagnostics* diag) {
    validate_config(cfg);
    TraceDiagnostics local;
    Walker wk{c, cfg, diag ? diag : &local};

    wk.state = initial_state(c, Complex(t0), cfg.tolerances);
    wk.initial_tracer = normalize(wk.state.tracer(c));
    wk.initial_state_copy = wk.state;
    wk.build_marks(t0);
    if (std::abs(t0) > 1.0) {
        wk.inverted = true;
        wk.w = Complex(-1.0 / t0, 0.0);
        wk.state.param = TimePoint{wk.w, true};
    } else {
        wk.w = Complex(t0, 0.0);
    }
    wk.s = Complex(1.0, 0.0);
    wk.record(wk.state);

    bool closed = false;
    double eps_hint = 0.0; // carries the step-controller state between detours
    while (wk.detours < cfg.max_detours) {
        double wr = wk.w.real();
        double eps_policy = cfg.eps * (1.0 + wr * wr) / 2.0;
        double eps_here = eps_policy;
        if (eps_hint > 0.0) eps_here = std::min(eps_policy, 2.0 * eps_hint);
        bool landing = false;
        for (const auto& mk : wk.marks) {
            if (mk.inverted != wk.inverted) continue;
            double d = (mk.w - wr) * wk.s.real();
            if (d > 1e-12 && d <= eps_here) {
                eps_here = d;
                landing = true;
            }
        }

        // Bounce refinement floor: fold approaches stop at eps / 2^bounce_halvings
        // of the policy step, then the direction flips.
        const double eps_floor = eps_policy / static_cast<double>(1 << cfg.bounce_halvings);
        int shrinks = 0;
        while (true) {
            if (wk.detours >= cfg.max_detours) break;
            ++wk.detours;
            AttemptA out = attempt_detour_a(wk, eps_here);
            if (out.kind == AttemptA::Advanced) {
                // keep recorded spacing near 2*eps so the locus stays densely
                // sampled where the tracer moves fast (Assumption 3)
                double motion = wk.tracer_motion(wk.state, out.st);
                if (motion > 2.0 * cfg.eps && eps_here > eps_floor) {
                    eps_here = std::max(0.5 * eps_here, eps_floor);
                    landing = false;
                    continue;
                }
                wk.phi_progress += std::abs(chart_phase_delta(wr, out.w_end.real()));
                eps_hint = eps_here;
                wk.w = out.w_end;
                wk.state = std::move(out.st);
                wk.record(wk.state);
                if (landing && std::abs(eps_here - std::abs(wk.w.real() - wr)) < 1e-9 &&
                    wk.s.real() > 0.0 && wk.phi_progress > cfg.eps * 0.5 &&
                    wk.tracer_matches_start(wk.state)) {
                    closed = true;
                }
                wk.maybe_switch_chart();
                break;
            }
            if (out.kind == AttemptA::RealAtFull) {
                if (eps_here > eps_floor) {
                    eps_here = std::max(0.5 * eps_here, eps_floor);
                    landing = false;
                    continue;
                }
                wk.record(out.st);
                wk.state = std::move(out.st);
                wk.s = -wk.s;
                ++wk.locus.reversal_count;
                eps_hint = 0.0;
                if (wk.diag) {
                    TimePoint center_tp{out.center, wk.inverted};
                    wk.diag->reversals.push_back(ReversalInfo{center_tp.t(), out.rho});
                }
                break;
            }
            // Neither / Blocked: shrink this detour and retry (Assumption 1).
            if (shrinks < cfg.max_refine_depth && eps_here > 1e-13) {
                ++shrinks;
                eps_here *= 0.61803398875; // irrational ratio dodges fixed bad spots
                landing = false;
                continue;
            }
            throw RefinementExhausted("tracer real at neither real-axis point after shrinking");
        }
        if (closed) break;
    }

    wk.locus.closed = closed;
    wk.locus.detours_used = wk.detours;
    return std::move(wk.locus);
}

Locus trace_variant_b(const Construction& c, double t0, const TraceConfig& cfg,
                      TraceDiagnostics* diag) {
    validate_config(cfg);
    TraceDiagnostics local;
    Walker wk{c, cfg, diag ? diag : &local};

    wk.state = initial_state(c, Complex(t0), cfg.tolerances);
    wk.initial_tracer = normalize(wk.state.tracer(c));
    wk.initial_state_copy = wk.state;
    wk.build_marks(t0);
    if (std::abs(t0) > 1.0) {
        wk.inverted = true;
        wk.w = Complex(-1.0 / t0, 0.0);
        wk.state.param = TimePoint{wk.w, true};
    } else {
        wk.w = Complex(t0, 0.0);
    }
    wk.s = Complex(1.0, 0.0);
    wk.record(wk.state);

    const double tol_ret = cfg.tolerances.tol_return;
    bool closed = false;
    double eps_hint = 0.0;
    while (wk.detours < cfg.max_detours) {
        double eps_policy = cfg.eps * (1.0 + std::norm(wk.w)) / 2.0;
        double eps_here = eps_policy;
        if (eps_hint > 0.0) eps_here = std::min(eps_policy, 2.0 * eps_hint);
        bool landing = false;
        double mark_w = 0.0;
        // Radial steering zigzags around the real axis while marching along
        // it, so the landing test accepts any mostly-axis-aligned direction;
        // the clamp below re-aligns the walk exactly onto the mark.
        bool w_real = std::abs(wk.w.imag()) <= 1e-7 * (1.0 + std::abs(wk.w.real()));
        bool s_axis = std::abs(wk.s.real()) >= 0.6;
        if (w_real && s_axis) {
            for (const auto& mk : wk.marks) {
                if (mk.inverted != wk.inverted) continue;
                double d = (mk.w - wk.w.real()) * (wk.s.real() > 0 ? 1.0 : -1.0);
                if (d > 1e-12 && d <= eps_here) {
                    eps_here = d;
                    landing = true;
                    mark_w = mk.w;
                }
            }
            if (landing) {
                // land exactly on the mark
                wk.w = Complex(wk.w.real(), 0.0);
                wk.s = Complex(wk.s.real() > 0 ? 1.0 : -1.0, 0.0);
            }
        }

        const double eps_floor = eps_policy / static_cast<double>(1 << cfg.bounce_halvings);
        int shrinks = 0;
        while (true) {
            if (wk.detours >= cfg.max_detours) break;
            ++wk.detours;
            AttemptB out = attempt_detour_b(wk, eps_here);
            if (out.kind == AttemptB::Crossing) {
                double motion = wk.tracer_motion(wk.state, out.st);
                if (motion > 2.0 * cfg.eps && eps_here > eps_floor) {
                    eps_here = std::max(0.5 * eps_here, eps_floor);
                    landing = false;
                    continue;
                }
                eps_hint = eps_here;
                wk.w = out.w_end;
                wk.s = out.s_new;
                wk.state = std::move(out.st);
                if (wk.tracer_real(wk.state)) wk.record(wk.state);
                if (landing && std::abs(wk.w - Complex(mark_w, 0.0)) <= tol_ret &&
                    std::abs(wk.s - Complex(1.0, 0.0)) <= 1e-6 && wk.detours > 2 &&
                    wk.tracer_matches_start(wk.state)) {
                    closed = true;
                }
                wk.maybe_switch_chart();
                break;
            }
            if (out.kind == AttemptB::Bounce) {
                if (out.is_new_point && wk.tracer_real(out.st)) wk.record(out.st);
                wk.state = std::move(out.st);
                wk.s = out.s_new;
                ++wk.locus.reversal_count;
                eps_hint = 0.0;
                if (wk.diag) {
                    Complex a = wk.w + (-out.s_new) * (eps_here / 2.0);
                    TimePoint center_tp{a, wk.inverted};
                    wk.diag->reversals.push_back(ReversalInfo{center_tp.t(), eps_here / 2.0});
                }
                break;
            }
            if (shrinks < cfg.max_refine_depth && eps_here > 1e-13) {
                ++shrinks;
                eps_here *= 0.5;
                landing = false;
                continue;
            }
            throw RefinementExhausted("no real crossing found after shrinking detours");
        }
        if (closed) break;
    }

    wk.locus.closed = closed;
    wk.locus.detours_used = wk.detours;
    return std::move(wk.locus);
}

Locus trace(const Construction& c, double t0, const TraceConfig& cfg,
            TraceDiagnostics* diag) {
    return cfg.variant == Variant::A ? trace_variant_a(c, t0, cfg, diag)
                                     : trace_variant_b(c, t0, cfg, diag);
}

} // namespace loci
