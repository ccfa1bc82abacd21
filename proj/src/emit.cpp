#include "loci/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

namespace loci {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_coord(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.8g", v);
    return buf;
}

} // namespace

std::string emit_csv(const Locus& locus) {
    std::string out = "x,y,re_t,im_t\n";
    bool first_arc = true;
    for (const auto& arc : locus.arcs) {
        if (arc.points.empty()) continue;
        if (!first_arc) out += "\n";
        first_arc = false;
        for (const auto& p : arc.points) {
            if (p.at_infinity) {
                out += "# infinity: " + fmt17(p.triple[0]) + ":" + fmt17(p.triple[1]) + ":" +
                       fmt17(p.triple[2]) + "\n";
            } else {
                out += fmt17(p.x) + "," + fmt17(p.y) + "," + fmt17(p.t_at.real()) + "," +
                       fmt17(p.t_at.imag()) + "\n";
            }
        }
    }
    return out;
}

std::string emit_svg(const Locus& locus, int width, int height, double margin_fraction) {
    auto pts = locus.finite_points();
    if (pts.empty()) throw EmptyLocus();

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (auto [x, y] : pts) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    double dx = xmax - xmin, dy = ymax - ymin;
    if (dx <= 0.0) dx = 1.0;
    if (dy <= 0.0) dy = 1.0;
    xmin -= dx * margin_fraction;
    xmax += dx * margin_fraction;
    ymin -= dy * margin_fraction;
    ymax += dy * margin_fraction;
    dx = xmax - xmin;
    dy = ymax - ymin;

    double sx = width / dx, sy = height / dy;
    auto map_x = [&](double x) { return (x - xmin) * sx; };
    auto map_y = [&](double y) { return (ymax - y) * sy; }; // y-flip

    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      std::to_string(width) + "\" height=\"" + std::to_string(height) +
                      "\" viewBox=\"0 0 " + std::to_string(width) + " " +
                      std::to_string(height) + "\">\n";
    for (const auto& arc : locus.arcs) {
        std::string poly;
        std::size_t n = 0;
        for (const auto& p : arc.points) {
            if (p.at_infinity) continue;
            if (!poly.empty()) poly += " ";
            poly += fmt_coord(map_x(p.x)) + "," + fmt_coord(map_y(p.y));
            ++n;
        }
        if (n == 0) continue;
        if (n == 1) {
            out += "  <circle cx=\"" + poly.substr(0, poly.find(',')) + "\" cy=\"" +
                   poly.substr(poly.find(',') + 1) + "\" r=\"1.5\" fill=\"gray\"/>\n";
        } else {
            out += "  <polyline points=\"" + poly +
                   "\" fill=\"none\" stroke=\"gray\" stroke-width=\"1.5\"/>\n";
        }
    }
    out += "</svg>\n";
    return out;
}

std::string emit_json(const Locus& locus, const RunMetadata& meta) {
    nlohmann::ordered_json j;
    j["metadata"] = {
        {"variant", meta.variant == Variant::A ? "A" : "B"},
        {"eps", meta.eps},
        {"detour_steps", meta.detour_steps},
        {"orientation",
         meta.orientation == Orientation::Anticlockwise ? "anticlockwise" : "clockwise"},
        {"reversal_count", locus.reversal_count},
        {"detours_used", locus.detours_used},
        {"closed", locus.closed},
    };
    nlohmann::ordered_json arcs = nlohmann::ordered_json::array();
    for (const auto& arc : locus.arcs) {
        nlohmann::ordered_json a = nlohmann::ordered_json::array();
        for (const auto& p : arc.points) {
            if (p.at_infinity) {
                a.push_back({{"at_infinity", {p.triple[0], p.triple[1], p.triple[2]}},
                             {"re_t", p.t_at.real()},
                             {"im_t", p.t_at.imag()}});
            } else {
                a.push_back({p.x, p.y, p.t_at.real(), p.t_at.imag()});
            }
        }
        arcs.push_back(std::move(a));
    }
    j["arcs"] = std::move(arcs);
    return j.dump(2) + "\n";
}

} // namespace loci
