#pragma once

#include <string>

#include "loci/tracer.hpp"

namespace loci {

struct EmptyLocus : GeometryError {
    EmptyLocus() : GeometryError("locus has no finite points") {}
};

/// Trace parameters echoed into the JSON output.
struct RunMetadata {
    Variant variant = Variant::A;
    double eps = 0.05;
    int detour_steps = 32;
    Orientation orientation = Orientation::Anticlockwise;
};

/// CSV with header "x,y,re_t,im_t", 17 significant digits, one blank line
/// between arcs; points at infinity appear as "# infinity: x:y:z" rows.
std::string emit_csv(const Locus& locus);

/// One polyline per arc, viewBox fitted to the finite bounding box expanded
/// by margin_fraction, y-axis flipped to mathematical orientation.
std::string emit_svg(const Locus& locus, int width = 800, int height = 600,
                     double margin_fraction = 0.05);

/// Arcs as per-point [x, y, re_t, im_t] plus run metadata.
std::string emit_json(const Locus& locus, const RunMetadata& meta);

} // namespace loci
