#include "loci/examples.hpp"

#include <fstream>
#include <stdexcept>

namespace loci::examples {

namespace {

constexpr std::string_view kProjline = R"(# Orthogonal projection of a circle onto a line.
# The point A runs on the unit circle; B is its horizontal shadow on x = 2.
point O = (0, 0)
circle c0 = circle(O, 1)
line b = (1, 0, -2)
point A = mover on_circle(c0)
line a = perp(b, A)
point B = meet(a, b)
trace mover=A tracer=B
)";

constexpr std::string_view kConic5 = R"(# Conic through five points in general position.
# A rotating line c through F generates the conic as the locus of K.
point A = (-2.3, 1.28)
point B = (0.52, -1.98)
point C = (1.93, 1.53)
point D = (-1.93, -1.28)
point E = (-0.26, 1.99)
line a = join(A, B)
line b = join(D, E)
point F = meet(a, b)
line c = mover line_through(F)
line d = join(B, C)
point G = meet(c, d)
line e = join(C, D)
point H = meet(c, e)
line f = join(A, H)
line g = join(E, G)
point K = meet(f, g)
trace mover=c tracer=K
)";

constexpr std::string_view kConchoid = R"(# Conchoid of Nicomedes: pole B at the origin, base g: y = -2, distance 2.
point B = (0, 0)
line g = (0, 1, 2)
point A = mover on_line(g)
circle c0 = circle(A, 2)
line h = join(A, B)
point C = meet_cl(c0, h, branch=0)
trace mover=A tracer=C
)";

constexpr std::string_view kWatt = R"(# Watt curve from a four-bar linkage: ground 2a = 4, cranks b = 2.5, coupler 2c = 3.
point A = (-2, 0)
point B = (2, 0)
circle c0 = circle(A, 2.5)
circle c1 = circle(B, 2.5)
point C = mover on_circle(c0)
circle c2 = circle(C, 3)
point D = meet_cc(c1, c2, branch=0)
point E = midpoint(C, D)
trace mover=C tracer=E
)";

} // namespace

std::string_view projline() { return kProjline; }
std::string_view conic5() { return kConic5; }
std::string_view conchoid() { return kConchoid; }
std::string_view watt() { return kWatt; }

std::vector<ExampleFile> all() {
    return {{"projline.cons", kProjline},
            {"conic5.cons", kConic5},
            {"conchoid.cons", kConchoid},
            {"watt.cons", kWatt}};
}

std::vector<std::string> write_all(const std::string& dir) {
    std::vector<std::string> written;
    for (const auto& ex : all()) {
        std::string path = dir.empty() ? ex.name : dir + "/" + ex.name;
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << ex.contents;
        written.push_back(path);
    }
    return written;
}

} // namespace loci::examples
