#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace loci::examples {

/// Orthogonal projection of the unit circle onto the line x = 2.
std::string_view projline();
/// Conic through five points, generated by a rotating line.
std::string_view conic5();
/// Conchoid of Nicomedes, pole at the origin, base y = -2, distance 2.
std::string_view conchoid();
/// Watt curve four-bar linkage, a = 2, b = 2.5, c = 1.5.
std::string_view watt();

struct ExampleFile {
    std::string name;
    std::string_view contents;
};

std::vector<ExampleFile> all();

/// Write the bundled construction files into `dir`; returns the paths written.
std::vector<std::string> write_all(const std::string& dir);

} // namespace loci::examples
