#include "loci/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>

#include "loci/emit.hpp"
#include "loci/examples.hpp"
#include "loci/oracles.hpp"
#include "loci/parser.hpp"
#include "loci/tracer.hpp"

namespace loci {

namespace {

struct TraceOptions {
    std::string file;
    std::string variant = "A";
    double eps = 0.05;
    int detour_steps = 32;
    std::string orientation = "acw";
    long max_detours = 200000;
    double t0 = 0.0;
    std::vector<std::string> outs;
};

int load_and_parse(const std::string& path, Construction& out) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open '" << path << "'\n";
        return 2;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    ParseResult res = parse_construction(ss.str());
    if (auto* err = std::get_if<ParseError>(&res)) {
        std::cerr << path << ":" << err->span.line << ":" << err->span.column
                  << ": error: " << err->message << " [" << to_string(err->kind) << "]\n";
        return 2;
    }
    out = std::move(std::get<Construction>(res));
    return 0;
}

TraceConfig make_config(const TraceOptions& opt) {
    TraceConfig cfg;
    cfg.variant = (opt.variant == "B") ? Variant::B : Variant::A;
    cfg.eps = opt.eps;
    cfg.detour_steps = opt.detour_steps;
    cfg.orientation =
        (opt.orientation == "cw") ? Orientation::Clockwise : Orientation::Anticlockwise;
    cfg.max_detours = opt.max_detours;
    return cfg;
}

int write_outputs(const Locus& locus, const TraceConfig& cfg,
                  const std::vector<std::string>& outs) {
    RunMetadata meta{cfg.variant, cfg.eps, cfg.detour_steps, cfg.orientation};
    for (const auto& spec : outs) {
        auto colon = spec.find(':');
        if (colon == std::string::npos) {
            std::cerr << "error: --out expects FMT:PATH, got '" << spec << "'\n";
            return 1;
        }
        std::string fmt = spec.substr(0, colon);
        std::string path = spec.substr(colon + 1);
        std::string payload;
        try {
            if (fmt == "csv") {
                payload = emit_csv(locus);
            } else if (fmt == "svg") {
                payload = emit_svg(locus);
            } else if (fmt == "json") {
                payload = emit_json(locus, meta);
            } else {
                std::cerr << "error: unknown output format '" << fmt << "'\n";
                return 1;
            }
        } catch (const EmptyLocus&) {
            std::cerr << "error: locus has no finite points, cannot write " << path << "\n";
            return 1;
        }
        std::ofstream out(path);
        if (!out) {
            std::cerr << "error: cannot write '" << path << "'\n";
            return 1;
        }
        out << payload;
    }
    return 0;
}

int run_trace(const TraceOptions& opt) {
    Construction c;
    if (int rc = load_and_parse(opt.file, c); rc != 0) return rc;
    TraceConfig cfg = make_config(opt);
    Locus locus;
    try {
        locus = trace(c, opt.t0, cfg);
    } catch (const GeometryError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    if (int rc = write_outputs(locus, cfg, opt.outs); rc != 0) return rc;
    std::cerr << "traced " << locus.total_points() << " points in " << locus.arcs.size()
              << " arc(s), " << locus.detours_used << " detours, "
              << locus.reversal_count << " reversals, "
              << (locus.closed ? "closed" : "NOT closed") << "\n";
    return locus.closed ? 0 : 3;
}

bool parse_curve_spec(const std::string& spec, ImplicitCurve& curve, std::string& err,
                      const Construction& c) {
    std::string name = spec;
    std::vector<double> params;
    if (auto colon = spec.find(':'); colon != std::string::npos) {
        name = spec.substr(0, colon);
        std::stringstream ps(spec.substr(colon + 1));
        std::string tok;
        while (std::getline(ps, tok, ',')) {
            try {
                params.push_back(std::stod(tok));
            } catch (...) {
                err = "bad curve parameter '" + tok + "'";
                return false;
            }
        }
    }
    if (name == "projline") {
        curve = projline_curve();
    } else if (name == "conchoid") {
        if (params.size() != 2) {
            err = "conchoid needs parameters a,b";
            return false;
        }
        curve = conchoid_curve(params[0], params[1]);
    } else if (name == "watt") {
        if (params.size() != 3) {
            err = "watt needs parameters a,b,c";
            return false;
        }
        curve = watt_curve(params[0], params[1], params[2]);
    } else if (name == "fourbar-sextic") {
        curve = fourbar_sextic_curve();
    } else if (name == "conic5") {
        // fit the conic through the construction's first five free points
        std::array<std::pair<double, double>, 5> pts;
        std::size_t found = 0;
        for (const auto& node : c.nodes) {
            if (auto* fp = std::get_if<FreePointNode>(&node)) {
                if (found < 5) pts[found] = {fp->x.real(), fp->y.real()};
                ++found;
            }
        }
        if (found < 5) {
            err = "conic5 needs five free points in the construction";
            return false;
        }
        try {
            curve = conic_curve(conic_through_five(pts));
        } catch (const DegenerateConfiguration& e) {
            err = e.what();
            return false;
        }
    } else {
        err = "unknown curve '" + name + "'";
        return false;
    }
    return true;
}

} // namespace

int cli_run(int argc, const char* const* argv) {
    CLI::App app{"dynamic-geometry locus tracer with complex detours"};
    app.require_subcommand(1);

    TraceOptions topt;
    CLI::App* tr = app.add_subcommand("trace", "trace a construction file");
    tr->add_option("file", topt.file, "construction file")->required();
    tr->add_option("--variant", topt.variant, "A or B")
        ->check(CLI::IsMember({"A", "B"}));
    tr->add_option("--eps", topt.eps, "detour diameter scale");
    tr->add_option("--detour-steps", topt.detour_steps, "substeps per detour circle");
    tr->add_option("--orientation", topt.orientation, "acw or cw")
        ->check(CLI::IsMember({"acw", "cw"}));
    tr->add_option("--max-detours", topt.max_detours, "detour budget");
    tr->add_option("--t0", topt.t0, "initial time parameter (real)");
    tr->add_option("--out", topt.outs, "output FMT:PATH (csv|svg|json), repeatable");

    std::string vfile, vcurve;
    double vmax = 1e-6;
    CLI::App* va = app.add_subcommand("validate", "trace and check against a known curve");
    va->add_option("file", vfile, "construction file")->required();
    va->add_option("--curve", vcurve,
                   "projline | conchoid:a,b | watt:a,b,c | fourbar-sextic | conic5")
        ->required();
    va->add_option("--max-residual", vmax, "pass threshold");

    std::string exdir = ".";
    CLI::App* ex = app.add_subcommand("examples", "write the bundled construction files");
    ex->add_option("--dir", exdir, "target directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (tr->parsed()) return run_trace(topt);

    if (va->parsed()) {
        Construction c;
        if (int rc = load_and_parse(vfile, c); rc != 0) return rc;
        ImplicitCurve curve;
        std::string err;
        if (!parse_curve_spec(vcurve, curve, err, c)) {
            std::cerr << "error: " << err << "\n";
            return 1;
        }
        Locus locus;
        TraceConfig cfg;
        try {
            locus = trace(c, 0.0, cfg);
        } catch (const GeometryError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
        ResidualReport rep = residual_implicit(curve, locus);
        std::cerr << "max residual " << rep.max_residual << " over " << rep.points_checked
                  << " points (" << rep.infinite_skipped << " at infinity skipped), "
                  << (locus.closed ? "closed" : "NOT closed") << "\n";
        if (!locus.closed) return 3;
        return rep.max_residual <= vmax ? 0 : 1;
    }

    if (ex->parsed()) {
        try {
            for (const auto& path : examples::write_all(exdir)) {
                std::cout << path << "\n";
            }
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
        return 0;
    }
    return 0;
}

} // namespace loci
