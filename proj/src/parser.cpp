#include "loci/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <map>
#include <set>
#include <vector>

namespace loci {

std::string_view to_string(ParseErrorKind k) {
    switch (k) {
    case ParseErrorKind::Syntax: return "Syntax";
    case ParseErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ParseErrorKind::TypeMismatch: return "TypeMismatch";
    case ParseErrorKind::ForwardReference: return "ForwardReference";
    case ParseErrorKind::DuplicateName: return "DuplicateName";
    case ParseErrorKind::NoTraceDirective: return "NoTraceDirective";
    }
    return "Syntax";
}

namespace {

struct ParseFailure {
    ParseError err;
};

[[noreturn]] void fail(ParseErrorKind kind, int line, int col, int len, std::string msg) {
    throw ParseFailure{ParseError{SourceSpan{line, col, len}, std::move(msg), kind}};
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

struct LineScanner {
    std::string_view text;
    int line;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
        if (pos < text.size() && text[pos] == '#') pos = text.size();
    }
    bool at_end() {
        skip_ws();
        return pos >= text.size();
    }
    int col() const { return static_cast<int>(pos) + 1; }

    std::string ident(const char* what) {
        skip_ws();
        if (pos >= text.size() || !ident_start(text[pos])) {
            fail(ParseErrorKind::Syntax, line, col(), 1, std::string("expected ") + what);
        }
        std::size_t start = pos;
        while (pos < text.size() && ident_char(text[pos])) ++pos;
        return std::string(text.substr(start, pos - start));
    }

    void expect(char c) {
        skip_ws();
        if (pos >= text.size() || text[pos] != c) {
            fail(ParseErrorKind::Syntax, line, col(), 1,
                 std::string("expected '") + c + "'");
        }
        ++pos;
    }

    bool peek(char c) {
        skip_ws();
        return pos < text.size() && text[pos] == c;
    }

    double real(const char* what) {
        skip_ws();
        std::size_t start = pos;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
        std::size_t digits = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            ++pos;
            ++digits;
        }
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                ++pos;
                ++digits;
            }
        }
        if (digits == 0) {
            fail(ParseErrorKind::Syntax, line, static_cast<int>(start) + 1, 1,
                 std::string("expected number for ") + what);
        }
        if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
            ++pos;
            if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
            std::size_t ed = 0;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                ++pos;
                ++ed;
            }
            if (ed == 0) {
                fail(ParseErrorKind::Syntax, line, static_cast<int>(pos) + 1, 1,
                     "malformed exponent");
            }
        }
        std::string lit(text.substr(start, pos - start));
        return std::strtod(lit.c_str(), nullptr);
    }

    int branch_value() {
        skip_ws();
        std::size_t start = pos;
        std::string key = ident("'branch'");
        if (key != "branch") {
            fail(ParseErrorKind::Syntax, line, static_cast<int>(start) + 1,
                 static_cast<int>(key.size()), "expected 'branch='");
        }
        expect('=');
        skip_ws();
        if (pos >= text.size() || (text[pos] != '0' && text[pos] != '1')) {
            fail(ParseErrorKind::Syntax, line, col(), 1, "branch must be 0 or 1");
        }
        int b = text[pos] - '0';
        ++pos;
        return b;
    }
};

struct Builder {
    Construction c;
    std::map<std::string, int> symbols;
    std::set<std::string> all_names; // from the pre-scan, for error classification

    int lookup(const std::string& name, int line, int col) const {
        auto it = symbols.find(name);
        if (it != symbols.end()) return it->second;
        if (all_names.count(name)) {
            fail(ParseErrorKind::ForwardReference, line, col,
                 static_cast<int>(name.size()), "'" + name + "' is declared later");
        }
        fail(ParseErrorKind::UnknownIdentifier, line, col,
             static_cast<int>(name.size()), "unknown identifier '" + name + "'");
    }

    int ref(LineScanner& sc, ValueType want, const char* role) {
        sc.skip_ws();
        int col = sc.col();
        std::string name = sc.ident(role);
        int idx = lookup(name, sc.line, col);
        if (c.value_type(idx) != want) {
            const char* wanted = want == ValueType::Point
                                     ? "a point"
                                     : (want == ValueType::Line ? "a line" : "a circle");
            fail(ParseErrorKind::TypeMismatch, sc.line, col,
                 static_cast<int>(name.size()),
                 "'" + name + "' is not " + wanted + " (" + role + ")");
        }
        return idx;
    }

    int add(const std::string& name, NodeKind kind, int line, int col) {
        if (symbols.count(name)) {
            fail(ParseErrorKind::DuplicateName, line, col,
                 static_cast<int>(name.size()), "duplicate name '" + name + "'");
        }
        int idx = static_cast<int>(c.nodes.size());
        c.nodes.push_back(std::move(kind));
        c.names.push_back(name);
        symbols[name] = idx;
        return idx;
    }
};

} // namespace

ParseResult parse_construction(std::string_view text) {
    // Split into lines and pre-scan declared names so that references to
    // later declarations report ForwardReference rather than Unknown.
    std::vector<std::string_view> lines;
    {
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t nl = text.find('\n', start);
            if (nl == std::string_view::npos) {
                lines.push_back(text.substr(start));
                break;
            }
            lines.push_back(text.substr(start, nl - start));
            start = nl + 1;
        }
    }

    Builder b;
    try {
        for (int li = 0; li < static_cast<int>(lines.size()); ++li) {
            LineScanner sc{lines[li], li + 1};
            if (sc.at_end()) continue;
            std::size_t save = sc.pos;
            std::string kw;
            if (ident_start(lines[li][sc.pos])) {
                kw = sc.ident("keyword");
            }
            if (kw == "point" || kw == "line" || kw == "circle") {
                std::string name = sc.ident("name");
                if (!name.empty()) b.all_names.insert(name);
            }
            (void)save;
        }

        bool have_trace = false;
        int trace_line = 0;
        int mover_count = 0;
        std::string trace_mover, trace_tracer;
        int trace_mover_col = 0, trace_tracer_col = 0;

        for (int li = 0; li < static_cast<int>(lines.size()); ++li) {
            LineScanner sc{lines[li], li + 1};
            if (sc.at_end()) continue;
            if (have_trace) {
                fail(ParseErrorKind::Syntax, sc.line, sc.col(), 1,
                     "statement after trace directive");
            }
            int kw_col = sc.col();
            std::string kw = sc.ident("statement keyword");

            if (kw == "trace") {
                sc.skip_ws();
                int c1 = sc.col();
                std::string k1 = sc.ident("'mover='");
                if (k1 != "mover") {
                    fail(ParseErrorKind::Syntax, sc.line, c1, static_cast<int>(k1.size()),
                         "expected 'mover=NAME'");
                }
                sc.expect('=');
                sc.skip_ws();
                trace_mover_col = sc.col();
                trace_mover = sc.ident("mover name");
                sc.skip_ws();
                int c2 = sc.col();
                std::string k2 = sc.ident("'tracer='");
                if (k2 != "tracer") {
                    fail(ParseErrorKind::Syntax, sc.line, c2, static_cast<int>(k2.size()),
                         "expected 'tracer=NAME'");
                }
                sc.expect('=');
                sc.skip_ws();
                trace_tracer_col = sc.col();
                trace_tracer = sc.ident("tracer name");
                if (!sc.at_end()) {
                    fail(ParseErrorKind::Syntax, sc.line, sc.col(), 1,
                         "unexpected trailing input");
                }
                have_trace = true;
                trace_line = sc.line;
                continue;
            }

            if (kw != "point" && kw != "line" && kw != "circle") {
                fail(ParseErrorKind::Syntax, sc.line, kw_col,
                     std::max<int>(1, static_cast<int>(kw.size())),
                     "expected 'point', 'line', 'circle' or 'trace'");
            }

            sc.skip_ws();
            int name_col = sc.col();
            std::string name = sc.ident("name");
            sc.expect('=');

            if (kw == "circle") {
                sc.skip_ws();
                int ecol = sc.col();
                std::string fn = sc.ident("'circle('");
                if (fn != "circle") {
                    fail(ParseErrorKind::Syntax, sc.line, ecol, static_cast<int>(fn.size()),
                         "expected 'circle(CENTER, RADIUS)'");
                }
                sc.expect('(');
                int center = b.ref(sc, ValueType::Point, "circle center");
                sc.expect(',');
                sc.skip_ws();
                int rcol = sc.col();
                double r = sc.real("radius");
                if (!(r > 0.0)) {
                    fail(ParseErrorKind::Syntax, sc.line, rcol, 1,
                         "circle radius must be positive");
                }
                sc.expect(')');
                b.add(name, CircleCRNode{center, r}, sc.line, name_col);
            } else if (kw == "point") {
                if (sc.peek('(')) {
                    sc.expect('(');
                    double x = sc.real("x coordinate");
                    sc.expect(',');
                    double y = sc.real("y coordinate");
                    sc.expect(')');
                    b.add(name, FreePointNode{Complex(x), Complex(y)}, sc.line, name_col);
                } else {
                    sc.skip_ws();
                    int ecol = sc.col();
                    std::string fn = sc.ident("point expression");
                    if (fn == "mover") {
                        sc.skip_ws();
                        int mcol = sc.col();
                        std::string mk = sc.ident("mover kind");
                        if (mk == "on_circle") {
                            sc.expect('(');
                            int target = b.ref(sc, ValueType::CircleValue, "mover circle");
                            sc.expect(')');
                            int idx = b.add(name,
                                            MoverNode{MoverParam{MoverKind::PointOnCircle, target}},
                                            sc.line, name_col);
                            if (++mover_count > 1) {
                                fail(ParseErrorKind::Syntax, sc.line, name_col,
                                     static_cast<int>(name.size()),
                                     "construction already has a mover");
                            }
                            b.c.mover_index = idx;
                        } else if (mk == "on_line") {
                            sc.expect('(');
                            int target = b.ref(sc, ValueType::Line, "mover line");
                            sc.expect(')');
                            int idx = b.add(name,
                                            MoverNode{MoverParam{MoverKind::PointOnLine, target}},
                                            sc.line, name_col);
                            if (++mover_count > 1) {
                                fail(ParseErrorKind::Syntax, sc.line, name_col,
                                     static_cast<int>(name.size()),
                                     "construction already has a mover");
                            }
                            b.c.mover_index = idx;
                        } else {
                            fail(ParseErrorKind::Syntax, sc.line, mcol,
                                 static_cast<int>(mk.size()),
                                 "expected 'on_circle(...)' or 'on_line(...)'");
                        }
                    } else if (fn == "meet") {
                        sc.expect('(');
                        int l = b.ref(sc, ValueType::Line, "meet operand");
                        sc.expect(',');
                        int m = b.ref(sc, ValueType::Line, "meet operand");
                        sc.expect(')');
                        b.add(name, MeetNode{l, m}, sc.line, name_col);
                    } else if (fn == "meet_cl") {
                        sc.expect('(');
                        int circ = b.ref(sc, ValueType::CircleValue, "meet_cl circle");
                        sc.expect(',');
                        int lin = b.ref(sc, ValueType::Line, "meet_cl line");
                        sc.expect(',');
                        int br = sc.branch_value();
                        sc.expect(')');
                        b.add(name, CircleLineMeetNode{circ, lin}, sc.line, name_col);
                        b.c.initial_branches.push_back(static_cast<std::uint8_t>(br));
                    } else if (fn == "meet_cc") {
                        sc.expect('(');
                        int c1 = b.ref(sc, ValueType::CircleValue, "meet_cc circle");
                        sc.expect(',');
                        int c2 = b.ref(sc, ValueType::CircleValue, "meet_cc circle");
                        sc.expect(',');
                        int br = sc.branch_value();
                        sc.expect(')');
                        b.add(name, CircleCircleMeetNode{c1, c2}, sc.line, name_col);
                        b.c.initial_branches.push_back(static_cast<std::uint8_t>(br));
                    } else if (fn == "midpoint") {
                        sc.expect('(');
                        int p = b.ref(sc, ValueType::Point, "midpoint operand");
                        sc.expect(',');
                        int q = b.ref(sc, ValueType::Point, "midpoint operand");
                        sc.expect(')');
                        b.add(name, MidpointNode{p, q}, sc.line, name_col);
                    } else {
                        fail(ParseErrorKind::Syntax, sc.line, ecol,
                             static_cast<int>(fn.size()),
                             "unknown point expression '" + fn + "'");
                    }
                }
            } else { // line
                if (sc.peek('(')) {
                    sc.expect('(');
                    double a = sc.real("a coefficient");
                    sc.expect(',');
                    double bb = sc.real("b coefficient");
                    sc.expect(',');
                    double cc = sc.real("c coefficient");
                    sc.expect(')');
                    if (a == 0.0 && bb == 0.0 && cc == 0.0) {
                        fail(ParseErrorKind::Syntax, sc.line, name_col,
                             static_cast<int>(name.size()), "line coefficients are all zero");
                    }
                    b.add(name, FreeLineNode{Complex(a), Complex(bb), Complex(cc)},
                          sc.line, name_col);
                } else {
                    sc.skip_ws();
                    int ecol = sc.col();
                    std::string fn = sc.ident("line expression");
                    if (fn == "join") {
                        sc.expect('(');
                        int p = b.ref(sc, ValueType::Point, "join operand");
                        sc.expect(',');
                        int q = b.ref(sc, ValueType::Point, "join operand");
                        sc.expect(')');
                        b.add(name, JoinNode{p, q}, sc.line, name_col);
                    } else if (fn == "perp") {
                        sc.expect('(');
                        int l = b.ref(sc, ValueType::Line, "perp line");
                        sc.expect(',');
                        int p = b.ref(sc, ValueType::Point, "perp point");
                        sc.expect(')');
                        b.add(name, PerpThroughNode{l, p}, sc.line, name_col);
                    } else if (fn == "mover") {
                        sc.skip_ws();
                        int mcol = sc.col();
                        std::string mk = sc.ident("mover kind");
                        if (mk != "line_through") {
                            fail(ParseErrorKind::Syntax, sc.line, mcol,
                                 static_cast<int>(mk.size()),
                                 "expected 'line_through(POINT)'");
                        }
                        sc.expect('(');
                        int target = b.ref(sc, ValueType::Point, "pencil pivot");
                        sc.expect(')');
                        int idx = b.add(name,
                                        MoverNode{MoverParam{MoverKind::LineThroughPoint, target}},
                                        sc.line, name_col);
                        if (++mover_count > 1) {
                            fail(ParseErrorKind::Syntax, sc.line, name_col,
                                 static_cast<int>(name.size()),
                                 "construction already has a mover");
                        }
                        b.c.mover_index = idx;
                    } else {
                        fail(ParseErrorKind::Syntax, sc.line, ecol,
                             static_cast<int>(fn.size()),
                             "unknown line expression '" + fn + "'");
                    }
                }
            }
            if (!sc.at_end()) {
                fail(ParseErrorKind::Syntax, sc.line, sc.col(), 1,
                     "unexpected trailing input");
            }
        }

        if (!have_trace) {
            fail(ParseErrorKind::NoTraceDirective, static_cast<int>(lines.size()), 1, 1,
                 "missing trace directive");
        }
        if (mover_count == 0) {
            fail(ParseErrorKind::Syntax, trace_line, 1, 1, "construction has no mover");
        }

        int mv = b.lookup(trace_mover, trace_line, trace_mover_col);
        if (mv != b.c.mover_index) {
            fail(ParseErrorKind::TypeMismatch, trace_line, trace_mover_col,
                 static_cast<int>(trace_mover.size()),
                 "'" + trace_mover + "' is not the mover");
        }
        int tr = b.lookup(trace_tracer, trace_line, trace_tracer_col);
        if (b.c.value_type(tr) != ValueType::Point) {
            fail(ParseErrorKind::TypeMismatch, trace_line, trace_tracer_col,
                 static_cast<int>(trace_tracer.size()),
                 "tracer '" + trace_tracer + "' is not point-valued");
        }
        if (tr == mv) {
            fail(ParseErrorKind::TypeMismatch, trace_line, trace_tracer_col,
                 static_cast<int>(trace_tracer.size()),
                 "tracer must differ from the mover");
        }
        b.c.tracer_index = tr;
        return std::move(b.c);
    } catch (const ParseFailure& pf) {
        return pf.err;
    }
}

} // namespace loci
