#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "loci/construction.hpp"

namespace loci {

struct SourceSpan {
    int line = 1;    // 1-based
    int column = 1;  // 1-based
    int length = 1;
};

enum class ParseErrorKind {
    Syntax,
    UnknownIdentifier,
    TypeMismatch,
    ForwardReference,
    DuplicateName,
    NoTraceDirective,
};

struct ParseError {
    SourceSpan span;
    std::string message;
    ParseErrorKind kind = ParseErrorKind::Syntax;
};

std::string_view to_string(ParseErrorKind k);

using ParseResult = std::variant<Construction, ParseError>;

/// Parse the line-oriented construction DSL ('#' starts a comment):
///
///   point NAME = (X, Y) | mover on_circle(C) | mover on_line(L)
///              | meet(L, M) | meet_cl(C, L, branch=B) | meet_cc(C1, C2, branch=B)
///              | midpoint(P, Q)
///   line NAME  = (A, B, C) | join(P, Q) | perp(L, P) | mover line_through(P)
///   circle NAME = circle(P, R)
///   trace mover=NAME tracer=NAME
///
/// The first error wins.
ParseResult parse_construction(std::string_view text);

} // namespace loci
