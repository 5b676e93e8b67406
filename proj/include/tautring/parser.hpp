#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "tautring/taut_class.hpp"

namespace tautring {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, size_t offset)
        : std::runtime_error(msg + " at offset " + std::to_string(offset)), offset_(offset) {}
    size_t offset() const { return offset_; }

private:
    size_t offset_;
};

struct ExprNode;

// Parsed expression; an optional trailing "on (g,n)" clause fixes the
// ambient space, otherwise the caller supplies it at build time.
struct Expression {
    std::shared_ptr<ExprNode> root;
    bool has_context = false;
    int g = -1, n = -1;

    TautClass build() const;              // requires the context clause
    TautClass build(int g, int n) const;  // explicit ambient space
    std::string print() const;            // re-parseable rendering
};

// Grammar: expr := term (('+'|'-') term)*; term := factor ('*' factor)*;
// factor := primary ('^' uint)*; primary := rational | atom | '-' primary |
// '(' expr ')'. Atoms: psi(i), kappa(a), lambda(d), sepbdiv(h,{..}),
// irrbdiv(), fund(), dr(g,[..],d?), graph([..],[[..]..],[(h,h')..]).
Expression parse_expression(const std::string& text);

// The graph of a bare graph(...) atom, if the expression is one; a graph
// atom fixes its own (g,n).
std::optional<StableGraph> as_graph_atom(const Expression& e);

}  // namespace tautring
