#include "tautring/parser.hpp"

#include <cctype>
#include <optional>
#include <set>
#include <sstream>
#include <variant>

#include "tautring/calculus.hpp"
#include "tautring/dr_cycle.hpp"
#include "tautring/hodge.hpp"

namespace tautring {

struct ExprNode {
    enum class Kind { Num, Psi, Kappa, Lambda, Sepbdiv, Irrbdiv, Fund, Dr, Graph, Add, Sub, Mul, Pow, Neg };
    Kind kind;
    Rat num;                      // Num
    std::vector<long> args;       // small integer arguments
    std::set<int> marking_set;    // Sepbdiv
    std::vector<int> dr_vector;   // Dr
    std::shared_ptr<StableGraph> graph;  // Graph
    std::shared_ptr<ExprNode> lhs, rhs;
    int exponent = 0;  // Pow
};

namespace {

struct Lexer {
    const std::string& text;
    size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    bool accept(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        skip_ws();
        if (pos >= text.size() || text[pos] != c)
            throw ParseError(std::string("expected '") + c + "'", pos);
        ++pos;
    }
    std::optional<std::string> ident() {
        skip_ws();
        size_t start = pos;
        while (pos < text.size() &&
               (std::isalpha(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        if (pos == start) return std::nullopt;
        return text.substr(start, pos - start);
    }
    long integer() {
        skip_ws();
        size_t start = pos;
        bool neg = false;
        if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
            neg = text[pos] == '-';
            ++pos;
        }
        size_t digits = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == digits) throw ParseError("expected an integer", start);
        long v = std::stol(text.substr(digits, pos - digits));
        return neg ? -v : v;
    }
    unsigned long uinteger() {
        skip_ws();
        size_t start = pos;
        long v = integer();
        if (v < 0) throw ParseError("expected a nonnegative integer", start);
        return static_cast<unsigned long>(v);
    }
};

struct Parser {
    Lexer lex;

    explicit Parser(const std::string& text) : lex{text} {}

    std::shared_ptr<ExprNode> node(ExprNode::Kind k) {
        auto p = std::make_shared<ExprNode>();
        p->kind = k;
        return p;
    }

    std::vector<int> int_list(char open, char close) {
        lex.expect(open);
        std::vector<int> out;
        if (!lex.accept(close)) {
            do {
                out.push_back(static_cast<int>(lex.integer()));
            } while (lex.accept(','));
            lex.expect(close);
        }
        return out;
    }

    std::shared_ptr<ExprNode> parse_graph_atom() {
        lex.expect('(');
        std::vector<int> genera = int_list('[', ']');
        lex.expect(',');
        lex.expect('[');
        std::vector<std::vector<int>> legs;
        if (!lex.accept(']')) {
            do {
                legs.push_back(int_list('[', ']'));
            } while (lex.accept(','));
            lex.expect(']');
        }
        lex.expect(',');
        lex.expect('[');
        std::vector<Edge> edges;
        if (!lex.accept(']')) {
            do {
                char open = lex.peek() == '(' ? '(' : '[';
                std::vector<int> pair = int_list(open, open == '(' ? ')' : ']');
                if (pair.size() != 2) throw ParseError("an edge needs two half-edges", lex.pos);
                edges.emplace_back(pair[0], pair[1]);
            } while (lex.accept(','));
            lex.expect(']');
        }
        lex.expect(')');
        auto p = node(ExprNode::Kind::Graph);
        p->graph = std::make_shared<StableGraph>(genera, legs, edges);
        return p;
    }

    std::shared_ptr<ExprNode> parse_atom(const std::string& name, size_t name_pos) {
        if (name == "psi" || name == "kappa" || name == "lambda") {
            lex.expect('(');
            long a = lex.integer();
            lex.expect(')');
            auto p = node(name == "psi"     ? ExprNode::Kind::Psi
                          : name == "kappa" ? ExprNode::Kind::Kappa
                                            : ExprNode::Kind::Lambda);
            p->args = {a};
            return p;
        }
        if (name == "sepbdiv") {
            lex.expect('(');
            long h = lex.integer();
            lex.expect(',');
            lex.expect('{');
            std::set<int> A;
            if (!lex.accept('}')) {
                do {
                    A.insert(static_cast<int>(lex.integer()));
                } while (lex.accept(','));
                lex.expect('}');
            }
            lex.expect(')');
            auto p = node(ExprNode::Kind::Sepbdiv);
            p->args = {h};
            p->marking_set = A;
            return p;
        }
        if (name == "irrbdiv" || name == "fund") {
            lex.expect('(');
            lex.expect(')');
            return node(name == "irrbdiv" ? ExprNode::Kind::Irrbdiv : ExprNode::Kind::Fund);
        }
        if (name == "dr") {
            lex.expect('(');
            long g = lex.integer();
            lex.expect(',');
            std::vector<int> A = int_list('[', ']');
            long d = -1;
            if (lex.accept(',')) d = lex.integer();
            lex.expect(')');
            auto p = node(ExprNode::Kind::Dr);
            p->args = {g, d};
            p->dr_vector = A;
            return p;
        }
        if (name == "graph") return parse_graph_atom();
        throw ParseError("unknown atom '" + name + "'", name_pos);
    }

    std::shared_ptr<ExprNode> parse_primary() {
        lex.skip_ws();
        size_t start = lex.pos;
        if (lex.accept('(')) {
            auto e = parse_expr();
            lex.expect(')');
            return e;
        }
        if (lex.accept('-')) {
            auto p = node(ExprNode::Kind::Neg);
            p->lhs = parse_primary();
            return p;
        }
        if (lex.pos < lex.text.size() &&
            std::isdigit(static_cast<unsigned char>(lex.text[lex.pos]))) {
            long p = lex.integer();
            Rat value(p);
            if (lex.pos < lex.text.size() && lex.text[lex.pos] == '/') {
                ++lex.pos;
                long q = lex.integer();
                if (q == 0) throw ParseError("zero denominator", start);
                value = Rat(p, q);
                value.canonicalize();
            }
            auto nd = node(ExprNode::Kind::Num);
            nd->num = value;
            return nd;
        }
        auto name = lex.ident();
        if (!name) throw ParseError("expected an expression", lex.pos);
        if (*name == "on") throw ParseError("unexpected 'on' clause", start);
        return parse_atom(*name, start);
    }

    std::shared_ptr<ExprNode> parse_factor() {
        auto base = parse_primary();
        while (lex.peek() == '^') {
            lex.expect('^');
            size_t at = lex.pos;
            long e = lex.integer();
            if (e < 0) throw ParseError("exponents must be nonnegative", at);
            auto p = node(ExprNode::Kind::Pow);
            p->lhs = base;
            p->exponent = static_cast<int>(e);
            base = p;
        }
        return base;
    }

    std::shared_ptr<ExprNode> parse_term() {
        auto acc = parse_factor();
        while (lex.peek() == '*') {
            lex.expect('*');
            auto p = node(ExprNode::Kind::Mul);
            p->lhs = acc;
            p->rhs = parse_factor();
            acc = p;
        }
        return acc;
    }

    std::shared_ptr<ExprNode> parse_expr() {
        auto acc = parse_term();
        while (true) {
            lex.skip_ws();
            if (lex.peek() == '+') {
                lex.expect('+');
                auto p = node(ExprNode::Kind::Add);
                p->lhs = acc;
                p->rhs = parse_term();
                acc = p;
            } else if (lex.peek() == '-') {
                lex.expect('-');
                auto p = node(ExprNode::Kind::Sub);
                p->lhs = acc;
                p->rhs = parse_term();
                acc = p;
            } else {
                return acc;
            }
        }
    }

    Expression parse_full() {
        Expression e;
        e.root = parse_expr();
        lex.skip_ws();
        size_t save = lex.pos;
        auto word = lex.ident();
        if (word) {
            if (*word != "on") throw ParseError("unexpected trailing input", save);
            lex.expect('(');
            e.g = static_cast<int>(lex.integer());
            lex.expect(',');
            e.n = static_cast<int>(lex.integer());
            lex.expect(')');
            e.has_context = true;
        }
        if (!lex.eof()) throw ParseError("unexpected trailing input", lex.pos);
        return e;
    }
};

using Value = std::variant<Rat, TautClass>;

Value eval_node(const ExprNode& nd, int g, int n) {
    switch (nd.kind) {
        case ExprNode::Kind::Num: return nd.num;
        case ExprNode::Kind::Psi: return psiclass(static_cast<int>(nd.args[0]), g, n);
        case ExprNode::Kind::Kappa: return kappaclass(static_cast<int>(nd.args[0]), g, n);
        case ExprNode::Kind::Lambda: return lambdaclass(static_cast<int>(nd.args[0]), g, n);
        case ExprNode::Kind::Sepbdiv:
            return sepbdiv(static_cast<int>(nd.args[0]), nd.marking_set, g, n);
        case ExprNode::Kind::Irrbdiv: return irrbdiv(g, n);
        case ExprNode::Kind::Fund: return fundclass(g, n);
        case ExprNode::Kind::Dr: {
            const int dg = static_cast<int>(nd.args[0]);
            if (dg != g || static_cast<int>(nd.dr_vector.size()) != n)
                throw std::invalid_argument("dr(): arguments disagree with the ambient (g,n)");
            return DR_cycle(dg, nd.dr_vector, static_cast<int>(nd.args[1]));
        }
        case ExprNode::Kind::Graph: {
            if (nd.graph->genus() != g || nd.graph->num_markings() != n)
                throw std::invalid_argument("graph(): graph lives on a different (g,n)");
            return graph_to_class(*nd.graph);
        }
        case ExprNode::Kind::Neg: {
            Value v = eval_node(*nd.lhs, g, n);
            if (std::holds_alternative<Rat>(v)) return Rat(-std::get<Rat>(v));
            return -std::get<TautClass>(v);
        }
        case ExprNode::Kind::Pow: {
            Value v = eval_node(*nd.lhs, g, n);
            if (std::holds_alternative<Rat>(v)) {
                Rat base = std::get<Rat>(v), out(1);
                for (int i = 0; i < nd.exponent; ++i) out *= base;
                return out;
            }
            return power(std::get<TautClass>(v), nd.exponent);
        }
        case ExprNode::Kind::Add:
        case ExprNode::Kind::Sub: {
            Value a = eval_node(*nd.lhs, g, n);
            Value b = eval_node(*nd.rhs, g, n);
            const bool sub = nd.kind == ExprNode::Kind::Sub;
            if (std::holds_alternative<Rat>(a) && std::holds_alternative<Rat>(b))
                return sub ? Rat(std::get<Rat>(a) - std::get<Rat>(b))
                           : Rat(std::get<Rat>(a) + std::get<Rat>(b));
            auto lift = [&](Value& v) -> TautClass {
                if (std::holds_alternative<TautClass>(v)) return std::get<TautClass>(v);
                return fundclass(g, n) * std::get<Rat>(v);
            };
            TautClass ta = lift(a), tb = lift(b);
            return sub ? ta - tb : ta + tb;
        }
        case ExprNode::Kind::Mul: {
            Value a = eval_node(*nd.lhs, g, n);
            Value b = eval_node(*nd.rhs, g, n);
            if (std::holds_alternative<Rat>(a) && std::holds_alternative<Rat>(b))
                return Rat(std::get<Rat>(a) * std::get<Rat>(b));
            if (std::holds_alternative<Rat>(a))
                return std::get<TautClass>(b) * std::get<Rat>(a);
            if (std::holds_alternative<Rat>(b))
                return std::get<TautClass>(a) * std::get<Rat>(b);
            return multiply(std::get<TautClass>(a), std::get<TautClass>(b));
        }
    }
    throw std::logic_error("unreachable expression kind");
}

void print_node(const ExprNode& nd, std::ostringstream& os) {
    auto paren = [&](const ExprNode& child, bool need) {
        if (need) os << "(";
        print_node(child, os);
        if (need) os << ")";
    };
    switch (nd.kind) {
        case ExprNode::Kind::Num: os << rat_to_string(nd.num); return;
        case ExprNode::Kind::Psi: os << "psi(" << nd.args[0] << ")"; return;
        case ExprNode::Kind::Kappa: os << "kappa(" << nd.args[0] << ")"; return;
        case ExprNode::Kind::Lambda: os << "lambda(" << nd.args[0] << ")"; return;
        case ExprNode::Kind::Sepbdiv: {
            os << "sepbdiv(" << nd.args[0] << ",{";
            bool first = true;
            for (int i : nd.marking_set) {
                if (!first) os << ",";
                os << i;
                first = false;
            }
            os << "})";
            return;
        }
        case ExprNode::Kind::Irrbdiv: os << "irrbdiv()"; return;
        case ExprNode::Kind::Fund: os << "fund()"; return;
        case ExprNode::Kind::Dr: {
            os << "dr(" << nd.args[0] << ",[";
            for (size_t i = 0; i < nd.dr_vector.size(); ++i) {
                if (i) os << ",";
                os << nd.dr_vector[i];
            }
            os << "]";
            if (nd.args[1] >= 0) os << "," << nd.args[1];
            os << ")";
            return;
        }
        case ExprNode::Kind::Graph: {
            os << "graph(";
            const StableGraph& G = *nd.graph;
            os << "[";
            for (size_t i = 0; i < G.genera().size(); ++i) {
                if (i) os << ",";
                os << G.genera()[i];
            }
            os << "],[";
            for (size_t v = 0; v < G.legs().size(); ++v) {
                if (v) os << ",";
                os << "[";
                for (size_t i = 0; i < G.legs()[v].size(); ++i) {
                    if (i) os << ",";
                    os << G.legs()[v][i];
                }
                os << "]";
            }
            os << "],[";
            for (size_t i = 0; i < G.edges().size(); ++i) {
                if (i) os << ",";
                os << "(" << G.edges()[i].first << "," << G.edges()[i].second << ")";
            }
            os << "])";
            return;
        }
        case ExprNode::Kind::Neg:
            os << "-";
            paren(*nd.lhs, nd.lhs->kind == ExprNode::Kind::Add ||
                               nd.lhs->kind == ExprNode::Kind::Sub ||
                               nd.lhs->kind == ExprNode::Kind::Mul);
            return;
        case ExprNode::Kind::Pow:
            paren(*nd.lhs, nd.lhs->kind != ExprNode::Kind::Num &&
                               nd.lhs->kind != ExprNode::Kind::Psi &&
                               nd.lhs->kind != ExprNode::Kind::Kappa &&
                               nd.lhs->kind != ExprNode::Kind::Lambda &&
                               nd.lhs->kind != ExprNode::Kind::Fund &&
                               nd.lhs->kind != ExprNode::Kind::Irrbdiv &&
                               nd.lhs->kind != ExprNode::Kind::Sepbdiv &&
                               nd.lhs->kind != ExprNode::Kind::Dr &&
                               nd.lhs->kind != ExprNode::Kind::Graph);
            os << "^" << nd.exponent;
            return;
        case ExprNode::Kind::Add:
            print_node(*nd.lhs, os);
            os << " + ";
            paren(*nd.rhs, nd.rhs->kind == ExprNode::Kind::Add ||
                               nd.rhs->kind == ExprNode::Kind::Sub);
            return;
        case ExprNode::Kind::Sub:
            print_node(*nd.lhs, os);
            os << " - ";
            paren(*nd.rhs, nd.rhs->kind == ExprNode::Kind::Add ||
                               nd.rhs->kind == ExprNode::Kind::Sub);
            return;
        case ExprNode::Kind::Mul:
            paren(*nd.lhs, nd.lhs->kind == ExprNode::Kind::Add ||
                               nd.lhs->kind == ExprNode::Kind::Sub);
            os << "*";
            paren(*nd.rhs, nd.rhs->kind == ExprNode::Kind::Add ||
                               nd.rhs->kind == ExprNode::Kind::Sub);
            return;
    }
}

}  // namespace

TautClass Expression::build() const {
    if (!has_context)
        throw std::invalid_argument("expression needs an 'on (g,n)' clause or explicit space");
    return build(g, n);
}

TautClass Expression::build(int gg, int nn) const {
    Value v = eval_node(*root, gg, nn);
    if (std::holds_alternative<TautClass>(v)) return std::get<TautClass>(v);
    return fundclass(gg, nn) * std::get<Rat>(v);
}

std::string Expression::print() const {
    std::ostringstream os;
    print_node(*root, os);
    if (has_context) os << " on (" << g << "," << n << ")";
    return os.str();
}

Expression parse_expression(const std::string& text) {
    Parser p(text);
    return p.parse_full();
}

}  // namespace tautring
