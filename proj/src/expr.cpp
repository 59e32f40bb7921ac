#include "finslernav/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <optional>

namespace finslernav {

namespace {

using Node = Expr::Node;
using Kind = Expr::Kind;
using Fn = Expr::Fn;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_node(Node n) { return std::make_shared<const Node>(std::move(n)); }

NodePtr num_node(double v) {
    Node n;
    n.kind = Kind::Number;
    n.number = v;
    return make_node(std::move(n));
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class TokKind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    TokKind kind = TokKind::End;
    std::size_t offset = 0;
    double number = 0.0;
    std::string text;
};

Token simple_token(TokKind kind, std::size_t offset) {
    Token t;
    t.kind = kind;
    t.offset = offset;
    return t;
}

class Lexer {
public:
    explicit Lexer(const std::string& s) : s_(s) {}

    Token next() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        std::size_t start = pos_;
        if (pos_ >= s_.size()) return simple_token(TokKind::End, start);
        char c = s_[pos_];
        switch (c) {
        case '+': ++pos_; return simple_token(TokKind::Plus, start);
        case '-': ++pos_; return simple_token(TokKind::Minus, start);
        case '*': ++pos_; return simple_token(TokKind::Star, start);
        case '/': ++pos_; return simple_token(TokKind::Slash, start);
        case '^': ++pos_; return simple_token(TokKind::Caret, start);
        case '(': ++pos_; return simple_token(TokKind::LParen, start);
        case ')': ++pos_; return simple_token(TokKind::RParen, start);
        default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t end = pos_;
            while (end < s_.size() &&
                   (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.'))
                ++end;
            if (end < s_.size() && (s_[end] == 'e' || s_[end] == 'E')) {
                std::size_t e = end + 1;
                if (e < s_.size() && (s_[e] == '+' || s_[e] == '-')) ++e;
                if (e < s_.size() && std::isdigit(static_cast<unsigned char>(s_[e]))) {
                    while (e < s_.size() && std::isdigit(static_cast<unsigned char>(s_[e]))) ++e;
                    end = e;
                }
            }
            std::string lit = s_.substr(pos_, end - pos_);
            char* parse_end = nullptr;
            double v = std::strtod(lit.c_str(), &parse_end);
            if (parse_end != lit.c_str() + lit.size())
                throw ParseError(start, "malformed number '" + lit + "'");
            pos_ = end;
            Token t = simple_token(TokKind::Number, start);
            t.number = v;
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
                ++end;
            Token t = simple_token(TokKind::Ident, start);
            t.text = s_.substr(pos_, end - pos_);
            pos_ = end;
            return t;
        }
        throw ParseError(start, std::string("unexpected character '") + c + "'");
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Parser: expr := term (('+'|'-') term)*
//         term := factor (('*'|'/') factor)*
//         factor := '-' factor | power
//         power := atom ('^' factor)?          (right-associative)
//         atom := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'
// ---------------------------------------------------------------------------

std::optional<Fn> function_by_name(const std::string& s) {
    if (s == "sqrt") return Fn::Sqrt;
    if (s == "exp") return Fn::Exp;
    if (s == "ln") return Fn::Ln;
    if (s == "sin") return Fn::Sin;
    if (s == "cos") return Fn::Cos;
    if (s == "abs") return Fn::Abs;
    return std::nullopt;
}

class Parser {
public:
    Parser(const std::string& text, int dim, const std::vector<std::string>& params)
        : lexer_(text), dim_(dim), params_(params) {
        advance();
    }

    NodePtr parse_all() {
        NodePtr e = parse_expr();
        if (tok_.kind != TokKind::End) throw ParseError(tok_.offset, "unexpected trailing input");
        return e;
    }

private:
    void advance() { tok_ = lexer_.next(); }

    NodePtr parse_expr() {
        NodePtr left = parse_term();
        while (tok_.kind == TokKind::Plus || tok_.kind == TokKind::Minus) {
            Kind k = tok_.kind == TokKind::Plus ? Kind::Add : Kind::Sub;
            advance();
            NodePtr right = parse_term();
            Node n;
            n.kind = k;
            n.a = left;
            n.b = right;
            left = make_node(std::move(n));
        }
        return left;
    }

    NodePtr parse_term() {
        NodePtr left = parse_factor();
        while (tok_.kind == TokKind::Star || tok_.kind == TokKind::Slash) {
            Kind k = tok_.kind == TokKind::Star ? Kind::Mul : Kind::Div;
            advance();
            NodePtr right = parse_factor();
            Node n;
            n.kind = k;
            n.a = left;
            n.b = right;
            left = make_node(std::move(n));
        }
        return left;
    }

    NodePtr parse_factor() {
        if (tok_.kind == TokKind::Minus) {
            advance();
            NodePtr inner = parse_factor();
            Node n;
            n.kind = Kind::Neg;
            n.a = inner;
            return make_node(std::move(n));
        }
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (tok_.kind != TokKind::Caret) return base;
        std::size_t caret_offset = tok_.offset;
        advance();
        NodePtr exponent = parse_factor(); // right-associative, unary minus allowed
        return build_power(base, exponent, caret_offset);
    }

    NodePtr parse_atom() {
        if (tok_.kind == TokKind::Number) {
            double v = tok_.number;
            advance();
            return num_node(v);
        }
        if (tok_.kind == TokKind::LParen) {
            advance();
            NodePtr inner = parse_expr();
            if (tok_.kind != TokKind::RParen) throw ParseError(tok_.offset, "expected ')'");
            advance();
            return inner;
        }
        if (tok_.kind == TokKind::Ident) {
            Token t = tok_;
            advance();
            if (tok_.kind == TokKind::LParen) {
                auto fn = function_by_name(t.text);
                if (!fn) throw UnknownIdentifierError(t.offset, t.text);
                advance();
                NodePtr arg = parse_expr();
                if (tok_.kind != TokKind::RParen) throw ParseError(tok_.offset, "expected ')'");
                advance();
                Node n;
                n.kind = Kind::Func;
                n.fn = *fn;
                n.a = arg;
                return make_node(std::move(n));
            }
            return identifier_node(t);
        }
        throw ParseError(tok_.offset, "expected a value");
    }

    NodePtr identifier_node(const Token& t) {
        const std::string& s = t.text;
        if (s.size() >= 2 && s[0] == 'x' &&
            std::all_of(s.begin() + 1, s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            int idx = std::atoi(s.c_str() + 1);
            if (idx < 1 || idx > dim_) throw DimensionOutOfRangeError(t.offset, s, dim_);
            Node n;
            n.kind = Kind::Var;
            n.var = idx - 1;
            return make_node(std::move(n));
        }
        if (std::find(params_.begin(), params_.end(), s) != params_.end()) {
            Node n;
            n.kind = Kind::Param;
            n.name = s;
            return make_node(std::move(n));
        }
        throw UnknownIdentifierError(t.offset, s);
    }

    // Powers require a constant exponent (integer or otherwise). A variable
    // exponent is accepted only over a positive literal base, in which case
    // the expression is rewritten as exp(exponent * ln(base)); anything else
    // would introduce a silent branch cut and is rejected.
    NodePtr build_power(const NodePtr& base, const NodePtr& exponent, std::size_t caret_offset) {
        std::optional<double> c = fold_constant(*exponent);
        if (c) {
            double rounded = std::round(*c);
            if (std::fabs(*c - rounded) < 1e-12 && std::fabs(rounded) <= 1e6) {
                Node n;
                n.kind = Kind::PowInt;
                n.ipow = static_cast<int>(rounded);
                n.a = base;
                return make_node(std::move(n));
            }
            Node n;
            n.kind = Kind::PowReal;
            n.number = *c;
            n.a = base;
            return make_node(std::move(n));
        }
        if (base->kind == Kind::Number && base->number > 0.0) {
            Node mul;
            mul.kind = Kind::Mul;
            mul.a = exponent;
            mul.b = num_node(std::log(base->number));
            Node n;
            n.kind = Kind::Func;
            n.fn = Fn::Exp;
            n.a = make_node(std::move(mul));
            return make_node(std::move(n));
        }
        throw ParseError(caret_offset, "exponent must be constant (or the base a positive literal)");
    }

    static std::optional<double> fold_constant(const Node& n) {
        switch (n.kind) {
        case Kind::Number: return n.number;
        case Kind::Var:
        case Kind::Param: return std::nullopt;
        case Kind::Neg: {
            auto a = fold_constant(*n.a);
            return a ? std::optional<double>(-*a) : std::nullopt;
        }
        case Kind::Add:
        case Kind::Sub:
        case Kind::Mul:
        case Kind::Div: {
            auto a = fold_constant(*n.a);
            auto b = fold_constant(*n.b);
            if (!a || !b) return std::nullopt;
            switch (n.kind) {
            case Kind::Add: return *a + *b;
            case Kind::Sub: return *a - *b;
            case Kind::Mul: return *a * *b;
            default:
                if (*b == 0.0) return std::nullopt;
                return *a / *b;
            }
        }
        case Kind::PowInt: {
            auto a = fold_constant(*n.a);
            return a ? std::optional<double>(std::pow(*a, n.ipow)) : std::nullopt;
        }
        case Kind::PowReal: {
            auto a = fold_constant(*n.a);
            if (!a || !(*a > 0.0)) return std::nullopt;
            return std::pow(*a, n.number);
        }
        case Kind::Func: {
            auto a = fold_constant(*n.a);
            if (!a) return std::nullopt;
            switch (n.fn) {
            case Fn::Sqrt: return *a > 0.0 ? std::optional<double>(std::sqrt(*a)) : std::nullopt;
            case Fn::Exp: return std::exp(*a);
            case Fn::Ln: return *a > 0.0 ? std::optional<double>(std::log(*a)) : std::nullopt;
            case Fn::Sin: return std::sin(*a);
            case Fn::Cos: return std::cos(*a);
            case Fn::Abs: return std::fabs(*a);
            }
            return std::nullopt;
        }
        }
        return std::nullopt;
    }

    Lexer lexer_;
    Token tok_;
    int dim_;
    std::vector<std::string> params_;
};

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

int precedence(Kind k) {
    switch (k) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Neg: return 3;
    case Kind::PowInt:
    case Kind::PowReal: return 4;
    default: return 5;
    }
}

const char* function_name(Fn f) {
    switch (f) {
    case Fn::Sqrt: return "sqrt";
    case Fn::Exp: return "exp";
    case Fn::Ln: return "ln";
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    case Fn::Abs: return "abs";
    }
    return "?";
}

void print_node(const Node& n, std::string& out);

void print_child(const Node& child, int parent_prec, bool is_right, std::string& out) {
    int child_prec = precedence(child.kind);
    bool need_paren = child_prec < parent_prec || (child_prec == parent_prec && is_right);
    if (need_paren) out += '(';
    print_node(child, out);
    if (need_paren) out += ')';
}

void print_node(const Node& n, std::string& out) {
    switch (n.kind) {
    case Kind::Number: out += format_double(n.number); return;
    case Kind::Var: out += "x" + std::to_string(n.var + 1); return;
    case Kind::Param: out += n.name; return;
    case Kind::Neg:
        out += '-';
        print_child(*n.a, precedence(Kind::Neg) + 1, false, out);
        return;
    case Kind::Add:
    case Kind::Sub:
        print_child(*n.a, 1, false, out);
        out += n.kind == Kind::Add ? '+' : '-';
        print_child(*n.b, 1, true, out);
        return;
    case Kind::Mul:
    case Kind::Div:
        print_child(*n.a, 2, false, out);
        out += n.kind == Kind::Mul ? '*' : '/';
        print_child(*n.b, 2, true, out);
        return;
    case Kind::PowInt:
    case Kind::PowReal: {
        print_child(*n.a, 5, false, out);
        out += '^';
        std::string e = n.kind == Kind::PowInt ? std::to_string(n.ipow) : format_double(n.number);
        if (!e.empty() && (e[0] == '-' || e.find_first_of("+-*/^eE.") != std::string::npos)) {
            bool plain_int = e.find_first_not_of("0123456789") == std::string::npos;
            if (!plain_int) {
                out += '(' + e + ')';
                return;
            }
        }
        out += e;
        return;
    }
    case Kind::Func:
        out += function_name(n.fn);
        out += '(';
        print_node(*n.a, out);
        out += ')';
        return;
    }
}

bool node_equal(const Node& a, const Node& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case Kind::Number: return a.number == b.number;
    case Kind::Var: return a.var == b.var;
    case Kind::Param: return a.name == b.name;
    case Kind::Neg: return node_equal(*a.a, *b.a);
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div: return node_equal(*a.a, *b.a) && node_equal(*a.b, *b.b);
    case Kind::PowInt: return a.ipow == b.ipow && node_equal(*a.a, *b.a);
    case Kind::PowReal: return a.number == b.number && node_equal(*a.a, *b.a);
    case Kind::Func: return a.fn == b.fn && node_equal(*a.a, *b.a);
    }
    return false;
}

int max_var_node(const Node& n) {
    switch (n.kind) {
    case Kind::Number:
    case Kind::Param: return 0;
    case Kind::Var: return n.var + 1;
    case Kind::Neg:
    case Kind::PowInt:
    case Kind::PowReal:
    case Kind::Func: return max_var_node(*n.a);
    default: return std::max(max_var_node(*n.a), max_var_node(*n.b));
    }
}

} // namespace

Expr parse(const std::string& text, int dim, const std::vector<std::string>& param_names) {
    if (text.empty()) throw ParseError(0, "empty expression");
    if (dim < 1) throw SpecError("dimension must be positive");
    Parser p(text, dim, param_names);
    return Expr(p.parse_all());
}

std::string print(const Expr& e) {
    std::string out;
    print_node(e.root(), out);
    return out;
}

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

int Expr::max_var() const { return root_ ? max_var_node(*root_) : 0; }

bool Expr::operator==(const Expr& other) const {
    if (!root_ || !other.root_) return root_ == other.root_;
    return node_equal(*root_, *other.root_);
}

Expr Expr::number(double v) { return Expr(num_node(v)); }

Expr Expr::var(int index) {
    Node n;
    n.kind = Kind::Var;
    n.var = index;
    return Expr(make_node(std::move(n)));
}

Expr Expr::param(const std::string& name) {
    Node n;
    n.kind = Kind::Param;
    n.name = name;
    return Expr(make_node(std::move(n)));
}

namespace {
Expr binary(Kind k, const Expr& a, const Expr& b) {
    Node n;
    n.kind = k;
    n.a = a.root_ptr();
    n.b = b.root_ptr();
    return Expr(make_node(std::move(n)));
}
} // namespace

Expr Expr::add(const Expr& a, const Expr& b) { return binary(Kind::Add, a, b); }
Expr Expr::sub(const Expr& a, const Expr& b) { return binary(Kind::Sub, a, b); }
Expr Expr::mul(const Expr& a, const Expr& b) { return binary(Kind::Mul, a, b); }
Expr Expr::div(const Expr& a, const Expr& b) { return binary(Kind::Div, a, b); }

Expr Expr::neg(const Expr& a) {
    Node n;
    n.kind = Kind::Neg;
    n.a = a.root_ptr();
    return Expr(make_node(std::move(n)));
}

Expr Expr::pow_int(const Expr& a, int k) {
    Node n;
    n.kind = Kind::PowInt;
    n.ipow = k;
    n.a = a.root_ptr();
    return Expr(make_node(std::move(n)));
}

Expr Expr::func(Fn f, const Expr& a) {
    Node n;
    n.kind = Kind::Func;
    n.fn = f;
    n.a = a.root_ptr();
    return Expr(make_node(std::move(n)));
}

Jet eval_jet(const Expr& e, std::span<const double> x, int order, const Params& params) {
    const int n = static_cast<int>(x.size());
    const MonomialTable& tab = monomial_table(n, order);
    std::vector<Jet> vars;
    vars.reserve(x.size());
    for (int i = 0; i < n; ++i) vars.push_back(Jet::variable(tab, i, x[static_cast<std::size_t>(i)]));
    return e.eval<Jet>(vars, params);
}

} // namespace finslernav
