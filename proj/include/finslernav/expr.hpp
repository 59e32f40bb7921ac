#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "finslernav/errors.hpp"
#include "finslernav/jet.hpp"

namespace finslernav {

using Params = std::map<std::string, double>;

// Immutable expression tree over chart coordinates x1..xn, named parameters,
// arithmetic, constant powers, and the elementary functions the chart data
// needs. Evaluation is pure and templated on the scalar type, so the same
// tree yields values, jets, or jets of jets.
class Expr {
public:
    enum class Kind { Number, Var, Param, Neg, Add, Sub, Mul, Div, PowInt, PowReal, Func };
    enum class Fn { Sqrt, Exp, Ln, Sin, Cos, Abs };

    struct Node {
        Kind kind;
        double number = 0.0;     // Number, PowReal exponent
        int var = -1;            // Var (0-based)
        std::string name;        // Param
        Fn fn = Fn::Sqrt;        // Func
        int ipow = 0;            // PowInt exponent
        std::shared_ptr<const Node> a, b;
    };

    Expr() = default;
    explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

    bool valid() const { return root_ != nullptr; }
    const Node& root() const { return *root_; }
    std::shared_ptr<const Node> root_ptr() const { return root_; }

    // Largest referenced variable index plus one (0 for constant expressions).
    int max_var() const;

    bool operator==(const Expr& other) const;

    template <class S>
    S eval(std::span<const S> vars, const Params& params) const {
        return eval_node(*root_, vars, params);
    }

    double eval_d(std::span<const double> vars, const Params& params = {}) const {
        return eval<double>(vars, params);
    }

    // --- construction helpers (used for synthesizing derived fields) -------
    static Expr number(double v);
    static Expr var(int index);
    static Expr param(const std::string& name);
    static Expr add(const Expr& a, const Expr& b);
    static Expr sub(const Expr& a, const Expr& b);
    static Expr mul(const Expr& a, const Expr& b);
    static Expr div(const Expr& a, const Expr& b);
    static Expr neg(const Expr& a);
    static Expr pow_int(const Expr& a, int k);
    static Expr func(Fn f, const Expr& a);

private:
    template <class S>
    static S eval_node(const Node& n, std::span<const S> vars, const Params& params) {
        switch (n.kind) {
        case Kind::Number:
            return make_like(vars[0], n.number);
        case Kind::Var:
            return vars[static_cast<std::size_t>(n.var)];
        case Kind::Param: {
            auto it = params.find(n.name);
            if (it == params.end()) throw EvaluationError("parameter '" + n.name + "' has no value");
            return make_like(vars[0], it->second);
        }
        case Kind::Neg:
            return -eval_node(*n.a, vars, params);
        case Kind::Add:
            return eval_node(*n.a, vars, params) + eval_node(*n.b, vars, params);
        case Kind::Sub:
            return eval_node(*n.a, vars, params) - eval_node(*n.b, vars, params);
        case Kind::Mul:
            return eval_node(*n.a, vars, params) * eval_node(*n.b, vars, params);
        case Kind::Div: {
            S num = eval_node(*n.a, vars, params);
            S den = eval_node(*n.b, vars, params);
            if (scalar_value(den) == 0.0) throw DomainError("division by zero");
            return num / den;
        }
        case Kind::PowInt:
            return jpow(eval_node(*n.a, vars, params), n.ipow);
        case Kind::PowReal:
            return jpowr(eval_node(*n.a, vars, params), n.number);
        case Kind::Func: {
            S u = eval_node(*n.a, vars, params);
            switch (n.fn) {
            case Fn::Sqrt: return jsqrt(u);
            case Fn::Exp: return jexp(u);
            case Fn::Ln: return jlog(u);
            case Fn::Sin: return jsin(u);
            case Fn::Cos: return jcos(u);
            case Fn::Abs: return jabs(u);
            }
            throw EvaluationError("unreachable function kind");
        }
        }
        throw EvaluationError("unreachable node kind");
    }

    std::shared_ptr<const Node> root_;
};

// Parse `text` against dimension `dim` (variables x1..x<dim>) and the given
// parameter names. Throws ParseError / UnknownIdentifierError /
// DimensionOutOfRangeError with byte offsets.
Expr parse(const std::string& text, int dim, const std::vector<std::string>& param_names = {});

// Canonical infix rendering; parse(print(e), dim) reproduces `e` structurally.
std::string print(const Expr& e);

// Shortest round-trip decimal rendering of a double (shared with reports).
std::string format_double(double v);

// Evaluate an expression at a point with jet-seeded coordinates: variable i
// carries value x[i] and unit seed in slot `seed_offset + i` of a jet space
// with `jet_vars` variables of the given order.
Jet eval_jet(const Expr& e, std::span<const double> x, int order, const Params& params = {});

} // namespace finslernav
