// Small expression language for kernels, boundary curves, right-hand sides,
// exact solutions and output transforms. Parsing is recursive descent with
// byte positions in errors; evaluation is generic over the arithmetic
// backend so the same tree runs in plain binary64 or in stochastic
// arithmetic.
#pragma once

#include "vsa/sa.hpp"

#include <cmath>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vsa {

struct ParseError : std::runtime_error {
    ParseError(std::size_t position, std::string expected_, std::string found_)
        : std::runtime_error("parse error at " + std::to_string(position) + ": expected " +
                             expected_ + ", found " + found_),
          pos(position),
          expected(std::move(expected_)),
          found(std::move(found_)) {}
    std::size_t pos;
    std::string expected;
    std::string found;
};

enum class FuncId { Exp, Sin, Cos, Tan, Asin, Acos, Atan, Sqrt, Log, Abs, Pow };

const char* to_string(FuncId f);

class Expr {
  public:
    struct Node;
    using NodePtr = std::shared_ptr<const Node>;

    enum class Kind { Number, Var, Add, Sub, Mul, Div, Neg, PowOp, Call };

    struct Node {
        Kind kind;
        double number = 0.0;       // Kind::Number
        int var = -1;              // Kind::Var, index into the declared set
        std::string var_name;      // Kind::Var
        FuncId func = FuncId::Exp; // Kind::Call
        std::vector<NodePtr> kids;
    };

    Expr() = default;

    // Parses with the given declared variable set; throws ParseError.
    static Expr parse(const std::string& text, const std::vector<std::string>& vars);

    bool empty() const { return root_ == nullptr; }
    const Node& root() const { return *root_; }
    const std::vector<std::string>& variables() const { return vars_; }
    const std::string& text() const { return text_; }

    std::size_t node_count() const;
    std::string to_string() const;
    bool same_structure(const Expr& other) const;

    template <class Backend>
    typename Backend::value_type eval(std::span<const typename Backend::value_type> values,
                                      Backend& b) const;

  private:
    static std::size_t count(const NodePtr& n);
    NodePtr root_;
    std::vector<std::string> vars_;
    std::string text_;
};

// Plain binary64 arithmetic. Domain violations follow IEEE semantics (NaN),
// matching an ordinary floating-point program.
struct PlainBackend {
    using value_type = double;
    double from_exact(double x) { return x; }
    double add(double a, double b) { return a + b; }
    double sub(double a, double b) { return a - b; }
    double mul(double a, double b) { return a * b; }
    double div(double a, double b) { return a / b; }
    double neg(double a) { return -a; }
    double abs(double a) { return std::fabs(a); }
    double exp(double a) { return std::exp(a); }
    double sin(double a) { return std::sin(a); }
    double cos(double a) { return std::cos(a); }
    double tan(double a) { return std::tan(a); }
    double asin(double a) { return std::asin(a); }
    double acos(double a) { return std::acos(a); }
    double atan(double a) { return std::atan(a); }
    double sqrt(double a) { return std::sqrt(a); }
    double log(double a) { return std::log(a); }
    double pow_int(double a, long e) {
        long k = e < 0 ? -e : e;
        if (k <= 8) {
            double r = 1.0;
            for (long i = 0; i < k; ++i) r *= a;
            return e < 0 ? 1.0 / r : r;
        }
        return std::pow(a, static_cast<double>(e));
    }
    double pow(double a, double b) { return std::pow(a, b); }
    static double mean_of(double v) { return v; }
};

// Stochastic arithmetic backend over a SaContext.
struct SaBackend {
    using value_type = StochasticValue;
    SaContext* ctx;
    explicit SaBackend(SaContext& c) : ctx(&c) {}
    StochasticValue from_exact(double x) { return ctx->from_exact(x); }
    StochasticValue add(const StochasticValue& a, const StochasticValue& b) { return ctx->add(a, b); }
    StochasticValue sub(const StochasticValue& a, const StochasticValue& b) { return ctx->sub(a, b); }
    StochasticValue mul(const StochasticValue& a, const StochasticValue& b) { return ctx->mul(a, b); }
    StochasticValue div(const StochasticValue& a, const StochasticValue& b) { return ctx->div(a, b); }
    StochasticValue neg(const StochasticValue& a) { return ctx->neg(a); }
    StochasticValue abs(const StochasticValue& a) { return ctx->abs(a); }
    StochasticValue exp(const StochasticValue& a) { return ctx->exp(a); }
    StochasticValue sin(const StochasticValue& a) { return ctx->sin(a); }
    StochasticValue cos(const StochasticValue& a) { return ctx->cos(a); }
    StochasticValue tan(const StochasticValue& a) { return ctx->tan(a); }
    StochasticValue asin(const StochasticValue& a) { return ctx->asin(a); }
    StochasticValue acos(const StochasticValue& a) { return ctx->acos(a); }
    StochasticValue atan(const StochasticValue& a) { return ctx->atan(a); }
    StochasticValue sqrt(const StochasticValue& a) { return ctx->sqrt(a); }
    StochasticValue log(const StochasticValue& a) { return ctx->log(a); }
    StochasticValue pow_int(const StochasticValue& a, long e) { return ctx->pow_int(a, e); }
    StochasticValue pow(const StochasticValue& a, const StochasticValue& b) { return ctx->pow(a, b); }
    double mean_of(const StochasticValue& v) const { return ctx->mean(v); }
};

namespace detail {

template <class Backend>
typename Backend::value_type eval_node(const Expr::Node& n,
                                       std::span<const typename Backend::value_type> values,
                                       Backend& b) {
    using V = typename Backend::value_type;
    switch (n.kind) {
        case Expr::Kind::Number: return b.from_exact(n.number);
        case Expr::Kind::Var: return values[static_cast<std::size_t>(n.var)];
        case Expr::Kind::Add: return b.add(eval_node(*n.kids[0], values, b), eval_node(*n.kids[1], values, b));
        case Expr::Kind::Sub: return b.sub(eval_node(*n.kids[0], values, b), eval_node(*n.kids[1], values, b));
        case Expr::Kind::Mul: return b.mul(eval_node(*n.kids[0], values, b), eval_node(*n.kids[1], values, b));
        case Expr::Kind::Div: return b.div(eval_node(*n.kids[0], values, b), eval_node(*n.kids[1], values, b));
        case Expr::Kind::Neg: return b.neg(eval_node(*n.kids[0], values, b));
        case Expr::Kind::PowOp: {
            // integer exponents expand into repeated products
            const Expr::Node& e = *n.kids[1];
            V base = eval_node(*n.kids[0], values, b);
            if (e.kind == Expr::Kind::Number && e.number == std::floor(e.number) &&
                std::fabs(e.number) <= 64.0) {
                return b.pow_int(base, static_cast<long>(e.number));
            }
            if (e.kind == Expr::Kind::Neg && e.kids[0]->kind == Expr::Kind::Number &&
                e.kids[0]->number == std::floor(e.kids[0]->number) &&
                std::fabs(e.kids[0]->number) <= 64.0) {
                return b.pow_int(base, -static_cast<long>(e.kids[0]->number));
            }
            return b.pow(base, eval_node(e, values, b));
        }
        case Expr::Kind::Call: {
            V a0 = eval_node(*n.kids[0], values, b);
            switch (n.func) {
                case FuncId::Exp: return b.exp(a0);
                case FuncId::Sin: return b.sin(a0);
                case FuncId::Cos: return b.cos(a0);
                case FuncId::Tan: return b.tan(a0);
                case FuncId::Asin: return b.asin(a0);
                case FuncId::Acos: return b.acos(a0);
                case FuncId::Atan: return b.atan(a0);
                case FuncId::Sqrt: return b.sqrt(a0);
                case FuncId::Log: return b.log(a0);
                case FuncId::Abs: return b.abs(a0);
                case FuncId::Pow: return b.pow(a0, eval_node(*n.kids[1], values, b));
            }
            break;
        }
    }
    return b.from_exact(0.0);
}

}  // namespace detail

template <class Backend>
typename Backend::value_type Expr::eval(std::span<const typename Backend::value_type> values,
                                        Backend& b) const {
    return detail::eval_node<Backend>(*root_, values, b);
}

}  // namespace vsa
