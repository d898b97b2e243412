// Expression DSL: parsing, printing, evaluation, forward-mode derivatives
// and definite integrals of scalar expressions over named variables.
//
// Grammar (precedence low to high: +- , */ , unary - , ^ right-assoc):
//   expr    := term  (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | name | name '(' expr ')' | '(' expr ')'
// Functions: sin cos exp ln sqrt abs tanh.  Every other name is a variable
// and must be declared up front.  Domain violations (division by zero,
// ln/sqrt outside their domain, bad powers) throw DomainError, never NaN.
//
// Beyond the parseable grammar, an AST may contain "external" nodes: opaque
// univariate functions with value/derivative callbacks.  They are how
// numerically defined quantities (interpolated paths, cumulative integrals)
// enter composed expressions while staying differentiable.  External nodes
// print as name(arg) but cannot be re-parsed.
#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ermakov/dual.hpp"

namespace ermakov {

enum class UnaryFn { Sin, Cos, Exp, Ln, Sqrt, Abs, Tanh };

// Univariate callback with up to two derivatives.  Implementations that
// cannot supply a derivative keep the throwing defaults; the evaluator only
// asks for derivatives that are actually seeded.
struct ExternalFn {
    virtual ~ExternalFn() = default;
    virtual std::string name() const = 0;
    virtual double value(double x) const = 0;
    virtual double deriv1(double) const {
        throw Error("derivative of '" + name() + "' is not available");
    }
    virtual double deriv2(double) const {
        throw Error("second derivative of '" + name() + "' is not available");
    }
};

class ExprAst {
  public:
    struct Node {
        enum class Kind { Constant, Variable, Neg, Add, Sub, Mul, Div, Pow, Call, External };
        Kind kind = Kind::Constant;
        double value = 0.0;                    // Constant
        int var = -1;                          // Variable (index into vars())
        UnaryFn fn = UnaryFn::Sin;             // Call
        std::shared_ptr<const ExternalFn> ext; // External
        int a = -1, b = -1;                    // children (always lower indices)
    };

    // Default: the constant 0 over no variables.
    ExprAst();

    const std::vector<Node>& nodes() const { return nodes_; }
    int root() const { return root_; }
    const std::vector<std::string>& vars() const { return vars_; }

    int var_index(std::string_view name) const; // -1 when absent
    bool uses_var(int var) const;
    bool is_constant_zero() const;
    bool has_external() const;

  private:
    friend class AstBuilder;
    std::vector<Node> nodes_;
    int root_ = 0;
    std::vector<std::string> vars_;
};

// Incremental construction of ASTs over a fixed variable list.  Children are
// appended before parents, so node indices are topologically ordered, which
// the evaluator exploits.  finish() prunes nodes unreachable from the root.
class AstBuilder {
  public:
    explicit AstBuilder(std::vector<std::string> vars);

    int constant(double v);
    int variable(std::string_view name);
    int neg(int a);
    int add(int a, int b);
    int sub(int a, int b);
    int mul(int a, int b);
    int div(int a, int b);
    int pow(int a, int b);
    int call(UnaryFn f, int a);
    int external(std::shared_ptr<const ExternalFn> f, int a);

    // Copy src into this builder, replacing occurrences of src's variable i
    // by the existing node var_nodes[i].  Returns the index of src's root.
    int splice(const ExprAst& src, const std::vector<int>& var_nodes);

    ExprAst finish(int root);

  private:
    int push(ExprAst::Node n);
    ExprAst ast_;
};

// --- parsing / printing -----------------------------------------------------

// Throws ParseError with the byte offset of the offending token.
ExprAst parse_expression(std::string_view src, std::vector<std::string> variables);

// Numeric literals are printed with shortest round-trip precision, so
// re-parsing a printed AST reproduces evaluations exactly.
std::string to_string(const ExprAst& ast);

// --- evaluation --------------------------------------------------------------

// Bindings are positional, matching ast.vars().
double eval(const ExprAst& ast, const std::vector<double>& bindings);
Dual eval(const ExprAst& ast, const std::vector<Dual>& bindings);
Dual2 eval(const ExprAst& ast, const std::vector<Dual2>& bindings);

// order-th derivative (order 1 or 2) with respect to `var` at `bindings`.
double derivative(const ExprAst& ast, std::string_view var, const std::vector<double>& bindings,
                  int order = 1);

// Definite integral over `var` from lo to hi; the other variables keep the
// values given in `bindings` (the slot for `var` is ignored).  lo > hi
// integrates with flipped sign.
double integral(const ExprAst& ast, std::string_view var, double lo, double hi,
                const std::vector<double>& bindings, double tol = 1e-10);

// --- external-node factories --------------------------------------------------

// Expression-backed function of one variable; derivatives via dual numbers.
std::shared_ptr<const ExternalFn> make_ad_fn(std::string name, ExprAst ast_of_one_var);

// Cumulative integral x -> integral of `integrand` (an AST over one variable)
// from `ref` to x.  deriv1 is the integrand itself, deriv2 its derivative.
// Repeated nearby queries are served from quantized anchor checkpoints, so a
// query costs one short quadrature; anchors are computed once, under a lock.
std::shared_ptr<const ExternalFn> make_integral_fn(std::string name, ExprAst integrand,
                                                   double ref, double tol = 1e-12);

const char* unary_fn_name(UnaryFn f);

} // namespace ermakov
