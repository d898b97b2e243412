#include "ermakov/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "ermakov/errors.hpp"
#include "ermakov/quadrature.hpp"

namespace ermakov {

using Node = ExprAst::Node;
using Kind = Node::Kind;

const char* unary_fn_name(UnaryFn f) {
    switch (f) {
        case UnaryFn::Sin: return "sin";
        case UnaryFn::Cos: return "cos";
        case UnaryFn::Exp: return "exp";
        case UnaryFn::Ln: return "ln";
        case UnaryFn::Sqrt: return "sqrt";
        case UnaryFn::Abs: return "abs";
        case UnaryFn::Tanh: return "tanh";
    }
    return "?";
}

// ---- ExprAst ----------------------------------------------------------------

ExprAst::ExprAst() {
    nodes_.push_back(Node{});
    root_ = 0;
}

int ExprAst::var_index(std::string_view name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i] == name) return static_cast<int>(i);
    return -1;
}

bool ExprAst::uses_var(int var) const {
    for (const Node& n : nodes_)
        if (n.kind == Kind::Variable && n.var == var) return true;
    return false;
}

bool ExprAst::is_constant_zero() const {
    const Node& r = nodes_[static_cast<std::size_t>(root_)];
    return r.kind == Kind::Constant && r.value == 0.0;
}

bool ExprAst::has_external() const {
    for (const Node& n : nodes_)
        if (n.kind == Kind::External) return true;
    return false;
}

// ---- AstBuilder -------------------------------------------------------------

AstBuilder::AstBuilder(std::vector<std::string> vars) {
    ast_.nodes_.clear();
    ast_.vars_ = std::move(vars);
    for (std::size_t i = 0; i < ast_.vars_.size(); ++i)
        for (std::size_t j = i + 1; j < ast_.vars_.size(); ++j)
            if (ast_.vars_[i] == ast_.vars_[j]) throw Error("duplicate variable name");
}

int AstBuilder::push(Node n) {
    const int limit = static_cast<int>(ast_.nodes_.size());
    if ((n.a >= limit) || (n.b >= limit)) throw Error("AstBuilder: child index out of range");
    ast_.nodes_.push_back(std::move(n));
    return limit;
}

int AstBuilder::constant(double v) {
    if (!std::isfinite(v)) throw Error("AstBuilder: constants must be finite");
    Node n;
    n.kind = Kind::Constant;
    n.value = v;
    return push(n);
}

int AstBuilder::variable(std::string_view name) {
    const int vi = ast_.var_index(name);
    if (vi < 0) throw Error("AstBuilder: undeclared variable '" + std::string(name) + "'");
    Node n;
    n.kind = Kind::Variable;
    n.var = vi;
    return push(n);
}

int AstBuilder::neg(int a) {
    Node n;
    n.kind = Kind::Neg;
    n.a = a;
    return push(n);
}

namespace {
Node binary(Kind k, int a, int b) {
    Node n;
    n.kind = k;
    n.a = a;
    n.b = b;
    return n;
}
} // namespace

int AstBuilder::add(int a, int b) { return push(binary(Kind::Add, a, b)); }
int AstBuilder::sub(int a, int b) { return push(binary(Kind::Sub, a, b)); }
int AstBuilder::mul(int a, int b) { return push(binary(Kind::Mul, a, b)); }
int AstBuilder::div(int a, int b) { return push(binary(Kind::Div, a, b)); }
int AstBuilder::pow(int a, int b) { return push(binary(Kind::Pow, a, b)); }

int AstBuilder::call(UnaryFn f, int a) {
    Node n;
    n.kind = Kind::Call;
    n.fn = f;
    n.a = a;
    return push(n);
}

int AstBuilder::external(std::shared_ptr<const ExternalFn> f, int a) {
    if (!f) throw Error("AstBuilder: null external function");
    Node n;
    n.kind = Kind::External;
    n.ext = std::move(f);
    n.a = a;
    return push(n);
}

int AstBuilder::splice(const ExprAst& src, const std::vector<int>& var_nodes) {
    if (var_nodes.size() != src.vars().size())
        throw Error("AstBuilder: substitution list does not match source variables");
    const int limit = static_cast<int>(ast_.nodes_.size());
    for (int v : var_nodes)
        if (v < 0 || v >= limit) throw Error("AstBuilder: substitution node out of range");

    std::vector<int> remap(src.nodes().size(), -1);
    for (std::size_t i = 0; i < src.nodes().size(); ++i) {
        Node n = src.nodes()[i];
        if (n.kind == Kind::Variable) {
            remap[i] = var_nodes[static_cast<std::size_t>(n.var)];
            continue;
        }
        if (n.a >= 0) n.a = remap[static_cast<std::size_t>(n.a)];
        if (n.b >= 0) n.b = remap[static_cast<std::size_t>(n.b)];
        remap[i] = push(n);
    }
    return remap[static_cast<std::size_t>(src.root())];
}

ExprAst AstBuilder::finish(int root) {
    if (root < 0 || root >= static_cast<int>(ast_.nodes_.size()))
        throw Error("AstBuilder: root index out of range");

    // keep only nodes reachable from the root, preserving topological order
    std::vector<bool> live(ast_.nodes_.size(), false);
    std::vector<int> stack{root};
    while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        if (live[static_cast<std::size_t>(i)]) continue;
        live[static_cast<std::size_t>(i)] = true;
        const Node& n = ast_.nodes_[static_cast<std::size_t>(i)];
        if (n.a >= 0) stack.push_back(n.a);
        if (n.b >= 0) stack.push_back(n.b);
    }

    ExprAst out;
    out.nodes_.clear();
    out.vars_ = ast_.vars_;
    std::vector<int> remap(ast_.nodes_.size(), -1);
    for (std::size_t i = 0; i < ast_.nodes_.size(); ++i) {
        if (!live[i]) continue;
        Node n = ast_.nodes_[i];
        if (n.a >= 0) n.a = remap[static_cast<std::size_t>(n.a)];
        if (n.b >= 0) n.b = remap[static_cast<std::size_t>(n.b)];
        remap[i] = static_cast<int>(out.nodes_.size());
        out.nodes_.push_back(std::move(n));
    }
    out.root_ = remap[static_cast<std::size_t>(root)];
    return out;
}

// ---- parser ------------------------------------------------------------------

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

const std::pair<std::string_view, UnaryFn> kFunctions[] = {
    {"sin", UnaryFn::Sin}, {"cos", UnaryFn::Cos},   {"exp", UnaryFn::Exp}, {"ln", UnaryFn::Ln},
    {"sqrt", UnaryFn::Sqrt}, {"abs", UnaryFn::Abs}, {"tanh", UnaryFn::Tanh}};

const UnaryFn* lookup_function(std::string_view name) {
    for (const auto& [fname, fn] : kFunctions)
        if (fname == name) return &fn;
    return nullptr;
}

struct Parser {
    std::string_view src;
    std::size_t pos = 0;
    AstBuilder& b;
    int depth = 0;

    [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
        throw ParseError(msg + " at offset " + std::to_string(at), at);
    }

    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }

    bool peek(char c) {
        skip_ws();
        return pos < src.size() && src[pos] == c;
    }

    bool accept(char c) {
        if (!peek(c)) return false;
        ++pos;
        return true;
    }

    int parse_expr() {
        struct DepthGuard {
            int& d;
            explicit DepthGuard(Parser& p) : d(p.depth) {
                if (++d > 256) throw ParseError("expression nests too deeply", p.pos);
            }
            ~DepthGuard() { --d; }
        } guard(*this);

        int node = parse_term();
        while (true) {
            skip_ws();
            if (accept('+'))
                node = b.add(node, parse_term());
            else if (accept('-'))
                node = b.sub(node, parse_term());
            else
                return node;
        }
    }

    int parse_term() {
        int node = parse_unary();
        while (true) {
            skip_ws();
            if (accept('*'))
                node = b.mul(node, parse_unary());
            else if (accept('/'))
                node = b.div(node, parse_unary());
            else
                return node;
        }
    }

    int parse_unary() {
        if (accept('-')) {
            if (++depth > 256) throw ParseError("expression nests too deeply", pos);
            const int node = b.neg(parse_unary());
            --depth;
            return node;
        }
        return parse_power();
    }

    int parse_power() {
        const int base = parse_primary();
        if (accept('^')) return b.pow(base, parse_unary());
        return base;
    }

    int parse_primary() {
        skip_ws();
        if (pos >= src.size()) fail("unexpected end of expression", pos);
        const char c = src[pos];

        if (c == '(') {
            ++pos;
            const int node = parse_expr();
            if (!accept(')')) fail("expected ')'", pos);
            return node;
        }

        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double value = 0.0;
            const char* first = src.data() + pos;
            const char* last = src.data() + src.size();
            const auto [ptr, ec] = std::from_chars(first, last, value);
            if (ec != std::errc() || ptr == first) fail("invalid numeric literal", pos);
            pos = static_cast<std::size_t>(ptr - src.data());
            return b.constant(value);
        }

        if (ident_start(c)) {
            const std::size_t start = pos;
            while (pos < src.size() && ident_char(src[pos])) ++pos;
            const std::string_view name = src.substr(start, pos - start);
            if (accept('(')) {
                const UnaryFn* fn = lookup_function(name);
                if (!fn) fail("unknown function '" + std::string(name) + "'", start);
                const int arg = parse_expr();
                if (!accept(')')) fail("expected ')'", pos);
                return b.call(*fn, arg);
            }
            if (lookup_function(name))
                fail("function '" + std::string(name) + "' needs an argument list", start);
            int node = -1;
            try {
                node = b.variable(name);
            } catch (const Error&) {
                fail("undeclared variable '" + std::string(name) + "'", start);
            }
            return node;
        }

        fail("expected a number, variable, function or '('", pos);
    }
};

} // namespace

ExprAst parse_expression(std::string_view src, std::vector<std::string> variables) {
    for (const std::string& v : variables) {
        if (v.empty() || !ident_start(v[0]) || !std::all_of(v.begin(), v.end(), ident_char))
            throw ParseError("invalid variable name '" + v + "'", 0);
        if (lookup_function(v))
            throw ParseError("variable name '" + v + "' collides with a built-in function", 0);
    }

    AstBuilder b(std::move(variables));
    Parser p{src, 0, b};
    const int root = p.parse_expr();
    p.skip_ws();
    if (p.pos != src.size()) p.fail("unexpected trailing input", p.pos);
    return b.finish(root);
}

// ---- printer -----------------------------------------------------------------

namespace {

std::string format_double(double v) {
    char buf[48];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

// Precedence used for minimal parenthesisation: additive 1, multiplicative 2,
// unary minus 3, power 4, atoms 6.  Negative constants act like additive
// terms so they are always fenced inside tighter contexts.
int print_prec(const ExprAst& ast, int i) {
    const Node& n = ast.nodes()[static_cast<std::size_t>(i)];
    switch (n.kind) {
        case Kind::Constant: return n.value < 0.0 ? 1 : 6;
        case Kind::Variable:
        case Kind::Call:
        case Kind::External: return 6;
        case Kind::Neg: return 3;
        case Kind::Add:
        case Kind::Sub: return 1;
        case Kind::Mul:
        case Kind::Div: return 2;
        case Kind::Pow: return 4;
    }
    return 6;
}

void print_node(const ExprAst& ast, int i, std::string& out);

void print_child(const ExprAst& ast, int child, int min_prec, std::string& out) {
    const bool need = print_prec(ast, child) < min_prec;
    if (need) out.push_back('(');
    print_node(ast, child, out);
    if (need) out.push_back(')');
}

void print_node(const ExprAst& ast, int i, std::string& out) {
    const Node& n = ast.nodes()[static_cast<std::size_t>(i)];
    switch (n.kind) {
        case Kind::Constant: out += format_double(n.value); return;
        case Kind::Variable: out += ast.vars()[static_cast<std::size_t>(n.var)]; return;
        case Kind::Neg:
            out.push_back('-');
            print_child(ast, n.a, 4, out);
            return;
        case Kind::Add:
            print_child(ast, n.a, 1, out);
            out.push_back('+');
            print_child(ast, n.b, 2, out);
            return;
        case Kind::Sub:
            print_child(ast, n.a, 1, out);
            out.push_back('-');
            print_child(ast, n.b, 2, out);
            return;
        case Kind::Mul:
            print_child(ast, n.a, 2, out);
            out.push_back('*');
            print_child(ast, n.b, 3, out);
            return;
        case Kind::Div:
            print_child(ast, n.a, 2, out);
            out.push_back('/');
            print_child(ast, n.b, 3, out);
            return;
        case Kind::Pow:
            print_child(ast, n.a, 5, out);
            out.push_back('^');
            print_child(ast, n.b, 3, out);
            return;
        case Kind::Call:
            out += unary_fn_name(n.fn);
            out.push_back('(');
            print_node(ast, n.a, out);
            out.push_back(')');
            return;
        case Kind::External:
            out += n.ext->name();
            out.push_back('(');
            print_node(ast, n.a, out);
            out.push_back(')');
            return;
    }
}

} // namespace

std::string to_string(const ExprAst& ast) {
    std::string out;
    print_node(ast, ast.root(), out);
    return out;
}

// ---- evaluation ----------------------------------------------------------------

namespace {

template <class S>
S apply_call(UnaryFn f, const S& u) {
    if constexpr (std::is_same_v<S, double>) {
        switch (f) {
            case UnaryFn::Sin: return std::sin(u);
            case UnaryFn::Cos: return std::cos(u);
            case UnaryFn::Exp: return std::exp(u);
            case UnaryFn::Ln:
                if (u <= 0.0) throw DomainError("ln of non-positive value");
                return std::log(u);
            case UnaryFn::Sqrt:
                if (u < 0.0) throw DomainError("sqrt of negative value");
                return std::sqrt(u);
            case UnaryFn::Abs: return std::fabs(u);
            case UnaryFn::Tanh: return std::tanh(u);
        }
    } else {
        switch (f) {
            case UnaryFn::Sin: return sin(u);
            case UnaryFn::Cos: return cos(u);
            case UnaryFn::Exp: return exp(u);
            case UnaryFn::Ln: return log(u);
            case UnaryFn::Sqrt: return sqrt(u);
            case UnaryFn::Abs: return abs(u);
            case UnaryFn::Tanh: return tanh(u);
        }
    }
    throw Error("unhandled function");
}

double apply_div(double a, double b) {
    if (b == 0.0) throw DomainError("division by zero");
    return a / b;
}
Dual apply_div(const Dual& a, const Dual& b) { return a / b; }
Dual2 apply_div(const Dual2& a, const Dual2& b) { return a / b; }

double apply_ext(const ExternalFn& f, double u) { return f.value(u); }

Dual apply_ext(const ExternalFn& f, const Dual& u) {
    const double v = f.value(u.v);
    const double d = (u.d != 0.0) ? f.deriv1(u.v) : 0.0;
    return {v, d * u.d};
}

Dual2 apply_ext(const ExternalFn& f, const Dual2& u) {
    const double v = f.value(u.v);
    const bool need1 = u.d1 != 0.0 || u.d2 != 0.0 || u.d12 != 0.0;
    const double d1 = need1 ? f.deriv1(u.v) : 0.0;
    const bool need2 = u.d1 != 0.0 && u.d2 != 0.0;
    const double d2 = need2 ? f.deriv2(u.v) : 0.0;
    return {v, d1 * u.d1, d1 * u.d2, d2 * u.d1 * u.d2 + d1 * u.d12};
}

bool finite_result(double x) { return std::isfinite(x); }
bool finite_result(const Dual& x) { return std::isfinite(x.v) && std::isfinite(x.d); }
bool finite_result(const Dual2& x) {
    return std::isfinite(x.v) && std::isfinite(x.d1) && std::isfinite(x.d2) &&
           std::isfinite(x.d12);
}

template <class S>
S eval_impl(const ExprAst& ast, const std::vector<S>& bindings) {
    if (bindings.size() != ast.vars().size())
        throw Error("eval: binding count does not match variable list");

    const std::vector<Node>& nodes = ast.nodes();
    std::vector<S> buf(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Node& n = nodes[i];
        switch (n.kind) {
            case Kind::Constant: buf[i] = S(n.value); break;
            case Kind::Variable: buf[i] = bindings[static_cast<std::size_t>(n.var)]; break;
            case Kind::Neg: buf[i] = -buf[static_cast<std::size_t>(n.a)]; break;
            case Kind::Add:
                buf[i] = buf[static_cast<std::size_t>(n.a)] + buf[static_cast<std::size_t>(n.b)];
                break;
            case Kind::Sub:
                buf[i] = buf[static_cast<std::size_t>(n.a)] - buf[static_cast<std::size_t>(n.b)];
                break;
            case Kind::Mul:
                buf[i] = buf[static_cast<std::size_t>(n.a)] * buf[static_cast<std::size_t>(n.b)];
                break;
            case Kind::Div:
                buf[i] = apply_div(buf[static_cast<std::size_t>(n.a)],
                                   buf[static_cast<std::size_t>(n.b)]);
                break;
            case Kind::Pow:
                buf[i] =
                    pow(buf[static_cast<std::size_t>(n.a)], buf[static_cast<std::size_t>(n.b)]);
                break;
            case Kind::Call: buf[i] = apply_call(n.fn, buf[static_cast<std::size_t>(n.a)]); break;
            case Kind::External:
                buf[i] = apply_ext(*n.ext, buf[static_cast<std::size_t>(n.a)]);
                break;
        }
    }
    const S& out = buf[static_cast<std::size_t>(ast.root())];
    if (!finite_result(out)) throw DomainError("expression evaluated to a non-finite value");
    return out;
}

} // namespace

double eval(const ExprAst& ast, const std::vector<double>& bindings) {
    return eval_impl(ast, bindings);
}
Dual eval(const ExprAst& ast, const std::vector<Dual>& bindings) {
    return eval_impl(ast, bindings);
}
Dual2 eval(const ExprAst& ast, const std::vector<Dual2>& bindings) {
    return eval_impl(ast, bindings);
}

double derivative(const ExprAst& ast, std::string_view var, const std::vector<double>& bindings,
                  int order) {
    const int vi = ast.var_index(var);
    if (vi < 0) throw Error("derivative: unknown variable '" + std::string(var) + "'");
    if (bindings.size() != ast.vars().size())
        throw Error("derivative: binding count does not match variable list");

    if (order == 1) {
        std::vector<Dual> b(bindings.size());
        for (std::size_t i = 0; i < bindings.size(); ++i)
            b[i] = Dual(bindings[i], static_cast<int>(i) == vi ? 1.0 : 0.0);
        return eval_impl(ast, b).d;
    }
    if (order == 2) {
        std::vector<Dual2> b(bindings.size());
        for (std::size_t i = 0; i < bindings.size(); ++i) {
            const double seed = static_cast<int>(i) == vi ? 1.0 : 0.0;
            b[i] = Dual2(bindings[i], seed, seed, 0.0);
        }
        return eval_impl(ast, b).d12;
    }
    throw Error("derivative: order must be 1 or 2");
}

double integral(const ExprAst& ast, std::string_view var, double lo, double hi,
                const std::vector<double>& bindings, double tol) {
    const int vi = ast.var_index(var);
    if (vi < 0) throw Error("integral: unknown variable '" + std::string(var) + "'");
    if (bindings.size() != ast.vars().size())
        throw Error("integral: binding count does not match variable list");

    std::vector<double> b = bindings;
    QuadratureOptions opt;
    opt.tol = tol;
    return integrate_adaptive(
        [&](double x) {
            b[static_cast<std::size_t>(vi)] = x;
            return eval_impl(ast, b);
        },
        lo, hi, opt);
}

// ---- external-node factories ----------------------------------------------------

namespace {

class AdFn final : public ExternalFn {
  public:
    AdFn(std::string name, ExprAst ast) : name_(std::move(name)), ast_(std::move(ast)) {
        if (ast_.vars().size() != 1)
            throw Error("make_ad_fn: expression must have exactly one variable");
    }

    std::string name() const override { return name_; }
    double value(double x) const override { return eval(ast_, std::vector<double>{x}); }
    double deriv1(double x) const override {
        return eval(ast_, std::vector<Dual>{Dual(x, 1.0)}).d;
    }
    double deriv2(double x) const override {
        return eval(ast_, std::vector<Dual2>{Dual2(x, 1.0, 1.0, 0.0)}).d12;
    }

  private:
    std::string name_;
    ExprAst ast_;
};

class IntegralFn final : public ExternalFn {
  public:
    IntegralFn(std::string name, ExprAst g, double ref, double tol)
        : name_(std::move(name)), g_(std::move(g)), ref_(ref), tol_(tol) {
        if (g_.vars().size() != 1)
            throw Error("make_integral_fn: integrand must have exactly one variable");
        if (!(tol_ > 0.0)) throw Error("make_integral_fn: tolerance must be positive");
    }

    std::string name() const override { return name_; }

    // value = (ref -> anchor, cached) + (anchor -> x, fresh): error stays
    // bounded by 2*tol regardless of how many queries were served.
    double value(double x) const override {
        if (x == ref_) return 0.0;
        const double k = std::floor((x - ref_) / kAnchorStep);
        const double anchor = ref_ + k * kAnchorStep;
        double base = 0.0;
        if (k != 0.0) {
            std::lock_guard<std::mutex> lock(mu_);
            const auto it = anchors_.find(k);
            if (it != anchors_.end()) {
                base = it->second;
            } else {
                base = integrate_adaptive([this](double q) { return integrand(q); }, ref_, anchor,
                                          {tol_, 52, 40'000'000});
                anchors_.emplace(k, base);
            }
        }
        return base + integrate_adaptive([this](double q) { return integrand(q); }, anchor, x,
                                         {tol_, 52, 40'000'000});
    }

    double deriv1(double x) const override { return eval(g_, std::vector<double>{x}); }
    double deriv2(double x) const override {
        return eval(g_, std::vector<Dual>{Dual(x, 1.0)}).d;
    }

  private:
    double integrand(double q) const { return eval(g_, std::vector<double>{q}); }

    static constexpr double kAnchorStep = 0.0625;
    std::string name_;
    ExprAst g_;
    double ref_;
    double tol_;
    mutable std::mutex mu_;
    mutable std::map<double, double> anchors_;
};

} // namespace

std::shared_ptr<const ExternalFn> make_ad_fn(std::string name, ExprAst ast_of_one_var) {
    return std::make_shared<AdFn>(std::move(name), std::move(ast_of_one_var));
}

std::shared_ptr<const ExternalFn> make_integral_fn(std::string name, ExprAst integrand, double ref,
                                                   double tol) {
    return std::make_shared<IntegralFn>(std::move(name), std::move(integrand), ref, tol);
}

} // namespace ermakov
