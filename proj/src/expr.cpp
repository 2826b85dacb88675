#include "sbc/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

namespace sbc {

namespace detail {

struct ExprNode {
    enum class Kind { Constant, StateVar, TimeVar, Neg, Binary, Call, Piecewise };

    struct Arm {
        bool guarded = false;
        double threshold = 0.0;  // guard is t < threshold
        std::shared_ptr<const ExprNode> body;
    };

    Kind kind;
    std::size_t offset = 0;
    double value = 0.0;  // Constant
    int index = 0;       // StateVar, 1-based
    BinOp op{};
    FnId fn{};
    std::shared_ptr<const ExprNode> a, b;
    std::vector<Arm> arms;
};

}  // namespace detail

using detail::ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

// ---------------------------------------------------------------------------
// Function registry
// ---------------------------------------------------------------------------

namespace {

struct FnEntry {
    FnId id;
    std::string_view name;
};

constexpr FnEntry kFunctions[] = {
    {FnId::Sin, "sin"}, {FnId::Cos, "cos"},   {FnId::Tanh, "tanh"},
    {FnId::Exp, "exp"}, {FnId::Abs, "abs"},   {FnId::Sqrt, "sqrt"},
};

}  // namespace

std::string_view fn_name(FnId f) {
    for (const auto& e : kFunctions)
        if (e.id == f) return e.name;
    return "?";
}

std::optional<FnId> fn_by_name(std::string_view name) {
    for (const auto& e : kFunctions)
        if (e.name == name) return e.id;
    return std::nullopt;
}

double fn_eval(FnId f, double u) {
    switch (f) {
        case FnId::Sin: return std::sin(u);
        case FnId::Cos: return std::cos(u);
        case FnId::Tanh: return std::tanh(u);
        case FnId::Exp: return std::exp(u);
        case FnId::Abs: return std::fabs(u);
        case FnId::Sqrt: return std::sqrt(u);
    }
    return 0.0;
}

Jet fn_jet(FnId f, const Jet& u) {
    switch (f) {
        case FnId::Sin: return sin(u);
        case FnId::Cos: return cos(u);
        case FnId::Tanh: return tanh(u);
        case FnId::Exp: return exp(u);
        case FnId::Abs: return abs(u);
        case FnId::Sqrt: return sqrt(u);
    }
    return Jet();
}

void fn_derivatives(FnId f, double u, std::span<double> out) {
    switch (f) {
        case FnId::Sin: sin_derivatives(u, out); return;
        case FnId::Cos: cos_derivatives(u, out); return;
        case FnId::Tanh: tanh_derivatives(u, out); return;
        case FnId::Exp: exp_derivatives(u, out); return;
        case FnId::Abs: abs_derivatives(u, out); return;
        case FnId::Sqrt: sqrt_derivatives(u, out); return;
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse() {
        if (text_.empty()) throw ParseError(0, "empty expression");
        NodePtr e = parse_top();
        skip_ws();
        if (pos_ != text_.size()) throw ParseError(pos_, "unexpected trailing input");
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }
    bool accept(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c, const char* what) {
        if (!accept(c)) throw ParseError(pos_, std::string("expected '") + c + "' " + what);
    }

    static NodePtr make(ExprNode&& n) { return std::make_shared<const ExprNode>(std::move(n)); }

    static NodePtr fold_neg(std::size_t offset, NodePtr child) {
        // -literal folds to a negative constant so integer-exponent detection
        // and canonical rendering see one node.
        if (child->kind == ExprNode::Kind::Constant) {
            ExprNode n;
            n.kind = ExprNode::Kind::Constant;
            n.offset = offset;
            n.value = -child->value;
            return make(std::move(n));
        }
        ExprNode n;
        n.kind = ExprNode::Kind::Neg;
        n.offset = offset;
        n.a = std::move(child);
        return make(std::move(n));
    }

    NodePtr parse_top() { return parse_sum(); }

    NodePtr parse_sum() {
        NodePtr lhs = parse_product();
        for (;;) {
            skip_ws();
            const std::size_t at = pos_;
            if (accept('+')) {
                lhs = binary(BinOp::Add, at, lhs, parse_product());
            } else if (accept('-')) {
                lhs = binary(BinOp::Sub, at, lhs, parse_product());
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_product() {
        NodePtr lhs = parse_unary();
        for (;;) {
            skip_ws();
            const std::size_t at = pos_;
            if (accept('*')) {
                lhs = binary(BinOp::Mul, at, lhs, parse_unary());
            } else if (accept('/')) {
                lhs = binary(BinOp::Div, at, lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_unary() {
        skip_ws();
        const std::size_t at = pos_;
        if (accept('-')) return fold_neg(at, parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        skip_ws();
        const std::size_t at = pos_;
        if (accept('^')) return binary(BinOp::Pow, at, base, parse_unary());
        return base;
    }

    NodePtr binary(BinOp op, std::size_t at, NodePtr a, NodePtr b) {
        ExprNode n;
        n.kind = ExprNode::Kind::Binary;
        n.offset = at;
        n.op = op;
        n.a = std::move(a);
        n.b = std::move(b);
        return make(std::move(n));
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError(pos_, "expected an operand");
        const std::size_t at = pos_;
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_top();
            expect(')', "to close parenthesis");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        throw ParseError(at, "expected an operand");
    }

    NodePtr parse_number() {
        const std::size_t at = pos_;
        std::size_t p = pos_;
        bool any_digit = false;
        while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
            ++p;
            any_digit = true;
        }
        if (p < text_.size() && text_[p] == '.') {
            ++p;
            while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
                ++p;
                any_digit = true;
            }
        }
        if (!any_digit) throw ParseError(at, "malformed number");
        if (p < text_.size() && (text_[p] == 'e' || text_[p] == 'E')) {
            std::size_t q = p + 1;
            if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
            if (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) {
                ++q;
                while (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) ++q;
                p = q;
            }
        }
        double v = 0.0;
        auto res = std::from_chars(text_.data() + at, text_.data() + p, v);
        if (res.ec != std::errc() || res.ptr != text_.data() + p)
            throw ParseError(at, "malformed number");
        pos_ = p;
        ExprNode n;
        n.kind = ExprNode::Kind::Constant;
        n.offset = at;
        n.value = v;
        return make(std::move(n));
    }

    std::string_view read_word() {
        std::size_t p = pos_;
        while (p < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[p])) || text_[p] == '_'))
            ++p;
        std::string_view w = text_.substr(pos_, p - pos_);
        pos_ = p;
        return w;
    }

    NodePtr parse_identifier() {
        const std::size_t at = pos_;
        std::string_view word = read_word();
        if (word == "t") {
            ExprNode n;
            n.kind = ExprNode::Kind::TimeVar;
            n.offset = at;
            return make(std::move(n));
        }
        if (word == "pi") {
            ExprNode n;
            n.kind = ExprNode::Kind::Constant;
            n.offset = at;
            n.value = std::numbers::pi;
            return make(std::move(n));
        }
        if (word == "piecewise") return parse_piecewise(at);
        if (auto f = fn_by_name(word)) {
            expect('(', "after function name");
            NodePtr arg = parse_top();
            expect(')', "to close function call");
            ExprNode n;
            n.kind = ExprNode::Kind::Call;
            n.offset = at;
            n.fn = *f;
            n.a = std::move(arg);
            return make(std::move(n));
        }
        if (word.size() >= 2 && word[0] == 'x') {
            bool digits = true;
            for (std::size_t i = 1; i < word.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(word[i]))) digits = false;
            if (digits) {
                int idx = 0;
                std::from_chars(word.data() + 1, word.data() + word.size(), idx);
                if (idx < 1) throw ParseError(at, "state variable index must be >= 1");
                ExprNode n;
                n.kind = ExprNode::Kind::StateVar;
                n.offset = at;
                n.index = idx;
                return make(std::move(n));
            }
        }
        throw ParseError(at, "unknown identifier '" + std::string(word) + "'");
    }

    NodePtr parse_piecewise(std::size_t at) {
        expect('(', "after 'piecewise'");
        ExprNode n;
        n.kind = ExprNode::Kind::Piecewise;
        n.offset = at;
        bool saw_else = false;
        double last_threshold = 0.0;
        for (;;) {
            ExprNode::Arm arm;
            const std::size_t arm_at = pos_;
            if (is_guard_ahead()) {
                read_word();  // 't'
                expect('<', "in piecewise guard");
                NodePtr thr = parse_number_after_ws(arm_at);
                arm.guarded = true;
                arm.threshold = thr->value;
                if (arm.threshold <= 0.0)
                    throw ParseError(arm_at, "piecewise thresholds must be positive");
                if (!n.arms.empty() && n.arms.back().guarded &&
                    arm.threshold <= last_threshold)
                    throw ParseError(arm_at, "piecewise thresholds must be increasing");
                last_threshold = arm.threshold;
                expect(':', "after piecewise guard");
            }
            arm.body = parse_top();
            if (!arm.guarded) saw_else = true;
            n.arms.push_back(std::move(arm));
            skip_ws();
            if (accept(',')) {
                if (saw_else)
                    throw ParseError(pos_, "piecewise arms after the final guard-less arm");
                continue;
            }
            expect(')', "to close piecewise");
            break;
        }
        if (!saw_else)
            throw ParseError(at, "piecewise needs a final guard-less arm covering the rest of time");
        return make(std::move(n));
    }

    NodePtr parse_number_after_ws(std::size_t guard_at) {
        skip_ws();
        if (pos_ >= text_.size() ||
            !(std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            throw ParseError(guard_at, "piecewise guard must be 't < number'");
        return parse_number();
    }

    // Lookahead for "t <" without consuming when absent.
    bool is_guard_ahead() {
        const std::size_t save = pos_;
        skip_ws();
        std::size_t p = pos_;
        if (p >= text_.size() || text_[p] != 't') {
            pos_ = save;
            return false;
        }
        ++p;
        if (p < text_.size() &&
            (std::isalnum(static_cast<unsigned char>(text_[p])) || text_[p] == '_')) {
            pos_ = save;
            return false;
        }
        while (p < text_.size() && std::isspace(static_cast<unsigned char>(text_[p]))) ++p;
        const bool guard = p < text_.size() && text_[p] == '<';
        pos_ = save;
        if (guard) skip_ws();
        return guard;
    }
};

}  // namespace

Expr parse(std::string_view text) { return Expr(Parser(text).parse()); }

// ---------------------------------------------------------------------------
// Renderer
// ---------------------------------------------------------------------------

namespace {

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Effective precedence for parenthesization; negative constants act like a
// unary minus application.
int prec(const ExprNode& n) {
    switch (n.kind) {
        case ExprNode::Kind::Binary:
            switch (n.op) {
                case BinOp::Add:
                case BinOp::Sub: return 1;
                case BinOp::Mul:
                case BinOp::Div: return 2;
                case BinOp::Pow: return 4;
            }
            return 1;
        case ExprNode::Kind::Neg: return 3;
        case ExprNode::Kind::Constant: return n.value < 0.0 ? 3 : 5;
        default: return 5;
    }
}

const char* op_text(BinOp op) {
    switch (op) {
        case BinOp::Add: return " + ";
        case BinOp::Sub: return " - ";
        case BinOp::Mul: return "*";
        case BinOp::Div: return "/";
        case BinOp::Pow: return "^";
    }
    return "?";
}

void render_node(const ExprNode& n, std::string& out);

void render_child(const ExprNode& child, int min_prec, std::string& out) {
    if (prec(child) < min_prec) {
        out += '(';
        render_node(child, out);
        out += ')';
    } else {
        render_node(child, out);
    }
}

void render_node(const ExprNode& n, std::string& out) {
    switch (n.kind) {
        case ExprNode::Kind::Constant: out += format_number(n.value); return;
        case ExprNode::Kind::StateVar: out += 'x' + std::to_string(n.index); return;
        case ExprNode::Kind::TimeVar: out += 't'; return;
        case ExprNode::Kind::Neg:
            out += '-';
            render_child(*n.a, 3, out);
            return;
        case ExprNode::Kind::Binary: {
            const int p = prec(n);
            if (n.op == BinOp::Pow) {
                render_child(*n.a, p + 1, out);  // left-nested pow needs parens
                out += op_text(n.op);
                render_child(*n.b, p, out);
            } else {
                render_child(*n.a, p, out);
                out += op_text(n.op);
                render_child(*n.b, p + 1, out);
            }
            return;
        }
        case ExprNode::Kind::Call:
            out += fn_name(n.fn);
            out += '(';
            render_node(*n.a, out);
            out += ')';
            return;
        case ExprNode::Kind::Piecewise: {
            out += "piecewise(";
            bool first = true;
            for (const auto& arm : n.arms) {
                if (!first) out += ", ";
                first = false;
                if (arm.guarded) {
                    out += "t < ";
                    out += format_number(arm.threshold);
                    out += " : ";
                }
                render_node(*arm.body, out);
            }
            out += ')';
            return;
        }
    }
}

}  // namespace

std::string render(const Expr& e) {
    if (!e.valid()) throw Error("render of an empty expression");
    std::string out;
    render_node(*e.root_, out);
    return out;
}

// ---------------------------------------------------------------------------
// Structural equality / introspection
// ---------------------------------------------------------------------------

namespace {

bool node_equal(const ExprNode& a, const ExprNode& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case ExprNode::Kind::Constant: return a.value == b.value;
        case ExprNode::Kind::StateVar: return a.index == b.index;
        case ExprNode::Kind::TimeVar: return true;
        case ExprNode::Kind::Neg: return node_equal(*a.a, *b.a);
        case ExprNode::Kind::Binary:
            return a.op == b.op && node_equal(*a.a, *b.a) && node_equal(*a.b, *b.b);
        case ExprNode::Kind::Call: return a.fn == b.fn && node_equal(*a.a, *b.a);
        case ExprNode::Kind::Piecewise: {
            if (a.arms.size() != b.arms.size()) return false;
            for (std::size_t i = 0; i < a.arms.size(); ++i) {
                const auto& x = a.arms[i];
                const auto& y = b.arms[i];
                if (x.guarded != y.guarded) return false;
                if (x.guarded && x.threshold != y.threshold) return false;
                if (!node_equal(*x.body, *y.body)) return false;
            }
            return true;
        }
    }
    return false;
}

int max_index(const ExprNode& n) {
    switch (n.kind) {
        case ExprNode::Kind::StateVar: return n.index;
        case ExprNode::Kind::Neg:
        case ExprNode::Kind::Call: return max_index(*n.a);
        case ExprNode::Kind::Binary: return std::max(max_index(*n.a), max_index(*n.b));
        case ExprNode::Kind::Piecewise: {
            int m = 0;
            for (const auto& arm : n.arms) m = std::max(m, max_index(*arm.body));
            return m;
        }
        default: return 0;
    }
}

bool uses_time(const ExprNode& n) {
    switch (n.kind) {
        case ExprNode::Kind::TimeVar: return true;
        case ExprNode::Kind::Neg:
        case ExprNode::Kind::Call: return uses_time(*n.a);
        case ExprNode::Kind::Binary: return uses_time(*n.a) || uses_time(*n.b);
        case ExprNode::Kind::Piecewise: {
            for (const auto& arm : n.arms)
                if (arm.guarded || uses_time(*arm.body)) return true;
            return false;
        }
        default: return false;
    }
}

}  // namespace

bool Expr::operator==(const Expr& o) const {
    if (!root_ || !o.root_) return root_ == o.root_;
    return node_equal(*root_, *o.root_);
}

int Expr::max_state_index() const { return root_ ? max_index(*root_) : 0; }

bool Expr::references_time() const { return root_ ? uses_time(*root_) : false; }

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

// Integer-exponent fast path: exact repeated products, valid at base 0.
bool integer_exponent(const ExprNode& rhs, long long& k) {
    if (rhs.kind != ExprNode::Kind::Constant) return false;
    const double v = rhs.value;
    if (v != std::nearbyint(v) || std::fabs(v) > 64.0) return false;
    k = static_cast<long long>(v);
    return true;
}

double ipow_scalar(double x, long long k) {
    if (k == 0) return 1.0;
    const bool neg = k < 0;
    const unsigned long long e =
        neg ? static_cast<unsigned long long>(-k) : static_cast<unsigned long long>(k);
    double r = x;
    for (unsigned long long i = 1; i < e; ++i) r *= x;
    return neg ? 1.0 / r : r;
}

double eval_node(const ExprNode& n, const EvalEnv& env) {
    switch (n.kind) {
        case ExprNode::Kind::Constant: return n.value;
        case ExprNode::Kind::TimeVar: return env.t;
        case ExprNode::Kind::StateVar:
            if (n.index > static_cast<int>(env.x.size()))
                throw EvalError(n.offset, "unbound state variable x" + std::to_string(n.index));
            return env.x[static_cast<std::size_t>(n.index - 1)];
        case ExprNode::Kind::Neg: return -eval_node(*n.a, env);
        case ExprNode::Kind::Binary: {
            if (n.op == BinOp::Pow) {
                long long k = 0;
                if (integer_exponent(*n.b, k)) return ipow_scalar(eval_node(*n.a, env), k);
                const double base = eval_node(*n.a, env);
                const double r = eval_node(*n.b, env);
                if (!(base > 0.0))
                    throw EvalError(n.offset, "power with non-integer exponent needs positive base");
                return std::exp(std::log(base) * r);
            }
            const double a = eval_node(*n.a, env);
            const double b = eval_node(*n.b, env);
            switch (n.op) {
                case BinOp::Add: return a + b;
                case BinOp::Sub: return a - b;
                case BinOp::Mul: return a * b;
                case BinOp::Div:
                    if (b == 0.0) throw EvalError(n.offset, "division by zero");
                    return a / b;
                default: return 0.0;
            }
        }
        case ExprNode::Kind::Call: {
            const double u = eval_node(*n.a, env);
            if (n.fn == FnId::Sqrt && u < 0.0)
                throw EvalError(n.offset, "sqrt of a negative value");
            return fn_eval(n.fn, u);
        }
        case ExprNode::Kind::Piecewise: {
            for (const auto& arm : n.arms)
                if (!arm.guarded || env.t < arm.threshold) return eval_node(*arm.body, env);
            return 0.0;  // unreachable: parser guarantees a guard-less arm
        }
    }
    return 0.0;
}

Jet eval_jet_node(const ExprNode& n, const JetEnv& env) {
    const int m = env.t.order();
    switch (n.kind) {
        case ExprNode::Kind::Constant: return Jet::constant(n.value, m);
        case ExprNode::Kind::TimeVar: return env.t;
        case ExprNode::Kind::StateVar: {
            if (n.index > static_cast<int>(env.x.size()))
                throw EvalError(n.offset, "unbound state variable x" + std::to_string(n.index));
            const Jet& j = env.x[static_cast<std::size_t>(n.index - 1)];
            if (j.order() != m) throw JetError("state jet order mismatch in eval_jet");
            return j;
        }
        case ExprNode::Kind::Neg: return -eval_jet_node(*n.a, env);
        case ExprNode::Kind::Binary: {
            if (n.op == BinOp::Pow) {
                long long k = 0;
                if (integer_exponent(*n.b, k)) return pow(eval_jet_node(*n.a, env), k);
                const Jet base = eval_jet_node(*n.a, env);
                const Jet r = eval_jet_node(*n.b, env);
                if (!(base.value() > 0.0))
                    throw EvalError(n.offset, "power with non-integer exponent needs positive base");
                return exp(mul(log(base), r));
            }
            const Jet a = eval_jet_node(*n.a, env);
            const Jet b = eval_jet_node(*n.b, env);
            switch (n.op) {
                case BinOp::Add: return a + b;
                case BinOp::Sub: return a - b;
                case BinOp::Mul: return mul(a, b);
                case BinOp::Div:
                    if (b.value() == 0.0) throw EvalError(n.offset, "division by zero");
                    return div(a, b);
                default: return Jet();
            }
        }
        case ExprNode::Kind::Call: {
            const Jet u = eval_jet_node(*n.a, env);
            if (n.fn == FnId::Sqrt) {
                if (m == 0) {
                    if (u.value() < 0.0) throw EvalError(n.offset, "sqrt of a negative value");
                    return Jet{std::sqrt(u.value())};
                }
                if (!(u.value() > 0.0))
                    throw EvalError(n.offset, "sqrt needs a positive argument for derivatives");
            }
            return fn_jet(n.fn, u);
        }
        case ExprNode::Kind::Piecewise: {
            const double t = env.t.value();
            for (const auto& arm : n.arms)
                if (!arm.guarded || t < arm.threshold) return eval_jet_node(*arm.body, env);
            return Jet(m);  // unreachable
        }
    }
    return Jet(m);
}

}  // namespace

double eval(const Expr& e, const EvalEnv& env) {
    if (!e.valid()) throw Error("eval of an empty expression");
    return eval_node(*e.root_, env);
}

Jet eval_jet(const Expr& e, const JetEnv& env) {
    if (!e.valid()) throw Error("eval_jet of an empty expression");
    for (const Jet& j : env.x)
        if (j.order() != env.t.order()) throw JetError("jet order mismatch in eval_jet env");
    return eval_jet_node(*e.root_, env);
}

}  // namespace sbc
