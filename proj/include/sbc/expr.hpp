#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "sbc/jet.hpp"

namespace sbc {

namespace detail {
struct ExprNode;
}

enum class BinOp { Add, Sub, Mul, Div, Pow };
enum class FnId { Sin, Cos, Tanh, Exp, Abs, Sqrt };

/// Variable bindings for scalar evaluation. x[0] binds x1.
struct EvalEnv {
    double t = 0.0;
    std::span<const double> x;
};

/// Variable bindings for jet evaluation. All jets must share one order;
/// the time jet is normally Jet::time(t, m).
struct JetEnv {
    Jet t;
    std::span<const Jet> x;
};

/// Parsed expression over t, x1..xN, pi and the function set
/// {sin, cos, tanh, exp, abs, sqrt}. Immutable and freely shareable across
/// threads; evaluation is reentrant.
///
/// Grammar (documented in the README):
///   expr    = sum | piecewise
///   sum     = product { ('+' | '-') product }
///   product = unary { ('*' | '/') unary }
///   unary   = '-' unary | power
///   power   = atom [ '^' unary ]                (right-associative)
///   atom    = number | 't' | 'pi' | 'x'digits | fn '(' expr ')' | '(' expr ')'
///   piecewise = 'piecewise' '(' { 't' '<' number ':' expr ',' } expr ')'
///
/// Piecewise guards are increasing time thresholds; the final guard-less arm
/// covers the remainder of [0, inf). No implicit multiplication.
class Expr {
public:
    Expr() = default;

    bool valid() const { return root_ != nullptr; }

    /// Largest state index referenced (0 when the expression uses none).
    int max_state_index() const;

    /// True when the expression reads t (including piecewise guards).
    bool references_time() const;

    /// Structural equality, ignoring source offsets.
    bool operator==(const Expr& o) const;

private:
    explicit Expr(std::shared_ptr<const detail::ExprNode> root) : root_(std::move(root)) {}
    std::shared_ptr<const detail::ExprNode> root_;

    friend Expr parse(std::string_view);
    friend std::string render(const Expr&);
    friend double eval(const Expr&, const EvalEnv&);
    friend Jet eval_jet(const Expr&, const JetEnv&);
};

/// Parse expression text. Throws ParseError with a byte offset on failure.
Expr parse(std::string_view text);

/// Canonical text form; parse(render(e)) == e.
std::string render(const Expr& e);

/// IEEE double evaluation. Throws EvalError (division by zero, domain
/// errors, unbound variable) with the offending node's source offset.
double eval(const Expr& e, const EvalEnv& env);

/// Jet evaluation: coefficient i of the result is the i-th time derivative
/// of the expression along the supplied jets. Piecewise nodes evaluate the
/// single branch active at env.t.value(). Truncated to order 0 this equals
/// eval() exactly.
Jet eval_jet(const Expr& e, const JetEnv& env);

// Function registry: scalar evaluation, the series-recurrence jet route, and
// the derivative-table route used with compose().
double fn_eval(FnId f, double u);
Jet fn_jet(FnId f, const Jet& u);
void fn_derivatives(FnId f, double u, std::span<double> out);
std::string_view fn_name(FnId f);
std::optional<FnId> fn_by_name(std::string_view name);

}  // namespace sbc
