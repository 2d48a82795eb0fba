#include "sfsem/eval.hpp"

#include <cmath>

#include "sfsem/errors.hpp"

namespace sfsem {

namespace {

double as_number(const Value& v, const char* what) {
  double d;
  if (!numeric_value(v, d))
    throw EvalError(std::string(what) + ": expected a number, got string '" +
                    std::get<std::string>(v) + "'");
  return d;
}

double threshold_of(const Valuation& v, const Path& p, const TemporalCond& tc) {
  return as_number(eval_expr(v, p, *tc.threshold), "temporal threshold");
}

}  // namespace

std::uint64_t temporal_count(const Valuation& v, const Path& p,
                             const std::string& event) {
  return is_time_unit(event) ? v.time(p) : v.event_count(p, event);
}

Value eval_expr(const Valuation& v, const Path& p, const Expr& e) {
  return std::visit(
      [&](const auto& n) -> Value {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, NumberLit>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, StringLit>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, VarRef>) {
          auto it = v.vars.find(n.name);
          if (it == v.vars.end())
            throw EvalError("unbound variable '" + n.name + "'");
          return it->second;
        } else if constexpr (std::is_same_v<T, MessageField>) {
          auto it = v.vars.find(n.message);
          if (it == v.vars.end())
            throw EvalError("message '" + n.message + "' has no current value");
          const auto* m = std::get_if<MessageRecord>(&it->second);
          if (!m) throw EvalError("'" + n.message + "' is not a message");
          return m->data;
        } else if constexpr (std::is_same_v<T, TempCount>) {
          return static_cast<double>(temporal_count(v, p, n.event));
        } else {
          double a = as_number(eval_expr(v, p, *n.lhs), "arithmetic");
          double b = as_number(eval_expr(v, p, *n.rhs), "arithmetic");
          switch (n.op) {
            case ArithOp::kAdd: return a + b;
            case ArithOp::kSub: return a - b;
            case ArithOp::kMul: return a * b;
            case ArithOp::kDiv:
              if (b == 0) throw EvalError("division by zero");
              return a / b;
          }
          throw EvalError("unknown arithmetic operator");
        }
      },
      e.node);
}

bool eval_temporal(const Valuation& v, const Path& p, const TemporalCond& tc) {
  double m = static_cast<double>(temporal_count(v, p, tc.event));
  double n = threshold_of(v, p, tc);
  switch (tc.kind) {
    case TemporalKind::kAfter: return m >= n;
    case TemporalKind::kBefore: return m < n;
    case TemporalKind::kAt: return m == n;
    case TemporalKind::kEvery:
      if (n == 0) throw EvalError("every() with a zero period");
      return std::fmod(m, n) == 0;
  }
  return false;
}

bool eval_cond(const Valuation& v, const Path& p, const Cond& c) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, TrueCond>) {
          return true;
        } else if constexpr (std::is_same_v<T, Relation>) {
          Value a = eval_expr(v, p, *n.lhs);
          Value b = eval_expr(v, p, *n.rhs);
          double x, y;
          if (numeric_value(a, x) && numeric_value(b, y)) {
            switch (n.op) {
              case RelOp::kGt: return x > y;
              case RelOp::kEq: return x == y;
              case RelOp::kLt: return x < y;
              case RelOp::kGe: return x >= y;
              case RelOp::kLe: return x <= y;
              case RelOp::kNe: return x != y;
            }
          }
          const auto* s = std::get_if<std::string>(&a);
          const auto* t = std::get_if<std::string>(&b);
          if (s && t && n.op == RelOp::kEq) return *s == *t;
          if (s && t && n.op == RelOp::kNe) return *s != *t;
          throw EvalError("strings only support == and !=");
        } else if constexpr (std::is_same_v<T, Conj>) {
          return eval_cond(v, p, *n.lhs) && eval_cond(v, p, *n.rhs);
        } else if constexpr (std::is_same_v<T, Disj>) {
          return eval_cond(v, p, *n.lhs) || eval_cond(v, p, *n.rhs);
        } else if constexpr (std::is_same_v<T, Neg>) {
          return !eval_cond(v, p, *n.operand);
        } else {
          return eval_temporal(v, p, n);
        }
      },
      c.node);
}

}  // namespace sfsem
