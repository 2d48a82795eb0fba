#pragma once

#include "sfsem/chart.hpp"
#include "sfsem/dyn_env.hpp"

namespace sfsem {

// Evaluation under a valuation and a context state path. All functions are pure;
// failures throw EvalError.

Value eval_expr(const Valuation& v, const Path& p, const Expr& e);
bool eval_cond(const Valuation& v, const Path& p, const Cond& c);
bool eval_temporal(const Valuation& v, const Path& p, const TemporalCond& tc);

/// The counter a temporal operator reads: ticks of p for tick/sec, else the count of E at p.
std::uint64_t temporal_count(const Valuation& v, const Path& p,
                             const std::string& event);

}  // namespace sfsem
