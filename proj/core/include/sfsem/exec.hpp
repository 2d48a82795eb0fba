#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sfsem/chart.hpp"
#include "sfsem/dyn_env.hpp"

namespace sfsem {

/// The triggering event of a round or broadcast; the empty string is ε.
using Event = std::string;

/// Outcome of a transition-list search.
enum class Verdict : int { kTerminal = -1, kFail = 0, kState = 1 };

inline constexpr std::uint64_t kDefaultFuelPerRound = 100000;

struct ExecOptions {
  /// Rule applications allowed per round (and for the initial entry).
  std::uint64_t fuel_per_round = kDefaultFuelPerRound;
  /// Treat a terminal junction reached by a state's transitions like a plain
  /// failure (during action, inner transitions and substates still run).
  /// Off by default: reaching a terminal junction ends that state's step.
  bool strict_terminal_junction = false;
  /// Report a round whose top-level flag is an early return as a semantic
  /// error instead of ending the round quietly.
  bool reject_early_return_round = false;
  /// Include the full valuation in every trace round.
  bool snapshot_vars = false;
  /// Receives the name of every semantic rule as its conclusion is drawn.
  std::function<void(std::string_view)> on_rule;
  /// Called after the initial entry (round 0) and after each round.
  std::function<void(std::size_t, const DynEnv&)> after_round;
};

// One transition step. `trans_action` is null unless the transition was taken.
struct TransResult {
  bool enabled = false;
  bool cont = true;
  const Action* trans_action = nullptr;
  std::optional<Path> target;
};

// Outcome of searching a transition list: verdict, continue flag, collected
// transition actions, reached target, and the lowest common ancestor of the path.
struct TransListResult {
  Verdict vt = Verdict::kFail;
  bool cont = true;
  std::vector<const Action*> trans_actions;  // executed in order
  std::optional<Path> target;
  Path hp;
};

/// One execution of the semantic arrows over a shared, immutable chart.
/// Every operation mutates `env` in place and returns the early-return flag
/// (true = continue). Every arrow invocation burns one unit of fuel.
class Interpreter {
 public:
  Interpreter(const Chart& chart, ExecOptions options = {});

  void refuel() { fuel_ = options_.fuel_per_round; }
  [[nodiscard]] std::uint64_t fuel() const { return fuel_; }
  [[nodiscard]] const Chart& chart() const { return chart_; }

  bool exec_action(const Path& p, const Event& e, const Action& a,
                   DynEnv& env);
  bool broadcast(const Path& source_ctx, const Event& event,
                 bool in_transition_action, const std::optional<Path>& target,
                 DynEnv& env);

  /// Whether `t` is enabled for `e`; evaluated on a copy, `env` is untouched.
  [[nodiscard]] bool trans_enabled(const Path& p, const Transition& t,
                                   const DynEnv& env, const Event& e) const;
  TransResult exec_transition(const Path& p, const Event& e,
                              const Transition& t, DynEnv& env);
  TransListResult exec_transition_list(const Path& p, const Event& e,
                                       std::span<const Transition> list,
                                       DynEnv& env);

  bool exit_state(const Path& p, const Event& e, DynEnv& env);
  bool exit_comp(const Path& p, const Event& e, DynEnv& env);
  bool enter_state(const Path& h, const Path& p, const Event& e, DynEnv& env);
  bool enter_comp(const Path& h, const Path& p, const Event& e, DynEnv& env);
  bool run_state(bool is_broadcast, const Path& p, const Event& e,
                 DynEnv& env);
  bool run_comp(bool is_broadcast, const Path& p, const Event& e,
                DynEnv& env);

  /// Default entry of the root composition, marking the root active.
  bool enter_chart(DynEnv& env);

 private:
  void burn();
  void rule(std::string_view name) {
    if (options_.on_rule) options_.on_rule(name);
  }
  bool event_clause(const Transition& t, const Valuation& v,
                    const Event& e) const;
  bool take_transition(const Path& p, const TransListResult& r, bool inner,
                       const Event& e, DynEnv& env);
  bool comp_has_active_child(const Path& p, const DynEnv& env) const;
  bool call_function(const Path& p, const Event& e, const FunctionCall& call,
                     DynEnv& env);

  const Chart& chart_;
  ExecOptions options_;
  std::uint64_t fuel_;
};

// ---------------------------------------------------------------------------
// Chart-level rounds

struct RoundRecord {
  std::size_t index = 0;  // 0 for the initial entry
  std::optional<std::string> input_event;
  std::vector<std::string> prints;
  std::vector<Path> active;
  std::map<std::string, Value> vars_delta;
  std::optional<std::map<std::string, Value>> vars;
  bool early_return = false;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

enum class RunStatus { kOk, kBudgetExhausted, kSemanticError };

struct Trace {
  std::string chart;
  std::optional<RoundRecord> initialization;
  std::vector<RoundRecord> rounds;
  RunStatus status = RunStatus::kOk;
  std::string error_kind;  // budget | semantic | eval | lookup
  std::string error;
  std::size_t error_round = 0;
  std::optional<double> execution_period;

  /// Initialization prints followed by every round's prints.
  [[nodiscard]] std::vector<std::string> print_stream() const;

  friend bool operator==(const Trace&, const Trace&) = default;
};

struct RunResult {
  DynEnv env;
  Trace trace;
};

/// Performs the initial entry when the root is not yet active, then one round
/// per event (std::nullopt is ε). Runtime failures stop execution and are
/// reported through trace.status with the rounds completed so far.
RunResult run_chart(const Chart& chart, DynEnv env,
                    std::span<const std::optional<std::string>> events,
                    const ExecOptions& options = {});

}  // namespace sfsem
