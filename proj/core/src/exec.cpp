#include "sfsem/exec.hpp"

#include <pthread.h>

#include <exception>
#include <utility>

#include "sfsem/errors.hpp"
#include "sfsem/eval.hpp"

namespace sfsem {

namespace {

bool is_parallel_child(const Chart& chart, const Path& p) {
  if (p.size() < 2) return false;
  return std::holds_alternative<AndComp>(comp_lookup(chart, p.parent()));
}

std::string render(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return format_value(v);
}

}  // namespace

Interpreter::Interpreter(const Chart& chart, ExecOptions options)
    : chart_(chart),
      options_(std::move(options)),
      fuel_(options_.fuel_per_round) {}

void Interpreter::burn() {
  if (fuel_ == 0)
    throw BudgetError("rule-application budget of " +
                      std::to_string(options_.fuel_per_round) + " exhausted");
  --fuel_;
}

// ---------------------------------------------------------------------------
// Actions

bool Interpreter::exec_action(const Path& p, const Event& e, const Action& a,
                              DynEnv& env) {
  burn();
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Skip>) {
          return true;
        } else if constexpr (std::is_same_v<T, Assign>) {
          env.v.vars[n.var] = eval_expr(env.v, p, n.value);
          return true;
        } else if constexpr (std::is_same_v<T, Print>) {
          env.print_log.push_back(render(eval_expr(env.v, p, n.value)));
          return true;
        } else if constexpr (std::is_same_v<T, Seq>) {
          if (!exec_action(p, e, *n.first, env)) {
            rule("SeqF");
            return false;
          }
          bool b = exec_action(p, e, *n.second, env);
          rule("SeqT");
          return b;
        } else if constexpr (std::is_same_v<T, OnTemporal>) {
          if (!eval_temporal(env.v, p, n.cond)) {
            rule("OnF");
            return true;
          }
          bool b = exec_action(p, e, *n.body, env);
          rule("OnT");
          return b;
        } else if constexpr (std::is_same_v<T, OnEvent>) {
          bool fire = !e.empty() && e == n.event;
          if (!fire && chart_.is_message(n.event))
            fire = env.pop_message(n.event);
          if (!fire) return true;
          bool b = exec_action(p, e, *n.body, env);
          rule("OnE");
          return b;
        } else if constexpr (std::is_same_v<T, Send>) {
          bool b = broadcast(p, n.event, n.in_transition_action, n.target, env);
          rule(n.in_transition_action ? "SendT" : "SendF");
          return b;
        } else if constexpr (std::is_same_v<T, SendMessage>) {
          double d;
          if (!numeric_value(eval_expr(env.v, p, n.data), d))
            throw EvalError("message '" + n.message + "' data must be numeric");
          env.push_message(n.message, MessageRecord{d});
          rule("SendM");
          return true;
        } else {
          return call_function(p, e, n, env);
        }
      },
      a.node);
}

bool Interpreter::call_function(const Path& p, const Event& e,
                                const FunctionCall& call, DynEnv& env) {
  const std::vector<std::string>* inputs;
  const std::vector<std::string>* outputs;
  const ScriptedFunction* scripted = nullptr;
  const GraphicalFunction* graphical = nullptr;
  if (call.graphical) {
    auto it = chart_.graphical_functions.find(call.function);
    if (it == chart_.graphical_functions.end())
      throw LookupError("unknown graphical function '" + call.function + "'");
    graphical = &it->second;
    inputs = &graphical->inputs;
    outputs = &graphical->outputs;
  } else {
    auto it = chart_.functions.find(call.function);
    if (it == chart_.functions.end())
      throw LookupError("unknown function '" + call.function + "'");
    scripted = &it->second;
    inputs = &scripted->inputs;
    outputs = &scripted->outputs;
  }
  if (inputs->size() != call.args.size() ||
      outputs->size() != call.outputs.size())
    throw SemanticError("arity mismatch calling '" + call.function + "'");

  // Arguments are all evaluated before any parameter is bound.
  std::vector<Value> args;
  args.reserve(call.args.size());
  for (const auto& a : call.args) args.push_back(eval_expr(env.v, p, a));
  for (std::size_t i = 0; i < args.size(); ++i)
    env.v.vars[(*inputs)[i]] = std::move(args[i]);

  const Path no_context;
  if (scripted) {
    if (!exec_action(no_context, e, scripted->body, env)) return false;
  } else {
    auto r = exec_transition_list(no_context, e,
                                  std::span(&graphical->initial, 1), env);
    if (!r.cont) return false;
    if (r.vt != Verdict::kTerminal)
      throw SemanticError("graphical function '" + call.function +
                          "' did not end at a terminal junction");
  }

  std::vector<Value> results;
  for (const auto& name : *outputs) {
    auto it = env.v.vars.find(name);
    if (it == env.v.vars.end())
      throw EvalError("function '" + call.function + "' left output '" + name +
                      "' unset");
    results.push_back(it->second);
  }
  for (std::size_t i = 0; i < results.size(); ++i)
    env.v.vars[call.outputs[i]] = std::move(results[i]);
  rule(call.graphical ? "GraF" : "MatF");
  return true;
}

bool Interpreter::broadcast(const Path& source_ctx, const Event& event,
                            bool in_transition_action,
                            const std::optional<Path>& target, DynEnv& env) {
  const Path& scope = target ? *target : Chart::root_path();
  if (env.is_active(scope)) run_comp(true, scope, event, env);

  // Function bodies run without a state context and never return early.
  if (source_ctx.empty()) return true;
  if (!in_transition_action || source_ctx.size() < 2)
    return env.is_active(source_ctx);
  const auto& info = env.status.at(source_ctx.parent());
  if (!info.is_active) return false;
  // And-compositions never record an active substate; what matters there is
  // whether the exited source came back.
  if (is_parallel_child(chart_, source_ctx))
    return !env.is_active(source_ctx);
  return info.active_substate.empty();
}

// ---------------------------------------------------------------------------
// Transitions

bool Interpreter::event_clause(const Transition& t, const Valuation& v,
                               const Event& e) const {
  if (t.guard.empty()) return true;
  if (chart_.is_message(t.guard)) return v.queue_length(t.guard) > 0;
  return !e.empty() && t.guard == e;
}

bool Interpreter::trans_enabled(const Path& p, const Transition& t,
                                const DynEnv& env, const Event& e) const {
  if (!event_clause(t, env.v, e)) return false;
  if (!chart_.is_message(t.guard)) return eval_cond(env.v, p, t.cond);
  DynEnv scratch;
  scratch.v = env.v;
  scratch.pop_message(t.guard);
  return eval_cond(scratch.v, p, t.cond);
}

TransResult Interpreter::exec_transition(const Path& p, const Event& e,
                                         const Transition& t, DynEnv& env) {
  burn();
  if (!event_clause(t, env.v, e)) return {};
  if (!t.guard.empty() && chart_.is_message(t.guard)) {
    env.pop_message(t.guard);
    rule("Updv");
  }
  if (!eval_cond(env.v, p, t.cond)) return {};
  if (!exec_action(p, e, t.cond_action, env)) {
    rule("TrF");
    return {true, false, nullptr, std::nullopt};
  }
  rule("TrT");
  return {true, true, &t.trans_action, t.dest};
}

TransListResult Interpreter::exec_transition_list(
    const Path& p, const Event& e, std::span<const Transition> list,
    DynEnv& env) {
  burn();
  if (list.empty()) {
    rule("Emp");
    return {Verdict::kTerminal, true, {}, std::nullopt, {}};
  }
  const Transition& t = list.front();
  auto rest = list.subspan(1);

  auto tr = exec_transition(p, e, t, env);
  if (!tr.enabled) {
    if (rest.empty()) {
      rule("Fail");
      return {};
    }
    auto r = exec_transition_list(p, e, rest, env);
    rule("Ind");
    return r;
  }
  if (!tr.cont) return {Verdict::kFail, false, {}, std::nullopt, {}};

  const Path& d = *tr.target;
  if (chart_.is_state(d)) {
    rule("ToS");
    return {Verdict::kState, true, {tr.trans_action}, d, lca({t.source, d})};
  }
  if (chart_.is_history_junction(d)) {
    Path owner = d.parent();
    const Path& h = env.status.at(owner).history;
    rule("ToHJ");
    return {Verdict::kState, true, {tr.trans_action}, h.empty() ? owner : h,
            lca({t.source, d})};
  }

  auto r = exec_transition_list(p, e, chart_.junction_transitions(d), env);
  if (!r.cont) return r;
  switch (r.vt) {
    case Verdict::kState: {
      std::vector<const Action*> acts{tr.trans_action};
      acts.insert(acts.end(), r.trans_actions.begin(), r.trans_actions.end());
      Path hp = lca({t.source, d, r.hp});
      rule("ToJ1");
      return {Verdict::kState, true, std::move(acts), std::move(r.target),
              std::move(hp)};
    }
    case Verdict::kFail: {
      if (rest.empty()) {
        rule("ToJ3");
        return {};
      }
      auto r2 = exec_transition_list(p, e, rest, env);
      rule("ToJ2");
      return r2;
    }
    case Verdict::kTerminal:
      rule("ToJ4");
      return {Verdict::kTerminal, true, {}, std::nullopt, {}};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Exit and entry

bool Interpreter::comp_has_active_child(const Path& p,
                                        const DynEnv& env) const {
  for (const auto& name : substate_names(comp_lookup(chart_, p)))
    if (env.is_active(p.child(name))) return true;
  return false;
}

bool Interpreter::exit_state(const Path& p, const Event& e, DynEnv& env) {
  burn();
  if (!exit_comp(p, e, env)) {
    rule("exS2");
    return false;
  }
  // A broadcast from the exit action that re-enters part of p's own
  // composition leaves nothing to finish the exit with; it counts as an early
  // return, which keeps p active over its re-entered substates.
  if (!exec_action(p, e, state_lookup(chart_, p).exit, env) ||
      comp_has_active_child(p, env)) {
    rule("exS3");
    return false;
  }
  env.set_inactive(p);
  rule("exS1");
  return true;
}

bool Interpreter::exit_comp(const Path& p, const Event& e, DynEnv& env) {
  burn();
  const auto& comp = comp_lookup(chart_, p);
  if (const auto* o = std::get_if<OrComp>(&comp)) {
    Path active = env.status.at(p).active_substate;
    if (active.empty()) return true;
    if (!exit_state(active, e, env)) return false;
    env.clear_active_substate(p);
    if (o->has_history) env.record_history(p, active);
    rule("exO");
    return true;
  }
  if (const auto* a = std::get_if<AndComp>(&comp)) {
    for (auto it = a->order.rbegin(); it != a->order.rend(); ++it)
      if (!exit_state(p.child(*it), e, env)) return false;
    for (std::size_t i = 0; i < a->order.size(); ++i) rule("exSL");
    // isActive of p itself is left to the enclosing exit_state.
    env.clear_active_substate(p);
    if (!env.status.at(p).history.empty()) env.record_history(p, Path{});
    rule("exA");
  }
  return true;
}

bool Interpreter::enter_state(const Path& h, const Path& p, const Event& e,
                              DynEnv& env) {
  burn();
  const bool parallel = is_parallel_child(chart_, p);
  // A broadcast earlier in this entry already put p, or an Or-sibling, back
  // in the configuration. The pending entry is stale: early return.
  if (env.is_active(p) ||
      (!parallel && p.size() > 1 && comp_has_active_child(p.parent(), env)))
    return false;
  env.reset_counters(p);
  env.set_active(p, parallel ? ParentLink::kParallel : ParentLink::kExclusive);
  if (!exec_action(p, e, state_lookup(chart_, p).entry, env)) return false;
  bool b = enter_comp(h.empty() ? h : h.tail(), p, e, env);
  rule("enS");
  return b;
}

bool Interpreter::enter_comp(const Path& h, const Path& p, const Event& e,
                             DynEnv& env) {
  burn();
  const auto& comp = comp_lookup(chart_, p);
  if (const auto* o = std::get_if<OrComp>(&comp)) {
    if (!h.empty()) {
      bool b = enter_state(h, p.child(h.head()), e, env);
      rule("enO1");
      return b;
    }
    if (o->has_history) {
      Path recorded = env.status.at(p).history;
      if (!recorded.empty()) {
        bool b = enter_state(Path{}, recorded, e, env);
        rule("enO2");
        return b;
      }
    }
    auto r = exec_transition_list(p, e, o->defaults, env);
    if (!r.cont) return false;
    if (r.vt != Verdict::kState)
      throw SemanticError("no default path in '" + p.str() + "'");
    for (const Action* act : r.trans_actions)
      if (!exec_action(p, e, *act, env)) return false;
    const Path& ts = *r.target;
    if (ts.size() <= p.size() || !p.is_prefix_of(ts))
      throw SemanticError("default transition of '" + p.str() +
                          "' leaves its composition");
    Path rel = path_diff(ts, p);
    bool b = enter_state(rel, p.child(rel.head()), e, env);
    rule("enO3");
    return b;
  }
  if (const auto* a = std::get_if<AndComp>(&comp)) {
    for (const auto& name : a->order) {
      Path sub = (!h.empty() && h.head() == name) ? h : Path{};
      if (!enter_state(sub, p.child(name), e, env)) return false;
    }
    for (std::size_t i = 0; i < a->order.size(); ++i) rule("enSL");
    rule("enA");
  }
  return true;
}

bool Interpreter::enter_chart(DynEnv& env) {
  const Path& root = Chart::root_path();
  env.set_active(root);
  return enter_comp(Path{}, root, Event{}, env);
}

// ---------------------------------------------------------------------------
// Running

bool Interpreter::take_transition(const Path& p, const TransListResult& r,
                                  bool inner, const Event& e, DynEnv& env) {
  const Path& ts = *r.target;
  Path scope;
  Path h;
  if (!inner && p == ts && ts == r.hp) {
    scope = p.parent();
    h = Path{p.last()};
  } else {
    scope = lca({p, r.hp});
    if (!scope.is_prefix_of(ts))
      throw SemanticError("transition target '" + ts.str() +
                          "' lies outside '" + scope.str() + "'");
    h = path_diff(ts, scope);
  }
  if (!exit_comp(scope, e, env)) return false;
  for (const Action* act : r.trans_actions)
    if (!exec_action(p, e, *act, env)) return false;
  return enter_comp(h, scope, e, env);
}

bool Interpreter::run_state(bool is_broadcast, const Path& p, const Event& e,
                            DynEnv& env) {
  burn();
  if (!e.empty()) env.incr_event_count(p, e);
  if (!is_broadcast) env.incr_time(p);
  const StateDef& sd = state_lookup(chart_, p);
  const bool stop_on_terminal = !options_.strict_terminal_junction;

  auto outer = exec_transition_list(p, e, sd.outer, env);
  if (!outer.cont) return false;
  if (outer.vt == Verdict::kState) {
    bool b = take_transition(p, outer, false, e, env);
    rule("runS");
    return b;
  }
  if (stop_on_terminal && outer.vt == Verdict::kTerminal && !sd.outer.empty()) {
    rule("runTJ");
    return true;
  }

  if (!exec_action(p, e, sd.during, env)) return false;
  auto in = exec_transition_list(p, e, sd.inner, env);
  if (!in.cont) return false;
  if (in.vt == Verdict::kState) {
    bool b = take_transition(p, in, true, e, env);
    rule("runS2");
    return b;
  }
  if (stop_on_terminal && in.vt == Verdict::kTerminal && !sd.inner.empty()) {
    rule("runTJ");
    return true;
  }

  bool b = run_comp(is_broadcast, p, e, env);
  rule("runS3");
  return b;
}

bool Interpreter::run_comp(bool is_broadcast, const Path& p, const Event& e,
                           DynEnv& env) {
  burn();
  const auto& comp = comp_lookup(chart_, p);
  if (std::holds_alternative<OrComp>(comp)) {
    Path active = env.status.at(p).active_substate;
    if (active.empty()) return true;
    bool b = run_state(is_broadcast, active, e, env);
    rule("runO");
    return b;
  }
  if (const auto* a = std::get_if<AndComp>(&comp)) {
    std::size_t ran = 0;
    for (const auto& name : a->order) {
      Path sub = p.child(name);
      // A sibling's transition may have left the composition altogether.
      if (!env.is_active(sub)) break;
      if (!run_state(is_broadcast, sub, e, env)) return false;
      ++ran;
    }
    for (std::size_t i = 0; i < ran; ++i) rule("runSL");
    rule("runA");
  }
  return true;
}

// ---------------------------------------------------------------------------
// Rounds

std::vector<std::string> Trace::print_stream() const {
  std::vector<std::string> out;
  if (initialization)
    out.insert(out.end(), initialization->prints.begin(),
               initialization->prints.end());
  for (const auto& r : rounds)
    out.insert(out.end(), r.prints.begin(), r.prints.end());
  return out;
}

namespace {

// Deep charts and long junction chains recurse deeply; run on a thread whose
// stack is large enough that the fuel budget, not the stack, is the limit.
constexpr std::size_t kExecStackBytes = std::size_t{1} << 30;

template <class F>
void run_with_big_stack(F& f) {
  struct Ctx {
    F* fn;
    std::exception_ptr error;
  } ctx{&f, nullptr};
  auto entry = [](void* raw) -> void* {
    auto* c = static_cast<Ctx*>(raw);
    try {
      (*c->fn)();
    } catch (...) {
      c->error = std::current_exception();
    }
    return nullptr;
  };
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, kExecStackBytes);
  pthread_t thread;
  int rc = pthread_create(&thread, &attr, entry, &ctx);
  pthread_attr_destroy(&attr);
  if (rc != 0) {
    f();  // fall back to the caller's stack
    return;
  }
  pthread_join(thread, nullptr);
  if (ctx.error) std::rethrow_exception(ctx.error);
}

RoundRecord snapshot(std::size_t index, std::optional<std::string> event,
                     const DynEnv& env, std::size_t print_mark,
                     const std::map<std::string, Value>& vars_before,
                     bool with_vars) {
  RoundRecord r;
  r.index = index;
  r.input_event = std::move(event);
  r.prints.assign(env.print_log.begin() + static_cast<long>(print_mark),
                  env.print_log.end());
  r.active = env.status.active_paths();
  for (const auto& [name, value] : env.v.vars) {
    auto it = vars_before.find(name);
    if (it == vars_before.end() || !(it->second == value))
      r.vars_delta.emplace(name, value);
  }
  if (with_vars) r.vars = env.v.vars;
  return r;
}

}  // namespace

RunResult run_chart(const Chart& chart, DynEnv env,
                    std::span<const std::optional<std::string>> events,
                    const ExecOptions& options) {
  RunResult out;
  out.trace.chart = chart.name;
  Interpreter interp(chart, options);
  std::size_t round = 0;

  auto body = [&] {
    const Path& root = Chart::root_path();
    if (!env.is_active(root)) {
      auto before = env.v.vars;
      std::size_t mark = env.print_log.size();
      interp.refuel();
      bool b = interp.enter_chart(env);
      auto rec = snapshot(0, std::nullopt, env, mark, before,
                          options.snapshot_vars);
      rec.early_return = !b;
      out.trace.initialization = std::move(rec);
      if (options.after_round) options.after_round(0, env);
    }
    for (const auto& ev : events) {
      ++round;
      auto before = env.v.vars;
      std::size_t mark = env.print_log.size();
      interp.refuel();
      bool b = interp.run_comp(false, root, ev.value_or(Event{}), env);
      if (!b && options.reject_early_return_round)
        throw SemanticError("round ended with an early return");
      if (options.on_rule) options.on_rule("Chart");
      auto rec = snapshot(round, ev, env, mark, before, options.snapshot_vars);
      rec.early_return = !b;
      out.trace.rounds.push_back(std::move(rec));
      if (options.after_round) options.after_round(round, env);
    }
  };

  try {
    run_with_big_stack(body);
  } catch (const BudgetError& e) {
    out.trace.status = RunStatus::kBudgetExhausted;
    out.trace.error_kind = "budget";
    out.trace.error = e.what();
    out.trace.error_round = round;
  } catch (const Error& e) {
    out.trace.status = RunStatus::kSemanticError;
    if (dynamic_cast<const EvalError*>(&e))
      out.trace.error_kind = "eval";
    else if (dynamic_cast<const LookupError*>(&e))
      out.trace.error_kind = "lookup";
    else
      out.trace.error_kind = "semantic";
    out.trace.error = e.what();
    out.trace.error_round = round;
  }
  out.env = std::move(env);
  return out;
}

}  // namespace sfsem
