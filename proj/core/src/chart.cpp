#include "sfsem/chart.hpp"

#include <algorithm>

namespace sfsem {

Action sequence(std::vector<Action> actions) {
  if (actions.empty()) return skip();
  Action acc = std::move(actions.back());
  for (auto it = actions.rbegin() + 1; it != actions.rend(); ++it)
    acc = Action{Seq{std::move(*it), std::move(acc)}};
  return acc;
}

const std::vector<std::string>& substate_names(const Composition& comp) {
  static const std::vector<std::string> kNone;
  if (const auto* o = std::get_if<OrComp>(&comp)) return o->substates;
  if (const auto* a = std::get_if<AndComp>(&comp)) return a->order;
  return kNone;
}

const Path& Chart::root_path() {
  static const Path kRoot{"root"};
  return kRoot;
}

bool Chart::is_state(const Path& p) const { return states.contains(p); }

bool Chart::is_junction(const Path& p) const {
  return junctions.contains(p) || is_history_junction(p);
}

bool Chart::is_history_junction(const Path& p) const {
  return p.is_junction() && p.last() == kHistoryJunction &&
         history_owners.contains(p.parent());
}

bool Chart::is_message(std::string_view name) const {
  return std::find(messages.begin(), messages.end(), name) != messages.end();
}

bool Chart::is_event(std::string_view name) const {
  return std::find(input_events.begin(), input_events.end(), name) !=
             input_events.end() ||
         std::find(local_events.begin(), local_events.end(), name) !=
             local_events.end();
}

const std::vector<Transition>& Chart::junction_transitions(
    const Path& junction) const {
  auto it = junctions.find(junction);
  if (it == junctions.end())
    throw LookupError("no junction at '" + junction.str() + "'");
  return it->second;
}

const StateDef& state_lookup(const Chart& chart, const Path& p) {
  auto it = chart.states.find(p);
  if (it == chart.states.end())
    throw LookupError("no state at '" + p.str() + "'");
  return it->second;
}

const Composition& comp_lookup(const Chart& chart, const Path& p) {
  if (p.empty()) return state_lookup(chart, Chart::root_path()).comp;
  return state_lookup(chart, p).comp;
}

void add_state_tree(Chart& chart, const Path& path, StateSpec spec) {
  StateDef def;
  def.path = path;
  def.entry = std::move(spec.entry);
  def.during = std::move(spec.during);
  def.exit = std::move(spec.exit);
  def.inner = std::move(spec.inner);
  def.outer = std::move(spec.outer);
  def.comp = std::move(spec.comp);
  if (auto* o = std::get_if<OrComp>(&def.comp)) {
    o->substates.clear();
    for (const auto& [name, _] : spec.children) o->substates.push_back(name);
    if (o->has_history) chart.history_owners.insert(path);
  }
  chart.states.insert_or_assign(path, std::move(def));
  for (auto& [name, child] : spec.children)
    add_state_tree(chart, path.child(name), std::move(child));
}

// ---------------------------------------------------------------------------
// Validation

namespace {

class Validator {
 public:
  explicit Validator(const Chart& chart) : chart_(chart) {}

  std::vector<Diagnostic> run() {
    check_declarations();
    if (!chart_.is_state(Chart::root_path()))
      report("missing-root", "chart has no root state");
    for (const auto& [key, def] : chart_.states) check_state(key, def);
    for (const auto& [key, list] : chart_.junctions) check_junction(key, list);
    for (const auto& owner : chart_.history_owners) {
      auto it = chart_.states.find(owner);
      const auto* o = it == chart_.states.end()
                          ? nullptr
                          : std::get_if<OrComp>(&it->second.comp);
      if (!o || !o->has_history)
        report("history-owner", "'" + owner.str() +
                                    "' is listed as a history owner but has "
                                    "no Or-composition with history");
    }
    for (const auto& [name, fn] : chart_.functions) {
      context_ = "function " + name;
      check_action(fn.body);
    }
    for (const auto& [name, gf] : chart_.graphical_functions) {
      context_ = "graphical function " + name;
      function_scope_ = name;
      if (!gf.initial.source.empty())
        report("default-source",
               context_ + ": initial transition must have no source");
      check_transition(gf.initial);
    }
    return std::move(diags_);
  }

 private:
  void report(std::string code, std::string message) {
    diags_.push_back({std::move(code), std::move(message)});
  }

  void check_declarations() {
    std::set<std::string> seen;
    auto note = [&](const std::string& name, const char* what) {
      if (name.empty()) report("bad-name", std::string("empty ") + what);
      if (!seen.insert(name).second)
        report("duplicate-name", std::string(what) + " '" + name +
                                     "' is declared more than once");
    };
    for (const auto& e : chart_.input_events) note(e, "event");
    for (const auto& e : chart_.local_events) note(e, "event");
    for (const auto& m : chart_.messages) note(m, "message");
    for (const auto& [v, _] : chart_.variables)
      if (seen.contains(v))
        report("duplicate-name",
               "variable '" + v + "' shadows an event or message");
  }

  void check_state(const Path& key, const StateDef& def) {
    context_ = "state " + key.str();
    function_scope_.clear();
    if (auto err = check_path_syntax(key); !err.empty())
      report("bad-path", err);
    if (key.is_junction()) report("bad-path", context_ + " is a junction path");
    if (def.path != key)
      report("path-mismatch", context_ + " records path '" + def.path.str() +
                                  "'");
    if (key != Chart::root_path()) {
      if (key.size() < 2 || !chart_.is_state(key.parent()))
        report("unresolved-path", context_ + " has no parent state");
    } else if (!def.outer.empty() || !def.inner.empty()) {
      report("root-transition", "the root state cannot own transitions");
    }

    std::vector<std::string> children;
    for (auto it = chart_.states.upper_bound(key);
         it != chart_.states.end() && key.is_prefix_of(it->first); ++it)
      if (it->first.size() == key.size() + 1)
        children.push_back(it->first.last());

    std::visit(
        [&](const auto& comp) {
          using T = std::decay_t<decltype(comp)>;
          if constexpr (std::is_same_v<T, LeafComp>) {
            if (!children.empty())
              report("order-mismatch",
                     context_ + " is a leaf but has substates");
          } else {
            std::vector<std::string> sorted;
            if constexpr (std::is_same_v<T, OrComp>)
              sorted = comp.substates;
            else
              sorted = comp.order;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) !=
                sorted.end())
              report("duplicate-name",
                     context_ + " lists a substate more than once");
            sorted.erase(std::unique(sorted.begin(), sorted.end()),
                         sorted.end());
            if (sorted != children)
              report("order-mismatch",
                     context_ + ": order/substates mismatch");
            if constexpr (std::is_same_v<T, OrComp>) {
              if (comp.has_history != chart_.history_owners.contains(key))
                report("history-owner",
                       context_ + ": history flag disagrees with chart");
              if (!children.empty() && comp.defaults.empty())
                report("no-default",
                       context_ + " has substates but no default transition");
              for (const auto& t : comp.defaults) {
                if (!t.source.empty() && !chart_.is_junction(t.source))
                  report("default-source",
                         context_ + ": default transition with a state "
                                    "source '" +
                             t.source.str() + "'");
                if (!t.dest.is_junction() &&
                    !(key.is_prefix_of(t.dest) && t.dest.size() > key.size()))
                  report("default-scope",
                         context_ + ": default transition leaves the state ('" +
                             t.dest.str() + "')");
                check_transition(t);
              }
            }
          }
        },
        def.comp);

    check_action(def.entry);
    check_action(def.during);
    check_action(def.exit);
    for (const auto* list : {&def.outer, &def.inner}) {
      for (const auto& t : *list) {
        if (t.source != key)
          report("transition-source",
                 context_ + ": transition source '" + t.source.str() +
                     "' is not the owning state");
        check_transition(t);
      }
    }
  }

  void check_junction(const Path& key, const std::vector<Transition>& list) {
    context_ = "junction " + key.str();
    if (auto err = check_path_syntax(key); !err.empty())
      report("bad-path", err);
    if (!key.is_junction()) {
      report("bad-path", context_ + " does not end in a junction name");
      return;
    }
    if (key.last() == kHistoryJunction)
      report("bad-path", context_ + " uses the reserved history name");
    Path owner = key.parent();
    function_scope_ = chart_.is_state(owner) ? std::string() : owner.head();
    bool owned = chart_.is_state(owner) ||
                 (owner.size() == 1 &&
                  chart_.graphical_functions.contains(owner.head()));
    if (!owned)
      report("unresolved-path",
             context_ + " is not inside a state or graphical function");
    for (const auto& t : list) {
      if (t.source != key)
        report("transition-source", context_ + ": transition source '" +
                                        t.source.str() +
                                        "' is not the junction");
      check_transition(t);
    }
  }

  void check_transition(const Transition& t) {
    if (!t.source.empty() && !chart_.is_state(t.source) &&
        !chart_.is_junction(t.source))
      report("unresolved-path",
             context_ + ": unresolved path '" + t.source.str() + "'");
    if (t.dest.empty() ||
        (!chart_.is_state(t.dest) && !chart_.is_junction(t.dest)))
      report("unresolved-path",
             context_ + ": unresolved path '" + t.dest.str() + "'");
    bool dest_in_function = t.dest.is_junction() && t.dest.size() == 2 &&
                            chart_.graphical_functions.contains(t.dest.head());
    bool scope_ok = function_scope_.empty()
                        ? !dest_in_function
                        : dest_in_function && t.dest.head() == function_scope_;
    if (!t.dest.empty() && !scope_ok)
      report("scope", context_ + ": '" + t.dest.str() +
                          "' is not reachable from here");
    if (!t.guard.empty() && !chart_.is_event(t.guard) &&
        !chart_.is_message(t.guard))
      report("undeclared-event",
             context_ + ": guard '" + t.guard + "' is not declared");
    check_cond(t.cond);
    check_action(t.cond_action);
    check_action(t.trans_action);
  }

  void check_event_name(const std::string& name, bool allow_time) {
    if (allow_time && is_time_unit(name)) return;
    if (!chart_.is_event(name) && !chart_.is_message(name))
      report("undeclared-event",
             context_ + ": event '" + name + "' is not declared");
  }

  void check_variable(const std::string& name) {
    if (!chart_.variables.contains(name) && !chart_.is_message(name))
      report("undeclared-variable",
             context_ + ": variable '" + name + "' is not declared");
  }

  void check_expr(const Expr& e) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, VarRef>) {
            check_variable(n.name);
          } else if constexpr (std::is_same_v<T, MessageField>) {
            if (!chart_.is_message(n.message))
              report("undeclared-message",
                     context_ + ": message '" + n.message +
                         "' is not declared");
            if (n.field != "data")
              report("bad-field", context_ + ": messages only carry 'data'");
          } else if constexpr (std::is_same_v<T, TempCount>) {
            check_event_name(n.event, true);
          } else if constexpr (std::is_same_v<T, BinaryExpr>) {
            check_expr(*n.lhs);
            check_expr(*n.rhs);
          }
        },
        e.node);
  }

  void check_temporal(const TemporalCond& tc) {
    check_expr(*tc.threshold);
    check_event_name(tc.event, true);
    if (const auto* lit = std::get_if<NumberLit>(&tc.threshold->node)) {
      if (lit->value < 0)
        report("bad-threshold", context_ + ": negative temporal threshold");
    }
  }

  void check_cond(const Cond& c) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Relation>) {
            check_expr(*n.lhs);
            check_expr(*n.rhs);
          } else if constexpr (std::is_same_v<T, Conj> ||
                               std::is_same_v<T, Disj>) {
            check_cond(*n.lhs);
            check_cond(*n.rhs);
          } else if constexpr (std::is_same_v<T, Neg>) {
            check_cond(*n.operand);
          } else if constexpr (std::is_same_v<T, TemporalCond>) {
            check_temporal(n);
          }
        },
        c.node);
  }

  void check_action(const Action& a) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Assign>) {
            check_variable(n.var);
            check_expr(n.value);
          } else if constexpr (std::is_same_v<T, Send>) {
            if (!chart_.is_event(n.event))
              report("undeclared-event",
                     context_ + ": event '" + n.event + "' is not declared");
            if (n.target && !chart_.is_state(*n.target))
              report("unresolved-path", context_ + ": unresolved path '" +
                                            n.target->str() + "'");
          } else if constexpr (std::is_same_v<T, SendMessage>) {
            if (!chart_.is_message(n.message))
              report("undeclared-message",
                     context_ + ": message '" + n.message +
                         "' is not declared");
            check_expr(n.data);
          } else if constexpr (std::is_same_v<T, OnTemporal>) {
            check_temporal(n.cond);
            check_action(*n.body);
          } else if constexpr (std::is_same_v<T, OnEvent>) {
            check_event_name(n.event, false);
            check_action(*n.body);
          } else if constexpr (std::is_same_v<T, FunctionCall>) {
            check_call(n);
          } else if constexpr (std::is_same_v<T, Print>) {
            check_expr(n.value);
          } else if constexpr (std::is_same_v<T, Seq>) {
            check_action(*n.first);
            check_action(*n.second);
          }
        },
        a.node);
  }

  void check_call(const FunctionCall& call) {
    const std::vector<std::string>* inputs = nullptr;
    const std::vector<std::string>* outputs = nullptr;
    if (call.graphical) {
      if (auto it = chart_.graphical_functions.find(call.function);
          it != chart_.graphical_functions.end()) {
        inputs = &it->second.inputs;
        outputs = &it->second.outputs;
      }
    } else if (auto it = chart_.functions.find(call.function);
               it != chart_.functions.end()) {
      inputs = &it->second.inputs;
      outputs = &it->second.outputs;
    }
    if (!inputs) {
      report("unresolved-function",
             context_ + ": no function named '" + call.function + "'");
    } else if (inputs->size() != call.args.size() ||
               outputs->size() != call.outputs.size()) {
      report("arity-mismatch",
             context_ + ": call to '" + call.function + "' passes " +
                 std::to_string(call.args.size()) + " inputs and " +
                 std::to_string(call.outputs.size()) + " outputs, expected " +
                 std::to_string(inputs->size()) + " and " +
                 std::to_string(outputs->size()));
    }
    for (const auto& out : call.outputs) check_variable(out);
    for (const auto& arg : call.args) check_expr(arg);
  }

  const Chart& chart_;
  std::string context_;
  std::string function_scope_;  // graphical function being checked
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> validate_chart(const Chart& chart) {
  return Validator(chart).run();
}

}  // namespace sfsem
