#include "sfsem/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace sfsem {

using json = nlohmann::ordered_json;  // charts keep file order
using sorted_json = nlohmann::json;   // traces are canonical

namespace {

[[noreturn]] void schema_error(const std::string& where,
                               const std::string& what) {
  std::string msg = (where.empty() ? std::string("document") : where) + ": " +
                    what;
  throw LoadError(msg, {Diagnostic{"schema", msg}});
}

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // Turn the byte offset into a line/column pair.
    std::size_t line = 1, col = 1;
    std::size_t limit = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1,
                                              text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = std::string("malformed ") + what + " JSON at line " +
                      std::to_string(line) + ", column " +
                      std::to_string(col) + ": " + e.what();
    throw LoadError(msg, {Diagnostic{"parse", msg}});
  }
}

std::string at_key(const std::string& where, std::string_view key) {
  return where.empty() ? std::string(key) : where + "." + std::string(key);
}
std::string at_index(const std::string& where, std::size_t i) {
  return where + "[" + std::to_string(i) + "]";
}

const json& require(const json& obj, const char* key,
                    const std::string& where) {
  if (!obj.is_object()) schema_error(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(where, std::string("missing ") + key);
  return *it;
}

const json* optional_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) schema_error(where, "expected a string");
  return j.get<std::string>();
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) schema_error(where, "expected a number");
  return j.get<double>();
}

bool get_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) schema_error(where, "expected true or false");
  return j.get<bool>();
}

std::vector<std::string> get_names(const json& j, const std::string& where) {
  if (!j.is_array()) schema_error(where, "expected an array of names");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(get_string(j[i], at_index(where, i)));
  return out;
}

Path get_path(const json& j, const std::string& where) {
  Path p = Path::Parse(get_string(j, where));
  if (p.empty()) schema_error(where, "empty path");
  return p;
}

Value get_value(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  schema_error(where, "expected a number or a string");
}

// ---------------------------------------------------------------------------
// Reading

Expr read_expr(const json& j, const std::string& where);
Cond read_cond(const json& j, const std::string& where);
Action read_action(const json& j, const std::string& where, bool in_trans);

ArithOp read_arith(const std::string& op, const std::string& where) {
  if (op == "+") return ArithOp::kAdd;
  if (op == "-") return ArithOp::kSub;
  if (op == "*") return ArithOp::kMul;
  if (op == "/") return ArithOp::kDiv;
  schema_error(where, "unknown arithmetic operator '" + op + "'");
}

Expr read_expr(const json& j, const std::string& where) {
  if (j.is_number()) return num(j.get<double>());
  if (j.is_string()) return var(j.get<std::string>());
  if (!j.is_object()) schema_error(where, "expected an expression");
  if (const auto* v = optional_field(j, "var"))
    return var(get_string(*v, at_key(where, "var")));
  if (const auto* s = optional_field(j, "str"))
    return Expr{StringLit{get_string(*s, at_key(where, "str"))}};
  if (const auto* m = optional_field(j, "msg")) {
    std::string field = "data";
    if (const auto* f = optional_field(j, "field"))
      field = get_string(*f, at_key(where, "field"));
    return Expr{MessageField{get_string(*m, at_key(where, "msg")), field}};
  }
  if (const auto* t = optional_field(j, "tempCount"))
    return Expr{TempCount{get_string(*t, at_key(where, "tempCount"))}};
  if (const auto* op = optional_field(j, "op"))
    return binary(read_arith(get_string(*op, at_key(where, "op")), where),
                  read_expr(require(j, "lhs", where), at_key(where, "lhs")),
                  read_expr(require(j, "rhs", where), at_key(where, "rhs")));
  schema_error(where, "unrecognised expression");
}

RelOp read_rel(const std::string& op, const std::string& where) {
  if (op == ">") return RelOp::kGt;
  if (op == "==" || op == "=") return RelOp::kEq;
  if (op == "<") return RelOp::kLt;
  if (op == ">=") return RelOp::kGe;
  if (op == "<=") return RelOp::kLe;
  if (op == "!=") return RelOp::kNe;
  schema_error(where, "unknown relation '" + op + "'");
}

TemporalCond read_temporal(const json& j, const std::string& where) {
  TemporalCond tc;
  std::string kind = get_string(require(j, "temporal", where),
                                at_key(where, "temporal"));
  if (kind == "after") tc.kind = TemporalKind::kAfter;
  else if (kind == "before") tc.kind = TemporalKind::kBefore;
  else if (kind == "at") tc.kind = TemporalKind::kAt;
  else if (kind == "every") tc.kind = TemporalKind::kEvery;
  else schema_error(at_key(where, "temporal"), "unknown operator '" + kind + "'");
  tc.threshold = read_expr(require(j, "n", where), at_key(where, "n"));
  tc.event = get_string(require(j, "event", where), at_key(where, "event"));
  return tc;
}

Cond fold_cond(const json& list, const std::string& where, bool conj) {
  if (!list.is_array()) schema_error(where, "expected an array");
  if (list.empty())
    return conj ? Cond{TrueCond{}} : Cond{Neg{Cond{TrueCond{}}}};
  Cond acc = read_cond(list.back(), at_index(where, list.size() - 1));
  for (std::size_t i = list.size() - 1; i-- > 0;) {
    Cond lhs = read_cond(list[i], at_index(where, i));
    acc = conj ? Cond{Conj{std::move(lhs), std::move(acc)}}
               : Cond{Disj{std::move(lhs), std::move(acc)}};
  }
  return acc;
}

Cond read_cond(const json& j, const std::string& where) {
  if (j.is_boolean())
    return j.get<bool>() ? Cond{TrueCond{}} : Cond{Neg{Cond{TrueCond{}}}};
  if (!j.is_object()) schema_error(where, "expected a condition");
  if (const auto* r = optional_field(j, "rel"))
    return Cond{Relation{
        read_expr(require(j, "lhs", where), at_key(where, "lhs")),
        read_rel(get_string(*r, at_key(where, "rel")), where),
        read_expr(require(j, "rhs", where), at_key(where, "rhs"))}};
  if (const auto* a = optional_field(j, "and"))
    return fold_cond(*a, at_key(where, "and"), true);
  if (const auto* o = optional_field(j, "or"))
    return fold_cond(*o, at_key(where, "or"), false);
  if (const auto* n = optional_field(j, "not"))
    return Cond{Neg{read_cond(*n, at_key(where, "not"))}};
  if (j.contains("temporal")) return Cond{read_temporal(j, where)};
  schema_error(where, "unrecognised condition");
}

Action read_action(const json& j, const std::string& where, bool in_trans) {
  if (j.is_null()) return skip();
  if (j.is_string() && j.get<std::string>() == "skip") return skip();
  if (j.is_array()) {
    std::vector<Action> parts;
    for (std::size_t i = 0; i < j.size(); ++i)
      parts.push_back(read_action(j[i], at_index(where, i), in_trans));
    return sequence(std::move(parts));
  }
  if (!j.is_object()) schema_error(where, "expected an action");
  std::string op = get_string(require(j, "op", where), at_key(where, "op"));
  auto field = [&](const char* key) -> const json& {
    return require(j, key, where);
  };
  auto sub = [&](const char* key) { return at_key(where, key); };

  if (op == "skip") return skip();
  if (op == "assign")
    return Action{Assign{get_string(field("var"), sub("var")),
                         read_expr(field("value"), sub("value"))}};
  if (op == "send") {
    Send s;
    s.event = get_string(field("event"), sub("event"));
    s.in_transition_action = in_trans;
    if (const auto* f = optional_field(j, "inTransitionAction"))
      s.in_transition_action = get_bool(*f, sub("inTransitionAction"));
    if (const auto* t = optional_field(j, "target"))
      s.target = get_path(*t, sub("target"));
    return Action{std::move(s)};
  }
  if (op == "sendMessage")
    return Action{SendMessage{get_string(field("message"), sub("message")),
                              read_expr(field("data"), sub("data"))}};
  if (op == "onTemporal")
    return Action{OnTemporal{read_temporal(field("cond"), sub("cond")),
                             read_action(field("body"), sub("body"), in_trans)}};
  if (op == "onEvent")
    return Action{OnEvent{get_string(field("event"), sub("event")),
                          read_action(field("body"), sub("body"), in_trans)}};
  if (op == "call" || op == "callGraphical") {
    FunctionCall call;
    call.graphical = op == "callGraphical";
    call.function = get_string(field("function"), sub("function"));
    if (const auto* o = optional_field(j, "outputs"))
      call.outputs = get_names(*o, sub("outputs"));
    if (const auto* a = optional_field(j, "args")) {
      if (!a->is_array()) schema_error(sub("args"), "expected an array");
      for (std::size_t i = 0; i < a->size(); ++i)
        call.args.push_back(read_expr((*a)[i], at_index(sub("args"), i)));
    }
    return Action{std::move(call)};
  }
  if (op == "print") {
    if (const auto* t = optional_field(j, "text"))
      return print(get_string(*t, sub("text")));
    return Action{Print{read_expr(field("value"), sub("value"))}};
  }
  if (op == "seq") {
    const json& list = field("actions");
    if (!list.is_array()) schema_error(sub("actions"), "expected an array");
    return read_action(list, sub("actions"), in_trans);
  }
  schema_error(sub("op"), "unknown action '" + op + "'");
}

Transition read_transition(const json& j, const std::string& where,
                           const Path& default_source) {
  if (!j.is_object()) schema_error(where, "expected a transition");
  Transition t;
  t.source = default_source;
  if (const auto* s = optional_field(j, "source"))
    t.source = Path::Parse(get_string(*s, at_key(where, "source")));
  if (const auto* e = optional_field(j, "event"))
    t.guard = get_string(*e, at_key(where, "event"));
  if (const auto* c = optional_field(j, "cond"))
    t.cond = read_cond(*c, at_key(where, "cond"));
  if (const auto* a = optional_field(j, "condAction"))
    t.cond_action = read_action(*a, at_key(where, "condAction"), false);
  if (const auto* a = optional_field(j, "transAction"))
    t.trans_action = read_action(*a, at_key(where, "transAction"), true);
  t.dest = get_path(require(j, "dest", where), at_key(where, "dest"));
  return t;
}

std::vector<Transition> read_transitions(const json& j,
                                         const std::string& where,
                                         const Path& default_source) {
  if (!j.is_array()) schema_error(where, "expected an array of transitions");
  std::vector<Transition> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(read_transition(j[i], at_index(where, i), default_source));
  return out;
}

void read_state(Chart& chart, const Path& path, const json& j,
                const std::string& where);

Composition read_comp(Chart& chart, const Path& owner, const json& j,
                      const std::string& where) {
  if (!j.is_object()) schema_error(where, "expected a composition");
  std::string kind = "leaf";
  if (const auto* k = optional_field(j, "kind"))
    kind = get_string(*k, at_key(where, "kind"));
  const json* subs = optional_field(j, "substates");
  if (subs && !subs->is_object())
    schema_error(at_key(where, "substates"), "expected an object");

  Composition comp;
  if (kind == "leaf") {
    if (subs && !subs->empty())
      schema_error(where, "a leaf composition has no substates");
    comp = LeafComp{};
  } else if (kind == "or") {
    OrComp o;
    if (const auto* d = optional_field(j, "defaults"))
      o.defaults = read_transitions(*d, at_key(where, "defaults"), Path{});
    if (const auto* h = optional_field(j, "history"))
      o.has_history = get_bool(*h, at_key(where, "history"));
    if (subs)
      for (const auto& [name, _] : subs->items()) o.substates.push_back(name);
    if (o.has_history) chart.history_owners.insert(owner);
    comp = std::move(o);
  } else if (kind == "and") {
    comp = AndComp{
        get_names(require(j, "order", where), at_key(where, "order"))};
  } else {
    schema_error(at_key(where, "kind"), "unknown composition '" + kind + "'");
  }
  if (subs)
    for (const auto& [name, def] : subs->items())
      read_state(chart, owner.child(name), def,
                 at_key(at_key(where, "substates"), name));
  return comp;
}

void read_state(Chart& chart, const Path& path, const json& j,
                const std::string& where) {
  if (!j.is_object()) schema_error(where, "expected a state");
  if (chart.states.contains(path))
    schema_error(where, "duplicate state '" + path.str() + "'");
  StateDef def;
  def.path = path;
  if (const auto* a = optional_field(j, "entry"))
    def.entry = read_action(*a, at_key(where, "entry"), false);
  if (const auto* a = optional_field(j, "during"))
    def.during = read_action(*a, at_key(where, "during"), false);
  if (const auto* a = optional_field(j, "exit"))
    def.exit = read_action(*a, at_key(where, "exit"), false);
  if (const auto* t = optional_field(j, "inner"))
    def.inner = read_transitions(*t, at_key(where, "inner"), path);
  if (const auto* t = optional_field(j, "outer"))
    def.outer = read_transitions(*t, at_key(where, "outer"), path);
  // Reserve the slot before recursing so children see the parent.
  chart.states.emplace(path, StateDef{});
  if (const auto* c = optional_field(j, "comp"))
    def.comp = read_comp(chart, path, *c, at_key(where, "comp"));
  chart.states[path] = std::move(def);
}

// ---------------------------------------------------------------------------
// Writing

template <class J = json>
J number_json(double d) {
  if (std::isfinite(d) && std::trunc(d) == d && std::fabs(d) < 9.0e15)
    return static_cast<std::int64_t>(d);
  if (!std::isfinite(d)) return format_number(d);
  return d;
}

template <class J = json>
J value_json(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return number_json<J>(*d);
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return J{{"data", number_json<J>(std::get<MessageRecord>(v).data)}};
}

const char* arith_token(ArithOp op) {
  switch (op) {
    case ArithOp::kAdd: return "+";
    case ArithOp::kSub: return "-";
    case ArithOp::kMul: return "*";
    case ArithOp::kDiv: return "/";
  }
  return "?";
}

const char* rel_token(RelOp op) {
  switch (op) {
    case RelOp::kGt: return ">";
    case RelOp::kEq: return "==";
    case RelOp::kLt: return "<";
    case RelOp::kGe: return ">=";
    case RelOp::kLe: return "<=";
    case RelOp::kNe: return "!=";
  }
  return "?";
}

const char* temporal_token(TemporalKind k) {
  switch (k) {
    case TemporalKind::kAfter: return "after";
    case TemporalKind::kBefore: return "before";
    case TemporalKind::kAt: return "at";
    case TemporalKind::kEvery: return "every";
  }
  return "?";
}

json expr_json(const Expr& e) {
  return std::visit(
      [](const auto& n) -> json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, NumberLit>) return number_json(n.value);
        else if constexpr (std::is_same_v<T, StringLit>) return {{"str", n.value}};
        else if constexpr (std::is_same_v<T, VarRef>) return {{"var", n.name}};
        else if constexpr (std::is_same_v<T, MessageField>)
          return {{"msg", n.message}, {"field", n.field}};
        else if constexpr (std::is_same_v<T, TempCount>)
          return {{"tempCount", n.event}};
        else
          return {{"op", arith_token(n.op)},
                  {"lhs", expr_json(*n.lhs)},
                  {"rhs", expr_json(*n.rhs)}};
      },
      e.node);
}

json temporal_json(const TemporalCond& tc) {
  return {{"temporal", temporal_token(tc.kind)},
          {"n", expr_json(*tc.threshold)},
          {"event", tc.event}};
}

json cond_json(const Cond& c) {
  return std::visit(
      [](const auto& n) -> json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, TrueCond>) return true;
        else if constexpr (std::is_same_v<T, Relation>)
          return {{"rel", rel_token(n.op)},
                  {"lhs", expr_json(*n.lhs)},
                  {"rhs", expr_json(*n.rhs)}};
        else if constexpr (std::is_same_v<T, Conj>)
          return {{"and", json::array({cond_json(*n.lhs), cond_json(*n.rhs)})}};
        else if constexpr (std::is_same_v<T, Disj>)
          return {{"or", json::array({cond_json(*n.lhs), cond_json(*n.rhs)})}};
        else if constexpr (std::is_same_v<T, Neg>)
          return {{"not", cond_json(*n.operand)}};
        else
          return temporal_json(n);
      },
      c.node);
}

json action_json(const Action& a) {
  return std::visit(
      [](const auto& n) -> json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Skip>) {
          return {{"op", "skip"}};
        } else if constexpr (std::is_same_v<T, Assign>) {
          return {{"op", "assign"}, {"var", n.var}, {"value", expr_json(n.value)}};
        } else if constexpr (std::is_same_v<T, Send>) {
          json j{{"op", "send"},
                 {"event", n.event},
                 {"inTransitionAction", n.in_transition_action}};
          if (n.target) j["target"] = n.target->str();
          return j;
        } else if constexpr (std::is_same_v<T, SendMessage>) {
          return {{"op", "sendMessage"},
                  {"message", n.message},
                  {"data", expr_json(n.data)}};
        } else if constexpr (std::is_same_v<T, OnTemporal>) {
          return {{"op", "onTemporal"},
                  {"cond", temporal_json(n.cond)},
                  {"body", action_json(*n.body)}};
        } else if constexpr (std::is_same_v<T, OnEvent>) {
          return {{"op", "onEvent"},
                  {"event", n.event},
                  {"body", action_json(*n.body)}};
        } else if constexpr (std::is_same_v<T, FunctionCall>) {
          json args = json::array();
          for (const auto& e : n.args) args.push_back(expr_json(e));
          return {{"op", n.graphical ? "callGraphical" : "call"},
                  {"function", n.function},
                  {"outputs", n.outputs},
                  {"args", std::move(args)}};
        } else if constexpr (std::is_same_v<T, Print>) {
          if (const auto* s = std::get_if<StringLit>(&n.value.node))
            return {{"op", "print"}, {"text", s->value}};
          return {{"op", "print"}, {"value", expr_json(n.value)}};
        } else {
          return {{"op", "seq"},
                  {"actions",
                   json::array({action_json(*n.first), action_json(*n.second)})}};
        }
      },
      a.node);
}

json transition_json(const Transition& t) {
  json j{{"source", t.source.str()},
         {"event", t.guard.empty() ? json(nullptr) : json(t.guard)},
         {"cond", cond_json(t.cond)},
         {"condAction", action_json(t.cond_action)},
         {"transAction", action_json(t.trans_action)},
         {"dest", t.dest.str()}};
  return j;
}

json transitions_json(const std::vector<Transition>& list) {
  json out = json::array();
  for (const auto& t : list) out.push_back(transition_json(t));
  return out;
}

json comp_json(const Chart& chart, const Path& owner);

json state_json(const Chart& chart, const Path& path) {
  const StateDef& def = state_lookup(chart, path);
  return {{"entry", action_json(def.entry)},
          {"during", action_json(def.during)},
          {"exit", action_json(def.exit)},
          {"inner", transitions_json(def.inner)},
          {"outer", transitions_json(def.outer)},
          {"comp", comp_json(chart, path)}};
}

json comp_json(const Chart& chart, const Path& owner) {
  const Composition& comp = state_lookup(chart, owner).comp;
  json j;
  json subs = json::object();
  for (const auto& name : substate_names(comp))
    subs[name] = state_json(chart, owner.child(name));
  if (const auto* o = std::get_if<OrComp>(&comp)) {
    j["kind"] = "or";
    j["defaults"] = transitions_json(o->defaults);
    j["history"] = o->has_history;
  } else if (const auto* a = std::get_if<AndComp>(&comp)) {
    j["kind"] = "and";
    j["order"] = a->order;
  } else {
    j["kind"] = "leaf";
  }
  j["substates"] = std::move(subs);
  return j;
}

sorted_json round_json(const RoundRecord& r) {
  sorted_json active = sorted_json::array();
  for (const auto& p : r.active) active.push_back(p.str());
  sorted_json delta = sorted_json::object();
  for (const auto& [k, v] : r.vars_delta) delta[k] = value_json<sorted_json>(v);
  sorted_json j{{"index", r.index},
         {"inputEvent", r.input_event ? sorted_json(*r.input_event) : sorted_json(nullptr)},
         {"prints", r.prints},
         {"active", std::move(active)},
         {"varsDelta", std::move(delta)},
         {"earlyReturn", r.early_return}};
  if (r.vars) {
    sorted_json vars = sorted_json::object();
    for (const auto& [k, v] : *r.vars) vars[k] = value_json<sorted_json>(v);
    j["vars"] = std::move(vars);
  }
  return j;
}

const char* status_token(RunStatus s) {
  switch (s) {
    case RunStatus::kOk: return "ok";
    case RunStatus::kBudgetExhausted: return "budget-exhausted";
    case RunStatus::kSemanticError: return "error";
  }
  return "?";
}

}  // namespace

// ---------------------------------------------------------------------------

Chart load_chart(std::string_view json_text) {
  json doc = parse_json(json_text, "chart");
  if (!doc.is_object()) schema_error("", "expected a chart object");
  if (!doc.contains("root")) schema_error("", "missing root");

  Chart chart;
  if (const auto* n = optional_field(doc, "name"))
    chart.name = get_string(*n, "name");
  if (const auto* e = optional_field(doc, "inputEvents"))
    chart.input_events = get_names(*e, "inputEvents");
  if (const auto* e = optional_field(doc, "localEvents"))
    chart.local_events = get_names(*e, "localEvents");
  if (const auto* m = optional_field(doc, "messages"))
    chart.messages = get_names(*m, "messages");
  if (const auto* vars = optional_field(doc, "variables")) {
    if (!vars->is_object()) schema_error("variables", "expected an object");
    for (const auto& [name, v] : vars->items())
      chart.variables[name] = get_value(v, at_key("variables", name));
  }

  const Path& root = Chart::root_path();
  StateDef root_def;
  root_def.path = root;
  chart.states.emplace(root, StateDef{});
  root_def.comp = read_comp(chart, root, doc["root"], "root");
  chart.states[root] = std::move(root_def);

  if (const auto* fns = optional_field(doc, "functions")) {
    if (!fns->is_object()) schema_error("functions", "expected an object");
    for (const auto& [name, f] : fns->items()) {
      std::string where = at_key("functions", name);
      ScriptedFunction fn;
      if (const auto* i = optional_field(f, "inputs"))
        fn.inputs = get_names(*i, at_key(where, "inputs"));
      if (const auto* o = optional_field(f, "outputs"))
        fn.outputs = get_names(*o, at_key(where, "outputs"));
      if (const auto* b = optional_field(f, "body"))
        fn.body = read_action(*b, at_key(where, "body"), false);
      chart.functions.emplace(name, std::move(fn));
    }
  }
  if (const auto* gfs = optional_field(doc, "graphicalFunctions")) {
    if (!gfs->is_object())
      schema_error("graphicalFunctions", "expected an object");
    for (const auto& [name, g] : gfs->items()) {
      std::string where = at_key("graphicalFunctions", name);
      GraphicalFunction gf;
      if (const auto* i = optional_field(g, "inputs"))
        gf.inputs = get_names(*i, at_key(where, "inputs"));
      if (const auto* o = optional_field(g, "outputs"))
        gf.outputs = get_names(*o, at_key(where, "outputs"));
      gf.initial = read_transition(require(g, "initial", where),
                                   at_key(where, "initial"), Path{});
      chart.graphical_functions.emplace(name, std::move(gf));
    }
  }
  if (const auto* js = optional_field(doc, "junctions")) {
    if (!js->is_object()) schema_error("junctions", "expected an object");
    for (const auto& [key, list] : js->items()) {
      Path p = Path::Parse(key);
      std::string where = "junctions[" + key + "]";
      if (p.empty()) schema_error(where, "empty junction path");
      chart.junctions.emplace(p, read_transitions(list, where, p));
    }
  }

  auto diags = validate_chart(chart);
  if (!diags.empty()) {
    std::string msg = "chart failed validation (" +
                      std::to_string(diags.size()) + " problem" +
                      (diags.size() == 1 ? "" : "s") + "): " +
                      diags.front().message;
    throw LoadError(msg, std::move(diags));
  }
  return chart;
}

Scenario load_scenario(std::string_view json_text) {
  json doc = parse_json(json_text, "scenario");
  if (!doc.is_object()) schema_error("", "expected a scenario object");
  Scenario s;
  if (const auto* iv = optional_field(doc, "initialVars")) {
    if (!iv->is_object()) schema_error("initialVars", "expected an object");
    for (const auto& [name, v] : iv->items())
      s.initial_vars[name] = get_value(v, at_key("initialVars", name));
  }
  const json& events = require(doc, "events", "");
  if (!events.is_array()) schema_error("events", "expected an array");
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].is_null())
      s.events.emplace_back(std::nullopt);
    else
      s.events.emplace_back(get_string(events[i], at_index("events", i)));
  }
  if (const auto* ep = optional_field(doc, "expectedPrints"))
    s.expected_prints = get_names(*ep, "expectedPrints");
  if (const auto* f = optional_field(doc, "fuelPerRound")) {
    if (!f->is_number_integer())
      schema_error("fuelPerRound", "expected an integer");
    if (f->get<std::int64_t>() < 0)
      schema_error("fuelPerRound", "must not be negative");
    s.fuel_per_round = f->get<std::uint64_t>();
  }
  if (const auto* p = optional_field(doc, "executionPeriod")) {
    double d = get_number(*p, "executionPeriod");
    if (d < 0) schema_error("executionPeriod", "must not be negative");
    s.execution_period = d;
  }
  return s;
}

std::string read_text_file(const std::filesystem::path& path,
                           std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::string msg = "cannot read " + std::string(what) + " '" +
                      path.string() + "'";
    throw LoadError(msg, {Diagnostic{"io", msg}});
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Diagnostic> check_scenario(const Chart& chart,
                                       const Scenario& scenario) {
  std::vector<Diagnostic> out;
  for (std::size_t i = 0; i < scenario.events.size(); ++i) {
    const auto& e = scenario.events[i];
    if (!e) continue;
    bool declared = std::find(chart.input_events.begin(),
                              chart.input_events.end(),
                              *e) != chart.input_events.end();
    if (!declared)
      out.push_back({"undeclared-event", "events[" + std::to_string(i) +
                                             "]: '" + *e +
                                             "' is not an input event"});
  }
  return out;
}

std::string emit_chart(const Chart& chart) {
  json doc;
  doc["name"] = chart.name;
  doc["inputEvents"] = chart.input_events;
  doc["localEvents"] = chart.local_events;
  doc["messages"] = chart.messages;
  json vars = json::object();
  for (const auto& [k, v] : chart.variables) vars[k] = value_json(v);
  doc["variables"] = std::move(vars);
  doc["root"] = comp_json(chart, Chart::root_path());
  json fns = json::object();
  for (const auto& [name, f] : chart.functions)
    fns[name] = {{"inputs", f.inputs},
                 {"outputs", f.outputs},
                 {"body", action_json(f.body)}};
  doc["functions"] = std::move(fns);
  json gfs = json::object();
  for (const auto& [name, g] : chart.graphical_functions)
    gfs[name] = {{"inputs", g.inputs},
                 {"outputs", g.outputs},
                 {"initial", transition_json(g.initial)}};
  doc["graphicalFunctions"] = std::move(gfs);
  json js = json::object();
  for (const auto& [p, list] : chart.junctions)
    js[p.str()] = transitions_json(list);
  doc["junctions"] = std::move(js);
  return doc.dump(2) + "\n";
}

std::string emit_trace(const Trace& trace) {
  sorted_json doc;
  doc["version"] = "v1";
  doc["chart"] = trace.chart;
  doc["status"] = status_token(trace.status);
  doc["initialization"] =
      trace.initialization ? round_json(*trace.initialization) : sorted_json(nullptr);
  sorted_json rounds = sorted_json::array();
  for (const auto& r : trace.rounds) rounds.push_back(round_json(r));
  doc["rounds"] = std::move(rounds);
  if (trace.status != RunStatus::kOk)
    doc["error"] = {{"kind", trace.error_kind},
                    {"message", trace.error},
                    {"round", trace.error_round}};
  if (trace.execution_period)
    doc["executionPeriod"] = number_json<sorted_json>(*trace.execution_period);
  return doc.dump(2) + "\n";
}

std::string CheckReport::describe() const {
  if (pass) return "print stream matches";
  auto show = [](const std::optional<std::string>& s) {
    return s ? "\"" + *s + "\"" : std::string("<end of stream>");
  };
  return "first divergence at index " + std::to_string(index) +
         ": expected " + show(expected) + ", got " + show(actual);
}

CheckReport check_trace(const Trace& trace,
                        const std::vector<std::string>& expected) {
  auto actual = trace.print_stream();
  CheckReport r;
  std::size_t n = std::max(actual.size(), expected.size());
  for (std::size_t i = 0; i < n; ++i) {
    bool have_e = i < expected.size(), have_a = i < actual.size();
    if (have_e && have_a && expected[i] == actual[i]) continue;
    r.pass = false;
    r.index = i;
    if (have_e) r.expected = expected[i];
    if (have_a) r.actual = actual[i];
    break;
  }
  return r;
}

}  // namespace sfsem
