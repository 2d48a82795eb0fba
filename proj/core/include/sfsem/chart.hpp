#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "sfsem/box.hpp"
#include "sfsem/errors.hpp"
#include "sfsem/path.hpp"
#include "sfsem/value.hpp"

namespace sfsem {

// Reserved tokens reading a state's tick clock in temporal operators.
inline constexpr std::string_view kTick = "tick";
inline constexpr std::string_view kSec = "sec";
inline bool is_time_unit(std::string_view name) {
  return name == kTick || name == kSec;
}

// Junction segment addressing the history junction of an Or-composition.
inline constexpr std::string_view kHistoryJunction = "#history";

// ---------------------------------------------------------------------------
// Expressions

struct Expr;

struct NumberLit {
  double value = 0;
  friend bool operator==(const NumberLit&, const NumberLit&) = default;
};
struct StringLit {
  std::string value;
  friend bool operator==(const StringLit&, const StringLit&) = default;
};
struct VarRef {
  std::string name;
  friend bool operator==(const VarRef&, const VarRef&) = default;
};
struct MessageField {
  std::string message;
  std::string field;
  friend bool operator==(const MessageField&, const MessageField&) = default;
};
// Occurrences of an event, or elapsed ticks for tick/sec, since the context
// state was entered.
struct TempCount {
  std::string event;
  friend bool operator==(const TempCount&, const TempCount&) = default;
};

enum class ArithOp { kAdd, kSub, kMul, kDiv };

struct BinaryExpr {
  ArithOp op;
  Box<Expr> lhs;
  Box<Expr> rhs;
  friend bool operator==(const BinaryExpr&, const BinaryExpr&) = default;
};

struct Expr {
  std::variant<NumberLit, StringLit, VarRef, MessageField, TempCount,
               BinaryExpr>
      node;
  friend bool operator==(const Expr&, const Expr&) = default;
};

inline Expr num(double v) { return Expr{NumberLit{v}}; }
inline Expr var(std::string name) { return Expr{VarRef{std::move(name)}}; }
inline Expr binary(ArithOp op, Expr lhs, Expr rhs) {
  return Expr{BinaryExpr{op, std::move(lhs), std::move(rhs)}};
}

// ---------------------------------------------------------------------------
// Conditions

enum class TemporalKind { kAfter, kBefore, kAt, kEvery };

struct TemporalCond {
  TemporalKind kind = TemporalKind::kAfter;
  Box<Expr> threshold = num(0);
  std::string event;  // an event name, or tick/sec
  friend bool operator==(const TemporalCond&, const TemporalCond&) = default;
};

enum class RelOp { kGt, kEq, kLt, kGe, kLe, kNe };

struct Cond;

struct Relation {
  Box<Expr> lhs;
  RelOp op;
  Box<Expr> rhs;
  friend bool operator==(const Relation&, const Relation&) = default;
};
struct Conj {
  Box<Cond> lhs;
  Box<Cond> rhs;
  friend bool operator==(const Conj&, const Conj&) = default;
};
struct Disj {
  Box<Cond> lhs;
  Box<Cond> rhs;
  friend bool operator==(const Disj&, const Disj&) = default;
};
struct Neg {
  Box<Cond> operand;
  friend bool operator==(const Neg&, const Neg&) = default;
};
struct TrueCond {
  friend bool operator==(const TrueCond&, const TrueCond&) = default;
};

struct Cond {
  std::variant<TrueCond, Relation, Conj, Disj, Neg, TemporalCond> node;
  friend bool operator==(const Cond&, const Cond&) = default;
};

// ---------------------------------------------------------------------------
// Actions

struct Action;

struct Skip {
  friend bool operator==(const Skip&, const Skip&) = default;
};
struct Assign {
  std::string var;
  Expr value;
  friend bool operator==(const Assign&, const Assign&) = default;
};
// Local event broadcast. Undirected when `target` is absent; the flag records
// whether the send sits in a transition action, which selects the early-return
// test applied afterwards.
struct Send {
  std::string event;
  bool in_transition_action = false;
  std::optional<Path> target;
  friend bool operator==(const Send&, const Send&) = default;
};
struct SendMessage {
  std::string message;
  Expr data;
  friend bool operator==(const SendMessage&, const SendMessage&) = default;
};
struct OnTemporal {
  TemporalCond cond;
  Box<Action> body;
  friend bool operator==(const OnTemporal&, const OnTemporal&) = default;
};
struct OnEvent {
  std::string event;
  Box<Action> body;
  friend bool operator==(const OnEvent&, const OnEvent&) = default;
};
struct FunctionCall {
  bool graphical = false;
  std::vector<std::string> outputs;
  std::string function;
  std::vector<Expr> args;
  friend bool operator==(const FunctionCall&, const FunctionCall&) = default;
};
struct Print {
  Expr value;  // StringLit for plain text
  friend bool operator==(const Print&, const Print&) = default;
};
struct Seq {
  Box<Action> first;
  Box<Action> second;
  friend bool operator==(const Seq&, const Seq&) = default;
};

struct Action {
  std::variant<Skip, Assign, Send, SendMessage, OnTemporal, OnEvent,
               FunctionCall, Print, Seq>
      node;
  friend bool operator==(const Action&, const Action&) = default;
};

inline Action skip() { return Action{Skip{}}; }
inline Action print(std::string text) {
  return Action{Print{Expr{StringLit{std::move(text)}}}};
}
/// Right-nested sequence; an empty list is Skip.
Action sequence(std::vector<Action> actions);

// ---------------------------------------------------------------------------
// Structure

struct Transition {
  Path source;        // state, junction, or empty for default transitions
  std::string guard;  // event or message name; empty means no guard
  Cond cond{TrueCond{}};
  Action cond_action{Skip{}};
  Action trans_action{Skip{}};
  Path dest;
  friend bool operator==(const Transition&, const Transition&) = default;
};

struct LeafComp {
  friend bool operator==(const LeafComp&, const LeafComp&) = default;
};
// Parallel substates; `order` is the priority order and names every child.
struct AndComp {
  std::vector<std::string> order;
  friend bool operator==(const AndComp&, const AndComp&) = default;
};
// Exclusive substates entered through `defaults` or recorded history.
struct OrComp {
  std::vector<Transition> defaults;
  bool has_history = false;
  std::vector<std::string> substates;
  friend bool operator==(const OrComp&, const OrComp&) = default;
};

using Composition = std::variant<LeafComp, OrComp, AndComp>;

/// Child names of a composition (the And priority order, or the Or members).
const std::vector<std::string>& substate_names(const Composition& comp);

struct StateDef {
  Path path;
  Action entry{Skip{}};
  Action during{Skip{}};
  Action exit{Skip{}};
  std::vector<Transition> inner;  // priority order
  std::vector<Transition> outer;  // priority order
  Composition comp{LeafComp{}};
  friend bool operator==(const StateDef&, const StateDef&) = default;
};

struct ScriptedFunction {
  Action body{Skip{}};
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  friend bool operator==(const ScriptedFunction&,
                         const ScriptedFunction&) = default;
};

struct GraphicalFunction {
  Transition initial;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  friend bool operator==(const GraphicalFunction&,
                         const GraphicalFunction&) = default;
};

/// The static chart. States live in a flat table keyed by full path; the
/// synthetic root state sits at `root` and owns the top-level composition.
/// Immutable once built.
struct Chart {
  static const Path& root_path();

  std::string name;
  std::vector<std::string> input_events;
  std::vector<std::string> local_events;
  std::vector<std::string> messages;
  std::map<std::string, Value> variables;  // declared data with initials

  std::map<Path, StateDef> states;
  std::map<std::string, ScriptedFunction> functions;
  std::map<std::string, GraphicalFunction> graphical_functions;
  std::map<Path, std::vector<Transition>> junctions;
  std::set<Path> history_owners;  // Or-compositions declaring history

  friend bool operator==(const Chart&, const Chart&) = default;

  [[nodiscard]] bool is_state(const Path& p) const;
  [[nodiscard]] bool is_junction(const Path& p) const;
  [[nodiscard]] bool is_history_junction(const Path& p) const;
  [[nodiscard]] bool is_message(std::string_view name) const;
  [[nodiscard]] bool is_event(std::string_view name) const;

  /// Outgoing transitions of a junction; terminal junctions have none.
  [[nodiscard]] const std::vector<Transition>& junction_transitions(
      const Path& junction) const;
};

/// Throws LookupError unless `p` names a state.
const StateDef& state_lookup(const Chart& chart, const Path& p);

/// The empty path and `root` both address the top composition.
const Composition& comp_lookup(const Chart& chart, const Path& p);

/// Nested state description used to build charts in code; flattened into
/// Chart::states by add_state_tree.
struct StateSpec {
  Action entry{Skip{}};
  Action during{Skip{}};
  Action exit{Skip{}};
  std::vector<Transition> inner;
  std::vector<Transition> outer;
  Composition comp{LeafComp{}};
  std::vector<std::pair<std::string, StateSpec>> children;
};

/// Registers `spec` at `path` (and recursively its children). The
/// composition's child-name list is filled from `children` for Or-comps.
void add_state_tree(Chart& chart, const Path& path, StateSpec spec);

/// Returns one diagnostic per violated well-formedness rule; empty when valid.
std::vector<Diagnostic> validate_chart(const Chart& chart);

}  // namespace sfsem
