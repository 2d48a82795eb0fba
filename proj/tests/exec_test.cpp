#include <gtest/gtest.h>

#include <algorithm>

#include "kit/random_chart.hpp"
#include "kit/support.hpp"
#include "sfsem/errors.hpp"
#include "sfsem/exec.hpp"
#include "sfsem/scenario_io.hpp"

namespace sfsem {
namespace {

using testkit::eps;
using testkit::Events;
using Strings = std::vector<std::string>;

Path P(const char* s) { return Path::Parse(s); }

bool has_sentinel(const Trace& t) {
  auto s = t.print_stream();
  return std::find(s.begin(), s.end(), "sentinel") != s.end();
}

TEST(Exec, JunctionBacktracking) {
  Chart chart = testkit::load_data_chart("junction_backtrack.json");
  auto obs = testkit::observe(chart, eps(1));
  const Trace& t = obs.result.trace;
  ASSERT_EQ(t.status, RunStatus::kOk);
  // condition actions of the abandoned branch stay done
  EXPECT_EQ(t.print_stream(), (Strings{"A", "C", "D"}));
  EXPECT_EQ(testkit::active_strings(t.rounds.back()),
            (Strings{"root", "root.B"}));
  EXPECT_EQ(obs.result.env.v.vars.at("x"), Value{1.0});
  EXPECT_TRUE(obs.violations.empty());
}

TEST(Exec, TerminalJunctionEndsTheStep) {
  Chart chart = testkit::load_data_chart("terminal_junction.json");
  auto obs = testkit::observe(chart, eps(2));
  const Trace& t = obs.result.trace;
  ASSERT_EQ(t.status, RunStatus::kOk);
  EXPECT_EQ(t.print_stream(), (Strings{"A", "A"}));
  EXPECT_EQ(testkit::active_strings(t.rounds.back()),
            (Strings{"root", "root.A"}));
  for (const auto& rules : obs.round_rules)
    EXPECT_NE(std::find(rules.begin(), rules.end(), "runTJ"), rules.end());
}

TEST(Exec, StrictTerminalJunctionFallsThrough) {
  Chart chart = testkit::load_data_chart("terminal_junction.json");
  ExecOptions opts;
  opts.strict_terminal_junction = true;
  auto obs = testkit::observe(chart, eps(1), opts);
  const Trace& t = obs.result.trace;
  ASSERT_EQ(t.status, RunStatus::kOk);
  // later outer transitions are not tried, the during action and the inner
  // self-loop run
  EXPECT_EQ(t.print_stream(), (Strings{"A", "A during"}));
  EXPECT_EQ(testkit::active_strings(t.rounds.back()),
            (Strings{"root", "root.A"}));
}

TEST(Exec, EarlyReturnFromConditionAction) {
  Chart chart = testkit::load_data_chart("early_return_cond.json");
  auto obs = testkit::observe(chart, {"GO"});
  const Trace& t = obs.result.trace;
  ASSERT_EQ(t.status, RunStatus::kOk);
  EXPECT_EQ(t.print_stream(), (Strings{"B"}));
  EXPECT_FALSE(has_sentinel(t));
  EXPECT_TRUE(t.rounds[0].early_return);
  EXPECT_EQ(testkit::active_strings(t.rounds[0]), (Strings{"root", "root.B"}));
  EXPECT_TRUE(obs.violations.empty());
}

TEST(Exec, EarlyReturnFromTransitionAction) {
  Chart chart = testkit::load_data_chart("early_return_trans.json");
  auto obs = testkit::observe(chart, {"GO"});
  const Trace& t = obs.result.trace;
  ASSERT_EQ(t.status, RunStatus::kOk);
  EXPECT_EQ(t.print_stream(), (Strings{"A1", "A1"}));
  EXPECT_TRUE(t.rounds[0].early_return);
  EXPECT_EQ(testkit::active_strings(t.rounds[0]),
            (Strings{"root", "root.A", "root.A.A1"}));
  EXPECT_TRUE(obs.violations.empty());
}

TEST(Exec, RejectEarlyReturnRound) {
  Chart chart = testkit::load_data_chart("early_return_cond.json");
  ExecOptions opts;
  opts.reject_early_return_round = true;
  auto r = run_chart(chart, init_env(chart), Events{"GO"}, opts);
  EXPECT_EQ(r.trace.status, RunStatus::kSemanticError);
  EXPECT_EQ(r.trace.error_kind, "semantic");
  EXPECT_EQ(r.trace.error_round, 1u);
}

TEST(Exec, MessagesAreConsumedOnce) {
  Chart chart = testkit::load_data_chart("messages.json");
  auto obs = testkit::observe(chart, eps(4));
  const Trace& t = obs.result.trace;
  ASSERT_EQ(t.status, RunStatus::kOk);
  EXPECT_EQ(t.print_stream(), (Strings{"B", "C"}));
  EXPECT_EQ(testkit::active_strings(t.rounds.back()),
            (Strings{"root", "root.C"}));
  EXPECT_EQ(obs.result.env.v.queue_length("M"), 0u);
}

TEST(Exec, DivergentJunctionsExhaustTheBudget) {
  Chart chart = testkit::load_data_chart("loopy.json");
  ExecOptions opts;
  opts.fuel_per_round = 5000;
  auto r = run_chart(chart, init_env(chart), eps(3), opts);
  EXPECT_EQ(r.trace.status, RunStatus::kBudgetExhausted);
  EXPECT_EQ(r.trace.error_kind, "budget");
  EXPECT_EQ(r.trace.error_round, 1u);
  EXPECT_TRUE(r.trace.rounds.empty());
  ASSERT_TRUE(r.trace.initialization);
}

TEST(Exec, AndEntryAndExitOrder) {
  Chart chart = load_chart(R"({
    "inputEvents": ["GO"],
    "root": {"kind": "or", "defaults": [{"dest": "root.P"}], "substates": {
      "P": {"entry": {"op": "print", "text": "P+"},
            "exit": {"op": "print", "text": "P-"},
            "outer": [{"event": "GO", "dest": "root.Q"}],
            "comp": {"kind": "and", "order": ["X", "Y"], "substates": {
              "Y": {"entry": {"op": "print", "text": "Y+"},
                    "exit": {"op": "print", "text": "Y-"},
                    "during": {"op": "print", "text": "Y"}},
              "X": {"entry": {"op": "print", "text": "X+"},
                    "exit": {"op": "print", "text": "X-"},
                    "during": {"op": "print", "text": "X"}}}}},
      "Q": {"entry": {"op": "print", "text": "Q+"}}}}})");
  auto obs = testkit::observe(chart, {std::nullopt, "GO"});
  const Trace& t = obs.result.trace;
  ASSERT_EQ(t.status, RunStatus::kOk);
  EXPECT_EQ(t.print_stream(),
            (Strings{"P+", "X+", "Y+", "X", "Y", "Y-", "X-", "P-", "Q+"}));
  EXPECT_EQ(testkit::active_strings(t.rounds[0]),
            (Strings{"root", "root.P", "root.P.X", "root.P.Y"}));
  EXPECT_EQ(testkit::active_strings(t.rounds[1]), (Strings{"root", "root.Q"}));
  EXPECT_TRUE(obs.violations.empty());
}

TEST(Exec, HistoryJunctionRestoresSubstate) {
  Chart chart = load_chart(R"({
    "inputEvents": ["NEXT", "OUT", "BACK"],
    "root": {"kind": "or", "defaults": [{"dest": "root.A"}], "substates": {
      "A": {"outer": [{"event": "OUT", "dest": "root.B"}],
            "comp": {"kind": "or", "history": true,
                     "defaults": [{"dest": "root.A.A1"}], "substates": {
              "A1": {"outer": [{"event": "NEXT", "dest": "root.A.A2"}]},
              "A2": {}}}},
      "B": {"outer": [{"event": "BACK", "dest": "root.A"}]}}}})");
  auto obs = testkit::observe(chart, {"NEXT", "OUT", "BACK"});
  const Trace& t = obs.result.trace;
  ASSERT_EQ(t.status, RunStatus::kOk);
  EXPECT_EQ(testkit::active_strings(t.rounds.back()),
            (Strings{"root", "root.A", "root.A.A2"}));
}

TEST(Exec, GraphicalFunctionTakesEitherBranch) {
  const char* kChart = R"({
    "variables": {"p": 0, "q": 0, "m": 0, "a": 0, "b": 0, "z": 0},
    "graphicalFunctions": {"max": {"inputs": ["p", "q"], "outputs": ["m"],
      "initial": {"dest": "max.#j1"}}},
    "junctions": {
      "max.#j1": [
        {"cond": {"rel": ">", "lhs": "p", "rhs": "q"},
         "condAction": {"op": "assign", "var": "m", "value": "p"},
         "dest": "max.#j2"},
        {"condAction": {"op": "assign", "var": "m", "value": "q"},
         "dest": "max.#j2"}],
      "max.#j2": []},
    "root": {"kind": "or", "defaults": [{"dest": "root.A"}], "substates": {
      "A": {"during": {"op": "callGraphical", "function": "max",
                       "args": ["a", "b"], "outputs": ["z"]}}}}})";
  Chart chart = load_chart(kChart);
  auto a = run_chart(chart, init_env(chart, {{"a", 2.0}, {"b", 5.0}}), eps(1));
  EXPECT_EQ(a.env.v.vars.at("z"), Value{5.0});
  auto b = run_chart(chart, init_env(chart, {{"a", 9.0}, {"b", 5.0}}), eps(1));
  EXPECT_EQ(b.env.v.vars.at("z"), Value{9.0});
}

TEST(Exec, WashingMachineScenario) {
  Chart chart = testkit::load_data_chart("washing_machine.json");
  Scenario s = testkit::load_data_scenario("washing_scenario.json");
  auto obs = testkit::observe(chart, s.events);
  ASSERT_EQ(obs.result.trace.status, RunStatus::kOk);
  ASSERT_TRUE(s.expected_prints);
  EXPECT_EQ(obs.result.trace.print_stream(), *s.expected_prints);
  EXPECT_TRUE(obs.violations.empty());
  EXPECT_EQ(obs.result.trace.rounds.size(), s.events.size());
}

// The exit action of A broadcasts L, and A's inner transition on L re-enters
// A2 before A is marked inactive. The exit is abandoned and A keeps A2.
TEST(Exec, ExitBroadcastThatReentersTheState) {
  Chart chart = load_chart(R"({
    "inputEvents": ["GO"], "localEvents": ["L"],
    "root": {"kind": "or", "defaults": [{"dest": "root.A"}], "substates": {
      "A": {"exit": {"op": "send", "event": "L"},
            "outer": [{"event": "GO", "dest": "root.B"}],
            "inner": [{"event": "L", "dest": "root.A.A2"}],
            "comp": {"kind": "or", "defaults": [{"dest": "root.A.A1"}],
              "substates": {
                "A1": {"entry": {"op": "print", "text": "A1"}},
                "A2": {"entry": {"op": "print", "text": "A2"}}}}},
      "B": {"entry": {"op": "print", "text": "B"}}}}})");
  auto obs = testkit::observe(chart, {"GO"});
  const Trace& t = obs.result.trace;
  ASSERT_EQ(t.status, RunStatus::kOk);
  EXPECT_EQ(t.print_stream(), (Strings{"A1", "A2"}));
  EXPECT_TRUE(t.rounds[0].early_return);
  EXPECT_EQ(testkit::active_strings(t.rounds[0]),
            (Strings{"root", "root.A", "root.A.A2"}));
  EXPECT_TRUE(obs.violations.empty());
}

// X's self-loop exits both parallel siblings and broadcasts L from its
// transition action. P's inner transition on L re-enters X and Y, so the rest
// of the transition action is dropped and the pending entry never happens.
TEST(Exec, TransitionBroadcastUnderAnAndParent) {
  Chart chart = load_chart(R"({
    "inputEvents": ["GO"], "localEvents": ["L"],
    "root": {"kind": "or", "defaults": [{"dest": "root.P"}], "substates": {
      "P": {"entry": {"op": "print", "text": "P"},
            "inner": [{"event": "L", "dest": "root.P.X"}],
            "comp": {"kind": "and", "order": ["X", "Y"], "substates": {
              "X": {"entry": {"op": "print", "text": "X"},
                    "exit": {"op": "print", "text": "x-"},
                    "outer": [{"event": "GO", "dest": "root.P.X",
                               "transAction": [
                                 {"op": "send", "event": "L"},
                                 {"op": "print", "text": "sentinel"}]}]},
              "Y": {"entry": {"op": "print", "text": "Y"},
                    "exit": {"op": "print", "text": "y-"}}}}}}}})");
  auto obs = testkit::observe(chart, {"GO"});
  const Trace& t = obs.result.trace;
  ASSERT_EQ(t.status, RunStatus::kOk);
  // the inner transition exits the (already exited) parallel pair again
  EXPECT_EQ(t.print_stream(),
            (Strings{"P", "X", "Y", "y-", "x-", "y-", "x-", "X", "Y"}));
  EXPECT_FALSE(has_sentinel(t));
  EXPECT_TRUE(t.rounds[0].early_return);
  EXPECT_EQ(testkit::active_strings(t.rounds[0]),
            (Strings{"root", "root.P", "root.P.X", "root.P.Y"}));
  EXPECT_TRUE(obs.violations.empty());
}

// A's entry action broadcasts L, whose inner transition enters A2 before the
// default entry of A runs; the default path to A1 is then abandoned.
TEST(Exec, EntryAfterABroadcastAlreadyEnteredASibling) {
  Chart chart = load_chart(R"({
    "localEvents": ["L"],
    "root": {"kind": "or", "defaults": [{"dest": "root.A"}], "substates": {
      "A": {"entry": {"op": "send", "event": "L"},
            "inner": [{"event": "L", "dest": "root.A.A2"}],
            "comp": {"kind": "or", "defaults": [{"dest": "root.A.A1"}],
              "substates": {
                "A1": {"entry": {"op": "print", "text": "A1"}},
                "A2": {"entry": {"op": "print", "text": "A2"}}}}}}}})");
  auto obs = testkit::observe(chart, eps(1));
  const Trace& t = obs.result.trace;
  ASSERT_EQ(t.status, RunStatus::kOk);
  EXPECT_EQ(t.print_stream(), (Strings{"A2"}));
  ASSERT_TRUE(t.initialization);
  EXPECT_EQ(testkit::active_strings(*t.initialization),
            (Strings{"root", "root.A", "root.A.A2"}));
  EXPECT_EQ(testkit::active_strings(t.rounds[0]),
            (Strings{"root", "root.A", "root.A.A2"}));
  EXPECT_TRUE(obs.violations.empty());
}

// trans_enabled never changes the environment it is given.
TEST(ExecProperty, EnabledCheckIsPure) {
  Chart chart = testkit::load_data_chart("messages.json");
  Interpreter it(chart);
  DynEnv env = init_env(chart);
  it.refuel();
  it.enter_chart(env);
  DynEnv before = env;
  const auto& a = state_lookup(chart, P("root.A"));
  for (const auto& t : a.outer) {
    EXPECT_TRUE(it.trans_enabled(P("root.A"), t, env, ""));
  }
  EXPECT_EQ(env, before);
}

// A failed transition list leaves the environment as it found it when no
// condition action ran.
TEST(ExecProperty, FailedSearchIsPure) {
  Chart chart = load_chart(R"({
    "variables": {"x": 0},
    "root": {"kind": "or", "defaults": [{"dest": "root.A"}], "substates": {
      "A": {"outer": [{"dest": "root.#j1"},
                      {"cond": {"rel": ">", "lhs": "x", "rhs": 5},
                       "dest": "root.B"}]},
      "B": {}}},
    "junctions": {"root.#j1": [{"cond": {"rel": ">", "lhs": "x", "rhs": 0},
                                "dest": "root.B"}]}})");
  Interpreter it(chart);
  DynEnv env = init_env(chart);
  it.refuel();
  it.enter_chart(env);
  DynEnv before = env;
  auto r = it.exec_transition_list(P("root.A"), "",
                                   state_lookup(chart, P("root.A")).outer, env);
  EXPECT_EQ(r.vt, Verdict::kFail);
  EXPECT_TRUE(r.cont);
  EXPECT_TRUE(r.trans_actions.empty());
  EXPECT_EQ(env, before);
}

// Leaving and re-entering through a self-loop keeps the same active set.
TEST(ExecProperty, SelfLoopKeepsActiveSet) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    Chart chart = testkit::random_chart(seed);
    // driven directly on this thread, so keep the recursion shallow
    ExecOptions opts;
    opts.fuel_per_round = 3000;
    Interpreter it(chart, opts);
    DynEnv env = init_env(chart);
    it.refuel();
    try {
      it.enter_chart(env);
    } catch (const BudgetError&) {
      continue;
    }
    for (const auto& p : env.status.active_paths()) {
      if (p.size() < 2 || !chart.is_state(p)) continue;
      Transition loop;
      loop.source = p;
      loop.dest = p;
      DynEnv copy = env;
      it.refuel();
      std::vector<Transition> list{loop};
      TransListResult r;
      try {
        r = it.exec_transition_list(p, "", list, copy);
      } catch (const BudgetError&) {
        continue;
      }
      ASSERT_EQ(r.vt, Verdict::kState);
      ASSERT_EQ(r.target, p);
      EXPECT_TRUE(copy.is_active(p));
      EXPECT_TRUE(activation_violations(chart, copy).empty()) << "seed " << seed;
    }
  }
}

// More fuel never changes a run that finished within budget.
TEST(ExecProperty, FuelMonotonicity) {
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    Chart chart = testkit::random_chart(seed);
    auto events = testkit::random_events(chart, seed, 8);
    ExecOptions small;
    small.fuel_per_round = 400;
    ExecOptions big;
    big.fuel_per_round = 1000000;
    auto a = run_chart(chart, init_env(chart), events, small);
    auto b = run_chart(chart, init_env(chart), events, big);
    if (a.trace.status == RunStatus::kOk) {
      EXPECT_EQ(a.trace, b.trace) << "seed " << seed;
    } else if (a.trace.status == RunStatus::kBudgetExhausted) {
      // the completed prefix agrees
      ASSERT_LE(a.trace.rounds.size(), b.trace.rounds.size());
      for (std::size_t i = 0; i < a.trace.rounds.size(); ++i)
        EXPECT_EQ(a.trace.rounds[i], b.trace.rounds[i]) << "seed " << seed;
    }
  }
}

// Early returns come only from broadcasts: without send actions no round
// reports one, and with many sends the activation invariants still hold.
TEST(ExecProperty, EarlyReturnNeedsABroadcast) {
  testkit::RandomChartLimits quiet;
  quiet.send_probability = 0;
  testkit::RandomChartLimits noisy;
  noisy.send_probability = 0.3;
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    Chart chart = testkit::random_chart(seed, quiet);
    auto obs = testkit::observe(chart, testkit::random_events(chart, seed, 6));
    for (const auto& r : obs.result.trace.rounds)
      EXPECT_FALSE(r.early_return) << "seed " << seed;

    Chart loud = testkit::random_chart(seed, noisy);
    auto obs2 = testkit::observe(loud, testkit::random_events(loud, seed, 6));
    EXPECT_TRUE(obs2.violations.empty()) << "seed " << seed;
  }
}

TEST(Exec, ActionsOutsideTheChartFail) {
  Chart chart = load_chart(R"({
    "root": {"kind": "or", "defaults": [{"dest": "root.A"}], "substates": {
      "A": {"during": {"op": "assign", "var": "x",
                       "value": {"op": "/", "lhs": 1, "rhs": 0}}}}},
    "variables": {"x": 0}})");
  auto r = run_chart(chart, init_env(chart), eps(2));
  EXPECT_EQ(r.trace.status, RunStatus::kSemanticError);
  EXPECT_EQ(r.trace.error_kind, "eval");
  EXPECT_EQ(r.trace.error_round, 1u);
  EXPECT_NE(r.trace.error.find("division"), std::string::npos);
}

}  // namespace
}  // namespace sfsem
