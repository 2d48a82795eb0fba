#include <gtest/gtest.h>

#include <algorithm>

#include "kit/support.hpp"
#include "sfsem/chart.hpp"
#include "sfsem/scenario_io.hpp"

namespace sfsem {
namespace {

Path P(const char* s) { return Path::Parse(s); }

// Smallest valid chart: root Or with leaves A and B, A -> B.
Chart two_state_chart() {
  Chart c;
  StateSpec root;
  OrComp o;
  o.defaults.push_back(Transition{{}, "", {}, skip(), skip(), P("root.A")});
  root.comp = o;
  StateSpec a;
  a.outer.push_back(Transition{P("root.A"), "", {}, skip(), skip(), P("root.B")});
  root.children.emplace_back("A", a);
  root.children.emplace_back("B", StateSpec{});
  add_state_tree(c, Chart::root_path(), root);
  return c;
}

std::vector<std::string> codes(const std::vector<Diagnostic>& ds) {
  std::vector<std::string> out;
  for (const auto& d : ds) out.push_back(d.code);
  return out;
}

TEST(Chart, WashingMachineIsValid) {
  Chart c = testkit::load_data_chart("washing_machine.json");
  EXPECT_TRUE(validate_chart(c).empty());
}

TEST(Chart, BuilderChartIsValid) {
  EXPECT_TRUE(validate_chart(two_state_chart()).empty());
}

TEST(Chart, MissingDestination) {
  Chart c = two_state_chart();
  c.states[P("root.A")].outer[0].dest = P("root.Nowhere");
  auto d = validate_chart(c);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].code, "unresolved-path");
  EXPECT_NE(d[0].message.find("root.Nowhere"), std::string::npos);
}

TEST(Chart, AndOrderOmitsSubstate) {
  Chart c;
  StateSpec root;
  root.comp = OrComp{{Transition{{}, "", {}, skip(), skip(), P("root.P")}}, false, {}};
  StateSpec par;
  par.comp = AndComp{{"X"}};
  par.children.emplace_back("X", StateSpec{});
  par.children.emplace_back("Y", StateSpec{});
  root.children.emplace_back("P", par);
  add_state_tree(c, Chart::root_path(), root);
  auto d = validate_chart(c);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].code, "order-mismatch");
  EXPECT_NE(d[0].message.find("order/substates mismatch"), std::string::npos);
}

TEST(Chart, DefaultWithStateSource) {
  Chart c = two_state_chart();
  auto& o = std::get<OrComp>(c.states[P("root")].comp);
  o.defaults[0].source = P("root.B");
  EXPECT_EQ(codes(validate_chart(c)), std::vector<std::string>{"default-source"});
}

TEST(Chart, DefaultLeavingTheState) {
  Chart c = two_state_chart();
  StateSpec inner;
  inner.comp = OrComp{{Transition{{}, "", {}, skip(), skip(), P("root.A")}}, false, {}};
  inner.children.emplace_back("C", StateSpec{});
  add_state_tree(c, P("root.B"), inner);
  EXPECT_EQ(codes(validate_chart(c)), std::vector<std::string>{"default-scope"});
}

TEST(Chart, ArityMismatch) {
  Chart c = two_state_chart();
  c.variables["r"] = 0.0;
  c.functions["f"] = ScriptedFunction{skip(), {"a"}, {"r"}};
  c.variables["a"] = 0.0;
  c.states[P("root.A")].entry =
      Action{FunctionCall{false, {"r", "r"}, "f", {num(1)}}};
  EXPECT_EQ(codes(validate_chart(c)), std::vector<std::string>{"arity-mismatch"});
}

TEST(Chart, DuplicateDeclarations) {
  Chart c = two_state_chart();
  c.input_events = {"GO", "GO"};
  EXPECT_EQ(codes(validate_chart(c)), std::vector<std::string>{"duplicate-name"});
}

TEST(Chart, UndeclaredNames) {
  Chart c = two_state_chart();
  c.states[P("root.A")].outer[0].guard = "NOPE";
  c.states[P("root.B")].entry = Action{Assign{"ghost", num(1)}};
  auto cs = codes(validate_chart(c));
  std::sort(cs.begin(), cs.end());
  EXPECT_EQ(cs, (std::vector<std::string>{"undeclared-event",
                                          "undeclared-variable"}));
}

TEST(Chart, GraphicalJunctionsStayInsideTheirFunction) {
  Chart c = two_state_chart();
  c.graphical_functions["g"] =
      GraphicalFunction{Transition{{}, "", {}, skip(), skip(), P("g.#j")}, {}, {}};
  c.junctions[P("g.#j")] = {};
  EXPECT_TRUE(validate_chart(c).empty());
  c.states[P("root.A")].outer[0].dest = P("g.#j");
  EXPECT_EQ(codes(validate_chart(c)), std::vector<std::string>{"scope"});
}

TEST(Chart, ValidationIsIdempotent) {
  Chart c = two_state_chart();
  c.states[P("root.A")].outer[0].dest = P("root.Nowhere");
  c.input_events = {"GO", "GO"};
  auto first = validate_chart(c);
  EXPECT_EQ(first, validate_chart(c));
  EXPECT_EQ(first.size(), 2u);
}

TEST(Chart, StateLookup) {
  Chart c = testkit::load_data_chart("washing_machine.json");
  const auto& sleep = state_lookup(c, P("root.Off.Sleep"));
  EXPECT_EQ(sleep.entry,
            sequence({Action{Assign{"finish", num(0)}},
                      Action{Assign{"time", num(0)}}}));
  Chart j = testkit::load_data_chart("junction_backtrack.json");
  EXPECT_THROW(state_lookup(j, P("root.#j1")), LookupError);
  EXPECT_THROW(state_lookup(c, Path{}), LookupError);
}

TEST(Chart, CompLookup) {
  Chart c = testkit::load_data_chart("washing_machine.json");
  const auto& off = std::get<OrComp>(comp_lookup(c, P("root.Off")));
  auto subs = off.substates;
  std::sort(subs.begin(), subs.end());
  EXPECT_EQ(subs, (std::vector<std::string>{"Pending", "Ready", "Sleep"}));
  EXPECT_EQ(&comp_lookup(c, P("root")), &comp_lookup(c, Path{}));
  EXPECT_TRUE(std::holds_alternative<LeafComp>(comp_lookup(c, P("root.Off.Sleep"))));
  EXPECT_THROW(comp_lookup(c, P("root.Missing")), LookupError);
}

TEST(Chart, HistoryJunctionRecognised) {
  Chart c = testkit::load_data_chart("washing_machine.json");
  EXPECT_TRUE(c.is_history_junction(P("root.On.#history")));
  EXPECT_FALSE(c.is_history_junction(P("root.Off.#history")));
  EXPECT_TRUE(c.is_junction(P("root.On.#history")));
}

// Every transition endpoint of a validated chart resolves.
TEST(Chart, ValidatedEndpointsResolve) {
  for (const char* name :
       {"washing_machine.json", "junction_backtrack.json",
        "terminal_junction.json", "early_return_cond.json",
        "early_return_trans.json", "messages.json", "loopy.json"}) {
    Chart c = testkit::load_data_chart(name);
    auto check = [&](const Transition& t) {
      if (!t.source.empty())
        EXPECT_TRUE(c.is_state(t.source) || c.is_junction(t.source)) << name;
      EXPECT_TRUE(c.is_state(t.dest) || c.is_junction(t.dest)) << name;
    };
    for (const auto& [p, def] : c.states) {
      for (const auto& t : def.outer) check(t);
      for (const auto& t : def.inner) check(t);
      if (const auto* o = std::get_if<OrComp>(&def.comp))
        for (const auto& t : o->defaults) check(t);
    }
    for (const auto& [p, list] : c.junctions)
      for (const auto& t : list) check(t);
  }
}

TEST(Chart, SequenceHelper) {
  EXPECT_EQ(sequence({}), skip());
  EXPECT_EQ(sequence({print("a")}), print("a"));
  EXPECT_EQ(sequence({print("a"), print("b"), print("c")}),
            (Action{Seq{print("a"), Action{Seq{print("b"), print("c")}}}}));
}

}  // namespace
}  // namespace sfsem
