#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sfsem/chart.hpp"
#include "sfsem/exec.hpp"
#include "sfsem/scenario_io.hpp"

namespace sfsem::testkit {

// Absolute path of a file under tests/data.
std::string data_path(const std::string& name);

Chart load_data_chart(const std::string& name);
Scenario load_data_scenario(const std::string& name);

using Events = std::vector<std::optional<std::string>>;

// ε repeated n times.
Events eps(std::size_t n);

struct Observed {
  RunResult result;
  std::vector<std::string> init_rules;
  std::vector<std::vector<std::string>> round_rules;
  std::vector<std::string> violations;  // invariant breaches, any round
};

// Runs with rule logging and activation checks after every round.
Observed observe(const Chart& chart, const Events& events,
                 ExecOptions options = {},
                 const std::map<std::string, Value>& initial_vars = {});

std::vector<std::string> active_strings(const RoundRecord& r);

// Every rule name the interpreter can report for oracle coverage.
const std::vector<std::string>& all_rule_names();

}  // namespace sfsem::testkit
