#include "support.hpp"

#include "sfsem/dyn_env.hpp"

#ifndef SFSEM_TEST_DATA_DIR
#error "SFSEM_TEST_DATA_DIR must be defined"
#endif

namespace sfsem::testkit {

std::string data_path(const std::string& name) {
  return std::string(SFSEM_TEST_DATA_DIR) + "/" + name;
}

Chart load_data_chart(const std::string& name) {
  return load_chart(read_text_file(data_path(name), "chart"));
}

Scenario load_data_scenario(const std::string& name) {
  return load_scenario(read_text_file(data_path(name), "scenario"));
}

Events eps(std::size_t n) { return Events(n, std::nullopt); }

Observed observe(const Chart& chart, const Events& events,
                 ExecOptions options,
                 const std::map<std::string, Value>& initial_vars) {
  Observed obs;
  std::vector<std::string> current;
  options.on_rule = [&](std::string_view r) { current.emplace_back(r); };
  options.after_round = [&](std::size_t round, const DynEnv& env) {
    if (round == 0)
      obs.init_rules = std::move(current);
    else
      obs.round_rules.push_back(std::move(current));
    current.clear();
    for (auto& v : activation_violations(chart, env))
      obs.violations.push_back("round " + std::to_string(round) + ": " + v);
  };
  obs.result = run_chart(chart, init_env(chart, initial_vars), events, options);
  if (!current.empty()) obs.round_rules.push_back(std::move(current));
  return obs;
}

std::vector<std::string> active_strings(const RoundRecord& r) {
  std::vector<std::string> out;
  for (const auto& p : r.active) out.push_back(p.str());
  return out;
}

const std::vector<std::string>& all_rule_names() {
  static const std::vector<std::string> kNames = {
      "SendF", "SendT", "SendM", "OnT",  "OnF",  "OnE",  "SeqT",  "SeqF",
      "GraF",  "MatF",  "Updv",  "TrT",  "TrF",  "Emp",  "ToS",   "ToHJ",
      "ToJ1",  "ToJ2",  "ToJ3",  "ToJ4", "Ind",  "Fail", "exS1",  "exS2",
      "exS3",  "exO",   "exSL",  "exA",  "enS",  "enO1", "enO2",  "enO3",
      "enSL",  "enA",   "runS",  "runS2", "runS3", "runO", "runSL", "runA",
      "Chart"};
  return kNames;
}

}  // namespace sfsem::testkit
