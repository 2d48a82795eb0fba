#include "cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>

#include "sfsem/dyn_env.hpp"
#include "sfsem/exec.hpp"
#include "sfsem/scenario_io.hpp"

namespace sfsem::cli {

namespace {

struct RunFlags {
  std::string chart_path;
  std::string scenario_path;
  std::string out_path;
  std::optional<std::uint64_t> fuel;
  bool strict_terminal_junction = false;
  bool snapshot_vars = false;
};

std::optional<std::uint64_t> fuel_from_env(std::ostream& err) {
  const char* raw = std::getenv("SFSEM_FUEL");
  if (!raw || !*raw) return std::nullopt;
  std::uint64_t n = 0;
  const char* end = raw + std::char_traits<char>::length(raw);
  auto [ptr, ec] = std::from_chars(raw, end, n);
  if (ec != std::errc() || ptr != end) {
    err << "warning: ignoring SFSEM_FUEL='" << raw << "'\n";
    return std::nullopt;
  }
  return n;
}

void report_load_error(const LoadError& e, std::ostream& err) {
  err << "error: " << e.what() << "\n";
  if (e.diagnostics().size() > 1)
    for (const auto& d : e.diagnostics())
      err << "  [" << d.code << "] " << d.message << "\n";
}

struct Executed {
  Trace trace;
  std::optional<std::vector<std::string>> expected;
};

// Loads, checks declarations and runs. Returns nullopt (after reporting) on
// input errors.
std::optional<Executed> load_and_run(const RunFlags& f, std::ostream& err) {
  Chart chart;
  Scenario scenario;
  try {
    chart = load_chart(read_text_file(f.chart_path, "chart"));
    scenario = load_scenario(read_text_file(f.scenario_path, "scenario"));
  } catch (const LoadError& e) {
    report_load_error(e, err);
    return std::nullopt;
  }
  auto problems = check_scenario(chart, scenario);
  if (!problems.empty()) {
    for (const auto& d : problems) err << "error: " << d.message << "\n";
    return std::nullopt;
  }

  ExecOptions opts;
  if (f.fuel)
    opts.fuel_per_round = *f.fuel;
  else if (scenario.fuel_per_round)
    opts.fuel_per_round = *scenario.fuel_per_round;
  else if (auto env_fuel = fuel_from_env(err))
    opts.fuel_per_round = *env_fuel;
  opts.strict_terminal_junction = f.strict_terminal_junction;
  opts.snapshot_vars = f.snapshot_vars;

  auto result = run_chart(chart, init_env(chart, scenario.initial_vars),
                          scenario.events, opts);
  result.trace.execution_period = scenario.execution_period;
  return Executed{std::move(result.trace), std::move(scenario.expected_prints)};
}

int write_trace(const Trace& trace, const std::string& out_path,
                std::ostream& out, std::ostream& err) {
  std::string text = emit_trace(trace);
  if (out_path.empty() || out_path == "-") {
    out << text;
  } else {
    std::ofstream file(out_path, std::ios::binary);
    if (!file || !(file << text)) {
      err << "error: cannot write trace to '" << out_path << "'\n";
      return kExitInput;
    }
  }
  if (trace.status != RunStatus::kOk) {
    err << "error: " << trace.error_kind << " error in round "
        << trace.error_round << ": " << trace.error << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

void add_run_options(CLI::App& cmd, RunFlags& f) {
  cmd.add_option("chart", f.chart_path, "Chart JSON file")->required();
  cmd.add_option("scenario", f.scenario_path, "Scenario JSON file")
      ->required();
  cmd.add_option("--fuel", f.fuel,
                 "Rule applications allowed per round (default 100000)");
  cmd.add_flag("--strict-terminal-junction", f.strict_terminal_junction,
               "A terminal junction only fails the transition search");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Execute Stateflow-style charts against event scenarios",
               "sfsem"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and emit a trace");
  add_run_options(*run_cmd, run_flags);
  run_cmd->add_option("--out", run_flags.out_path,
                      "Trace output file (default stdout)");
  run_cmd->add_flag("--snapshot-vars", run_flags.snapshot_vars,
                    "Record the full valuation after every round");

  RunFlags check_flags;
  auto* check_cmd = app.add_subcommand(
      "check", "Run a scenario and compare prints with expectedPrints");
  add_run_options(*check_cmd, check_flags);

  std::string validate_path;
  auto* validate_cmd =
      app.add_subcommand("validate", "Check a chart for structural problems");
  validate_cmd->add_option("chart", validate_path, "Chart JSON file")
      ->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // --help and --version are "errors" with a zero exit code.
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n" << app.help();
    return kExitInput;
  }

  if (*run_cmd) {
    auto done = load_and_run(run_flags, err);
    if (!done) return kExitInput;
    return write_trace(done->trace, run_flags.out_path, out, err);
  }

  if (*check_cmd) {
    auto done = load_and_run(check_flags, err);
    if (!done) return kExitInput;
    if (!done->expected) {
      err << "error: scenario has no expectedPrints; nothing to check\n";
      return kExitInput;
    }
    const Trace& trace = done->trace;
    if (trace.status != RunStatus::kOk) {
      err << "error: " << trace.error_kind << " error in round "
          << trace.error_round << ": " << trace.error << "\n";
      return kExitRuntime;
    }
    auto report = check_trace(trace, *done->expected);
    if (!report.pass) {
      err << "mismatch: " << report.describe() << "\n";
      return kExitMismatch;
    }
    out << "ok: " << done->expected->size() << " prints match\n";
    return kExitOk;
  }

  try {
    load_chart(read_text_file(validate_path, "chart"));
  } catch (const LoadError& e) {
    err << "error: " << e.what() << "\n";
    for (const auto& d : e.diagnostics())
      err << "  [" << d.code << "] " << d.message << "\n";
    return kExitInput;
  }
  out << "ok: chart is valid\n";
  return kExitOk;
}

}  // namespace sfsem::cli
