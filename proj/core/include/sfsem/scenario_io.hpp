#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sfsem/chart.hpp"
#include "sfsem/errors.hpp"
#include "sfsem/exec.hpp"

namespace sfsem {

struct Scenario {
  std::map<std::string, Value> initial_vars;
  std::vector<std::optional<std::string>> events;  // nullopt is ε
  std::optional<std::vector<std::string>> expected_prints;
  std::optional<std::uint64_t> fuel_per_round;
  std::optional<double> execution_period;  // recorded only
};

/// Parses and validates a chart. Throws LoadError: JSON syntax errors carry a
/// line/column, schema errors a field path, and validation failures the
/// diagnostics from validate_chart.
Chart load_chart(std::string_view json_text);
Scenario load_scenario(std::string_view json_text);

/// Reads a whole file; LoadError("cannot read <what> ...") on failure.
std::string read_text_file(const std::filesystem::path& path,
                           std::string_view what);

/// Declared-event check of a scenario against a chart.
std::vector<Diagnostic> check_scenario(const Chart& chart,
                                       const Scenario& scenario);

/// Chart JSON accepted by load_chart (keys sorted).
std::string emit_chart(const Chart& chart);

/// Canonical trace JSON: sorted keys, two-space indent, trailing newline.
std::string emit_trace(const Trace& trace);

struct CheckReport {
  bool pass = true;
  std::size_t index = 0;  // first divergence
  std::optional<std::string> expected;  // nullopt past the end
  std::optional<std::string> actual;
  [[nodiscard]] std::string describe() const;
};

/// Compares the flattened print stream against `expected`.
CheckReport check_trace(const Trace& trace,
                        const std::vector<std::string>& expected);

}  // namespace sfsem
