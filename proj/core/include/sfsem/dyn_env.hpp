#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "sfsem/chart.hpp"
#include "sfsem/path.hpp"
#include "sfsem/value.hpp"

namespace sfsem {

// Variables, per-state event counts and ticks, message queues. Counters and
// queues read as zero/empty when absent.
struct Valuation {
  std::map<std::string, Value> vars;
  std::map<Path, std::map<std::string, std::uint64_t>> event_counts;
  std::map<Path, std::uint64_t> ticks;
  std::map<std::string, std::deque<MessageRecord>> queues;

  [[nodiscard]] std::uint64_t event_count(const Path& p,
                                          const std::string& event) const;
  [[nodiscard]] std::uint64_t time(const Path& p) const;
  [[nodiscard]] std::size_t queue_length(const std::string& message) const;

  friend bool operator==(const Valuation&, const Valuation&) = default;
};

struct ActivationInfo {
  bool is_active = false;
  Path active_substate;
  Path history;
  friend bool operator==(const ActivationInfo&,
                         const ActivationInfo&) = default;
};

// Path -> activation info, defaulting to (inactive, empty, empty).
class Status {
 public:
  [[nodiscard]] const ActivationInfo& at(const Path& p) const;
  ActivationInfo& mutable_at(const Path& p) { return info_[p]; }

  [[nodiscard]] const std::map<Path, ActivationInfo>& entries() const {
    return info_;
  }
  /// Active paths in sorted order.
  [[nodiscard]] std::vector<Path> active_paths() const;

  friend bool operator==(const Status&, const Status&) = default;

 private:
  std::map<Path, ActivationInfo> info_;
};

// How set_active treats the parent's bookkeeping: children of an
// Or-composition become its active substate, And-children leave it empty.
enum class ParentLink { kExclusive, kParallel };

// Valuation and activation status, plus the log of printed strings.
struct DynEnv {
  Valuation v;
  Status status;
  std::vector<std::string> print_log;

  [[nodiscard]] bool is_active(const Path& p) const {
    return status.at(p).is_active;
  }

  void set_active(const Path& p, ParentLink link = ParentLink::kExclusive);
  void set_inactive(const Path& p);
  void record_history(const Path& p, const Path& substate);
  void clear_active_substate(const Path& p);

  void push_message(const std::string& name, MessageRecord data);
  /// Moves the queue head into vars[name]. False (and no change) when empty.
  bool pop_message(const std::string& name);

  void incr_event_count(const Path& p, const std::string& event);
  void incr_time(const Path& p);
  void reset_counters(const Path& p);

  friend bool operator==(const DynEnv&, const DynEnv&) = default;
};

/// Declared chart variables with their initials, overridden by
/// `initial_vars`. Everything else starts inactive, zeroed and empty.
DynEnv init_env(const Chart& chart,
                const std::map<std::string, Value>& initial_vars = {});

/// Upward closure and single-active-Or-child checks; one line per violation.
std::vector<std::string> activation_violations(const Chart& chart,
                                               const DynEnv& env);

}  // namespace sfsem
