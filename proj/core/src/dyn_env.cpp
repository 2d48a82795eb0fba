#include "sfsem/dyn_env.hpp"

namespace sfsem {

std::uint64_t Valuation::event_count(const Path& p,
                                     const std::string& event) const {
  auto it = event_counts.find(p);
  if (it == event_counts.end()) return 0;
  auto jt = it->second.find(event);
  return jt == it->second.end() ? 0 : jt->second;
}

std::uint64_t Valuation::time(const Path& p) const {
  auto it = ticks.find(p);
  return it == ticks.end() ? 0 : it->second;
}

std::size_t Valuation::queue_length(const std::string& message) const {
  auto it = queues.find(message);
  return it == queues.end() ? 0 : it->second.size();
}

const ActivationInfo& Status::at(const Path& p) const {
  static const ActivationInfo kInactive;
  auto it = info_.find(p);
  return it == info_.end() ? kInactive : it->second;
}

std::vector<Path> Status::active_paths() const {
  std::vector<Path> out;
  for (const auto& [p, info] : info_)
    if (info.is_active && !p.empty()) out.push_back(p);
  return out;
}

void DynEnv::set_active(const Path& p, ParentLink link) {
  status.mutable_at(p).is_active = true;
  if (link == ParentLink::kExclusive && p.size() > 1)
    status.mutable_at(p.parent()).active_substate = p;
}

void DynEnv::set_inactive(const Path& p) {
  status.mutable_at(p).is_active = false;
}

void DynEnv::record_history(const Path& p, const Path& substate) {
  status.mutable_at(p).history = substate;
}

void DynEnv::clear_active_substate(const Path& p) {
  // Avoid materialising default entries for paths never touched.
  if (status.at(p).active_substate.empty()) return;
  status.mutable_at(p).active_substate = Path{};
}

void DynEnv::push_message(const std::string& name, MessageRecord data) {
  v.queues[name].push_back(data);
}

bool DynEnv::pop_message(const std::string& name) {
  auto it = v.queues.find(name);
  if (it == v.queues.end() || it->second.empty()) return false;
  v.vars[name] = it->second.front();
  it->second.pop_front();
  return true;
}

void DynEnv::incr_event_count(const Path& p, const std::string& event) {
  ++v.event_counts[p][event];
}

void DynEnv::incr_time(const Path& p) { ++v.ticks[p]; }

void DynEnv::reset_counters(const Path& p) {
  v.event_counts.erase(p);
  v.ticks.erase(p);
}

DynEnv init_env(const Chart& chart,
                const std::map<std::string, Value>& initial_vars) {
  DynEnv env;
  env.v.vars = chart.variables;
  for (const auto& [name, value] : initial_vars) env.v.vars[name] = value;
  return env;
}

std::vector<std::string> activation_violations(const Chart& chart,
                                               const DynEnv& env) {
  std::vector<std::string> out;
  for (const auto& [p, info] : env.status.entries()) {
    if (p.empty() || !chart.is_state(p)) continue;
    if (info.is_active && p != Chart::root_path() &&
        !env.is_active(p.parent()))
      out.push_back("'" + p.str() + "' is active but its parent is not");
    const auto& comp = state_lookup(chart, p).comp;
    if (const auto* o = std::get_if<OrComp>(&comp)) {
      if (!info.is_active) continue;
      int active_children = 0;
      for (const auto& name : o->substates)
        if (env.is_active(p.child(name))) ++active_children;
      if (active_children > 1)
        out.push_back("'" + p.str() + "' has " +
                      std::to_string(active_children) + " active substates");
      if (!info.active_substate.empty() &&
          !env.is_active(info.active_substate))
        out.push_back("'" + p.str() + "' records inactive substate '" +
                      info.active_substate.str() + "'");
      if (active_children == 1 && info.active_substate.empty())
        out.push_back("'" + p.str() +
                      "' has an active substate it does not record");
    } else if (!info.active_substate.empty() || !info.history.empty()) {
      out.push_back("'" + p.str() +
                    "' is not an Or-composition but records substates");
    }
  }
  return out;
}

}  // namespace sfsem
