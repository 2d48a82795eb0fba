#include "sfsem/path.hpp"

#include <algorithm>
#include <stdexcept>

namespace sfsem {

Path Path::Parse(std::string_view text) {
  std::vector<std::string> segments;
  if (text.empty()) return Path{};
  std::size_t start = 0;
  while (true) {
    auto dot = text.find(kSeparator, start);
    if (dot == std::string_view::npos) {
      segments.emplace_back(text.substr(start));
      break;
    }
    segments.emplace_back(text.substr(start, dot - start));
    start = dot + 1;
  }
  return Path(std::move(segments));
}

const std::string& Path::head() const {
  if (segments_.empty()) throw std::logic_error("head of empty path");
  return segments_.front();
}

const std::string& Path::last() const {
  if (segments_.empty()) throw std::logic_error("last of empty path");
  return segments_.back();
}

Path Path::tail() const {
  if (segments_.empty()) return {};
  return Path(std::vector<std::string>(segments_.begin() + 1, segments_.end()));
}

Path Path::parent() const {
  if (segments_.empty()) throw std::logic_error("parent of empty path");
  return Path(std::vector<std::string>(segments_.begin(), segments_.end() - 1));
}

Path Path::child(std::string name) const {
  auto segments = segments_;
  segments.push_back(std::move(name));
  return Path(std::move(segments));
}

bool Path::is_junction() const {
  return !segments_.empty() && !segments_.back().empty() &&
         segments_.back().front() == kJunctionMarker;
}

Path Path::owner_state() const { return is_junction() ? parent() : *this; }

bool Path::is_prefix_of(const Path& other) const {
  return segments_.size() <= other.segments_.size() &&
         std::equal(segments_.begin(), segments_.end(),
                    other.segments_.begin());
}

Path Path::concat(const Path& suffix) const {
  auto segments = segments_;
  segments.insert(segments.end(), suffix.segments_.begin(),
                  suffix.segments_.end());
  return Path(std::move(segments));
}

std::string Path::str() const {
  std::string out;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (i) out += kSeparator;
    out += segments_[i];
  }
  return out;
}

std::string check_path_syntax(const Path& p) {
  auto segments = p.segments();
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (s.empty()) return "empty segment in '" + p.str() + "'";
    if (s.find(Path::kSeparator) != std::string::npos)
      return "segment '" + s + "' contains a separator";
    bool junction = s.front() == Path::kJunctionMarker;
    if (junction && s.size() == 1)
      return "junction segment without a name in '" + p.str() + "'";
    if (junction && i + 1 != segments.size())
      return "junction '" + s + "' is not the final segment of '" + p.str() +
             "'";
  }
  return {};
}

Path lca(std::span<const Path> paths) {
  if (paths.empty()) throw std::logic_error("lca of an empty path list");
  std::vector<std::string> common;
  Path first = paths.front().owner_state();
  auto first_segments = first.segments();
  common.assign(first_segments.begin(), first_segments.end());
  for (const auto& raw : paths.subspan(1)) {
    Path p = raw.owner_state();
    auto segments = p.segments();
    std::size_t n = 0;
    while (n < common.size() && n < segments.size() &&
           common[n] == segments[n])
      ++n;
    common.resize(n);
  }
  return Path(std::move(common));
}

Path lca(std::initializer_list<Path> paths) {
  return lca(std::span<const Path>(paths.begin(), paths.size()));
}

Path path_diff(const Path& target, const Path& ancestor) {
  if (!ancestor.is_prefix_of(target))
    throw std::logic_error("path_diff: '" + ancestor.str() +
                           "' is not a prefix of '" + target.str() + "'");
  auto segments = target.segments();
  return Path(std::vector<std::string>(segments.begin() + ancestor.size(),
                                       segments.end()));
}

}  // namespace sfsem
