#pragma once

#include <compare>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sfsem {

/// A dotted address of a state or junction, starting from the chart root.
///
/// Junction names carry a leading `#` so a junction can never collide with a
/// state of the same name. The empty path addresses nothing in particular; it
/// is the "no path" value used for absent targets and cleared bookkeeping.
class Path {
 public:
  static constexpr char kSeparator = '.';
  static constexpr char kJunctionMarker = '#';

  Path() = default;
  Path(std::initializer_list<std::string> segments) : segments_(segments) {}
  explicit Path(std::vector<std::string> segments)
      : segments_(std::move(segments)) {}

  /// Splits on '.'; the empty string yields the empty path. Does not validate.
  static Path Parse(std::string_view text);

  [[nodiscard]] bool empty() const { return segments_.empty(); }
  [[nodiscard]] std::size_t size() const { return segments_.size(); }
  [[nodiscard]] std::span<const std::string> segments() const {
    return segments_;
  }

  [[nodiscard]] const std::string& head() const;
  [[nodiscard]] const std::string& last() const;
  [[nodiscard]] Path tail() const;

  /// Drops the final segment. Throws std::logic_error on the empty path.
  [[nodiscard]] Path parent() const;
  [[nodiscard]] Path child(std::string name) const;

  [[nodiscard]] bool is_junction() const;
  /// The path with a trailing junction segment removed, else itself.
  [[nodiscard]] Path owner_state() const;

  [[nodiscard]] bool is_prefix_of(const Path& other) const;
  [[nodiscard]] Path concat(const Path& suffix) const;

  [[nodiscard]] std::string str() const;

  friend auto operator<=>(const Path&, const Path&) = default;
  friend bool operator==(const Path&, const Path&) = default;

 private:
  std::vector<std::string> segments_;
};

/// Checks the segment rules: non-empty names without separators, and only
/// the final segment may be a junction. Returns an empty string when valid,
/// otherwise a description of the first problem.
std::string check_path_syntax(const Path& p);

/// Longest common prefix of state segments; junction final segments are
/// ignored. Throws std::logic_error on an empty list.
Path lca(std::span<const Path> paths);
Path lca(std::initializer_list<Path> paths);

/// parent(p); contract violation on the empty path.
inline Path parent(const Path& p) { return p.parent(); }

/// The suffix of `target` after the `ancestor` prefix. Throws
/// std::logic_error when `ancestor` is not a prefix of `target`.
Path path_diff(const Path& target, const Path& ancestor);

}  // namespace sfsem
