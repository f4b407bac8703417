#pragma once

#include "coarse/metric.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace coarse {

/// A group element in the canonical normal form of its family. Equality is
/// normal-form equality.
struct Element {
  std::vector<std::int64_t> word;

  friend bool operator==(const Element&, const Element&) = default;
  friend auto operator<=>(const Element&, const Element&) = default;
};

struct ElementHash {
  std::size_t operator()(const Element& e) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ull + e.word.size();
    for (auto v : e.word) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

/// A finitely generated group with a fixed finite symmetric generating set.
/// `word_length` is the family's closed form; it must agree with breadth-first
/// distance in the Cayley graph of `generators()`.
class GroupModel {
 public:
  virtual ~GroupModel() = default;

  /// Config string, e.g. "Zd:2", "DInfinity".
  virtual std::string spec() const = 0;
  virtual Element identity() const = 0;
  virtual Element multiply(const Element& g, const Element& h) const = 0;
  virtual Element invert(const Element& g) const = 0;
  virtual std::vector<Element> generators() const = 0;
  virtual std::int64_t word_length(const Element& g) const = 0;

  /// Every element of word length <= radius, in any order.
  virtual std::vector<Element> elements_up_to(std::int64_t radius) const = 0;
  /// |B_radius(e)|, saturating at UINT64_MAX.
  virtual std::uint64_t predicted_ball_size(std::int64_t radius) const = 0;

  virtual std::string format(const Element& g) const = 0;
  virtual Element parse(std::string_view text) const = 0;
  /// Throws DomainError when g is not a normal form of this family.
  virtual void validate(const Element& g) const = 0;

  std::vector<std::string> generator_names() const;
  std::int64_t distance(const Element& g, const Element& h) const {
    return word_length(multiply(invert(g), h));
  }
};

using GroupPtr = std::shared_ptr<const GroupModel>;

/// "Zd:<d>", "Z" (= Zd:1), "Free:<k>", "DInfinity", "Cyclic:<n>", "Symmetric:<n>".
GroupPtr make_group(std::string_view spec);

/// Shortlex: word length, then normal-form lexicographic.
bool shortlex_less(const GroupModel& group, const Element& a, const Element& b);

inline constexpr std::uint64_t kDefaultBallCap = 1'000'000;

struct GroupBall {
  GroupPtr group;
  std::int64_t radius = 0;
  std::vector<Element> elements;  // shortlex order
};

/// A ball with an element -> position lookup.
class IndexedBall {
 public:
  explicit IndexedBall(GroupBall ball);

  const GroupBall& ball() const noexcept { return ball_; }
  std::size_t size() const noexcept { return ball_.elements.size(); }
  std::optional<std::size_t> find(const Element& g) const;
  const Element& at(std::size_t i) const { return ball_.elements.at(i); }

 private:
  GroupBall ball_;
  std::unordered_map<Element, std::size_t, ElementHash> index_;
};

GroupBall enumerate_ball(GroupPtr group, std::int64_t radius, std::uint64_t cap = kDefaultBallCap);

/// The ball B_R(e) as a metric window with d(g,h) = |g^{-1}h|; depth(g) = R - |g|.
MetricWindow group_window(const GroupPtr& group, std::int64_t radius,
                          std::uint64_t cap = kDefaultBallCap);

/// Validates the normal form, then returns its word length.
std::int64_t word_length_of(const GroupModel& group, const Element& g);

}  // namespace coarse
