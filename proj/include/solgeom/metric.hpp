#pragma once

// Word metric on G with respect to a finite symmetric generating set:
// breadth-first ball enumeration, word length lookup, ball-restricted
// distance and dead-end depth.
//
// Edges of the Cayley graph join g and g*s for s in S, so |g| = d(1, g) and
// d(g, h) = |g^-1 h|.

#include <cstdint>
#include <deque>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "solgeom/group.hpp"

namespace solgeom {

/// Finite generating set, closed under inverses and without the identity.
/// Letters keep the order they were given in; inverses that were not already
/// present are appended afterwards, in the order of the letters they invert.
struct GenSet {
  std::vector<GroupElement> letters;
  std::vector<std::string> names;
  /// max over letters of |B(shift)|
  double z = 0.0;
  std::vector<double> b;

  std::size_t size() const { return letters.size(); }
};

GenSet make_genset(const Group &group, std::vector<GroupElement> letters,
                   std::vector<std::string> names, std::vector<double> b);

/// lamplighter: {t, ta}; z16: {t, a}; sol: {t, e1, e2}; then closed.
GenSet standard_genset(const Group &group);

struct BallOptions {
  unsigned workers = 1;
  std::size_t memory_budget = std::size_t{2} << 30;
};

/// Exact word lengths of every element of the closed ball of radius
/// radius(). Keyed by canonical encoding. Move-only.
class BallTable {
public:
  BallTable(Group group, GenSet gens);
  BallTable(const BallTable &) = delete;
  BallTable &operator=(const BallTable &) = delete;
  BallTable(BallTable &&) = default;
  BallTable &operator=(BallTable &&) = default;

  const Group &group() const { return group_; }
  const GenSet &gens() const { return gens_; }
  /// Largest radius r for which every element of length <= r is stored.
  int radius() const { return radius_; }
  int requested_radius() const { return requested_; }
  bool truncated() const { return radius_ < requested_; }
  std::size_t size() const { return lengths_.size(); }
  const std::vector<std::size_t> &sphere_sizes() const { return spheres_; }
  std::size_t approx_bytes() const { return bytes_; }

  std::optional<int> length(std::string_view encoding) const;
  std::optional<int> length(const GroupElement &g) const { return length(group_.encode(g)); }
  bool contains(const GroupElement &g) const { return length(g).has_value(); }

  /// Entries in insertion (BFS) order.
  const std::string &encoding_at(std::size_t i) const { return keys_[i]; }
  int length_at(std::size_t i) const { return lengths_[i]; }
  GroupElement element_at(std::size_t i) const { return group_.decode(keys_[i]); }

  /// Letter indices of a geodesic word for g (which must be in the table).
  std::vector<std::size_t> geodesic(const GroupElement &g) const;

  void save(const std::filesystem::path &path) const;
  static BallTable load(const std::filesystem::path &path);

private:
  friend BallTable enumerate_ball(const Group &, const GenSet &, int, const BallOptions &);

  void insert(std::string key, int length, std::uint32_t parent, std::uint8_t letter);
  void pop_back();
  void rebuild_parents();

  Group group_;
  GenSet gens_;
  int radius_ = -1;
  int requested_ = 0;
  std::deque<std::string> keys_;
  std::unordered_map<std::string_view, std::uint32_t> index_;
  std::vector<std::uint16_t> lengths_;
  std::vector<std::uint32_t> parents_;
  std::vector<std::uint8_t> parent_letters_;
  std::vector<std::size_t> spheres_;
  std::size_t bytes_ = 0;
};

/// Thrown by enumerate_ball when the memory budget would be exceeded. The
/// partial table holds every complete sphere reached so far.
class BudgetExceeded : public std::runtime_error {
public:
  explicit BudgetExceeded(std::shared_ptr<BallTable> partial);
  std::shared_ptr<BallTable> partial;
};

BallTable enumerate_ball(const Group &group, const GenSet &gens, int radius,
                         const BallOptions &opts = {});

std::optional<int> word_length(const BallTable &table, const GroupElement &g);

/// Shortest path from g to h through elements of length <= r. nullopt means
/// no such path exists. Requires |g|, |h| <= r <= radius.
std::optional<int> restricted_distance(const BallTable &table, const GroupElement &g,
                                       const GroupElement &h, int r);

struct DepthResult {
  int value = 0;
  /// false when the search stopped at max_search; value is then a lower bound
  bool exact = true;
};

/// Distance from g to the nearest x with |x| > |g|. Requires |g| <= radius.
DepthResult depth(const BallTable &table, const GroupElement &g, int max_search = 1 << 20);

/// CSV body: radius,sphere_size,ball_size
std::string sphere_sizes_csv(const BallTable &table);

} // namespace solgeom
