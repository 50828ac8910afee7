#include "solgeom/metric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "solgeom/valuations.hpp"

namespace solgeom {

GenSet make_genset(const Group &group, std::vector<GroupElement> letters,
                   std::vector<std::string> names, std::vector<double> b) {
  if (names.size() != letters.size())
    throw std::invalid_argument("make_genset: one name per letter required");
  GenSet gs;
  gs.b = std::move(b);
  std::unordered_set<std::string> seen;
  const std::string id = group.encode(group.identity());
  auto push = [&](GroupElement g, std::string name) {
    std::string key = group.encode(g);
    if (key == id || !seen.insert(key).second)
      return;
    gs.letters.push_back(std::move(g));
    gs.names.push_back(std::move(name));
  };
  for (std::size_t i = 0; i < letters.size(); ++i)
    push(letters[i], names[i]);
  const std::size_t originals = gs.letters.size();
  for (std::size_t i = 0; i < originals; ++i)
    push(group.inverse(gs.letters[i]), gs.names[i] + "^-1");
  if (gs.letters.size() > 255)
    throw std::invalid_argument("generating sets are limited to 255 letters");
  for (const auto &l : gs.letters)
    gs.z = std::max(gs.z, std::fabs(b_functional(gs.b, l.shift)));
  return gs;
}

GenSet standard_genset(const Group &group) {
  const GroupElement t = group.shift_element(1);
  std::vector<GroupElement> letters{t};
  std::vector<std::string> names{"t"};
  switch (group.family()) {
  case Family::Lamplighter:
    letters.push_back(group.multiply(t, group.embed(group.one())));
    names.push_back("ta");
    break;
  case Family::Z16:
    letters.push_back(group.embed(group.one()));
    names.push_back("a");
    break;
  case Family::Sol:
    letters.push_back(group.embed(LatticeVec{1, 0}));
    letters.push_back(group.embed(LatticeVec{0, 1}));
    names.push_back("e1");
    names.push_back("e2");
    break;
  }
  return make_genset(group, std::move(letters), std::move(names), default_pair(group).b);
}

// ------------------------------------------------------------------ BallTable

namespace {
// deque slot + hash node + bucket + per-entry columns
constexpr std::size_t kEntryOverhead = 96;
constexpr std::uint32_t kNoParent = 0xffffffffu;
} // namespace

BallTable::BallTable(Group group, GenSet gens) : group_(std::move(group)), gens_(std::move(gens)) {}

std::optional<int> BallTable::length(std::string_view encoding) const {
  auto it = index_.find(encoding);
  if (it == index_.end())
    return std::nullopt;
  return lengths_[it->second];
}

void BallTable::insert(std::string key, int length, std::uint32_t parent, std::uint8_t letter) {
  bytes_ += key.size() + kEntryOverhead;
  keys_.push_back(std::move(key));
  index_.emplace(keys_.back(), static_cast<std::uint32_t>(lengths_.size()));
  lengths_.push_back(static_cast<std::uint16_t>(length));
  parents_.push_back(parent);
  parent_letters_.push_back(letter);
}

void BallTable::pop_back() {
  bytes_ -= keys_.back().size() + kEntryOverhead;
  index_.erase(keys_.back());
  keys_.pop_back();
  lengths_.pop_back();
  parents_.pop_back();
  parent_letters_.pop_back();
}

void BallTable::rebuild_parents() {
  std::vector<GroupElement> inverses;
  for (const auto &l : gens_.letters)
    inverses.push_back(group_.inverse(l));
  for (std::size_t i = 0; i < size(); ++i) {
    parents_[i] = kNoParent;
    if (lengths_[i] == 0)
      continue;
    const GroupElement g = element_at(i);
    for (std::size_t j = 0; j < inverses.size(); ++j) {
      auto it = index_.find(group_.encode(group_.multiply(g, inverses[j])));
      if (it != index_.end() && lengths_[it->second] + 1 == lengths_[i]) {
        parents_[i] = it->second;
        parent_letters_[i] = static_cast<std::uint8_t>(j);
        break;
      }
    }
    if (parents_[i] == kNoParent)
      throw std::runtime_error("ball table is inconsistent: element without predecessor");
  }
}

std::vector<std::size_t> BallTable::geodesic(const GroupElement &g) const {
  auto it = index_.find(group_.encode(g));
  if (it == index_.end())
    throw std::out_of_range("geodesic: element outside the ball");
  std::vector<std::size_t> word;
  for (std::uint32_t i = it->second; lengths_[i] > 0; i = parents_[i])
    word.push_back(parent_letters_[i]);
  std::reverse(word.begin(), word.end());
  return word;
}

BudgetExceeded::BudgetExceeded(std::shared_ptr<BallTable> p)
    : std::runtime_error("memory budget exceeded after radius " + std::to_string(p->radius())),
      partial(std::move(p)) {}

// ---------------------------------------------------------------- enumeration

namespace {

struct Candidate {
  std::string key;
  GroupElement element;
  std::uint32_t parent;
  std::uint8_t letter;
};

// Frontier elements are expanded in batches of this many; each batch is split
// into one contiguous range per worker and the ranges are merged in order, so
// the table never depends on the worker count.
constexpr std::size_t kBatch = 1 << 14;

} // namespace

BallTable enumerate_ball(const Group &group, const GenSet &gens, int radius,
                         const BallOptions &opts) {
  if (radius < 0)
    throw std::invalid_argument("enumerate_ball: radius must be >= 0");
  if (radius > 0xffff)
    throw std::invalid_argument("enumerate_ball: radius too large");
  BallTable table(group, gens);
  table.requested_ = radius;
  table.insert(group.encode(group.identity()), 0, kNoParent, 0);
  table.radius_ = 0;
  table.spheres_.push_back(1);

  std::vector<GroupElement> frontier{group.identity()};
  std::vector<std::uint32_t> frontier_ids{0};
  const unsigned workers = std::max(1u, opts.workers);

  for (int r = 1; r <= radius; ++r) {
    std::vector<GroupElement> next;
    std::vector<std::uint32_t> next_ids;
    const std::size_t sphere_start = table.size();

    for (std::size_t begin = 0; begin < frontier.size(); begin += kBatch) {
      const std::size_t end = std::min(frontier.size(), begin + kBatch);
      const std::size_t parts = std::min<std::size_t>(workers, end - begin);
      std::vector<std::vector<Candidate>> found(parts);
      auto expand = [&](std::size_t part) {
        const std::size_t lo = begin + (end - begin) * part / parts;
        const std::size_t hi = begin + (end - begin) * (part + 1) / parts;
        auto &out = found[part];
        for (std::size_t f = lo; f < hi; ++f) {
          for (std::size_t j = 0; j < gens.size(); ++j) {
            GroupElement y = group.multiply(frontier[f], gens.letters[j]);
            std::string key = group.encode(y);
            // the table is not written while workers run
            if (table.index_.find(key) != table.index_.end())
              continue;
            out.push_back({std::move(key), std::move(y), frontier_ids[f],
                           static_cast<std::uint8_t>(j)});
          }
        }
      };
      if (parts == 1) {
        expand(0);
      } else {
        std::vector<std::thread> pool;
        for (std::size_t p = 0; p < parts; ++p)
          pool.emplace_back(expand, p);
        for (auto &t : pool)
          t.join();
      }
      for (auto &part : found) {
        for (auto &c : part) {
          if (table.index_.find(c.key) != table.index_.end())
            continue;
          next_ids.push_back(static_cast<std::uint32_t>(table.size()));
          table.insert(std::move(c.key), r, c.parent, c.letter);
          next.push_back(std::move(c.element));
        }
      }
      if (table.bytes_ > opts.memory_budget) {
        while (table.size() > sphere_start)
          table.pop_back();
        throw BudgetExceeded(std::make_shared<BallTable>(std::move(table)));
      }
    }
    table.spheres_.push_back(table.size() - sphere_start);
    table.radius_ = r;
    frontier = std::move(next);
    frontier_ids = std::move(next_ids);
  }
  return table;
}

std::optional<int> word_length(const BallTable &table, const GroupElement &g) {
  return table.length(g);
}

std::optional<int> restricted_distance(const BallTable &table, const GroupElement &g,
                                       const GroupElement &h, int r) {
  const Group &G = table.group();
  if (r > table.radius())
    throw std::invalid_argument("restricted_distance: r exceeds the enumerated radius");
  const auto lg = table.length(g);
  const auto lh = table.length(h);
  if (!lg || !lh || *lg > r || *lh > r)
    throw std::invalid_argument("restricted_distance: endpoints must lie in the ball of radius r");
  const std::string target = G.encode(h);
  std::string start = G.encode(g);
  if (start == target)
    return 0;
  std::unordered_set<std::string> seen{start};
  std::vector<GroupElement> layer{g};
  for (int d = 1; !layer.empty(); ++d) {
    std::vector<GroupElement> next;
    for (const auto &x : layer) {
      for (const auto &s : table.gens().letters) {
        GroupElement y = G.multiply(x, s);
        std::string key = G.encode(y);
        auto len = table.length(key);
        if (!len || *len > r)
          continue;
        if (key == target)
          return d;
        if (seen.insert(std::move(key)).second)
          next.push_back(std::move(y));
      }
    }
    layer = std::move(next);
  }
  return std::nullopt;
}

DepthResult depth(const BallTable &table, const GroupElement &g, int max_search) {
  const Group &G = table.group();
  const auto lg = table.length(g);
  if (!lg)
    throw std::invalid_argument("depth: element outside the enumerated ball");
  const int level = *lg;
  std::unordered_set<std::string> seen{G.encode(g)};
  std::vector<GroupElement> layer{g};
  // Elements absent from the table have length > radius >= level, so every
  // exit from B(level) is visible.
  for (int d = 0; !layer.empty(); ++d) {
    if (d >= max_search)
      return {d + 1, false};
    std::vector<GroupElement> next;
    for (const auto &x : layer) {
      for (const auto &s : table.gens().letters) {
        GroupElement y = G.multiply(x, s);
        std::string key = G.encode(y);
        auto len = table.length(key);
        if (!len || *len > level)
          return {d + 1, true};
        if (seen.insert(std::move(key)).second)
          next.push_back(std::move(y));
      }
    }
    layer = std::move(next);
  }
  // B(level) is a whole finite group
  return {static_cast<int>(seen.size()), false};
}

std::string sphere_sizes_csv(const BallTable &table) {
  std::ostringstream os;
  os << "radius,sphere_size,ball_size\n";
  std::size_t total = 0;
  for (std::size_t r = 0; r < table.sphere_sizes().size(); ++r) {
    total += table.sphere_sizes()[r];
    os << r << ',' << table.sphere_sizes()[r] << ',' << total << '\n';
  }
  return os.str();
}

} // namespace solgeom
