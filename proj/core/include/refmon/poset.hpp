#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace refmon {

/// Marks an absent index in index maps.
inline constexpr std::size_t kNone = static_cast<std::size_t>(-1);

/// Subset of a poset's elements as a bitset over element indices.
class ElemSet {
 public:
  ElemSet() = default;
  explicit ElemSet(std::size_t universe) : n_(universe), words_((universe + 63) / 64) {}

  static ElemSet of(std::size_t universe, const std::vector<std::size_t>& members);

  std::size_t universe() const { return n_; }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  void reset(std::size_t i) { words_[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }

  std::size_t count() const;
  bool empty() const;
  bool subset_of(const ElemSet& other) const;
  bool intersects(const ElemSet& other) const;
  std::vector<std::size_t> members() const;

  ElemSet operator|(const ElemSet& o) const;
  ElemSet operator&(const ElemSet& o) const;
  ElemSet operator-(const ElemSet& o) const;
  ElemSet& operator|=(const ElemSet& o);
  ElemSet& operator&=(const ElemSet& o);

  bool operator==(const ElemSet& o) const = default;
  /// Size first, then lexicographic on sorted members.
  bool operator<(const ElemSet& o) const;

  std::size_t hash() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

struct ElemSetHash {
  std::size_t operator()(const ElemSet& s) const { return s.hash(); }
};

using LowerSet = ElemSet;

/// Finite poset with precomputed down/up closures.
class Poset {
 public:
  Poset() = default;

  /// Builds the reflexive-transitive closure of the given [below, above] pairs; throws on cycles.
  static Poset from_relations(std::vector<std::string> ids,
                              const std::vector<std::pair<std::size_t, std::size_t>>& below_above);

  std::size_t size() const { return ids_.size(); }
  const std::string& id(std::size_t i) const { return ids_[i]; }
  const std::vector<std::string>& ids() const { return ids_; }
  std::optional<std::size_t> find(const std::string& id) const;
  /// Throws UnknownElement.
  std::size_t index_of(const std::string& id) const;

  bool leq(std::size_t i, std::size_t j) const { return down_[j].test(i); }
  bool lt(std::size_t i, std::size_t j) const { return i != j && leq(i, j); }
  bool comparable(std::size_t i, std::size_t j) const { return leq(i, j) || leq(j, i); }

  const ElemSet& down(std::size_t i) const { return down_[i]; }
  const ElemSet& up(std::size_t i) const { return up_[i]; }
  ElemSet down_closure(const ElemSet& s) const;
  ElemSet empty_set() const { return ElemSet(size()); }
  ElemSet full_set() const;

  const std::vector<std::size_t>& lower_covers(std::size_t i) const { return lower_covers_[i]; }
  const std::vector<std::size_t>& upper_covers(std::size_t i) const { return upper_covers_[i]; }
  /// All cover pairs (below, above) sorted by index.
  std::vector<std::pair<std::size_t, std::size_t>> covers() const;

  std::vector<std::size_t> max_of(const ElemSet& s) const;
  std::vector<std::size_t> maximal_elements() const { return max_of(full_set()); }
  std::vector<std::size_t> minimal_elements() const;
  bool is_lower(const ElemSet& s) const;

  /// Every lower set, ordered by size then lexicographically.
  std::vector<LowerSet> lower_sets() const;
  /// Elements ordered so that i < j implies i comes first; ties by index.
  std::vector<std::size_t> linear_extension() const;

  bool chain_up_property() const;

  /// Induced subposet on s (elements keep their relative order); map[i_new] = i_old.
  Poset induced(const ElemSet& s, std::vector<std::size_t>* map = nullptr) const;

  std::string to_dot(const std::string& name) const;
  bool operator==(const Poset& o) const { return ids_ == o.ids_ && down_ == o.down_; }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<ElemSet> down_;
  std::vector<ElemSet> up_;
  std::vector<std::vector<std::size_t>> lower_covers_;
  std::vector<std::vector<std::size_t>> upper_covers_;
};

std::vector<std::size_t> down(const Poset& p, std::size_t i);
/// Maximal chains of p, each listed top to bottom.
std::vector<std::vector<std::size_t>> maximal_chains(const Poset& p);

/// An order isomorphism a -> b (map[i_a] = i_b), if one exists.
std::optional<std::vector<std::size_t>> find_isomorphism(const Poset& a, const Poset& b);
/// True if f is a bijection with i <= j iff f(i) <= f(j).
bool is_order_isomorphism(const Poset& a, const Poset& b, const std::vector<std::size_t>& f);

/// Tree of saturated descending chains from a maximal element k.
struct ChainTree {
  std::size_t root_element = 0;                  // k, as an index of the base poset
  std::vector<std::vector<std::size_t>> chains;  // node -> chain (k, ..., psi(node))
  Poset tree;                                    // node t1 <= t2 iff chain(t2) is a prefix of chain(t1)
  std::vector<std::size_t> projection;           // node -> last element of its chain
};

/// Throws NotMaximal.
ChainTree chain_tree(const Poset& p, std::size_t k);
/// Checks the five structural properties of the projection; empty when all hold.
std::vector<std::string> chain_tree_violations(const Poset& base, const ChainTree& t);
std::string to_dot(const ChainTree& t, const Poset& base, const std::string& name);

}  // namespace refmon
