#include "refmon/poset.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "refmon/errors.hpp"

namespace refmon {

// ---------------------------------------------------------------- ElemSet

ElemSet ElemSet::of(std::size_t universe, const std::vector<std::size_t>& members) {
  ElemSet s(universe);
  for (std::size_t i : members) s.set(i);
  return s;
}

std::size_t ElemSet::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(__builtin_popcountll(w));
  return c;
}

bool ElemSet::empty() const {
  for (auto w : words_)
    if (w) return false;
  return true;
}

bool ElemSet::subset_of(const ElemSet& other) const {
  for (std::size_t k = 0; k < words_.size(); ++k)
    if (words_[k] & ~other.words_[k]) return false;
  return true;
}

bool ElemSet::intersects(const ElemSet& other) const {
  for (std::size_t k = 0; k < words_.size(); ++k)
    if (words_[k] & other.words_[k]) return true;
  return false;
}

std::vector<std::size_t> ElemSet::members() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n_; ++i)
    if (test(i)) out.push_back(i);
  return out;
}

ElemSet ElemSet::operator|(const ElemSet& o) const {
  ElemSet r = *this;
  r |= o;
  return r;
}

ElemSet ElemSet::operator&(const ElemSet& o) const {
  ElemSet r = *this;
  r &= o;
  return r;
}

ElemSet ElemSet::operator-(const ElemSet& o) const {
  ElemSet r = *this;
  for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] &= ~o.words_[k];
  return r;
}

ElemSet& ElemSet::operator|=(const ElemSet& o) {
  for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
  return *this;
}

ElemSet& ElemSet::operator&=(const ElemSet& o) {
  for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
  return *this;
}

bool ElemSet::operator<(const ElemSet& o) const {
  const std::size_t a = count(), b = o.count();
  if (a != b) return a < b;
  return members() < o.members();
}

std::size_t ElemSet::hash() const {
  std::size_t h = n_;
  for (auto w : words_) h = h * 1000003u ^ std::hash<std::uint64_t>{}(w);
  return h;
}

// ---------------------------------------------------------------- Poset

Poset Poset::from_relations(std::vector<std::string> ids,
                            const std::vector<std::pair<std::size_t, std::size_t>>& below_above) {
  Poset p;
  const std::size_t n = ids.size();
  p.ids_ = std::move(ids);
  for (std::size_t i = 0; i < n; ++i) {
    if (!p.index_.emplace(p.ids_[i], i).second)
      throw PreconditionViolated("duplicate element id '" + p.ids_[i] + "'");
  }
  p.down_.assign(n, ElemSet(n));
  for (std::size_t i = 0; i < n; ++i) p.down_[i].set(i);
  for (auto [lo, hi] : below_above) {
    if (lo >= n || hi >= n) throw UnknownElement("relation refers to an unknown element");
    p.down_[hi].set(lo);
  }
  // Warshall closure: if k <= j then down(k) is contained in down(j).
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j)
      if (p.down_[j].test(k)) p.down_[j] |= p.down_[k];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (p.down_[i].test(j) && p.down_[j].test(i))
        throw PreconditionViolated("order relation has a cycle through '" + p.ids_[i] + "' and '" +
                                   p.ids_[j] + "'");
  p.up_.assign(n, ElemSet(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i : p.down_[j].members()) p.up_[i].set(j);
  p.lower_covers_.assign(n, {});
  p.upper_covers_.assign(n, {});
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i : p.down_[j].members()) {
      if (i == j) continue;
      ElemSet between = p.up_[i] & p.down_[j];
      if (between.count() == 2) {
        p.lower_covers_[j].push_back(i);
        p.upper_covers_[i].push_back(j);
      }
    }
  }
  for (auto& v : p.upper_covers_) std::sort(v.begin(), v.end());
  return p;
}

std::optional<std::size_t> Poset::find(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Poset::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw UnknownElement("unknown element '" + id + "'");
  return it->second;
}

ElemSet Poset::down_closure(const ElemSet& s) const {
  ElemSet out(size());
  for (std::size_t i : s.members()) out |= down_[i];
  return out;
}

ElemSet Poset::full_set() const {
  ElemSet s(size());
  for (std::size_t i = 0; i < size(); ++i) s.set(i);
  return s;
}

std::vector<std::pair<std::size_t, std::size_t>> Poset::covers() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t j = 0; j < size(); ++j)
    for (std::size_t i : lower_covers_[j]) out.emplace_back(i, j);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> Poset::max_of(const ElemSet& s) const {
  std::vector<std::size_t> out;
  for (std::size_t i : s.members()) {
    if ((up_[i] & s).count() == 1) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> Poset::minimal_elements() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i)
    if (down_[i].count() == 1) out.push_back(i);
  return out;
}

bool Poset::is_lower(const ElemSet& s) const {
  if (s.universe() != size()) return false;
  for (std::size_t i : s.members())
    if (!down_[i].subset_of(s)) return false;
  return true;
}

std::vector<std::size_t> Poset::linear_extension() const {
  std::vector<std::size_t> order(size());
  for (std::size_t i = 0; i < size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return down_[a].count() < down_[b].count(); });
  return order;
}

std::vector<LowerSet> Poset::lower_sets() const {
  const std::vector<std::size_t> order = linear_extension();
  std::vector<LowerSet> out;
  ElemSet cur(size());
  std::function<void(std::size_t)> rec = [&](std::size_t pos) {
    if (pos == order.size()) {
      out.push_back(cur);
      return;
    }
    const std::size_t i = order[pos];
    rec(pos + 1);
    bool allowed = true;
    for (std::size_t c : lower_covers_[i]) allowed = allowed && cur.test(c);
    if (allowed) {
      cur.set(i);
      rec(pos + 1);
      cur.reset(i);
    }
  };
  rec(0);
  std::sort(out.begin(), out.end());
  return out;
}

bool Poset::chain_up_property() const {
  for (std::size_t i = 0; i < size(); ++i) {
    const auto ups = up_[i].members();
    for (std::size_t a = 0; a < ups.size(); ++a)
      for (std::size_t b = a + 1; b < ups.size(); ++b)
        if (!comparable(ups[a], ups[b])) return false;
  }
  return true;
}

Poset Poset::induced(const ElemSet& s, std::vector<std::size_t>* map) const {
  std::vector<std::size_t> keep = s.members();
  std::vector<std::string> ids;
  std::vector<std::size_t> inverse(size(), size());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    ids.push_back(ids_[keep[k]]);
    inverse[keep[k]] = k;
  }
  std::vector<std::pair<std::size_t, std::size_t>> rel;
  for (std::size_t a : keep)
    for (std::size_t b : keep)
      if (a != b && leq(a, b)) rel.emplace_back(inverse[a], inverse[b]);
  if (map) *map = keep;
  return from_relations(std::move(ids), rel);
}

namespace {

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string Poset::to_dot(const std::string& name) const {
  std::ostringstream os;
  os << "digraph " << dot_quote(name) << " {\n  rankdir=TB;\n  node [shape=plaintext];\n";
  for (std::size_t i = 0; i < size(); ++i) os << "  " << dot_quote(ids_[i]) << ";\n";
  for (std::size_t j = 0; j < size(); ++j)
    for (std::size_t i : lower_covers_[j]) os << "  " << dot_quote(ids_[j]) << " -> " << dot_quote(ids_[i]) << ";\n";
  os << "}\n";
  return os.str();
}

std::vector<std::size_t> down(const Poset& p, std::size_t i) { return p.down(i).members(); }

std::vector<std::vector<std::size_t>> maximal_chains(const Poset& p) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    cur.push_back(i);
    if (p.lower_covers(i).empty()) out.push_back(cur);
    for (std::size_t c : p.lower_covers(i)) rec(c);
    cur.pop_back();
  };
  for (std::size_t k : p.maximal_elements()) rec(k);
  return out;
}

bool is_order_isomorphism(const Poset& a, const Poset& b, const std::vector<std::size_t>& f) {
  if (a.size() != b.size() || f.size() != a.size()) return false;
  std::vector<bool> hit(b.size(), false);
  for (std::size_t x : f) {
    if (x >= b.size() || hit[x]) return false;
    hit[x] = true;
  }
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a.leq(i, j) != b.leq(f[i], f[j])) return false;
  return true;
}

std::optional<std::vector<std::size_t>> find_isomorphism(const Poset& a, const Poset& b) {
  if (a.size() != b.size()) return std::nullopt;
  const std::size_t n = a.size();
  auto signature = [](const Poset& p, std::size_t i) {
    return std::tuple(p.down(i).count(), p.up(i).count(), p.lower_covers(i).size(), p.upper_covers(i).size());
  };
  const std::vector<std::size_t> order = a.linear_extension();
  std::vector<std::size_t> f(n, n);
  std::vector<bool> used(n, false);
  std::function<bool(std::size_t)> rec = [&](std::size_t pos) {
    if (pos == n) return true;
    const std::size_t i = order[pos];
    for (std::size_t c = 0; c < n; ++c) {
      if (used[c] || signature(a, i) != signature(b, c)) continue;
      bool ok = true;
      for (std::size_t q = 0; q < pos && ok; ++q) {
        const std::size_t j = order[q];
        ok = a.leq(i, j) == b.leq(c, f[j]) && a.leq(j, i) == b.leq(f[j], c);
      }
      if (!ok) continue;
      f[i] = c;
      used[c] = true;
      if (rec(pos + 1)) return true;
      used[c] = false;
      f[i] = n;
    }
    return false;
  };
  if (!rec(0)) return std::nullopt;
  return f;
}

// ---------------------------------------------------------------- ChainTree

ChainTree chain_tree(const Poset& p, std::size_t k) {
  if (k >= p.size()) throw UnknownElement("chain_tree: unknown element");
  if (p.up(k).count() != 1) throw NotMaximal("chain_tree: '" + p.id(k) + "' is not maximal");
  ChainTree t;
  t.root_element = k;
  std::vector<std::size_t> parent;
  std::vector<std::size_t> cur;
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t par) {
    cur.push_back(i);
    const std::size_t node = t.chains.size();
    t.chains.push_back(cur);
    parent.push_back(par);
    for (std::size_t c : p.lower_covers(i)) rec(c, node);
    cur.pop_back();
  };
  rec(k, static_cast<std::size_t>(-1));

  std::vector<std::string> ids;
  std::vector<std::pair<std::size_t, std::size_t>> rel;
  for (std::size_t node = 0; node < t.chains.size(); ++node) {
    std::string id;
    for (std::size_t e : t.chains[node]) id += (id.empty() ? "" : "/") + p.id(e);
    ids.push_back(id);
    if (parent[node] != static_cast<std::size_t>(-1)) rel.emplace_back(node, parent[node]);
    t.projection.push_back(t.chains[node].back());
  }
  t.tree = Poset::from_relations(std::move(ids), rel);
  return t;
}

std::vector<std::string> chain_tree_violations(const Poset& base, const ChainTree& t) {
  std::vector<std::string> out;
  const Poset& f = t.tree;
  const auto& psi = t.projection;
  // (1) chains map bijectively: psi is strictly monotone on comparable pairs.
  for (std::size_t a = 0; a < f.size(); ++a)
    for (std::size_t b = 0; b < f.size(); ++b)
      if (f.lt(a, b) && !base.lt(psi[a], psi[b])) out.push_back("psi not strict on " + f.id(a) + " < " + f.id(b));
  // (2) maximal chains biject with maximal chains of base below the root.
  {
    std::vector<std::size_t> map;
    Poset sub = base.induced(base.down(t.root_element), &map);
    std::set<std::vector<std::size_t>> targets;
    for (auto chain : maximal_chains(sub)) {
      for (auto& e : chain) e = map[e];
      targets.insert(chain);
    }
    std::set<std::vector<std::size_t>> images;
    for (const auto& chain : maximal_chains(f)) {
      std::vector<std::size_t> img;
      for (std::size_t node : chain) img.push_back(psi[node]);
      if (!targets.count(img)) out.push_back("image of a maximal chain is not maximal");
      images.insert(img);
    }
    if (images != targets || images.size() != maximal_chains(f).size())
      out.push_back("maximal chains are not in bijection");
  }
  // (3) every interval up to the root is a chain.
  if (!f.chain_up_property()) out.push_back("tree fails the chain-up property");
  // (4) the image of [t, root] determines t.
  {
    std::set<std::vector<std::size_t>> seen;
    for (std::size_t node = 0; node < f.size(); ++node) {
      std::vector<std::size_t> img;
      for (std::size_t u : f.up(node).members()) img.push_back(psi[u]);
      std::sort(img.begin(), img.end());
      if (!seen.insert(img).second) out.push_back("interval images collide at " + f.id(node));
    }
  }
  // (5) lower covers biject.
  for (std::size_t q = 0; q < f.size(); ++q) {
    std::vector<std::size_t> img;
    for (std::size_t c : f.lower_covers(q)) img.push_back(psi[c]);
    std::sort(img.begin(), img.end());
    std::vector<std::size_t> want = base.lower_covers(psi[q]);
    std::sort(want.begin(), want.end());
    if (img != want) out.push_back("lower covers not bijective at " + f.id(q));
  }
  return out;
}

std::string to_dot(const ChainTree& t, const Poset& base, const std::string& name) {
  std::ostringstream os;
  os << "digraph " << dot_quote(name) << " {\n  rankdir=TB;\n  node [shape=plaintext];\n";
  for (std::size_t n = 0; n < t.tree.size(); ++n)
    os << "  " << dot_quote(t.tree.id(n)) << " [label=" << dot_quote(base.id(t.projection[n])) << "];\n";
  for (std::size_t j = 0; j < t.tree.size(); ++j)
    for (std::size_t i : t.tree.lower_covers(j))
      os << "  " << dot_quote(t.tree.id(j)) << " -> " << dot_quote(t.tree.id(i)) << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace refmon
