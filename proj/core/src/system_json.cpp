#include <algorithm>
#include <map>
#include <string>

#include "json.hpp"
#include "refmon/errors.hpp"
#include "refmon/isystem.hpp"

namespace refmon {

namespace {

using nlohmann::json;

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

BigInt to_big(const json& v, const std::string& where) {
  if (v.is_number_integer()) return BigInt(std::to_string(v.get<long long>()));
  if (v.is_string()) {
    BigInt out;
    if (out.set_str(v.get<std::string>(), 10) != 0) fail(where, "not an integer string");
    return out;
  }
  fail(where, "expected an integer");
}

IntVector to_vec(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of integers");
  IntVector out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(to_big(v[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

json from_big(const BigInt& x) {
  if (x.fits_slong_p()) return json(x.get_si());
  return json(x.get_str());
}

json from_vec(const IntVector& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(from_big(x));
  return a;
}

}  // namespace

SystemSpec parse_system_spec(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("malformed JSON at " + line_col(text, e.byte == 0 ? 0 : e.byte - 1));
  }
  if (!doc.is_object()) fail("document", "expected an object");
  if (!doc.contains("elements") || !doc["elements"].is_array()) fail("document", "missing array 'elements'");

  std::vector<std::string> ids;
  std::vector<Kind> kinds;
  std::vector<FgGroup> groups;
  const json& elems = doc["elements"];
  for (std::size_t k = 0; k < elems.size(); ++k) {
    const json& e = elems[k];
    std::string where = "elements[" + std::to_string(k) + "]";
    if (!e.is_object() || !e.contains("id") || !e["id"].is_string()) fail(where, "expected an object with string 'id'");
    const std::string id = e["id"].get<std::string>();
    where += " ('" + id + "')";
    const std::string kind = e.value("kind", std::string("reg"));
    if (kind != "free" && kind != "reg") fail(where, "kind must be 'free' or 'reg'");
    std::size_t rank = 0;
    IntVector torsion;
    if (e.contains("group")) {
      const json& g = e["group"];
      if (!g.is_object()) fail(where + ".group", "expected an object");
      if (g.contains("rank")) {
        if (!g["rank"].is_number_unsigned()) fail(where + ".group.rank", "expected a nonnegative integer");
        rank = g["rank"].get<std::size_t>();
      }
      if (g.contains("torsion")) torsion = to_vec(g["torsion"], where + ".group.torsion");
    }
    try {
      groups.emplace_back(rank, torsion);
    } catch (const Error& err) {
      fail(where + ".group", err.what());
    }
    ids.push_back(id);
    kinds.push_back(kind == "free" ? Kind::Free : Kind::Reg);
  }

  std::map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < ids.size(); ++k)
    if (!index.emplace(ids[k], k).second) fail("elements", "duplicate id '" + ids[k] + "'");
  auto lookup = [&](const json& v, const std::string& where) {
    if (!v.is_string()) fail(where, "expected an element id");
    auto it = index.find(v.get<std::string>());
    if (it == index.end()) fail(where, "unknown element '" + v.get<std::string>() + "'");
    return it->second;
  };

  std::vector<std::pair<std::size_t, std::size_t>> rel;
  if (doc.contains("order")) {
    const json& order = doc["order"];
    if (!order.is_array()) fail("order", "expected an array of [below, above] pairs");
    for (std::size_t k = 0; k < order.size(); ++k) {
      const std::string where = "order[" + std::to_string(k) + "]";
      if (!order[k].is_array() || order[k].size() != 2) fail(where, "expected [below, above]");
      rel.emplace_back(lookup(order[k][0], where + "[0]"), lookup(order[k][1], where + "[1]"));
    }
  }

  SystemSpec spec;
  try {
    spec.poset = Poset::from_relations(ids, rel);
  } catch (const Error& err) {
    fail("order", err.what());
  }
  spec.kinds = kinds;
  spec.groups = groups;

  if (doc.contains("maps")) {
    const json& maps = doc["maps"];
    if (!maps.is_array()) fail("maps", "expected an array");
    for (std::size_t k = 0; k < maps.size(); ++k) {
      const json& m = maps[k];
      const std::string where = "maps[" + std::to_string(k) + "]";
      if (!m.is_object()) fail(where, "expected an object");
      if (!m.contains("from") || !m.contains("to")) fail(where, "missing 'from' or 'to'");
      MapSpec ms;
      ms.from = lookup(m["from"], where + ".from");
      ms.to = lookup(m["to"], where + ".to");
      const std::size_t rows = groups[ms.to].dim();
      const std::size_t cols = groups[ms.from].dim();
      ms.h = IntMatrix(rows, cols);
      if (m.contains("h")) {
        const json& h = m["h"];
        if (!h.is_array() || h.size() != rows) fail(where + ".h", "expected " + std::to_string(rows) + " rows");
        for (std::size_t r = 0; r < rows; ++r) {
          IntVector row = to_vec(h[r], where + ".h[" + std::to_string(r) + "]");
          if (row.size() != cols) fail(where + ".h[" + std::to_string(r) + "]", "expected " + std::to_string(cols) + " entries");
          for (std::size_t c = 0; c < cols; ++c) ms.h(r, c) = row[c];
        }
      } else if (rows > 0 && cols > 0) {
        fail(where, "missing 'h'");
      }
      if (m.contains("c")) ms.c = to_vec(m["c"], where + ".c");
      spec.maps.push_back(std::move(ms));
    }
  }
  return spec;
}

ISystem parse_system(const std::string& text) { return ISystem::create(parse_system_spec(text)); }

std::string serialize_system(const ISystem& sys) {
  const Poset& p = sys.poset();
  std::vector<std::size_t> order(p.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p.id(a) < p.id(b); });

  json doc;
  doc["elements"] = json::array();
  for (std::size_t i : order) {
    json g;
    g["rank"] = sys.group(i).rank();
    g["torsion"] = from_vec(sys.group(i).torsion());
    doc["elements"].push_back({{"id", p.id(i)}, {"kind", to_string(sys.kind(i))}, {"group", g}});
  }
  auto covers = p.covers();
  std::sort(covers.begin(), covers.end(), [&](const auto& x, const auto& y) {
    return std::pair(p.id(x.first), p.id(x.second)) < std::pair(p.id(y.first), p.id(y.second));
  });
  doc["order"] = json::array();
  doc["maps"] = json::array();
  for (auto [i, j] : covers) {
    doc["order"].push_back({p.id(i), p.id(j)});
    const GroupHom& g = sys.map(i, j);
    json m{{"from", p.id(i)}, {"to", p.id(j)}};
    json rows = json::array();
    for (std::size_t r = 0; r < g.h.rows(); ++r) {
      IntVector row = g.h.row(r);
      for (auto& x : row) x = reduce_mod(x, sys.group(j).modulus(r));
      rows.push_back(from_vec(row));
    }
    if (g.c) m["c"] = from_vec(sys.group(j).reduce(*g.c));
    m["h"] = rows;
    doc["maps"].push_back(m);
  }
  return doc.dump(2) + "\n";
}

}  // namespace refmon
