#include <sstream>

#include "json.hpp"
#include "refmon/errors.hpp"
#include "refmon/monoid.hpp"

namespace refmon {

namespace {

using nlohmann::json;

json big_json(const BigInt& x) {
  if (x.fits_slong_p()) return json(x.get_si());
  return json(x.get_str());
}

BigInt json_big(const json& v, const std::string& where) {
  if (v.is_number_integer()) return BigInt(std::to_string(v.get<long long>()));
  if (v.is_string()) {
    BigInt out;
    if (out.set_str(v.get<std::string>(), 10) == 0) return out;
  }
  throw ParseError(where + ": expected an integer");
}

}  // namespace

std::string Monoid::to_string(const MonElem& x) const {
  if (x.support.empty()) return "0";
  const ISystem& s = *sys_;
  std::ostringstream out;
  out << "{";
  bool first = true;
  for (std::size_t i : x.support.members()) {
    out << (first ? "" : ", ") << poset().id(i) << ": (";
    first = false;
    const IntVector b = block(x, i);
    for (std::size_t t = 0; t < b.size(); ++t) {
      if (t > 0) out << (s.is_free(i) && t == 1 ? "; " : ", ");
      out << b[t].get_str();
    }
    if (s.is_free(i) && b.size() == 1) out << ";";
    out << ")";
  }
  out << "}";
  return out.str();
}

std::string Monoid::to_json(const MonElem& x) const {
  const ISystem& s = *sys_;
  json doc;
  doc["support"] = json::array();
  doc["coords"] = json::object();
  for (std::size_t i : x.support.members()) {
    doc["support"].push_back(poset().id(i));
    const IntVector b = block(x, i);
    json c;
    std::size_t start = 0;
    if (s.is_free(i)) {
      c["n"] = big_json(b[0]);
      start = 1;
    }
    c["g"] = json::array();
    for (std::size_t t = start; t < b.size(); ++t) c["g"].push_back(big_json(b[t]));
    doc["coords"][poset().id(i)] = c;
  }
  return doc.dump();
}

MonElem Monoid::parse_json(const std::string& text) const {
  const ISystem& s = *sys_;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("element literal: malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("support") || !doc["support"].is_array())
    throw ParseError("element literal: expected an object with array 'support'");
  ElemSet support = poset().empty_set();
  for (const json& id : doc["support"]) {
    if (!id.is_string()) throw ParseError("element literal: support entries must be ids");
    auto idx = poset().find(id.get<std::string>());
    if (!idx) throw ParseError("element literal: unknown element '" + id.get<std::string>() + "'");
    support.set(*idx);
  }
  if (!poset().is_lower(support)) throw ParseError("element literal: support is not a lower set");
  IntVector vec(s.total_dim());
  if (doc.contains("coords")) {
    const json& coords = doc["coords"];
    if (!coords.is_object()) throw ParseError("element literal: 'coords' must be an object");
    for (auto it = coords.begin(); it != coords.end(); ++it) {
      const std::string where = "element literal: coords['" + it.key() + "']";
      auto idx = poset().find(it.key());
      if (!idx) throw ParseError(where + ": unknown element");
      if (!support.test(*idx)) throw ParseError(where + ": element outside the support");
      const json& c = it.value();
      if (!c.is_object()) throw ParseError(where + ": expected an object");
      std::size_t pos = s.offset(*idx);
      if (s.is_free(*idx)) {
        if (c.contains("n")) vec[pos] = json_big(c["n"], where + ".n");
        ++pos;
      } else if (c.contains("n")) {
        throw ParseError(where + ": 'n' given for a regular element");
      }
      if (c.contains("g")) {
        const json& g = c["g"];
        if (!g.is_array() || g.size() != s.group(*idx).dim())
          throw ParseError(where + ".g: expected " + std::to_string(s.group(*idx).dim()) + " entries");
        for (std::size_t t = 0; t < g.size(); ++t) vec[pos + t] = json_big(g[t], where + ".g");
      }
    }
  }
  return make(support, std::move(vec));
}

}  // namespace refmon
