#include "hornlab/catalog.hpp"

#include <cstdlib>
#include <fstream>
#include <string_view>

#include "hornlab/error.hpp"

namespace hornlab {

namespace detail {
extern const std::string_view builtin_catalog_json;
}

cplx complex_from_json(const json& value) {
  if (value.is_number()) return {value.get<double>(), 0.0};
  if (value.is_array() && value.size() == 2 && value[0].is_number() && value[1].is_number()) {
    return {value[0].get<double>(), value[1].get<double>()};
  }
  throw InvalidArgument("expected a complex number as [re, im], got " + value.dump());
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

namespace {

double radius_of(const json& doc) {
  if (!doc.contains("evaluation_radius")) throw InvalidArgument("map spec lacks evaluation_radius: " + doc.dump());
  return doc.at("evaluation_radius").get<double>();
}

}  // namespace

MapSpec map_from_json(const json& doc, const std::function<const MapSpec&(const std::string&)>& lookup) {
  if (!doc.is_object()) throw InvalidArgument("map spec must be a JSON object");
  if (doc.contains("ref")) {
    if (!lookup) throw InvalidArgument("map reference '" + doc.at("ref").get<std::string>() + "' cannot be resolved here");
    return lookup(doc.at("ref").get<std::string>());
  }
  const auto variant = doc.at("variant").get<std::string>();
  const double radius = radius_of(doc);
  auto child = [&](const json& j) { return map_from_json(j, lookup); };

  if (variant == "polynomial") {
    std::vector<cplx> coefficients;
    for (const auto& c : doc.at("coefficients")) coefficients.push_back(complex_from_json(c));
    return MapSpec::polynomial(std::move(coefficients), radius);
  }
  if (variant == "blaschke_finite") return MapSpec::blaschke(doc.at("degree").get<int>(), radius);
  if (variant == "blaschke_infinite") return MapSpec::blaschke_infinite(radius);
  if (variant == "moebius") {
    return MapSpec::moebius(complex_from_json(doc.at("a")), complex_from_json(doc.at("b")),
                            complex_from_json(doc.at("c")), complex_from_json(doc.at("d")), radius);
  }
  if (variant == "conjugated") return MapSpec::conjugated(child(doc.at("inner")), child(doc.at("change")), radius);
  if (variant == "composed") {
    std::vector<MapSpec> parts;
    for (const auto& p : doc.at("parts")) parts.push_back(child(p));
    return MapSpec::composed(parts, radius);
  }
  if (variant == "iterated") return MapSpec::iterated(child(doc.at("inner")), doc.at("times").get<int>(), radius);
  throw InvalidArgument("unknown map variant '" + variant + "'");
}

json map_to_json(const MapSpec& map) {
  json out;
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, shape::Polynomial>) {
          out["variant"] = "polynomial";
          json cs = json::array();
          for (auto c : node.coefficients) cs.push_back(complex_to_json(c));
          out["coefficients"] = cs;
        } else if constexpr (std::is_same_v<T, shape::BlaschkeFinite>) {
          out["variant"] = "blaschke_finite";
          out["degree"] = node.degree;
        } else if constexpr (std::is_same_v<T, shape::BlaschkeInfinite>) {
          out["variant"] = "blaschke_infinite";
        } else if constexpr (std::is_same_v<T, shape::Moebius>) {
          out["variant"] = "moebius";
          out["a"] = complex_to_json(node.a);
          out["b"] = complex_to_json(node.b);
          out["c"] = complex_to_json(node.c);
          out["d"] = complex_to_json(node.d);
        } else if constexpr (std::is_same_v<T, shape::Conjugated>) {
          out["variant"] = "conjugated";
          out["inner"] = map_to_json(*node.inner);
          out["change"] = map_to_json(*node.change);
        } else if constexpr (std::is_same_v<T, shape::Composed>) {
          out["variant"] = "composed";
          json parts = json::array();
          for (const auto& p : node.parts) parts.push_back(map_to_json(*p));
          out["parts"] = parts;
        } else {
          out["variant"] = "iterated";
          out["inner"] = map_to_json(*node.inner);
          out["times"] = node.times;
        }
      },
      map.node());
  out["evaluation_radius"] = map.evaluation_radius();
  return out;
}

Catalog Catalog::from_json(const json& doc) {
  Catalog cat;
  auto lookup = [&cat](const std::string& id) -> const MapSpec& { return cat.map(id); };
  for (const auto& e : doc.value("maps", json::array())) {
    const auto id = e.at("id").get<std::string>();
    if (cat.has_map(id)) throw InvalidArgument("duplicate catalog id '" + id + "'");
    MapSpec spec = map_from_json(e, lookup);
    cat.index_[id] = cat.entries_.size();
    cat.entries_.push_back({id, e.value("description", ""), std::move(spec)});
  }
  for (const auto& p : doc.value("pairs", json::array())) {
    const auto id = p.at("id").get<std::string>();
    if (cat.has_pair(id)) throw InvalidArgument("duplicate pair id '" + id + "'");
    PairEntry pair{id,
                   p.value("description", ""),
                   p.at("source").get<std::string>(),
                   p.at("target").get<std::string>(),
                   map_from_json(p.at("phi"), lookup),
                   std::nullopt};
    if (!cat.has_map(pair.source) || !cat.has_map(pair.target)) {
      throw InvalidArgument("pair '" + id + "' references an unknown map");
    }
    if (p.contains("phi_prime")) pair.phi_prime = map_from_json(p.at("phi_prime"), lookup);
    cat.pair_index_[id] = cat.pairs_.size();
    cat.pairs_.push_back(std::move(pair));
  }
  return cat;
}

Catalog Catalog::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open catalog " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("malformed catalog " + path.string() + ": " + e.what());
  }
  return from_json(doc);
}

Catalog Catalog::builtin() { return from_json(json::parse(detail::builtin_catalog_json)); }

Catalog Catalog::from_environment() {
  if (const char* path = std::getenv("HORNLAB_CATALOG"); path != nullptr && *path != '\0') return from_file(path);
  return builtin();
}

const CatalogEntry& Catalog::entry(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw InvalidArgument("unknown map id '" + id + "'");
  return entries_[it->second];
}

const PairEntry& Catalog::pair(const std::string& id) const {
  auto it = pair_index_.find(id);
  if (it == pair_index_.end()) throw InvalidArgument("unknown pair id '" + id + "'");
  return pairs_[it->second];
}

std::vector<std::string> Catalog::simple_parabolic_ids() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) {
    try {
      if (germ_data(e.map).simple()) out.push_back(e.id);
    } catch (const Error&) {
    }
  }
  return out;
}

}  // namespace hornlab
