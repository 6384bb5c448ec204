#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hornlab/maps.hpp"

namespace hornlab {

using json = nlohmann::json;

struct CatalogEntry {
  std::string id;
  std::string description;
  MapSpec map;
};

// A semi-conjugacy phi from source to target, optionally completed by phi_prime
// in the opposite direction.
struct PairEntry {
  std::string id;
  std::string description;
  std::string source;
  std::string target;
  MapSpec phi;
  std::optional<MapSpec> phi_prime;
};

// Parses {"variant": ..., "evaluation_radius": ...}. Nested specs may be
// {"ref": "<id>"}, resolved through lookup.
MapSpec map_from_json(const json& doc, const std::function<const MapSpec&(const std::string&)>& lookup = {});
json map_to_json(const MapSpec& map);

cplx complex_from_json(const json& value);
json complex_to_json(cplx z);

class Catalog {
 public:
  static Catalog from_json(const json& doc);
  static Catalog from_file(const std::filesystem::path& path);
  static Catalog builtin();
  // HORNLAB_CATALOG when set, the built-in document otherwise.
  static Catalog from_environment();

  bool has_map(const std::string& id) const { return index_.count(id) != 0; }
  bool has_pair(const std::string& id) const { return pair_index_.count(id) != 0; }
  const CatalogEntry& entry(const std::string& id) const;
  const MapSpec& map(const std::string& id) const { return entry(id).map; }
  const PairEntry& pair(const std::string& id) const;

  const std::vector<CatalogEntry>& entries() const { return entries_; }
  const std::vector<PairEntry>& pairs() const { return pairs_; }
  // Entries whose germ at 0 is simple parabolic (derivative 1, a != 0).
  std::vector<std::string> simple_parabolic_ids() const;

 private:
  std::vector<CatalogEntry> entries_;
  std::vector<PairEntry> pairs_;
  std::map<std::string, std::size_t> index_;
  std::map<std::string, std::size_t> pair_index_;
};

}  // namespace hornlab
