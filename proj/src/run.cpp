#include "hornlab/run.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "hornlab/conjugacy.hpp"
#include "hornlab/render.hpp"

namespace hornlab {

namespace {

const json& defaults_for(const std::string& command) {
  static const std::map<std::string, json> table = {
      {"residue", {{"radii", {0.02, 0.05, 0.1}}, {"samples", 256}, {"tol", 1e-9}}},
      {"fatou-check", {{"samples", 1000}, {"seed", 1}, {"tol", 1e-9}}},
      {"horn", {{"w", {0.3, 3.0}}}},
      {"expansion", {{"end", "plus"}, {"levels", {1.5, 2.0, 2.5}}}},
      {"domain", {{"re_min", 0.0}, {"re_max", 1.0}, {"im_min", 2.0}, {"im_max", 4.0}, {"columns", 64}, {"rows", 64}}},
      {"conjugacy-verify", {{"im_min", 1.0}, {"im_max", 3.0}, {"levels", 10}, {"columns", 20}, {"tol", 1e-6}}},
      {"build-phi", {{"samples", 100}, {"tol", 1e-6}}},
      {"render",
       {{"kind", "basin"},
        {"center", {-0.5, 0.0}},
        {"width", 2.0},
        {"height", 2.0},
        {"pixels_x", 512},
        {"pixels_y", 512},
        {"re_min", 0.0},
        {"re_max", 1.0},
        {"im_min", -4.0},
        {"im_max", 4.0},
        {"columns", 256},
        {"rows", 512}}},
  };
  auto it = table.find(command);
  if (it == table.end()) throw UsageError("unknown command '" + command + "'");
  return it->second;
}

bool uses_pair(const std::string& command) { return command == "conjugacy-verify" || command == "build-phi"; }

std::string label_of(const RunDescriptor& d) {
  if (uses_pair(d.command)) return d.pair;
  if (d.map.is_object() && d.map.contains("ref")) return d.map.at("ref").get<std::string>();
  return "inline";
}

MapSpec resolve_map(const json& doc, const Catalog& catalog) {
  auto lookup = [&catalog](const std::string& id) -> const MapSpec& { return catalog.map(id); };
  return map_from_json(doc, lookup);
}

cplx pair_of(const json& v) {
  if (!v.is_array() || v.size() != 2) throw UsageError("expected a pair [re, im], got " + v.dump());
  return {v[0].get<double>(), v[1].get<double>()};
}

json verdict_json(const BasinVerdict& v) {
  return {{"status", to_string(v.status)}, {"index", v.index}, {"orbit_length", v.orbit_length}, {"stationary", v.stationary}};
}

std::filesystem::path output_path(const RunDescriptor& d, const std::string& name) {
  const std::filesystem::path dir(d.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir / name;
}

RunResult run_residue(const RunDescriptor& d, const MapSpec& map) {
  RunResult r;
  const GermData germ = germ_data(map);
  const double tol = d.params.at("tol").get<double>();
  r.report["degeneracy_p"] = germ.degeneracy_p;
  if (!germ.simple()) {
    r.report["error"] = "degenerate germ: the residue formula needs a simple parabolic point";
    r.exit_code = kExitFailure;
    return r;
  }
  r.report["gamma_formula"] = complex_to_json(germ.gamma);
  json rows = json::array();
  bool passed = true;
  for (const auto& radius : d.params.at("radii")) {
    const auto est = iterative_residue_contour(map, radius.get<double>(), d.params.at("samples").get<int>());
    const double diff = std::abs(est.value - germ.gamma);
    passed = passed && diff < tol;
    rows.push_back({{"radius", radius},
                    {"gamma_contour", complex_to_json(est.value)},
                    {"quadrature_tolerance", est.tolerance},
                    {"difference", diff}});
  }
  r.report["contour"] = rows;
  r.report["passed"] = passed;
  r.exit_code = passed ? kExitOk : kExitFailure;
  return r;
}

RunResult run_fatou_check(const RunDescriptor& d, const ParabolicGerm& germ) {
  RunResult r;
  const int samples = d.params.at("samples").get<int>();
  const auto seed = d.params.at("seed").get<std::uint64_t>();
  const double tol = d.params.at("tol").get<double>();
  const AbelCheck attracting = abel_residual_check(germ, Direction::attracting, samples, seed);
  const AbelCheck repelling = abel_residual_check(germ, Direction::repelling, samples, seed);
  json coefficients = json::array();
  for (cplx b : germ.attracting().coefficients) coefficients.push_back(complex_to_json(b));
  r.report = {{"a", complex_to_json(germ.data().a)},
              {"gamma", complex_to_json(germ.data().gamma)},
              {"series_coefficients", coefficients},
              {"attracting", {{"residual_sup", attracting.sup}, {"samples", samples}, {"in_trap", attracting.in_trap}}},
              {"repelling", {{"residual_sup", repelling.sup}, {"samples", samples}, {"in_trap", repelling.in_trap}}}};
  const bool passed = attracting.sup < tol && repelling.sup < tol;
  r.report["passed"] = passed;
  r.exit_code = passed ? kExitOk : kExitFailure;
  return r;
}

RunResult run_horn(const RunDescriptor& d, const ParabolicGerm& germ) {
  RunResult r;
  const cplx w = pair_of(d.params.at("w"));
  BasinVerdict verdict;
  const auto value = try_horn_map(germ, w, &verdict);
  r.report = {{"w", complex_to_json(w)}, {"verdict", verdict_json(verdict)}};
  if (!value) {
    r.report["error"] = "w lies outside the horn-map domain";
    r.exit_code = kExitFailure;
    return r;
  }
  r.report["lifted"] = complex_to_json(value->lifted);
  r.report["cylinder_point"] = complex_to_json(value->point.representative);
  r.report["end"] = to_string(value->point.end_hint);
  return r;
}

RunResult run_expansion(const RunDescriptor& d, const ParabolicGerm& germ) {
  RunResult r;
  const End end = end_from_string(d.params.at("end").get<std::string>());
  try {
    const DecayReport report = expansion_check(germ, end, d.params.at("levels").get<std::vector<double>>());
    r.report = to_json(report);
    r.exit_code = report.passed ? kExitOk : kExitFailure;
  } catch (const OutsideHornDomain& e) {
    r.report = {{"error", e.what()}, {"verdict", verdict_json(e.verdict())}, {"passed", false}};
    r.exit_code = kExitFailure;
  }
  return r;
}

CylinderViewport cylinder_viewport(const json& p) {
  return {p.at("re_min").get<double>(), p.at("re_max").get<double>(), p.at("im_min").get<double>(),
          p.at("im_max").get<double>()};
}

RunResult run_domain(const RunDescriptor& d, const ParabolicGerm& germ) {
  RunResult r;
  const HornDomainGrid grid = domain_probe(germ, cylinder_viewport(d.params), d.params.at("columns").get<int>(),
                                           d.params.at("rows").get<int>(), d.threads);
  r.report = to_json(grid);
  return r;
}

Pairing make_pairing(const RunDescriptor& d, const Catalog& catalog, const FatouConfig& cfg, bool reverse = false) {
  const PairEntry& pair = catalog.pair(d.pair);
  if (!reverse) return Pairing({catalog.map(pair.source), catalog.map(pair.target), pair.phi}, cfg);
  if (!pair.phi_prime) throw UsageError("pair '" + d.pair + "' has no phi_prime");
  return Pairing({catalog.map(pair.target), catalog.map(pair.source), *pair.phi_prime}, cfg);
}

RunResult run_conjugacy(const RunDescriptor& d, const Catalog& catalog, const FatouConfig& cfg) {
  RunResult r;
  const Pairing pairing = make_pairing(d, catalog, cfg);
  SampleGrid grid;
  grid.columns = d.params.at("columns").get<int>();
  grid.levels = band_levels(d.params.at("im_min").get<double>(), d.params.at("im_max").get<double>(),
                            d.params.at("levels").get<int>());
  const EquivalenceReport report = verify_equivalence(pairing, grid, d.threads);
  const double tol = d.params.at("tol").get<double>();
  r.report = to_json(report);
  bool passed = report.compared > 0 && report.residual_sup < tol && report.sigma_deviation < 1e-8;
  if (catalog.pair(d.pair).phi_prime) {
    const PhaseShift back = lifted_phase_shift(make_pairing(d, catalog, cfg, true), 64,
                                               std::numeric_limits<double>::infinity());
    const cplx sum = report.sigma_lifted + back.lifted;
    const double defect = std::abs(sum - std::round(sum.real()));
    r.report["sigma_prime_lifted"] = complex_to_json(back.lifted);
    r.report["sigma_sum_integer_defect"] = defect;
    passed = passed && defect < 1e-8;
  }
  r.report["passed"] = passed;
  r.exit_code = passed ? kExitOk : kExitFailure;
  return r;
}

RunResult run_build_phi(const RunDescriptor& d, const Catalog& catalog, const FatouConfig& cfg) {
  RunResult r;
  const Pairing pairing = make_pairing(d, catalog, cfg);
  const double tol = d.params.at("tol").get<double>();
  try {
    const PhaseShift sigma = lifted_phase_shift(pairing);
    auto psi = [&pairing](cplx w, End) { return extract_psi(pairing, w).value; };
    const PhiEvaluator phi = build_phi(pairing.source, pairing.target, sigma.lifted, psi);
    const auto samples = attracting_petal_samples(pairing.source.data(), d.params.at("samples").get<int>());
    double round_trip = 0.0;
    for (cplx z : samples) round_trip = std::max(round_trip, std::abs(phi.evaluate(z) - evaluate(pairing.phi, z)));
    const double semi = semi_conjugacy_residual(pairing.source.map(), pairing.target.map(),
                                                [&phi](cplx z) { return phi.evaluate(z); }, samples);
    const bool passed = round_trip < tol && semi < tol;
    r.report = {{"sigma_lifted", complex_to_json(sigma.lifted)},
                {"sigma_deviation", sigma.deviation},
                {"overlap_mismatch", phi.overlap_mismatch(phi.overlap_samples(16))},
                {"round_trip_sup", round_trip},
                {"semi_conjugacy_residual", semi},
                {"samples", samples.size()},
                {"passed", passed}};
    r.exit_code = passed ? kExitOk : kExitFailure;
  } catch (const VerificationFailure& e) {
    r.report = {{"error", e.what()}, {"passed", false}};
    r.exit_code = kExitFailure;
  }
  return r;
}

RunResult run_render(const RunDescriptor& d, const MapSpec& map, const FatouConfig& cfg) {
  RunResult r;
  if (d.out_dir.empty()) throw UsageError("render needs --out");
  const json& p = d.params;
  const std::string kind = p.at("kind").get<std::string>();
  RenderOptions options{d.threads, label_of(d), d.hash(), false};
  RasterImage image;
  if (kind == "basin") {
    const Viewport viewport{pair_of(p.at("center")), p.at("width").get<double>(), p.at("height").get<double>(),
                            p.at("pixels_x").get<int>(), p.at("pixels_y").get<int>()};
    image = germ_data(map).simple() ? render_basin(ParabolicGerm(map, cfg), viewport, options)
                                    : render_basin_exploratory(map, viewport, cfg, options);
  } else if (kind == "horn") {
    const HornDomainGrid grid = domain_probe(ParabolicGerm(map, cfg), cylinder_viewport(p),
                                             p.at("columns").get<int>(), p.at("rows").get<int>(), d.threads);
    image = render_horn_domain(grid, options);
  } else {
    throw UsageError("render kind must be 'basin' or 'horn'");
  }
  const auto path = output_path(d, "render-" + label_of(d) + "-" + kind + ".ppm");
  export_ppm(image, path);
  r.written.push_back(path.string());
  r.report = {{"width", image.width}, {"height", image.height}, {"palette", image.palette}, {"file", path.string()}};
  return r;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"residue",          "fatou-check", "horn",  "expansion", "domain",
                                                 "conjugacy-verify", "build-phi",   "render"};
  return names;
}

RunDescriptor RunDescriptor::from_json(const json& doc) {
  if (!doc.is_object()) throw UsageError("run descriptor must be a JSON object");
  RunDescriptor d;
  for (const auto& [key, value] : doc.items()) {
    if (key == "command") d.command = value.get<std::string>();
    else if (key == "map") d.map = value.is_string() ? json{{"ref", value}} : value;
    else if (key == "pair") d.pair = value.get<std::string>();
    else if (key == "config") d.config = value;
    else if (key == "params") d.params = value;
    else if (key == "out") d.out_dir = value.get<std::string>();
    else if (key == "threads") d.threads = value.get<int>();
    else throw UsageError("unknown run descriptor key '" + key + "'");
  }
  d.complete();
  return d;
}

void RunDescriptor::complete() {
  json merged = defaults_for(command);
  if (!params.is_object()) throw UsageError("params must be a JSON object");
  for (const auto& [key, value] : params.items()) {
    if (!merged.contains(key)) throw UsageError("unknown parameter '" + key + "' for " + command);
    merged[key] = value;
  }
  params = merged;
  if (!config.is_object()) throw UsageError("config must be a JSON object");
  if (uses_pair(command)) {
    if (pair.empty()) throw UsageError(command + " needs --pair");
  } else if (map.is_null()) {
    throw UsageError(command + " needs --map");
  }
}

json RunDescriptor::canonical() const {
  json out = {{"command", command}, {"config", to_json(config_from_json(config))}, {"params", params}};
  if (uses_pair(command)) out["pair"] = pair;
  else out["map"] = map;
  return out;
}

std::string RunDescriptor::hash() const { return config_hash(canonical()); }

RunResult execute(const RunDescriptor& d, const Catalog& catalog) {
  // Request problems (bad ids, malformed values) are usage errors; anything
  // thrown once the computation runs is a failure.
  FatouConfig cfg;
  std::optional<MapSpec> map;
  std::string hash;
  try {
    cfg = config_from_json(d.config);
    hash = d.hash();
    if (uses_pair(d.command)) {
      const PairEntry& pair = catalog.pair(d.pair);
      cfg.validate(catalog.map(pair.source));
      cfg.validate(catalog.map(pair.target));
    } else {
      map = resolve_map(d.map, catalog);
      cfg.validate(*map);
    }
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed request: ") + e.what());
  }

  RunResult r;
  try {
    const std::string& c = d.command;
    if (c == "residue") r = run_residue(d, *map);
    else if (c == "fatou-check") r = run_fatou_check(d, ParabolicGerm(*map, cfg));
    else if (c == "horn") r = run_horn(d, ParabolicGerm(*map, cfg));
    else if (c == "expansion") r = run_expansion(d, ParabolicGerm(*map, cfg));
    else if (c == "domain") r = run_domain(d, ParabolicGerm(*map, cfg));
    else if (c == "conjugacy-verify") r = run_conjugacy(d, catalog, cfg);
    else if (c == "build-phi") r = run_build_phi(d, catalog, cfg);
    else r = run_render(d, *map, cfg);
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed parameter: ") + e.what());
  }
  r.report["command"] = d.command;
  r.report["config_hash"] = hash;
  if (!d.out_dir.empty() && d.command != "render") {
    const auto path = output_path(d, d.command + "-" + label_of(d) + ".json");
    write_file(path, r.report.dump(2) + "\n");
    r.written.push_back(path.string());
  }
  return r;
}

namespace {

json read_json_argument(const std::string& text) {
  try {
    if (!text.empty() && text.front() == '{') return json::parse(text);
    std::ifstream in(text);
    if (!in) throw UsageError("cannot open " + text);
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("malformed JSON in " + (text.size() > 40 ? text.substr(0, 40) + "..." : text) + ": " + e.what());
  }
}

struct CommonFlags {
  std::string map, pair, config, out;
  int threads = 0;
  double tol = 0.0;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--map", f.map, "catalog id of the map");
  sub->add_option("--pair", f.pair, "catalog id of a semi-conjugate pair");
  sub->add_option("--config", f.config, "Fatou config overrides: inline JSON or a file");
  sub->add_option("--out", f.out, "directory for reports and images");
  sub->add_option("--threads", f.threads, "worker threads (0 = all cores)");
  sub->add_option("--tol", f.tol, "pass/fail threshold");
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"hornlab: Fatou coordinates, horn maps and conjugacy checks for simple parabolic germs"};
  app.require_subcommand(0, 1);
  std::string run_file;
  app.add_option("--run", run_file, "execute a JSON run descriptor");
  int run_threads = -1;
  std::string run_out;
  app.add_option("--threads", run_threads, "worker threads for --run");
  app.add_option("--out", run_out, "output directory for --run");

  CommonFlags flags;
  std::string end;
  std::vector<double> levels, w, radii, center;
  int samples = 0, columns = 0, rows = 0, pixels_x = 0, pixels_y = 0, level_count = 0;
  double re_min = 0, re_max = 0, im_min = 0, im_max = 0, width = 0, height = 0;
  std::string kind;

  std::map<std::string, CLI::App*> subs;
  const std::map<std::string, std::string> blurbs = {
      {"residue", "iterative residue by formula and by contour integral"},
      {"fatou-check", "Abel-equation residual of both normalized Fatou coordinates"},
      {"horn", "evaluate the horn map at one point"},
      {"expansion", "decay of h(w) - (w -/+ i pi gamma) towards a cylinder end"},
      {"domain", "probe the horn-map domain on a cylinder grid"},
      {"conjugacy-verify", "phase shift, psi and the horn-map relation for a pair"},
      {"build-phi", "rebuild phi from (sigma, psi) and compare with the original"},
      {"render", "basin checkerboard or horn-domain image (PPM)"}};
  for (const auto& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name, blurbs.at(name));
    add_common(sub, flags);
    subs[name] = sub;
  }
  subs["residue"]->add_option("--radii", radii, "contour radii")->delimiter(',');
  subs["residue"]->add_option("--samples", samples, "quadrature nodes");
  subs["fatou-check"]->add_option("--samples", samples, "sample count per direction");
  subs["horn"]->add_option("--w", w, "point as re,im")->delimiter(',')->expected(2);
  subs["expansion"]->add_option("--end", end, "plus or minus");
  subs["expansion"]->add_option("--levels", levels, "|Im w| levels")->delimiter(',');
  for (const char* name : {"domain", "render"}) {
    subs[name]->add_option("--re-min", re_min);
    subs[name]->add_option("--re-max", re_max);
    subs[name]->add_option("--im-min", im_min);
    subs[name]->add_option("--im-max", im_max);
    subs[name]->add_option("--columns", columns);
    subs[name]->add_option("--rows", rows);
  }
  subs["conjugacy-verify"]->add_option("--im-min", im_min);
  subs["conjugacy-verify"]->add_option("--im-max", im_max);
  subs["conjugacy-verify"]->add_option("--levels", level_count, "number of |Im| levels per end");
  subs["conjugacy-verify"]->add_option("--columns", columns);
  subs["build-phi"]->add_option("--samples", samples, "attracting petal samples");
  subs["render"]->add_option("--kind", kind, "basin or horn");
  subs["render"]->add_option("--center", center, "viewport center re,im")->delimiter(',')->expected(2);
  subs["render"]->add_option("--width", width);
  subs["render"]->add_option("--height", height);
  subs["render"]->add_option("--pixels-x", pixels_x);
  subs["render"]->add_option("--pixels-y", pixels_y);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    Catalog catalog;
    try {
      catalog = Catalog::from_environment();
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
    RunDescriptor d;
    if (!run_file.empty()) {
      if (!app.get_subcommands().empty()) throw UsageError("--run cannot be combined with a subcommand");
      d = RunDescriptor::from_json(read_json_argument(run_file));
      if (run_threads >= 0) d.threads = run_threads;
      if (!run_out.empty()) d.out_dir = run_out;
    } else {
      if (app.get_subcommands().empty()) {
        err << app.help();
        return kExitUsage;
      }
      CLI::App* sub = app.get_subcommands().front();
      d.command = sub->get_name();
      d.out_dir = flags.out;
      d.threads = flags.threads;
      if (!flags.map.empty()) d.map = json{{"ref", flags.map}};
      d.pair = flags.pair;
      if (!flags.config.empty()) d.config = read_json_argument(flags.config);
      auto given = [sub](const char* name) { return sub->get_option_no_throw(name) && sub->count(name) > 0; };
      json& p = d.params;
      if (given("--tol")) p["tol"] = flags.tol;
      if (given("--radii")) p["radii"] = radii;
      if (given("--samples")) p["samples"] = samples;
      if (given("--w")) p["w"] = w;
      if (given("--end")) p["end"] = end;
      if (given("--levels")) {
        if (d.command == "expansion") p["levels"] = levels;
        else p["levels"] = level_count;
      }
      if (given("--re-min")) p["re_min"] = re_min;
      if (given("--re-max")) p["re_max"] = re_max;
      if (given("--im-min")) p["im_min"] = im_min;
      if (given("--im-max")) p["im_max"] = im_max;
      if (given("--columns")) p["columns"] = columns;
      if (given("--rows")) p["rows"] = rows;
      if (given("--kind")) p["kind"] = kind;
      if (given("--center")) p["center"] = center;
      if (given("--width")) p["width"] = width;
      if (given("--height")) p["height"] = height;
      if (given("--pixels-x")) p["pixels_x"] = pixels_x;
      if (given("--pixels-y")) p["pixels_y"] = pixels_y;
      d.complete();
    }
    const RunResult result = execute(d, catalog);
    out << result.report.dump(2) << "\n";
    return result.exit_code;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace hornlab
