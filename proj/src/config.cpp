#include "dynact/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dynact/errors.hpp"

namespace dynact {

using nlohmann::json;

AffineMotion MotionConfig::build() const {
  if (model == "identity") return AffineMotion::identity();
  return AffineMotion::breathing(breathing);
}

std::uint64_t scenario_seed(std::uint64_t seed, std::size_t index) {
  // splitmix64 finaliser over seed and index.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

PipelineConfig default_config() {
  PipelineConfig c;
  c.phantom.ellipses = {
      {{0.0, 0.0}, {0.80, 0.60}, 0.0, 1.0, "body"},
      {{-0.38, 0.05}, {0.24, 0.38}, 0.0, -0.7, "lung"},
      {{0.38, 0.05}, {0.24, 0.38}, 0.0, -0.7, "lung"},
      {{0.0, -0.38}, {0.09, 0.09}, 0.0, 1.0, "spine"},
      {{0.42, 0.15}, {0.05, 0.05}, 0.0, 0.7, "tumour"},
  };
  c.periods_covered = 1.0;
  c.boundary = {
      {"exact", BoundaryMode::Exact, 0.0, 0, 0, false},
      {"noisy_010", BoundaryMode::Noisy, 0.10, 0, 0, false},
      {"noisy_025", BoundaryMode::Noisy, 0.25, 0, 0, false},
      {"sparse_32", BoundaryMode::Sparse, 0.0, 32, 0, false},
      {"sparse_16", BoundaryMode::Sparse, 0.0, 16, 0, false},
  };
  c.resolve();
  return c;
}

void PipelineConfig::resolve() {
  if (periods_covered && motion.breathing.frequency > 0.0 && scan.num_angles > 0) {
    scan.time_step = period_covering_time_step(scan.num_angles, motion.breathing.frequency,
                                               *periods_covered);
  }
  for (std::size_t i = 0; i < boundary.size(); ++i) boundary[i].rng_seed = scenario_seed(seed, i);
}

namespace {

const char* mode_name(BoundaryMode m) {
  switch (m) {
    case BoundaryMode::Exact: return "exact";
    case BoundaryMode::Noisy: return "noisy";
    case BoundaryMode::Sparse: return "sparse";
  }
  return "exact";
}

/// Collects every problem instead of stopping at the first.
class Reader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

  bool object(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
    if (!j.is_object()) {
      fail(path, "expected an object");
      return false;
    }
    for (const auto& [k, v] : j.items()) {
      if (std::find_if(keys.begin(), keys.end(), [&](const char* a) { return k == a; }) == keys.end()) {
        fail(path + "." + k, "unknown key");
      }
    }
    return true;
  }

  void number(const json& j, const char* key, const std::string& path, double& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_number()) {
      fail(path + "." + key, "expected a number");
      return;
    }
    out = v.get<double>();
    if (!std::isfinite(out)) fail(path + "." + key, "must be finite");
  }

  template <typename Int>
  void integer(const json& j, const char* key, const std::string& path, Int& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_number_integer()) {
      fail(path + "." + key, "expected an integer");
      return;
    }
    if (v.is_number_unsigned()) {
      out = static_cast<Int>(v.get<std::uint64_t>());
      return;
    }
    const auto x = v.get<std::int64_t>();
    if (x < 0 && !std::is_signed_v<Int>) {
      fail(path + "." + key, "must not be negative");
      return;
    }
    out = static_cast<Int>(x);
  }

  void string(const json& j, const char* key, const std::string& path, std::string& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_string()) {
      fail(path + "." + key, "expected a string");
      return;
    }
    out = v.get<std::string>();
  }

  void boolean(const json& j, const char* key, const std::string& path, bool& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_boolean()) {
      fail(path + "." + key, "expected true or false");
      return;
    }
    out = v.get<bool>();
  }

  void pair(const json& j, const char* key, const std::string& path, Vec2& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      fail(path + "." + key, "expected [number, number]");
      return;
    }
    out = {v[0].get<double>(), v[1].get<double>()};
  }
};

void read_phantom(Reader& r, const json& j, PhantomSpec& out) {
  if (!r.object(j, "phantom", {"ellipses"})) return;
  if (!j.contains("ellipses")) return;
  const json& list = j.at("ellipses");
  if (!list.is_array()) {
    r.fail("phantom.ellipses", "expected an array");
    return;
  }
  out.ellipses.clear();
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "phantom.ellipses[" + std::to_string(i) + "]";
    Ellipse e;
    if (r.object(list[i], path, {"label", "center", "semi_axes", "rotation", "density"})) {
      r.string(list[i], "label", path, e.label);
      r.pair(list[i], "center", path, e.center);
      r.pair(list[i], "semi_axes", path, e.semi_axes);
      r.number(list[i], "rotation", path, e.rotation);
      r.number(list[i], "density", path, e.density);
    }
    out.ellipses.push_back(e);
  }
}

void read_boundary(Reader& r, const json& j, std::vector<BoundarySpec>& out) {
  if (!j.is_array()) {
    r.fail("boundary", "expected an array of scenarios");
    return;
  }
  out.clear();
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string path = "boundary[" + std::to_string(i) + "]";
    BoundarySpec b;
    b.name.clear();
    if (r.object(j[i], path, {"name", "mode", "noise_std", "num_nodes", "noise_time_constant"})) {
      r.string(j[i], "name", path, b.name);
      std::string mode = "exact";
      r.string(j[i], "mode", path, mode);
      if (mode == "exact") {
        b.mode = BoundaryMode::Exact;
      } else if (mode == "noisy") {
        b.mode = BoundaryMode::Noisy;
      } else if (mode == "sparse") {
        b.mode = BoundaryMode::Sparse;
      } else {
        r.fail(path + ".mode", "must be exact, noisy or sparse");
      }
      r.number(j[i], "noise_std", path, b.noise_std);
      r.integer(j[i], "num_nodes", path, b.num_nodes);
      r.boolean(j[i], "noise_time_constant", path, b.noise_time_constant);
    }
    out.push_back(b);
  }
}

PipelineConfig from_json(const json& j) {
  Reader r;
  PipelineConfig c = default_config();
  if (!r.object(j, "config", {"schema_version", "phantom", "motion", "scan", "solver", "prior",
                              "boundary", "filter", "image", "evaluation", "seed", "output_dir"})) {
    throw ConfigError("invalid configuration:\n  config: expected an object");
  }
  if (!j.contains("schema_version")) {
    r.fail("schema_version", "missing");
  } else {
    r.integer(j, "schema_version", "config", c.schema_version);
  }
  if (j.contains("phantom")) read_phantom(r, j.at("phantom"), c.phantom);
  if (j.contains("motion")) {
    const json& m = j.at("motion");
    if (r.object(m, "motion", {"model", "amplitude", "frequency", "offset", "drift_coeff"})) {
      r.string(m, "model", "motion", c.motion.model);
      r.number(m, "amplitude", "motion", c.motion.breathing.amplitude);
      r.number(m, "frequency", "motion", c.motion.breathing.frequency);
      r.number(m, "offset", "motion", c.motion.breathing.offset);
      r.number(m, "drift_coeff", "motion", c.motion.breathing.drift_coeff);
    }
  }
  if (j.contains("scan")) {
    const json& s = j.at("scan");
    if (r.object(s, "scan", {"num_angles", "angle_start", "angle_end", "num_detectors",
                             "detector_min", "detector_max", "time_start", "time_step",
                             "periods_covered"})) {
      r.integer(s, "num_angles", "scan", c.scan.num_angles);
      r.number(s, "angle_start", "scan", c.scan.angle_start);
      r.number(s, "angle_end", "scan", c.scan.angle_end);
      r.integer(s, "num_detectors", "scan", c.scan.num_detectors);
      r.number(s, "detector_min", "scan", c.scan.detector_min);
      r.number(s, "detector_max", "scan", c.scan.detector_max);
      r.number(s, "time_start", "scan", c.scan.time_start);
      if (s.contains("time_step") && s.contains("periods_covered")) {
        r.fail("scan", "give either time_step or periods_covered, not both");
      }
      if (s.contains("time_step")) {
        c.periods_covered.reset();
        r.number(s, "time_step", "scan", c.scan.time_step);
      }
      if (s.contains("periods_covered")) {
        double p = 1.0;
        r.number(s, "periods_covered", "scan", p);
        c.periods_covered = p;
      }
    }
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    if (r.object(s, "solver", {"lambda", "mu", "grid_size", "cfl_safety", "length_scale",
                               "snapshot_stride", "domain_label", "min_arm_fraction"})) {
      r.number(s, "lambda", "solver", c.solver.lambda);
      r.number(s, "mu", "solver", c.solver.mu);
      r.integer(s, "grid_size", "solver", c.solver.grid_size);
      r.number(s, "cfl_safety", "solver", c.solver.cfl_safety);
      r.number(s, "length_scale", "solver", c.solver.length_scale);
      r.integer(s, "snapshot_stride", "solver", c.solver.snapshot_stride);
      r.string(s, "domain_label", "solver", c.solver.domain_label);
      r.number(s, "min_arm_fraction", "solver", c.solver.min_arm_fraction);
    }
  }
  if (j.contains("prior")) {
    const json& p = j.at("prior");
    if (r.object(p, "prior", {"soft_tissue", "spine", "spine_label"})) {
      r.number(p, "soft_tissue", "prior", c.prior.soft_tissue);
      r.number(p, "spine", "prior", c.prior.spine);
      r.string(p, "spine_label", "prior", c.prior.spine_label);
    }
  }
  if (j.contains("boundary")) read_boundary(r, j.at("boundary"), c.boundary);
  if (j.contains("filter")) {
    const json& f = j.at("filter");
    if (r.object(f, "filter", {"gamma", "dft_size"})) {
      r.number(f, "gamma", "filter", c.filter.gamma);
      r.integer(f, "dft_size", "filter", c.filter.dft_size);
    }
  }
  if (j.contains("image")) {
    const json& im = j.at("image");
    if (r.object(im, "image", {"nx", "ny", "xmin", "xmax", "ymin", "ymax"})) {
      r.integer(im, "nx", "image", c.image.nx);
      r.integer(im, "ny", "image", c.image.ny);
      r.number(im, "xmin", "image", c.image.xmin);
      r.number(im, "xmax", "image", c.image.xmax);
      r.number(im, "ymin", "image", c.image.ymin);
      r.number(im, "ymax", "image", c.image.ymax);
    }
  }
  if (j.contains("evaluation")) {
    const json& e = j.at("evaluation");
    if (r.object(e, "evaluation", {"supersample", "interior_fraction"})) {
      r.integer(e, "supersample", "evaluation", c.evaluation.supersample);
      r.number(e, "interior_fraction", "evaluation", c.evaluation.interior_fraction);
    }
  }
  r.integer(j, "seed", "config", c.seed);
  r.string(j, "output_dir", "config", c.output_dir);

  c.resolve();
  if (r.errors.empty()) {
    c.validate();
    return c;
  }
  std::string msg = "invalid configuration:";
  for (const auto& e : r.errors) msg += "\n  " + e;
  // Report semantic problems of the readable fields as well.
  try {
    c.validate();
  } catch (const ConfigError& e) {
    const std::string more = e.what();
    const auto nl = more.find('\n');
    msg += nl == std::string::npos ? "\n  " + more : more.substr(nl);
  }
  throw ConfigError(msg);
}

}  // namespace

void PipelineConfig::validate() const {
  std::vector<std::string> err;
  auto check = [&](bool ok, const std::string& msg) {
    if (!ok) err.push_back(msg);
  };
  check(schema_version == 1, "schema_version: only version 1 is supported");

  check(!phantom.ellipses.empty(), "phantom.ellipses: at least one ellipse is required");
  for (std::size_t i = 0; i < phantom.ellipses.size(); ++i) {
    const Ellipse& e = phantom.ellipses[i];
    const std::string p = "phantom.ellipses[" + std::to_string(i) + "]";
    check(e.semi_axes.x > 0.0 && e.semi_axes.y > 0.0, p + ".semi_axes: must be positive");
    check(std::isfinite(e.density), p + ".density: must be finite");
    check(std::isfinite(e.center.x) && std::isfinite(e.center.y) && std::isfinite(e.rotation),
          p + ": center and rotation must be finite");
  }
  check(phantom.find(solver.domain_label) != nullptr,
        "solver.domain_label: no ellipse labelled '" + solver.domain_label + "'");
  check(phantom.find(prior.spine_label) != nullptr,
        "prior.spine_label: no ellipse labelled '" + prior.spine_label + "'");

  check(motion.model == "breathing" || motion.model == "identity",
        "motion.model: must be breathing or identity");
  if (motion.model == "breathing") {
    const auto& b = motion.breathing;
    check(b.offset - std::abs(b.amplitude) > 0.0, "motion: offset - |amplitude| must be positive");
    check(b.frequency > 0.0, "motion.frequency: must be positive");
  }

  try {
    scan.validate();
  } catch (const ConfigError& e) {
    err.push_back(std::string("scan: ") + e.what());
  }
  if (periods_covered) check(*periods_covered > 0.0, "scan.periods_covered: must be positive");
  check(scan.time_step > 0.0, "scan.time_step: must be positive");

  check(solver.mu > 0.0, "solver.mu: must be positive");
  check(solver.lambda + 2.0 * solver.mu > 0.0, "solver: lambda + 2 mu must be positive");
  check(solver.grid_size >= 5, "solver.grid_size: at least 5 nodes");
  check(solver.cfl_safety > 0.0 && solver.cfl_safety <= 1.0, "solver.cfl_safety: must lie in (0, 1]");
  check(solver.length_scale > 0.0, "solver.length_scale: must be positive");
  check(solver.snapshot_stride >= 1, "solver.snapshot_stride: must be at least 1");
  check(solver.min_arm_fraction >= 0.0 && solver.min_arm_fraction < 1.0,
        "solver.min_arm_fraction: must lie in [0, 1)");

  check(prior.soft_tissue > 0.0, "prior.soft_tissue: must be positive");
  check(prior.spine > 0.0, "prior.spine: must be positive");

  std::set<std::string> names;
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    const auto& b = boundary[i];
    const std::string p = "boundary[" + std::to_string(i) + "]";
    check(!b.name.empty() && std::all_of(b.name.begin(), b.name.end(), [](char ch) {
            return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-';
          }), p + ".name: letters, digits, '_' and '-' only");
    check(names.insert(b.name).second, p + ".name: duplicate '" + b.name + "'");
    check(b.noise_std >= 0.0, p + ".noise_std: must be >= 0");
    check(b.mode != BoundaryMode::Sparse || b.num_nodes >= 3, p + ".num_nodes: at least 3");
  }

  try {
    filter.validate(scan);
  } catch (const ConfigError& e) {
    err.push_back(e.what());
  }

  check(image.nx >= 2 && image.ny >= 2, "image: nx and ny must be at least 2");
  check(image.xmax > image.xmin && image.ymax > image.ymin, "image: empty extent");
  check(evaluation.supersample >= 1, "evaluation.supersample: must be at least 1");
  check(evaluation.interior_fraction > 0.0 && evaluation.interior_fraction <= 1.0,
        "evaluation.interior_fraction: must lie in (0, 1]");
  check(!output_dir.empty(), "output_dir: must not be empty");

  if (err.empty() && scan.num_angles > 0) {
    const auto times = scan.times();
    const double r = max_support_radius(phantom, motion.build(), times);
    check(r < 1.0, "phantom: support leaves the unit disk under the motion (radius " +
                       std::to_string(r) + ")");
  }

  if (!err.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : err) msg += "\n  " + e;
    throw ConfigError(msg);
  }
}

PipelineConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(j);
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const PipelineConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  json ellipses = json::array();
  for (const auto& e : c.phantom.ellipses) {
    ellipses.push_back({{"label", e.label},
                        {"center", {e.center.x, e.center.y}},
                        {"semi_axes", {e.semi_axes.x, e.semi_axes.y}},
                        {"rotation", e.rotation},
                        {"density", e.density}});
  }
  j["phantom"] = {{"ellipses", ellipses}};
  j["motion"] = {{"model", c.motion.model},
                 {"amplitude", c.motion.breathing.amplitude},
                 {"frequency", c.motion.breathing.frequency},
                 {"offset", c.motion.breathing.offset},
                 {"drift_coeff", c.motion.breathing.drift_coeff}};
  json scan = {{"num_angles", c.scan.num_angles},     {"angle_start", c.scan.angle_start},
               {"angle_end", c.scan.angle_end},       {"num_detectors", c.scan.num_detectors},
               {"detector_min", c.scan.detector_min}, {"detector_max", c.scan.detector_max},
               {"time_start", c.scan.time_start}};
  if (c.periods_covered) {
    scan["periods_covered"] = *c.periods_covered;
  } else {
    scan["time_step"] = c.scan.time_step;
  }
  j["scan"] = scan;
  j["solver"] = {{"lambda", c.solver.lambda},
                 {"mu", c.solver.mu},
                 {"grid_size", c.solver.grid_size},
                 {"cfl_safety", c.solver.cfl_safety},
                 {"length_scale", c.solver.length_scale},
                 {"snapshot_stride", c.solver.snapshot_stride},
                 {"domain_label", c.solver.domain_label},
                 {"min_arm_fraction", c.solver.min_arm_fraction}};
  j["prior"] = {{"soft_tissue", c.prior.soft_tissue},
                {"spine", c.prior.spine},
                {"spine_label", c.prior.spine_label}};
  json boundary = json::array();
  for (const auto& b : c.boundary) {
    boundary.push_back({{"name", b.name},
                        {"mode", mode_name(b.mode)},
                        {"noise_std", b.noise_std},
                        {"num_nodes", b.num_nodes},
                        {"noise_time_constant", b.noise_time_constant}});
  }
  j["boundary"] = boundary;
  j["filter"] = {{"gamma", c.filter.gamma}, {"dft_size", c.filter.dft_size}};
  j["image"] = {{"nx", c.image.nx},     {"ny", c.image.ny},     {"xmin", c.image.xmin},
                {"xmax", c.image.xmax}, {"ymin", c.image.ymin}, {"ymax", c.image.ymax}};
  j["evaluation"] = {{"supersample", c.evaluation.supersample},
                     {"interior_fraction", c.evaluation.interior_fraction}};
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  return j.dump(2) + "\n";
}

}  // namespace dynact
