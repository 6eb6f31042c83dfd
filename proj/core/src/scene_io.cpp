#include "spi2/scene_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spi2/constraints.hpp"
#include "spi2/objectives.hpp"

namespace spi2 {

using json = nlohmann::ordered_json;

SceneError::SceneError(std::string field, std::size_t line, const std::string& message)
    : ModelError(line ? "line " + std::to_string(line) + ": " + message
                      : (field.empty() ? message : field + ": " + message)),
      field_(std::move(field)),
      line_(line) {}

namespace {

// ---- writing ---------------------------------------------------------------

json vec3(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json vecx(const VecX& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json mat3(const Mat3& m) {
  json out = json::array();
  for (int r = 0; r < 3; ++r) out.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
  return out;
}

json sphere(const Sphere& s) {
  return json::array({s.center.x(), s.center.y(), s.center.z(), s.radius});
}

json spheres(const std::vector<Sphere>& list) {
  json out = json::array();
  for (const auto& s : list) out.push_back(sphere(s));
  return out;
}

json points(const std::vector<Vec3>& list) {
  json out = json::array();
  for (const auto& p : list) out.push_back(vec3(p));
  return out;
}

std::string routing_name(RoutingVariant v) {
  return v == RoutingVariant::Quadratic ? "quadratic" : "exponential";
}

json weights_json(const ObjectiveWeights& w) {
  return json{{"routing", w.routing},
              {"boundary", w.boundary},
              {"cog", w.cog},
              {"inertia", w.inertia},
              {"volume", w.volume},
              {"mean_distance", w.mean_distance},
              {"routing_variant", routing_name(w.routing_variant)},
              {"gamma", w.gamma},
              {"alpha_volume", w.alpha_volume},
              {"inertia_axes", vec3(w.inertia_axes)}};
}

json boundary_json(const BoundaryModel& b) {
  return json{{"spheres", spheres(b.spheres)},
              {"surface_points", points(b.surface_points)},
              {"alpha_union", b.alpha_union},
              {"alpha_points", b.alpha_points},
              {"beta", b.beta},
              {"delta_union", b.delta_union},
              {"delta_points", b.delta_points},
              {"w_union", b.w_union},
              {"w_points", b.w_points}};
}

json spec_json(const ProblemSpec& spec) {
  json bodies = json::array();
  for (const auto& b : spec.bodies) {
    bodies.push_back(json{{"id", b.id},
                          {"mass", b.mass},
                          {"cog", vec3(b.cog_local)},
                          {"inertia", mat3(b.inertia_local)},
                          {"spheres", spheres(b.spheres)},
                          {"ports", points(b.ports)}});
  }
  json routes = json::array();
  for (const auto& r : spec.routes) {
    routes.push_back(json{{"id", r.id},
                          {"from", json{{"body", spec.bodies[r.from.body].id}, {"port", r.from.port}}},
                          {"to", json{{"body", spec.bodies[r.to.body].id}, {"port", r.to.port}}},
                          {"control_points", r.n_control_points},
                          {"radius", r.radius}});
  }
  json out{{"id", spec.id}, {"bodies", bodies}, {"routes", routes}};
  if (spec.boundary) out["boundary"] = boundary_json(*spec.boundary);
  out["weights"] = weights_json(spec.weights);
  out["bounds"] = json{{"lower", vec3(spec.bounds.lower)},
                       {"upper", vec3(spec.bounds.upper)},
                       {"angle_limit", spec.bounds.angle_limit}};
  out["constraint_mode"] =
      json{{"kind", spec.constraint_mode.kind == ConstraintModeKind::Absolute ? "absolute" : "soft_sum"},
           {"beta", spec.constraint_mode.beta},
           {"epsilon", spec.constraint_mode.epsilon}};
  out["route_exemption"] = spec.route_exemption == RouteExemption::Local ? "local" : "host_body";
  out["cog_target"] = vec3(spec.cog_target);
  if (spec.known_optimum) {
    out["known_optimum"] = json{{"volume", spec.known_optimum->volume},
                                {"routing_length", spec.known_optimum->routing_length}};
  }
  if (spec.certificate) out["certificate"] = vecx(*spec.certificate);
  return out;
}

json solver_json(const SolverOptions& o) {
  return json{{"rho0", o.rho0},
              {"rho_growth", o.rho_growth},
              {"rho_max", o.rho_max},
              {"tol_feas", o.tol_feas},
              {"tol_grad", o.tol_grad},
              {"max_inner", o.max_inner},
              {"max_outer", o.max_outer},
              {"lbfgs_memory", o.lbfgs_memory},
              {"restore_margin", o.restore_margin},
              {"time_limit", o.time_limit}};
}

json settings_json(const SceneSettings& s) {
  json out{{"solver", solver_json(s.solver)}};
  if (s.framework) out["framework"] = *s.framework;
  if (s.init) out["init"] = *s.init;
  if (s.preset) out["preset"] = *s.preset;
  if (s.restarts) out["restarts"] = *s.restarts;
  if (s.seed) out["seed"] = *s.seed;
  if (s.x0) out["x0"] = vecx(*s.x0);
  return out;
}

json breakdown_json(const ObjectiveBreakdown& b) {
  return json{{"routing", b.routing},   {"boundary", b.boundary}, {"cog", b.cog},
              {"inertia", b.inertia},   {"volume", b.volume},     {"mean_distance", b.mean_distance},
              {"total", b.total}};
}

json report_json(const SolveReport& r, const ResultOptions& options) {
  json out{{"f_opt", r.f_opt},
           {"max_violation", r.max_violation},
           {"projected_gradient", r.projected_gradient},
           {"converged", r.converged},
           {"termination", r.termination},
           {"outer_iterations", r.outer_iterations},
           {"inner_iterations", r.inner_iterations},
           {"function_evaluations", r.function_evaluations},
           {"jitter_events", r.jitter_events},
           {"violation_history", r.violation_history}};
  if (options.timings) out["wall_time"] = r.wall_time;
  return out;
}

json geometry_json(const ProblemSpec& spec, const VecX& x) {
  const DesignLayout layout = spec.layout();
  const WorldFrame frame = spec.frame(layout, x);
  json bodies = json::array();
  for (std::size_t i = 0; i < spec.bodies.size(); ++i) {
    json s = json::array();
    const auto centers = frame.sphere_centers(i);
    for (std::size_t k = 0; k < centers.size(); ++k) {
      s.push_back(sphere(Sphere{centers[k], frame.sphere_radius(i, k)}));
    }
    json ports = json::array();
    for (std::size_t p = 0; p < spec.bodies[i].ports.size(); ++p) {
      ports.push_back(vec3(frame.port(PortRef{i, p})));
    }
    bodies.push_back(json{{"id", spec.bodies[i].id}, {"spheres", s}, {"ports", ports}});
  }
  json routes = json::array();
  for (std::size_t r = 0; r < spec.routes.size(); ++r) {
    json nodes = json::array();
    for (const auto& p : frame.route_nodes(r)) nodes.push_back(vec3(p));
    routes.push_back(json{{"id", spec.routes[r].id}, {"radius", spec.routes[r].radius}, {"nodes", nodes}});
  }
  return json{{"bodies", bodies}, {"routes", routes}};
}

json metrics_json(const ProblemSpec& spec, const VecX& x) {
  json out{{"aabb_volume", exact_aabb_volume(x, spec)},
           {"routing_length", routing_length_linear(x, spec)},
           {"min_body_clearance", spec.bodies.size() > 1 ? json(min_body_clearance(spec, x)) : json()}};
  if (spec.known_optimum) {
    out["volume_gap"] = exact_aabb_volume(x, spec) - spec.known_optimum->volume;
    out["routing_gap"] = routing_length_linear(x, spec) - spec.known_optimum->routing_length;
  }
  return out;
}

json restart_json(const RestartRecord& r, const ResultOptions& options) {
  json out{{"index", r.index},
           {"seed", r.seed},
           {"f_opt", r.f_opt},
           {"max_violation", r.max_violation},
           {"converged", r.converged},
           {"feasible", r.feasible},
           {"termination", r.termination},
           {"volume", r.volume},
           {"routing_length", r.routing_length},
           {"outer_iterations", r.outer_iterations},
           {"inner_iterations", r.inner_iterations}};
  if (options.timings) out["wall_time"] = r.wall_time;
  return out;
}

json result_json(const ProblemSpec& spec, const SolveReport& report, const RunInfo& info,
                 const ResultOptions& options) {
  json meta = json::object();
  for (const auto& [k, v] : info.metadata) meta[k] = v;
  return json{{"format", "spi2-result"},
              {"version", 1},
              {"run", json{{"framework", info.framework},
                           {"init", info.init},
                           {"seed", info.seed},
                           {"metadata", meta}}},
              {"scene", spec_json(spec)},
              {"solution", json{{"x", vecx(report.x_opt)}, {"x0", vecx(report.x0)}}},
              {"report", report_json(report, options)},
              {"breakdown", breakdown_json(report.breakdown)},
              {"metrics", metrics_json(spec, report.x_opt)},
              {"geometry", geometry_json(spec, report.x_opt)}};
}

// ---- reading ---------------------------------------------------------------

std::string index_path(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}
std::string key_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw SceneError(path, 0, message);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(key_path(path, key), "missing field");
  return *it;
}

const json* optional_field(const json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::size_t as_size(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) fail(path, "expected a non-negative integer");
  return j.get<std::size_t>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

const json& as_array(const json& j, const std::string& path, std::optional<std::size_t> size = {}) {
  if (!j.is_array()) fail(path, "expected an array");
  if (size && j.size() != *size) {
    fail(path, "expected " + std::to_string(*size) + " entries, got " + std::to_string(j.size()));
  }
  return j;
}

Vec3 as_vec3(const json& j, const std::string& path) {
  as_array(j, path, 3);
  return {as_double(j[0], index_path(path, 0)), as_double(j[1], index_path(path, 1)),
          as_double(j[2], index_path(path, 2))};
}

VecX as_vecx(const json& j, const std::string& path) {
  as_array(j, path);
  VecX v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = as_double(j[i], index_path(path, i));
  return v;
}

Mat3 as_mat3(const json& j, const std::string& path) {
  as_array(j, path, 3);
  Mat3 m;
  for (int r = 0; r < 3; ++r) m.row(r) = as_vec3(j[r], index_path(path, r)).transpose();
  return m;
}

Sphere as_sphere(const json& j, const std::string& path) {
  as_array(j, path, 4);
  Sphere s;
  for (int k = 0; k < 3; ++k) s.center[k] = as_double(j[k], index_path(path, k));
  s.radius = as_double(j[3], index_path(path, 3));
  return s;
}

std::vector<Sphere> as_spheres(const json& j, const std::string& path) {
  as_array(j, path);
  std::vector<Sphere> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_sphere(j[i], index_path(path, i)));
  return out;
}

std::vector<Vec3> as_points(const json& j, const std::string& path) {
  as_array(j, path);
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_vec3(j[i], index_path(path, i)));
  return out;
}

void read_double(const json& obj, const char* key, const std::string& path, double& out) {
  if (const json* v = optional_field(obj, key)) out = as_double(*v, key_path(path, key));
}

void read_size(const json& obj, const char* key, const std::string& path, std::size_t& out) {
  if (const json* v = optional_field(obj, key)) out = as_size(*v, key_path(path, key));
}

ObjectiveWeights read_weights(const json& j, const std::string& path) {
  if (j.is_string()) {
    try {
      return objective_preset(j.get<std::string>());
    } catch (const ModelError& e) {
      fail(path, e.what());
    }
  }
  if (!j.is_object()) fail(path, "expected a preset name or an object");
  ObjectiveWeights w;
  if (const json* p = optional_field(j, "preset")) w = read_weights(*p, key_path(path, "preset"));
  read_double(j, "routing", path, w.routing);
  read_double(j, "boundary", path, w.boundary);
  read_double(j, "cog", path, w.cog);
  read_double(j, "inertia", path, w.inertia);
  read_double(j, "volume", path, w.volume);
  read_double(j, "mean_distance", path, w.mean_distance);
  read_double(j, "gamma", path, w.gamma);
  read_double(j, "alpha_volume", path, w.alpha_volume);
  if (const json* v = optional_field(j, "routing_variant")) {
    const std::string p = key_path(path, "routing_variant");
    const std::string name = as_string(*v, p);
    if (name == "quadratic") w.routing_variant = RoutingVariant::Quadratic;
    else if (name == "exponential") w.routing_variant = RoutingVariant::Exponential;
    else fail(p, "unknown routing variant '" + name + "'");
  }
  if (const json* v = optional_field(j, "inertia_axes")) {
    w.inertia_axes = as_vec3(*v, key_path(path, "inertia_axes"));
  }
  return w;
}

BoundaryModel read_boundary(const json& j, const std::string& path) {
  BoundaryModel b;
  b.spheres = as_spheres(require(j, "spheres", path), key_path(path, "spheres"));
  b.surface_points = as_points(require(j, "surface_points", path), key_path(path, "surface_points"));
  read_double(j, "alpha_union", path, b.alpha_union);
  read_double(j, "alpha_points", path, b.alpha_points);
  read_double(j, "beta", path, b.beta);
  read_double(j, "delta_union", path, b.delta_union);
  read_double(j, "delta_points", path, b.delta_points);
  read_double(j, "w_union", path, b.w_union);
  read_double(j, "w_points", path, b.w_points);
  return b;
}

PortRef read_port(const json& j, const std::string& path, const std::vector<Body>& bodies) {
  PortRef ref;
  const json& body = require(j, "body", path);
  const std::string bp = key_path(path, "body");
  if (body.is_string()) {
    const std::string id = body.get<std::string>();
    std::size_t found = bodies.size();
    for (std::size_t i = 0; i < bodies.size(); ++i) {
      if (bodies[i].id == id) found = i;
    }
    if (found == bodies.size()) fail(bp, "unknown body '" + id + "'");
    ref.body = found;
  } else {
    ref.body = as_size(body, bp);
    if (ref.body >= bodies.size()) fail(bp, "body index out of range");
  }
  ref.port = as_size(require(j, "port", path), key_path(path, "port"));
  if (ref.port >= bodies[ref.body].ports.size()) fail(key_path(path, "port"), "port index out of range");
  return ref;
}

ProblemSpec read_spec(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  ProblemSpec spec;
  if (const json* v = optional_field(j, "id")) spec.id = as_string(*v, key_path(path, "id"));

  const std::string bpath = key_path(path, "bodies");
  const json& bodies = as_array(require(j, "bodies", path), bpath);
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    const std::string p = index_path(bpath, i);
    const json& b = bodies[i];
    if (!b.is_object()) fail(p, "expected an object");
    Body body;
    body.id = optional_field(b, "id") ? as_string(b["id"], key_path(p, "id")) : "body" + std::to_string(i);
    body.spheres = as_spheres(require(b, "spheres", p), key_path(p, "spheres"));
    if (const json* v = optional_field(b, "ports")) body.ports = as_points(*v, key_path(p, "ports"));
    if (optional_field(b, "mass")) {
      body.mass = as_double(b["mass"], key_path(p, "mass"));
      if (const json* v = optional_field(b, "cog")) body.cog_local = as_vec3(*v, key_path(p, "cog"));
      if (const json* v = optional_field(b, "inertia")) body.inertia_local = as_mat3(*v, key_path(p, "inertia"));
    } else {
      const MassProperties mp = sphere_cloud_mass_properties(body.spheres);
      body.mass = mp.mass;
      body.cog_local = mp.cog;
      body.inertia_local = mp.inertia;
    }
    spec.bodies.push_back(std::move(body));
  }

  if (const json* routes = optional_field(j, "routes")) {
    const std::string rpath = key_path(path, "routes");
    as_array(*routes, rpath);
    for (std::size_t r = 0; r < routes->size(); ++r) {
      const std::string p = index_path(rpath, r);
      const json& rj = (*routes)[r];
      if (!rj.is_object()) fail(p, "expected an object");
      Route route;
      route.id = optional_field(rj, "id") ? as_string(rj["id"], key_path(p, "id")) : "route" + std::to_string(r);
      route.from = read_port(require(rj, "from", p), key_path(p, "from"), spec.bodies);
      route.to = read_port(require(rj, "to", p), key_path(p, "to"), spec.bodies);
      read_size(rj, "control_points", p, route.n_control_points);
      read_double(rj, "radius", p, route.radius);
      spec.routes.push_back(std::move(route));
    }
  }

  if (const json* v = optional_field(j, "boundary")) spec.boundary = read_boundary(*v, key_path(path, "boundary"));
  if (const json* v = optional_field(j, "weights")) spec.weights = read_weights(*v, key_path(path, "weights"));

  if (const json* v = optional_field(j, "bounds")) {
    const std::string p = key_path(path, "bounds");
    if (const json* l = optional_field(*v, "lower")) spec.bounds.lower = as_vec3(*l, key_path(p, "lower"));
    if (const json* u = optional_field(*v, "upper")) spec.bounds.upper = as_vec3(*u, key_path(p, "upper"));
    read_double(*v, "angle_limit", p, spec.bounds.angle_limit);
  }
  if (const json* v = optional_field(j, "constraint_mode")) {
    const std::string p = key_path(path, "constraint_mode");
    if (const json* k = optional_field(*v, "kind")) {
      const std::string name = as_string(*k, key_path(p, "kind"));
      if (name == "absolute") spec.constraint_mode.kind = ConstraintModeKind::Absolute;
      else if (name == "soft_sum") spec.constraint_mode.kind = ConstraintModeKind::SoftSum;
      else fail(key_path(p, "kind"), "unknown constraint mode '" + name + "'");
    }
    read_double(*v, "beta", p, spec.constraint_mode.beta);
    read_double(*v, "epsilon", p, spec.constraint_mode.epsilon);
  }
  if (const json* v = optional_field(j, "route_exemption")) {
    const std::string p = key_path(path, "route_exemption");
    const std::string name = as_string(*v, p);
    if (name == "local") spec.route_exemption = RouteExemption::Local;
    else if (name == "host_body") spec.route_exemption = RouteExemption::HostBody;
    else fail(p, "unknown exemption rule '" + name + "'");
  }
  if (const json* v = optional_field(j, "cog_target")) spec.cog_target = as_vec3(*v, key_path(path, "cog_target"));
  if (const json* v = optional_field(j, "known_optimum")) {
    const std::string p = key_path(path, "known_optimum");
    KnownOptimum k;
    k.volume = as_double(require(*v, "volume", p), key_path(p, "volume"));
    k.routing_length = as_double(require(*v, "routing_length", p), key_path(p, "routing_length"));
    spec.known_optimum = k;
  }
  if (const json* v = optional_field(j, "certificate")) spec.certificate = as_vecx(*v, key_path(path, "certificate"));

  try {
    spec.validate();
  } catch (const SceneError&) {
    throw;
  } catch (const ModelError& e) {
    fail(path, e.what());
  }
  return spec;
}

SceneSettings read_settings(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  SceneSettings s;
  if (const json* v = optional_field(j, "solver")) {
    const std::string p = key_path(path, "solver");
    if (!v->is_object()) fail(p, "expected an object");
    SolverOptions& o = s.solver;
    read_double(*v, "rho0", p, o.rho0);
    read_double(*v, "rho_growth", p, o.rho_growth);
    read_double(*v, "rho_max", p, o.rho_max);
    read_double(*v, "tol_feas", p, o.tol_feas);
    read_double(*v, "tol_grad", p, o.tol_grad);
    read_size(*v, "max_inner", p, o.max_inner);
    read_size(*v, "max_outer", p, o.max_outer);
    read_size(*v, "lbfgs_memory", p, o.lbfgs_memory);
    read_double(*v, "restore_margin", p, o.restore_margin);
    read_double(*v, "time_limit", p, o.time_limit);
  }
  if (const json* v = optional_field(j, "framework")) s.framework = as_string(*v, key_path(path, "framework"));
  if (const json* v = optional_field(j, "init")) s.init = as_string(*v, key_path(path, "init"));
  if (const json* v = optional_field(j, "preset")) s.preset = as_string(*v, key_path(path, "preset"));
  if (const json* v = optional_field(j, "restarts")) s.restarts = as_size(*v, key_path(path, "restarts"));
  if (const json* v = optional_field(j, "seed")) s.seed = as_size(*v, key_path(path, "seed"));
  if (const json* v = optional_field(j, "x0")) s.x0 = as_vecx(*v, key_path(path, "x0"));
  return s;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    const std::size_t end = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 < end; ++i) {
      if (text[i] == '\n') ++line;
    }
    std::string message = e.what();
    if (const auto pos = message.find("syntax error"); pos != std::string::npos) message = message.substr(pos);
    throw SceneError("", line, message);
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SceneError("", 0, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string scene_to_string(const ProblemSpec& spec, const SceneSettings* settings) {
  json out{{"format", "spi2-scene"}, {"version", 1}, {"problem", spec_json(spec)}};
  if (settings) out["settings"] = settings_json(*settings);
  return dump(out);
}

SceneFile scene_from_string(const std::string& text) {
  const json j = parse(text);
  if (!j.is_object()) fail("", "expected a top-level object");
  SceneFile out;
  // A bare problem object is accepted as well as the wrapped form.
  const json& problem = j.contains("problem") ? j["problem"] : j;
  out.spec = read_spec(problem, j.contains("problem") ? "problem" : "");
  if (const json* s = optional_field(j, "settings")) out.settings = read_settings(*s, "settings");
  if (out.settings.x0) {
    const std::size_t n = out.spec.layout().dimension();
    if (static_cast<std::size_t>(out.settings.x0->size()) != n) {
      fail("settings.x0", "expected " + std::to_string(n) + " entries");
    }
  }
  return out;
}

void save_scene(const std::filesystem::path& path, const ProblemSpec& spec,
                const SceneSettings* settings) {
  write_file(path, scene_to_string(spec, settings));
}

SceneFile load_scene_file(const std::filesystem::path& path) {
  return scene_from_string(read_file(path));
}

ProblemSpec load_scene(const std::filesystem::path& path) { return load_scene_file(path).spec; }

std::string result_to_string(const ProblemSpec& spec, const SolveReport& report,
                             const RunInfo& info, const ResultOptions& options) {
  return dump(result_json(spec, report, info, options));
}

std::string result_to_string(const ProblemSpec& spec, const BenchmarkResult& result,
                             const ResultOptions& options) {
  RunInfo info{result.framework, result.init, result.seed, result.metadata};
  json out = result_json(spec, result.best, info, options);
  json restarts = json::array();
  for (const auto& r : result.restarts) restarts.push_back(restart_json(r, options));
  out["benchmark"] = json{{"spec_id", result.spec_id},
                          {"n_spheres", result.n_spheres},
                          {"best_index", result.best_index},
                          {"best_volume", result.best_volume},
                          {"best_routing_length", result.best_routing_length},
                          {"volume_gap", result.volume_gap},
                          {"routing_gap", result.routing_gap},
                          {"restarts", restarts}};
  return dump(out);
}

void save_result(const std::filesystem::path& path, const ProblemSpec& spec,
                 const SolveReport& report, const RunInfo& info, const ResultOptions& options) {
  write_file(path, result_to_string(spec, report, info, options));
}

void save_result(const std::filesystem::path& path, const ProblemSpec& spec,
                 const BenchmarkResult& result, const ResultOptions& options) {
  write_file(path, result_to_string(spec, result, options));
}

LoadedResult result_from_string(const std::string& text) {
  const json j = parse(text);
  if (!j.is_object()) fail("", "expected a top-level object");
  LoadedResult out;
  out.spec = read_spec(require(j, "scene", ""), "scene");
  const json& solution = require(j, "solution", "");
  out.x = as_vecx(require(solution, "x", "solution"), "solution.x");
  if (static_cast<std::size_t>(out.x.size()) != out.spec.layout().dimension()) {
    fail("solution.x", "length does not match the scene layout");
  }
  const json& report = require(j, "report", "");
  out.f_opt = as_double(require(report, "f_opt", "report"), "report.f_opt");
  out.max_violation = as_double(require(report, "max_violation", "report"), "report.max_violation");
  out.converged = as_bool(require(report, "converged", "report"), "report.converged");
  out.termination = as_string(require(report, "termination", "report"), "report.termination");
  return out;
}

LoadedResult load_result(const std::filesystem::path& path) {
  return result_from_string(read_file(path));
}

ReplayCheck replay(const LoadedResult& result) {
  ReplayCheck c;
  c.f_recorded = result.f_opt;
  c.violation_recorded = result.max_violation;
  c.f_replayed = total_objective(result.x, result.spec).total;
  c.violation_replayed = full_constraint_violation(result.spec, result.x);
  return c;
}

}  // namespace spi2
