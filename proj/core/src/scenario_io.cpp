#include "commplan/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace commplan {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

/// Walks one JSON object, collecting errors instead of stopping at the first.
class Reader {
 public:
  Reader(const json& node, std::string path, std::vector<std::string>& errs)
      : node_(node), path_(std::move(path)), errs_(errs) {
    if (!node_.is_object()) errs_.push_back(path_ + ": expected an object");
  }

  ~Reader() {
    if (!node_.is_object()) return;
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.count(key)) errs_.push_back(field(key) + ": unknown key");
    }
  }

  Reader(const Reader&) = delete;
  Reader& operator=(const Reader&) = delete;

  const json* find(const std::string& key, bool required) {
    seen_.insert(key);
    if (!node_.is_object()) return nullptr;
    const auto it = node_.find(key);
    if (it == node_.end()) {
      if (required) errs_.push_back(field(key) + ": missing");
      return nullptr;
    }
    return &*it;
  }

  void number(const std::string& key, double& out, bool required) {
    if (const json* v = find(key, required)) {
      if (v->is_number()) out = v->get<double>();
      else errs_.push_back(field(key) + ": expected a number");
    }
  }

  template <typename Int>
  void integer(const std::string& key, Int& out, bool required) {
    if (const json* v = find(key, required)) {
      if (v->is_number_integer()) {
        if constexpr (std::is_unsigned_v<Int>) {
          if (v->is_number_unsigned()) out = v->get<Int>();
          else errs_.push_back(field(key) + ": expected a non-negative integer");
        } else {
          out = v->get<Int>();
        }
      } else {
        errs_.push_back(field(key) + ": expected an integer");
      }
    }
  }

  void string(const std::string& key, std::string& out, bool required) {
    if (const json* v = find(key, required)) {
      if (v->is_string()) out = v->get<std::string>();
      else errs_.push_back(field(key) + ": expected a string");
    }
  }

  void vector(const std::string& key, Vec& out, bool required) {
    if (const json* v = find(key, required)) {
      if (!v->is_array()) {
        errs_.push_back(field(key) + ": expected an array of numbers");
        return;
      }
      Vec tmp(static_cast<Eigen::Index>(v->size()));
      for (std::size_t i = 0; i < v->size(); ++i) {
        if (!(*v)[i].is_number()) {
          errs_.push_back(field(key) + "[" + std::to_string(i) + "]: expected a number");
          return;
        }
        tmp(static_cast<Eigen::Index>(i)) = (*v)[i].get<double>();
      }
      out = std::move(tmp);
    }
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& node_;
  std::string path_;
  std::vector<std::string>& errs_;
  std::set<std::string> seen_;
};

void read_robot(const json& node, std::size_t index, RobotSpec& r, std::vector<std::string>& errs) {
  Reader in(node, "robots[" + std::to_string(index) + "]", errs);
  in.vector("position", r.position, true);
  in.number("radius", r.radius, true);
  std::string role;
  in.string("role", role, true);
  if (role == "inspection") r.role = Role::Inspection;
  else if (role == "support") r.role = Role::Support;
  else if (!role.empty()) errs.push_back(in.field("role") + ": expected \"inspection\" or \"support\"");
  in.vector("poi", r.poi, false);
  in.number("h", r.h, false);
}

json vec_json(const Vec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> problems)
    : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

ScenarioConfig parse_scenario_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError({std::string("<document>: ") + e.what()});
  }

  ScenarioConfig c;
  std::vector<std::string> errs;
  {
    Reader in(root, "", errs);
    in.string("name", c.name, false);
    in.integer("dimension", c.dim, true);
    if (const json* link = in.find("link", true)) {
      Reader l(*link, "link", errs);
      l.number("d50", c.link.d50, true);
      l.number("alpha", c.link.alpha, true);
      l.number("w_min", c.link.w_min, false);
    }
    if (const json* hz = in.find("horizon", true)) {
      Reader h(*hz, "horizon", errs);
      h.integer("steps", c.horizon.steps, true);
      h.number("u_max", c.horizon.u_max, true);
      std::string norm = "inf";
      h.string("norm", norm, false);
      if (norm != "inf") errs.push_back("horizon.norm: only \"inf\" is supported");
    }
    if (const json* da = in.find("dual_ascent", false)) {
      Reader d(*da, "dual_ascent", errs);
      d.number("rho", c.dual.rho, false);
      d.number("eta", c.dual.eta, false);
      d.integer("max_rounds", c.dual.max_rounds, false);
      d.number("trade_cap", c.dual.trade_cap, false);
    }
    if (const json* est = in.find("estimation", false)) {
      Reader e(*est, "estimation", errs);
      e.number("zeta", c.estimation.zeta, false);
    }
    in.number("lambda_lb", c.lambda_lb, true);
    in.number("epsilon", c.epsilon, true);
    in.integer("move_steps", c.move_steps, false);
    in.integer("max_outer_cycles", c.max_outer_cycles, false);
    in.integer("seed", c.seed, false);
    in.number("delta_t", c.delta_t, false);
    in.number("goal_tolerance", c.goal_tolerance, false);
    in.number("collision_radius", c.collision_radius, false);
    if (const json* robots = in.find("robots", true)) {
      if (!robots->is_array()) {
        errs.push_back("robots: expected an array");
      } else {
        c.robots.resize(robots->size());
        for (std::size_t i = 0; i < robots->size(); ++i) read_robot((*robots)[i], i, c.robots[i], errs);
      }
    }
  }
  c.horizon.dim = c.dim;
  if (!errs.empty()) throw ScenarioError(std::move(errs));

  auto problems = c.validate();
  if (!problems.empty()) throw ScenarioError(std::move(problems));
  return c;
}

ScenarioConfig parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError({path.string() + ": cannot open scenario file"});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

std::string serialize_scenario(const ScenarioConfig& c) {
  json root = json::object();
  root["name"] = c.name;
  root["dimension"] = c.dim;
  root["link"] = {{"d50", c.link.d50}, {"alpha", c.link.alpha}, {"w_min", c.link.w_min}};
  root["horizon"] = {{"steps", c.horizon.steps}, {"u_max", c.horizon.u_max}, {"norm", "inf"}};
  json dual = {{"rho", c.dual.rho}, {"eta", c.dual.eta}, {"max_rounds", c.dual.max_rounds}};
  if (std::isfinite(c.dual.trade_cap)) dual["trade_cap"] = c.dual.trade_cap;
  root["dual_ascent"] = dual;
  root["estimation"] = {{"zeta", c.estimation.zeta}};
  root["lambda_lb"] = c.lambda_lb;
  root["epsilon"] = c.epsilon;
  root["move_steps"] = c.move_steps;
  root["max_outer_cycles"] = c.max_outer_cycles;
  root["seed"] = c.seed;
  root["delta_t"] = c.delta_t;
  root["goal_tolerance"] = c.goal_tolerance;
  root["collision_radius"] = c.collision_radius;
  json robots = json::array();
  for (const auto& r : c.robots) {
    json jr = {{"position", vec_json(r.position)},
               {"radius", r.radius},
               {"role", r.role == Role::Inspection ? "inspection" : "support"},
               {"h", r.h}};
    if (r.role == Role::Inspection) jr["poi"] = vec_json(r.poi);
    robots.push_back(std::move(jr));
  }
  root["robots"] = std::move(robots);
  return root.dump(2) + "\n";
}

}  // namespace commplan
