#include "imdyn/tools/experiment.hpp"

#include <fstream>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "imdyn/errors.hpp"

namespace imdyn::tools {
namespace {

using nlohmann::json;

double number_field(const json& j, const std::string& key) {
  if (!j.is_number()) throw InvalidInput(fmt::format("{}: expected a number", key));
  return j.get<double>();
}

std::vector<double> vector_field(const json& j, const std::string& key) {
  if (!j.is_array()) throw InvalidInput(fmt::format("{}: expected an array of numbers", key));
  std::vector<double> out;
  for (const auto& item : j) {
    if (!item.is_number()) throw InvalidInput(fmt::format("{}: expected an array of numbers", key));
    out.push_back(item.get<double>());
  }
  return out;
}

std::string string_field(const json& j, const std::string& key) {
  if (!j.is_string()) throw InvalidInput(fmt::format("{}: expected a string", key));
  return j.get<std::string>();
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw InvalidInput("config: expected a JSON object");
  ExperimentConfig c;
  std::set<std::string> seen;
  for (const auto& [key, value] : j.items()) {
    seen.insert(key);
    if (key == "objective") c.objective = string_field(value, key);
    else if (key == "weights") c.weights = vector_field(value, key);
    else if (key == "center") c.center = vector_field(value, key);
    else if (key == "alpha") c.alpha = number_field(value, key);
    else if (key == "t0") c.t0 = number_field(value, key);
    else if (key == "lambda0") c.lambda0 = number_field(value, key);
    else if (key == "l") c.l = number_field(value, key);
    else if (key == "beta0") c.beta0 = number_field(value, key);
    else if (key == "m") c.m = number_field(value, key);
    else if (key == "n") c.n = number_field(value, key);
    else if (key == "b0") {
      if (value.is_string() && value.get<std::string>() == "auto") {
        c.b0.reset();
      } else if (value.is_number()) {
        c.b0 = value.get<double>();
      } else {
        throw InvalidInput("b0: expected a number or \"auto\"");
      }
    } else if (key == "x0") c.x0 = vector_field(value, key);
    else if (key == "u0") c.u0 = vector_field(value, key);
    else if (key == "t_end") c.t_end = number_field(value, key);
    else if (key == "rel_tol") c.rel_tol = number_field(value, key);
    else if (key == "abs_tol") c.abs_tol = number_field(value, key);
    else if (key == "sample_count") {
      if (!value.is_number_integer()) throw InvalidInput("sample_count: expected an integer");
      c.sample_count = value.get<int>();
    } else if (key == "output") c.output = string_field(value, key);
    else throw InvalidInput(fmt::format("{}: unknown config key", key));
  }
  for (const char* required : {"alpha", "l", "m", "n"}) {
    if (!seen.count(required)) throw InvalidInput(fmt::format("{}: required key missing", required));
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput(fmt::format("config: cannot read {}", path));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput(fmt::format("config: {} is not valid JSON ({})", path, e.what()));
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["objective"] = c.objective;
  if (!c.weights.empty()) j["weights"] = c.weights;
  if (!c.center.empty()) j["center"] = c.center;
  j["alpha"] = c.alpha;
  j["t0"] = c.t0;
  j["lambda0"] = c.lambda0;
  j["l"] = c.l;
  j["beta0"] = c.beta0;
  j["m"] = c.m;
  j["n"] = c.n;
  if (c.b0) {
    j["b0"] = *c.b0;
  } else {
    j["b0"] = "auto";
  }
  j["x0"] = c.x0;
  j["u0"] = c.u0;
  j["t_end"] = c.t_end;
  j["rel_tol"] = c.rel_tol;
  j["abs_tol"] = c.abs_tol;
  j["sample_count"] = c.sample_count;
  j["output"] = c.output;
  return j;
}

PolynomialSchedule to_schedule(const ExperimentConfig& c) {
  PolynomialSchedule s;
  s.alpha = c.alpha;
  s.t0 = c.t0;
  s.lambda0 = c.lambda0;
  s.l = c.l;
  s.beta0 = c.beta0;
  s.m = c.m;
  s.n = c.n;
  if (c.b0) {
    s.b0 = *c.b0;
  } else {
    try {
      s.b0 = default_b0(c.alpha, c.m, c.n, c.beta0, c.t0);
    } catch (const InvalidInput& e) {
      throw InvalidInput(fmt::format("b0: {}", e.what()));
    }
  }
  s.validate();
  return s;
}

SystemConfig to_system(const ExperimentConfig& c) {
  if (c.x0.empty()) throw InvalidInput("x0: needs at least one coordinate");
  SystemConfig cfg;
  const std::size_t dim = c.x0.size();
  if (c.objective == "l1") {
    cfg.objective = ProxFunction::l1(dim);
  } else if (c.objective == "elastic_abs") {
    cfg.objective = ProxFunction::elastic_abs(dim);
  } else if (c.objective == "diag_quadratic") {
    if (c.weights.size() != dim) {
      throw InvalidInput(fmt::format("weights: expected {} entries, got {}", dim, c.weights.size()));
    }
    std::vector<double> center = c.center.empty() ? std::vector<double>(dim, 0.0) : c.center;
    if (center.size() != dim) {
      throw InvalidInput(fmt::format("center: expected {} entries, got {}", dim, center.size()));
    }
    cfg.objective = ProxFunction::diag_quadratic(to_vector(c.weights), to_vector(center));
  } else {
    throw InvalidInput(fmt::format(
        "objective: unknown kind '{}' (l1, elastic_abs, diag_quadratic)", c.objective));
  }
  if (c.objective != "diag_quadratic" && (!c.weights.empty() || !c.center.empty())) {
    throw InvalidInput("weights/center: only valid for diag_quadratic");
  }
  cfg.schedule = to_schedule(c);
  cfg.x0 = to_vector(c.x0);
  cfg.u0 = to_vector(c.u0);
  cfg.t_end = c.t_end;
  cfg.rel_tol = c.rel_tol;
  cfg.abs_tol = c.abs_tol;
  cfg.sample_count = c.sample_count;
  cfg.validate();
  return cfg;
}

bool same_system(const SystemConfig& a, const SystemConfig& b) {
  const ProxFunction& fa = a.objective;
  const ProxFunction& fb = b.objective;
  return fa.kind() == fb.kind() && fa.dimension() == fb.dimension() &&
         fa.weights() == fb.weights() && fa.center() == fb.center() &&
         a.schedule == b.schedule && a.x0 == b.x0 && a.u0 == b.u0 && a.t_end == b.t_end &&
         a.rel_tol == b.rel_tol && a.abs_tol == b.abs_tol && a.sample_count == b.sample_count;
}

std::vector<std::string> csv_columns(std::size_t dimension) {
  std::vector<std::string> cols = {"t"};
  for (std::size_t i = 0; i < dimension; ++i) cols.push_back(fmt::format("x_{}", i));
  for (std::size_t i = 0; i < dimension; ++i) cols.push_back(fmt::format("v_{}", i));
  for (const char* name : {"envelope_gap", "grad_norm", "prox_dist", "prox_gap", "velocity_norm",
                           "energy_c_alpha_minus_1", "dist_to_minimizer", "t2b_times_gap"}) {
    cols.emplace_back(name);
  }
  return cols;
}

void write_csv(std::ostream& out, const Trajectory& traj) {
  const std::size_t dim = traj.empty() ? 0 : static_cast<std::size_t>(traj.front().x.size());
  const auto cols = csv_columns(dim);
  out << fmt::format("{}\n", fmt::join(cols, ","));
  std::vector<double> row;
  for (const Sample& s : traj.samples) {
    row.clear();
    row.push_back(s.t);
    for (Eigen::Index i = 0; i < s.x.size(); ++i) row.push_back(s.x[i]);
    for (Eigen::Index i = 0; i < s.v.size(); ++i) row.push_back(s.v[i]);
    for (double v : {s.envelope_gap, s.grad_norm, s.prox_dist, s.prox_gap, s.velocity_norm,
                     s.energy, s.dist_to_minimizer, s.scaled_gap}) {
      row.push_back(v);
    }
    out << fmt::format("{:.16e}\n", fmt::join(row, ","));
  }
}

namespace {

ExperimentConfig section5_base(const std::string& objective, double alpha, double l, double m,
                               double n) {
  ExperimentConfig c;
  c.objective = objective;
  c.alpha = alpha;
  c.l = l;
  c.m = m;
  c.n = n;
  c.beta0 = 1.0;
  c.lambda0 = 1.0;
  c.t0 = 1.0;
  c.x0 = {10.0};
  c.u0 = {0.0};
  return c;
}

FigurePreset sweep(const std::string& id, const std::string& parameter, const std::string& objective,
                   double alpha, double l, double m, double n, const std::vector<double>& values) {
  FigurePreset p;
  p.id = id;
  p.parameter = parameter;
  for (double v : values) {
    ExperimentConfig c = section5_base(objective, alpha, l, m, n);
    if (parameter == "n") c.n = v;
    if (parameter == "l") c.l = v;
    if (parameter == "m") c.m = v;
    FigureMember member;
    member.value = v;
    member.label = fmt::format("{}={}", parameter, v);
    c.output = fmt::format("figure{}_{}.csv", id, member.label);
    member.config = c;
    p.members.push_back(std::move(member));
  }
  return p;
}

}  // namespace

std::optional<FigurePreset> figure_preset(const std::string& id) {
  if (id == "1") {
    FigurePreset p = sweep("1", "n", "l1", 9.0, 1.0, 0.0, 0.0, {0.0, 1.0, 2.0, 3.0, 4.0, 4.99});
    p.note = "Phi = |x|, alpha = 9, m = 0, l = 1; swept n chosen by this tool within n < alpha - 3";
    return p;
  }
  if (id == "2") {
    FigurePreset p = sweep("2", "l", "l1", 9.0, 0.0, 0.0, 5.0, {0.0, 0.5, 1.0});
    p.note = "Phi = |x|, alpha = 9, m = 0, n = 5; swept l chosen by this tool within 0 <= l <= 1";
    return p;
  }
  if (id == "3") {
    FigurePreset p =
        sweep("3", "m", "elastic_abs", 13.0, 1.0, 0.0, 9.0, {0.0, 2.0, 4.0, 4.99});
    p.note =
        "Phi = |x| + x^2/2, alpha = 13, n = 9, l = 1; swept m chosen by this tool within 2m < n + l";
    return p;
  }
  if (id == "4a") {
    FigurePreset p = sweep("4a", "m", "elastic_abs", 13.0, 1.0, 12.0, 9.0, {12.0});
    p.members.front().config.t_end = 4.0;
    p.expect_divergence = true;
    p.note =
        "Phi = |x| + x^2/2, alpha = 13, n = 9, l = 1, m = 12; b0 rule is negative and clamped to 1; "
        "t_end = 4 because the explicit integrator cost grows like t^11 here";
    return p;
  }
  if (id == "4b") {
    FigurePreset p = sweep("4b", "m", "elastic_abs", 2.0, 4.0, 6.0, 4.0, {6.0});
    p.expect_divergence = true;
    p.note = "Phi = |x| + x^2/2, alpha = 2, n = 4, l = 4, m = 6";
    return p;
  }
  return std::nullopt;
}

}  // namespace imdyn::tools
