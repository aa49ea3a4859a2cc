#include "imdyn/tools/commands.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "imdyn/analysis.hpp"
#include "imdyn/errors.hpp"
#include "imdyn/tools/experiment.hpp"

namespace imdyn::tools {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Overrides {
  std::string config;
  std::string out;
  std::optional<double> t_end;
  std::optional<int> samples;
  std::optional<double> rel_tol;
  std::optional<double> abs_tol;

  void apply(ExperimentConfig& c) const {
    if (t_end) c.t_end = *t_end;
    if (samples) c.sample_count = *samples;
    if (rel_tol) c.rel_tol = *rel_tol;
    if (abs_tol) c.abs_tol = *abs_tol;
  }
};

void add_common(CLI::App* cmd, Overrides& o, bool needs_config) {
  auto* opt = cmd->add_option("--config", o.config, "experiment config (JSON)");
  if (needs_config) opt->required();
  cmd->add_option("--t-end", o.t_end, "override t_end");
  cmd->add_option("--samples", o.samples, "override sample_count");
  cmd->add_option("--rel-tol", o.rel_tol, "override rel_tol");
  cmd->add_option("--abs-tol", o.abs_tol, "override abs_tol");
}

json report_json(const ConditionReport& r) {
  json j;
  j["setting"] = std::string(to_string(r.setting));
  j["overall"] = r.overall;
  j["epsilon_witness"] = r.epsilon_witness ? json(*r.epsilon_witness) : json(nullptr);
  j["growth_constant"] = r.growth_constant ? json(*r.growth_constant) : json(nullptr);
  for (const auto& [c, v] : r.per_condition) {
    j["conditions"][std::string(to_string(c))] = {{"pass", v.pass}, {"witness", v.witness}};
  }
  return j;
}

void print_report(std::ostream& out, const ConditionReport& r) {
  out << fmt::format("{:<9}{}\n", "setting", to_string(r.setting));
  for (const auto& [c, v] : r.per_condition) {
    out << fmt::format("{:<9}{:<6}{}\n", to_string(c), v.pass ? "pass" : "FAIL", v.witness);
  }
  if (r.epsilon_witness) out << fmt::format("{:<9}{:.6g}\n", "epsilon", *r.epsilon_witness);
  out << fmt::format("{:<9}{}\n", "overall", r.overall ? "pass" : "FAIL");
  out << "--- json\n" << report_json(r).dump(2) << "\n";
}

// Exponents the rates are expected to beat (big-O reading of the o(.) bounds).
double predicted_exponent(Quantity q, const PolynomialSchedule& s) {
  switch (q) {
    case Quantity::envelope_gap:
    case Quantity::prox_gap: return -(s.n + 2.0);
    case Quantity::grad_norm: return -(s.n / 2.0 + 1.0 + s.l / 2.0);
    case Quantity::prox_dist: return -(s.n / 2.0 + 1.0 - s.l / 2.0);
    case Quantity::velocity_norm: return -1.0;
    case Quantity::dist_to_minimizer: return 0.0;
  }
  return 0.0;
}

void print_rates(std::ostream& out, const Trajectory& traj, const PolynomialSchedule& s) {
  out << fmt::format("{:<19}{:>12}{:>12}{:>10}\n", "quantity", "fitted", "bound", "r^2");
  for (Quantity q : {Quantity::envelope_gap, Quantity::prox_gap, Quantity::grad_norm,
                     Quantity::prox_dist, Quantity::velocity_norm, Quantity::dist_to_minimizer}) {
    try {
      const RateFit fit = fit_rate(traj, q);
      out << fmt::format("{:<19}{:>12.4f}{:>12.4f}{:>10.4f}\n", to_string(q), fit.exponent,
                         predicted_exponent(q, s), fit.r_squared);
    } catch (const InvalidInput&) {
      out << fmt::format("{:<19}{:>12}{:>12.4f}{:>10}\n", to_string(q), "n/a",
                         predicted_exponent(q, s), "-");
    }
  }
}

void write_csv_file(const fs::path& path, const Trajectory& traj) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream file(path);
  if (!file) throw InvalidInput(fmt::format("out: cannot write {}", path.string()));
  write_csv(file, traj);
}

int simulate(const Overrides& o, std::ostream& out, bool rates_only) {
  ExperimentConfig exp = load_config(o.config);
  o.apply(exp);
  const SystemConfig cfg = to_system(exp);
  const IntegrationResult result = integrate(cfg);
  const Trajectory& traj = result.trajectory;
  if (!rates_only || !o.out.empty()) {
    const fs::path path = o.out.empty() ? fs::path(exp.output) : fs::path(o.out);
    write_csv_file(path, traj);
    out << fmt::format("wrote {} rows to {}\n", traj.size(), path.string());
  }
  out << fmt::format("status          {}\n", to_string(result.status));
  if (!result.ok()) out << fmt::format("message         {}\n", result.message);
  if (!traj.empty()) {
    out << fmt::format("final t         {:.6g}\n", traj.back().t);
    out << fmt::format("envelope_gap    {:.6e}\n", traj.back().envelope_gap);
    out << fmt::format("dist            {:.6e}\n", traj.back().dist_to_minimizer);
  }
  if (traj.size() >= 2) print_rates(out, traj, cfg.schedule);
  const ConditionReport report = check_conditions_polynomial(cfg.schedule);
  out << fmt::format("conditions      {}", report.overall ? "pass" : "FAIL");
  if (!report.overall) {
    for (Condition c : report.violated()) out << " " << to_string(c);
  }
  out << "\n";
  return result.ok() ? exit_ok : exit_divergence;
}

int check(const Overrides& o, std::ostream& out) {
  ExperimentConfig exp = load_config(o.config);
  o.apply(exp);
  const SystemConfig cfg = to_system(exp);
  const ConditionReport report = check_conditions_polynomial(cfg.schedule);
  print_report(out, report);
  return report.overall ? exit_ok : exit_conditions_fail;
}

int figure(const std::string& id, const Overrides& o, std::ostream& out, std::ostream& err) {
  const auto preset = figure_preset(id);
  if (!preset) {
    err << fmt::format("figure: unknown id '{}' (1, 2, 3, 4a, 4b)\n", id);
    return exit_invalid;
  }
  const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  fs::create_directories(dir);
  json manifest;
  manifest["figure"] = preset->id;
  manifest["parameter"] = preset->parameter;
  manifest["note"] = preset->note;
  manifest["subfigures"] = {{"a", "x_0 (trajectory)"}, {"b", "envelope_gap"}, {"c", "grad_norm"}};
  manifest["curves"] = json::array();
  int code = exit_ok;
  for (const FigureMember& member : preset->members) {
    ExperimentConfig exp = member.config;
    o.apply(exp);
    const SystemConfig cfg = to_system(exp);
    const IntegrationResult result = integrate(cfg);
    const fs::path csv = dir / exp.output;
    write_csv_file(csv, result.trajectory);
    const std::string config_name = fmt::format("figure{}_{}.json", preset->id, member.label);
    std::ofstream(dir / config_name) << to_json(exp).dump(2) << "\n";
    const auto& traj = result.trajectory;
    const bool grew = traj.size() >= 2 && traj.back().dist_to_minimizer > traj.front().dist_to_minimizer;
    const bool diverging = preset->expect_divergence || !result.ok() || grew;
    manifest["curves"].push_back({{"label", member.label},
                                  {"value", member.value},
                                  {"csv", exp.output},
                                  {"config", config_name},
                                  {"status", std::string(to_string(result.status))},
                                  {"diverging", diverging},
                                  {"t_end", traj.empty() ? 0.0 : traj.back().t},
                                  {"final_envelope_gap", traj.empty() ? 0.0 : traj.back().envelope_gap},
                                  {"final_dist", traj.empty() ? 0.0 : traj.back().dist_to_minimizer}});
    out << fmt::format("{:<12}{:<12}{} rows -> {}\n", member.label, to_string(result.status),
                       traj.size(), csv.string());
    if (!result.ok() && !preset->expect_divergence) code = exit_divergence;
  }
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << "\n";
  return code;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Inertial dynamics with Hessian damping and time scaling on a Moreau envelope"};
  app.require_subcommand(1);
  Overrides sim, chk, rat, fig;
  std::string figure_id;

  auto* cmd_sim = app.add_subcommand("simulate", "integrate one config, write CSV and a summary");
  add_common(cmd_sim, sim, true);
  cmd_sim->add_option("--out", sim.out, "CSV path (default: the config's output field)");

  auto* cmd_fig = app.add_subcommand("figure", "run a figure preset sweep");
  cmd_fig->add_option("id", figure_id, "1, 2, 3, 4a or 4b")->required();
  add_common(cmd_fig, fig, false);
  cmd_fig->add_option("--out", fig.out, "output directory (default: .)");

  auto* cmd_chk = app.add_subcommand("check", "report conditions (I)-(VII) for a config");
  add_common(cmd_chk, chk, true);
  cmd_chk->add_option("--out", chk.out, "ignored");

  auto* cmd_rat = app.add_subcommand("rates", "fit convergence exponents for a config");
  add_common(cmd_rat, rat, true);
  cmd_rat->add_option("--out", rat.out, "also write the CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return exit_invalid;
  }

  try {
    if (cmd_sim->parsed()) return simulate(sim, out, false);
    if (cmd_rat->parsed()) return simulate(rat, out, true);
    if (cmd_chk->parsed()) return check(chk, out);
    if (cmd_fig->parsed()) return figure(figure_id, fig, out, err);
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << "\n";
    return exit_invalid;
  } catch (const SearchFailure& e) {
    err << "prox search failed: " << e.what() << "\n";
    return exit_invalid;
  } catch (const fs::filesystem_error& e) {
    err << "file error: " << e.what() << "\n";
    return exit_invalid;
  }
  return exit_invalid;
}

}  // namespace imdyn::tools
