#include "runner.hpp"

#include <algorithm>
#include <optional>

#include <crossfit/bodies.hpp>
#include <crossfit/configuration.hpp>
#include <crossfit/oracle.hpp>
#include <crossfit/solver.hpp>
#include <crossfit/verify.hpp>
#include <crossfit/version.hpp>

#include "obj_export.hpp"

namespace crossfit::tools {

namespace {

using nlohmann::json;

SolveOptions solve_options_from(const json& options) {
  SolveOptions opts;
  if (options.contains("seeds")) {
    opts.seed_count = options.at("seeds").get<int>();
    if (opts.seed_count < 1) throw InputError("--seeds must be >= 1");
  }
  if (options.contains("seed")) opts.seed = options.at("seed").get<std::uint64_t>();
  if (options.contains("tol")) {
    opts.residual_tol = options.at("tol").get<double>();
    if (!(opts.residual_tol > 0.0)) throw InputError("--tol must be positive");
  }
  if (options.contains("rank_threshold")) {
    opts.rank_threshold = options.at("rank_threshold").get<double>();
    if (!(opts.rank_threshold > 0.0)) throw InputError("--rank-threshold must be positive");
  }
  return opts;
}

ResidualForm form_from(const json& options) {
  const std::string form = options.value("form", "levelset");
  if (form == "levelset") return ResidualForm::levelset;
  if (form == "chord") return ResidualForm::chord;
  throw InputError("--form must be levelset or chord");
}

json solution_to_json(const Solution& sol) {
  return json{{"config", config_to_json(sol.config)},
              {"residual_norm", sol.residual_norm},
              {"nullity", sol.nullity},
              {"iterations", sol.iterations},
              {"provenance", to_string(sol.provenance)}};
}

Solution solution_from_config_json(const ImplicitBody& body, const json& doc) {
  CrossConfig config = config_from_json(doc.contains("config") ? doc.at("config") : doc);
  const double norm = residual_levelset(body, config).values.norm();
  return Solution{std::move(config), norm, 0, 0, Provenance::direct};
}

json seed_stats_to_json(const MultistartResult& result) {
  json stats = json::array();
  for (std::size_t k = 0; k < result.seeds.size(); ++k) {
    const SeedStat& s = result.seeds[k];
    stats.push_back({{"seed", k},
                     {"status", to_string(s.status)},
                     {"iterations", s.iterations},
                     {"best_residual", s.best_residual}});
  }
  return stats;
}

RunResult run_solve(const ImplicitBody& body, const json& options) {
  const SolveOptions opts = solve_options_from(options);
  const ResidualForm form = form_from(options);
  const BaseFrame frame = BaseFrame::standard(body.dim());
  const MultistartResult result = multistart_solve(body, frame, form, opts);

  json report;
  report["guarantee"] = to_string(classify_guarantee(body.dim(), body));
  json solutions = json::array();
  for (const Solution& sol : result.solutions) solutions.push_back(solution_to_json(sol));
  report["solutions"] = std::move(solutions);
  report["converged_seeds"] = result.converged_count;
  report["seed_stats"] = seed_stats_to_json(result);
  return RunResult{std::move(report), "", false,
                   result.solutions.empty() ? kExitNoSolution : kExitOk};
}

RunResult run_continue(const ImplicitBody& start_body, const ImplicitBody& end_body,
                       const json& options) {
  const SolveOptions opts = solve_options_from(options);
  const HomotopyFamily family(start_body, end_body);
  const BaseFrame frame = BaseFrame::standard(start_body.dim());

  const MultistartResult seeded =
      multistart_solve(start_body, frame, ResidualForm::levelset, opts);
  json report;
  if (seeded.solutions.empty()) {
    report["status"] = "no_start_solution";
    report["samples"] = json::array();
    return RunResult{std::move(report), "", false, kExitNoSolution};
  }
  const Solution* best = &seeded.solutions.front();
  for (const Solution& sol : seeded.solutions)
    if (sol.residual_norm < best->residual_norm) best = &sol;

  const ContinuationTrace trace = continue_homotopy(family, *best, opts);
  report["status"] = to_string(trace.status);
  json samples = json::array();
  for (const auto& [t, sol] : trace.samples)
    samples.push_back({{"t", t}, {"solution", solution_to_json(sol)}});
  report["samples"] = std::move(samples);
  report["accepted_steps"] = trace.accepted_steps;
  report["rejected_steps"] = trace.rejected_steps;
  report["min_dt"] = trace.min_dt;
  report["max_dt"] = trace.max_dt;
  if (trace.status == ContinuationStatus::reached_end)
    report["final"] = solution_to_json(trace.samples.back().second);

  int code = kExitOk;
  if (trace.status == ContinuationStatus::degenerate) code = kExitDegenerate;
  if (trace.status == ContinuationStatus::stuck) code = kExitNoSolution;
  return RunResult{std::move(report), "", false, code};
}

RunResult run_sweep(const ImplicitBody& body, const json& options) {
  const SolveOptions opts = solve_options_from(options);
  const int steps = options.value("steps", 50);
  const double step_size = options.value("step_size", 0.05);
  if (steps < 1) throw InputError("--steps must be >= 1");
  if (!(step_size > 0.0)) throw InputError("--step-size must be positive");

  std::optional<Solution> start;
  if (options.contains("start_config") && !options.at("start_config").is_null()) {
    start = solution_from_config_json(body, options.at("start_config"));
    if (!(start->residual_norm < 10.0 * opts.residual_tol))
      throw PreconditionError("sweep: provided start is not a solution of the body");
  } else {
    const BaseFrame frame = BaseFrame::standard(body.dim());
    MultistartResult seeded = multistart_solve(body, frame, ResidualForm::levelset, opts);
    if (seeded.solutions.empty()) {
      json report;
      report["solutions"] = json::array();
      report["truncated"] = false;
      return RunResult{std::move(report), "", false, kExitNoSolution};
    }
    start = seeded.solutions.front();
  }

  const SweepResult swept = sweep_family(body, *start, steps, step_size, opts);
  json report;
  report["start"] = solution_to_json(*start);
  json solutions = json::array();
  for (const Solution& sol : swept.solutions) solutions.push_back(solution_to_json(sol));
  report["solutions"] = std::move(solutions);
  report["truncated"] = swept.truncated;
  return RunResult{std::move(report), "", false,
                   swept.solutions.empty() ? kExitNoSolution : kExitOk};
}

RunResult run_oracle(const ImplicitBody& body, const json& options) {
  GridSpec spec;
  if (options.contains("grid_euler")) spec.euler_resolution = options.at("grid_euler").get<int>();
  if (options.contains("grid_center"))
    spec.center_resolution = options.at("grid_center").get<int>();
  if (options.contains("grid_scale")) spec.scale_resolution = options.at("grid_scale").get<int>();
  const SolveOptions opts = solve_options_from(options);
  const BaseFrame frame = BaseFrame::standard(body.dim());

  const std::vector<CrossConfig> candidates = brute_force_search(body, frame, spec);
  const RefineResult refined = refine_candidates(body, candidates, opts);

  json report;
  json cand = json::array();
  for (const CrossConfig& c : candidates) cand.push_back(config_to_json(c));
  report["candidates"] = std::move(cand);
  json solutions = json::array();
  for (const Solution& sol : refined.solutions) solutions.push_back(solution_to_json(sol));
  report["solutions"] = std::move(solutions);
  report["attempted"] = refined.attempted;
  report["dropped"] = refined.dropped;
  return RunResult{std::move(report), "", false,
                   refined.solutions.empty() ? kExitNoSolution : kExitOk};
}

RunResult run_verify(const ImplicitBody& body, const json& options) {
  if (!options.contains("solution")) throw InputError("verify: missing solution document");
  const Solution sol = solution_from_config_json(body, options.at("solution"));
  const double tol = options.value("tol", 1e-9);
  if (!(tol > 0.0)) throw InputError("--tol must be positive");
  const VerificationReport rep = check_solution(body, sol, tol);

  json report;
  report["report"] = {{"max_surface_defect", rep.max_surface_defect},
                      {"frame_orthonormality_defect", rep.frame_orthonormality_defect},
                      {"frame_regular", rep.frame_regular},
                      {"rotation_defect", rep.rotation_defect},
                      {"nullity", rep.nullity},
                      {"expected_nullity", rep.expected_nullity},
                      {"guarantee", to_string(rep.guarantee)},
                      {"passed", rep.passed}};
  return RunResult{std::move(report), "", false, rep.passed ? kExitOk : kExitNoSolution};
}

RunResult run_export(const ImplicitBody& body, const json& options) {
  if (!options.contains("solution")) throw InputError("export: missing solution document");
  const json& sol_doc = options.at("solution");
  CrossConfig config =
      config_from_json(sol_doc.contains("config") ? sol_doc.at("config") : sol_doc);
  if (body.dim() != config.dim()) throw InputError("export: body and solution dimensions differ");
  const std::string format = options.value("format", "json");

  if (format == "obj") {
    if (body.dim() != 3) throw InputError("export: OBJ format requires dimension 3");
    RunResult result;
    result.raw = export_obj(body, config);
    result.is_raw = true;
    return result;
  }
  if (format != "json") throw InputError("--format must be json or obj");

  json report;
  report["config"] = config_to_json(config);
  json verts = json::array();
  json residuals = json::array();
  for (const Vec& v : vertices(config)) {
    verts.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    residuals.push_back(body.evaluate(v));
  }
  report["vertices"] = std::move(verts);
  report["residuals"] = std::move(residuals);
  return RunResult{std::move(report), "", false, kExitOk};
}

}  // namespace

RunResult run_command(const std::string& command, const std::vector<json>& bodies,
                      const json& options) {
  std::vector<ImplicitBody> parsed;
  parsed.reserve(bodies.size());
  for (const json& doc : bodies) parsed.push_back(parse_body(doc));

  if (command == "solve") {
    if (parsed.size() != 1) throw InputError("solve: expected exactly one body");
    return run_solve(parsed[0], options);
  }
  if (command == "continue") {
    if (parsed.size() != 2) throw InputError("continue: expected start and end bodies");
    return run_continue(parsed[0], parsed[1], options);
  }
  if (command == "sweep") {
    if (parsed.size() != 1) throw InputError("sweep: expected exactly one body");
    return run_sweep(parsed[0], options);
  }
  if (command == "oracle") {
    if (parsed.size() != 1) throw InputError("oracle: expected exactly one body");
    return run_oracle(parsed[0], options);
  }
  if (command == "verify") {
    if (parsed.size() != 1) throw InputError("verify: expected exactly one body");
    return run_verify(parsed[0], options);
  }
  if (command == "export") {
    if (parsed.size() != 1) throw InputError("export: expected exactly one body");
    return run_export(parsed[0], options);
  }
  throw InputError("unknown command '" + command + "'");
}

json attach_manifest(const json& report, const std::string& command,
                     const std::vector<json>& bodies, const json& options,
                     double wall_time_ms) {
  json manifest;
  manifest["command"] = command;
  manifest["bodies"] = bodies;
  manifest["options"] = options;
  manifest["seed"] = options.value("seed", std::uint64_t{0});
  manifest["tool_version"] = kVersion;
  manifest["wall_time_ms"] = wall_time_ms;

  json out;
  out["manifest"] = std::move(manifest);
  for (auto it = report.begin(); it != report.end(); ++it) out[it.key()] = it.value();
  return out;
}

}  // namespace crossfit::tools
