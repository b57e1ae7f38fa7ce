#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "softqos/catalog.hpp"
#include "softqos/error.hpp"
#include "softqos/metrics.hpp"
#include "softqos/scenario.hpp"
#include "softqos/simulator.hpp"

namespace softqos::cli {

namespace fs = std::filesystem;

namespace {

/// A usage problem detected after parsing (bad value, missing file).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScenarioOptions {
  std::string scenario_path;
  std::string output_dir = "softqos-out";
  std::optional<std::string> policy;
  std::optional<double> capacity;
  std::optional<std::size_t> requests;
  std::optional<std::uint64_t> seed;
};

struct SweepOptions {
  std::string points;
  std::string axis = "new";
};

struct CatalogOptions {
  std::string catalog_path;
  std::string service;
  std::string layer;
  std::string key;
};

std::string_view flag_name(Policy policy) {
  switch (policy) {
    case Policy::SoftStrict:
      return "soft-strict";
    case Policy::SoftElastic:
      return "soft-elastic";
    case Policy::Hard:
      return "hard";
  }
  return "?";
}

Policy policy_from_flag(std::string_view text) {
  for (auto p : {Policy::Hard, Policy::SoftStrict, Policy::SoftElastic}) {
    if (text == flag_name(p)) {
      return p;
    }
  }
  throw ValidationError(
      fmt::format("--policy: unknown policy '{}' (expected hard, soft-strict or soft-elastic)", text));
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(text.substr(0, comma));
    if (comma == std::string_view::npos) {
      return out;
    }
    text.remove_prefix(comma + 1);
  }
}

/// A file path, or the name of a shipped scenario such as "table2_default".
Scenario resolve_scenario(const std::string& path) {
  if (fs::is_regular_file(path)) {
    return load_scenario_file(path);
  }
  auto name = fs::path(path).filename();
  if (name.extension() == ".json") {
    name.replace_extension();
  }
  if (auto builtin = builtin_scenario(name.string()); builtin && !fs::exists(path)) {
    return *builtin;
  }
  throw UsageError(fmt::format("scenario file not found: {}", path));
}

Scenario prepared_scenario(const ScenarioOptions& opts) {
  Scenario scenario = resolve_scenario(opts.scenario_path);
  if (opts.policy) {
    scenario.policy = policy_from_flag(*opts.policy);
  }
  if (opts.capacity) {
    scenario.capacity = *opts.capacity;
  }
  if (opts.requests) {
    scenario.workload.total_requests = *opts.requests;
  }
  if (opts.seed) {
    scenario.seed = *opts.seed;
  }
  ensure_valid(scenario);
  return scenario;
}

Catalog resolve_catalog(const std::string& path) {
  if (path.empty()) {
    return default_catalog();
  }
  if (!fs::is_regular_file(path)) {
    throw UsageError(fmt::format("catalog file not found: {}", path));
  }
  return load_catalog_file(path);
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
  }
}

int cmd_run(const ScenarioOptions& opts, std::ostream& out) {
  const Scenario scenario = prepared_scenario(opts);
  const EventLog log = run(scenario);
  const RateSummary summary = summarize(log);
  const auto curves = prefix_curves(log);

  const fs::path dir = opts.output_dir;
  ensure_directory(dir);
  write_event_log(log, dir / "events.csv");
  write_report(summary, curves, dir, scenario.label);
  {
    std::ofstream file(dir / "scenario.json", std::ios::binary | std::ios::trunc);
    file << scenario_to_json(scenario);
    if (!file) {
      throw IoError(fmt::format("failed writing '{}'", (dir / "scenario.json").string()));
    }
  }

  fmt::print(out, "policy:            {}\n", flag_name(scenario.policy));
  out << format_summary(summary, scenario.label);
  return kExitOk;
}

int cmd_sweep(const ScenarioOptions& opts, const SweepOptions& sweep_opts,
              const std::vector<std::string>& policy_list, std::ostream& out) {
  ScenarioOptions base = opts;
  base.policy.reset();
  Scenario scenario = prepared_scenario(base);

  std::vector<std::size_t> points;
  if (sweep_opts.points.empty()) {
    throw ValidationError("--points: at least one point is required");
  }
  for (auto item : split_list(sweep_opts.points)) {
    if (item.empty() || item.size() > 18 ||
        item.find_first_not_of("0123456789") != std::string_view::npos) {
      throw ValidationError(fmt::format("--points: '{}' is not a count", item));
    }
    points.push_back(std::stoull(std::string(item)));
  }
  const SweepAxis axis = parse_sweep_axis(sweep_opts.axis);

  std::vector<Policy> policies;
  for (const auto& p : policy_list) {
    for (auto item : split_list(p)) {
      policies.push_back(policy_from_flag(item));
    }
  }
  if (policies.empty()) {
    policies = {Policy::SoftStrict, Policy::Hard};
  }

  const std::string_view kind = axis == SweepAxis::RequestedNewCalls ? "new" : "handoff";
  std::string csv = "policy,n,kind,rate\n";
  for (auto policy : policies) {
    scenario.policy = policy;
    for (const auto& point : sweep(scenario, axis, points)) {
      const auto row = fmt::format("{},{},{},{}", flag_name(policy), point.n, kind, point.rate);
      csv += row;
      csv += '\n';
      out << row << '\n';
    }
  }

  const fs::path dir = opts.output_dir;
  ensure_directory(dir);
  std::ofstream file(dir / "curves.csv", std::ios::binary | std::ios::trunc);
  file << csv;
  if (!file) {
    throw IoError(fmt::format("failed writing '{}'", (dir / "curves.csv").string()));
  }
  return kExitOk;
}

void print_parameters(std::ostream& out, const std::vector<const QosParameter*>& params,
                      bool with_id) {
  for (const auto* p : params) {
    if (with_id) {
      fmt::print(out, "{}\t{}\n", p->display_name, p->id);
    } else {
      fmt::print(out, "{}\n", p->display_name);
    }
  }
}

int cmd_catalog(const std::string& query, const CatalogOptions& opts, std::ostream& out) {
  const Catalog catalog = resolve_catalog(opts.catalog_path);
  if (query == "list") {
    const auto service = parse_service(opts.service);
    const auto layer = parse_layer(opts.layer);
    print_parameters(out, parameters_by_priority(catalog, service, layer), false);
    return kExitOk;
  }
  try {
    catalog.resolve(opts.key);
  } catch (const NotFoundError& e) {
    const auto near = catalog.suggestions(opts.key);
    if (near.empty() || !std::string_view(e.what()).starts_with("unknown")) {
      throw UsageError(e.what());
    }
    throw UsageError(fmt::format("{}; did you mean: {}?", e.what(), fmt::join(near, ", ")));
  }
  if (query == "influencers") {
    print_parameters(out, influencers_of(catalog, opts.key), true);
  } else {
    print_parameters(out, dependents_of(catalog, opts.key), true);
  }
  return kExitOk;
}

int cmd_validate(const std::string& scenario_path, const std::string& catalog_path,
                 std::ostream& out, std::ostream& err) {
  std::vector<std::string> problems;
  std::string label;
  try {
    const Scenario scenario = resolve_scenario(scenario_path);
    label = scenario.label;
    for (auto& p : validate_scenario(scenario)) {
      problems.push_back(fmt::format("scenario: {}", p));
    }
  } catch (const ValidationError& e) {
    for (const auto& p : e.diagnostics()) {
      problems.push_back(fmt::format("scenario: {}", p));
    }
  }
  try {
    resolve_catalog(catalog_path);
  } catch (const ValidationError& e) {
    for (const auto& p : e.diagnostics()) {
      problems.push_back(fmt::format("catalog: {}", p));
    }
  }
  if (!problems.empty()) {
    for (const auto& p : problems) {
      fmt::print(err, "error: {}\n", p);
    }
    return kExitUsage;
  }
  fmt::print(out, "ok: scenario '{}' and catalog are valid\n", label);
  return kExitOk;
}

void add_scenario_options(CLI::App* cmd, ScenarioOptions& opts, bool single_policy) {
  cmd->add_option("--scenario", opts.scenario_path,
                  "Scenario file, or the name of a shipped scenario (table2_default, "
                  "table2_handoff_mix)")
      ->required();
  cmd->add_option("--output", opts.output_dir, "Output directory")->capture_default_str();
  if (single_policy) {
    cmd->add_option("--policy", opts.policy, "hard, soft-strict or soft-elastic");
  }
  cmd->add_option("--capacity", opts.capacity, "Override cell capacity (kbps)");
  cmd->add_option("--requests", opts.requests, "Override the number of requests");
  cmd->add_option("--seed", opts.seed, "Override the random seed");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Soft-QoS call admission control simulator and QoS parameter catalog", "softqos"};
  app.require_subcommand(1);

  ScenarioOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "Run one scenario and write its event log and report");
  add_scenario_options(run_cmd, run_opts, true);

  ScenarioOptions sweep_scenario;
  SweepOptions sweep_opts;
  std::vector<std::string> sweep_policies;
  auto* sweep_cmd =
      app.add_subcommand("sweep", "Blocked or dropped call rate against requested call count");
  add_scenario_options(sweep_cmd, sweep_scenario, false);
  sweep_cmd->add_option("--policy", sweep_policies,
                        "Policies to compare, comma separated (default soft-strict,hard)");
  sweep_cmd->add_option("--points", sweep_opts.points, "Ascending request counts, e.g. 8,16,24")
      ->required();
  sweep_cmd->add_option("--axis", sweep_opts.axis, "new (blocked rate) or handoff (dropped rate)")
      ->capture_default_str();

  CatalogOptions catalog_opts;
  auto* catalog_cmd = app.add_subcommand("catalog", "Query the QoS parameter catalog");
  catalog_cmd->require_subcommand(1);
  catalog_cmd->add_option("--catalog", catalog_opts.catalog_path,
                          "Catalog file (default: the shipped catalog)");
  auto* list_cmd = catalog_cmd->add_subcommand("list", "Parameters of one list in priority order");
  list_cmd->add_option("--service", catalog_opts.service, "voice, video or data")->required();
  list_cmd->add_option("--layer", catalog_opts.layer, "application, network or physical")
      ->required();
  auto* influencers_cmd =
      catalog_cmd->add_subcommand("influencers", "Parameters that influence the given one");
  influencers_cmd->add_option("parameter", catalog_opts.key, "Parameter id or name")->required();
  auto* dependents_cmd =
      catalog_cmd->add_subcommand("dependents", "Parameters influenced by the given one");
  dependents_cmd->add_option("parameter", catalog_opts.key, "Parameter id or name")->required();

  std::string validate_scenario_path;
  std::string validate_catalog_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check scenario and catalog files");
  validate_cmd->add_option("--scenario", validate_scenario_path, "Scenario file or shipped name")
      ->required();
  validate_cmd->add_option("--catalog", validate_catalog_path, "Catalog file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kExitUsage;
  }

  try {
    if (run_cmd->parsed()) {
      return cmd_run(run_opts, out);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(sweep_scenario, sweep_opts, sweep_policies, out);
    }
    if (catalog_cmd->parsed()) {
      const std::string query = list_cmd->parsed()          ? "list"
                                : influencers_cmd->parsed() ? "influencers"
                                                            : "dependents";
      return cmd_catalog(query, catalog_opts, out);
    }
    return cmd_validate(validate_scenario_path, validate_catalog_path, out, err);
  } catch (const ValidationError& e) {
    for (const auto& d : e.diagnostics()) {
      fmt::print(err, "error: {}\n", d);
    }
    return kExitUsage;
  } catch (const UsageError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const IoError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitRuntime;
  }
}

}  // namespace softqos::cli
