// greyahp command-line front end.
//
//   greyahp forecast    --series FILE [--model verhulst|logistic] [--eps E] [--horizon H]
//   greyahp allocate    --matrix FILE --indicators FILE [--direction C=cost ...] [--method ahp|factor]
//   greyahp sensitivity (--series FILE | --matrix FILE --indicators FILE) <one perturbation flag>
//   greyahp simulate    --config FILE
//   greyahp serve       [--port P] [--static-dir DIR]
//
// Exit codes: 0 success, 1 domain error, 2 usage error. Errors are also
// printed to stdout as {"error": {...}}.

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "greyahp/api.hpp"
#include "greyahp/error.hpp"
#include "greyahp/io.hpp"
#include "greyahp/service.hpp"

namespace fs = std::filesystem;
using greyahp::Error;
using greyahp::ErrorCode;
using greyahp::api::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int report_usage(const std::string& msg) {
  std::cerr << "usage error: " << msg << "\n";
  std::cout << json{{"error", {{"code", "UsageError"}, {"message", msg}}}}.dump(2) << "\n";
  return 2;
}

fs::path existing(const std::string& path, const char* flag) {
  if (path.empty()) throw UsageError(std::string(flag) + " is required");
  if (!fs::exists(path)) throw UsageError(std::string(flag) + ": no such file '" + path + "'");
  return path;
}

std::pair<std::string, std::string> split_assignment(const std::string& text, const char* flag) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw UsageError(std::string(flag) + " expects KEY=VALUE, got '" + text + "'");
  return {greyahp::io::trim(text.substr(0, eq)), greyahp::io::trim(text.substr(eq + 1))};
}

double number_arg(const std::string& text, const char* flag) {
  const auto v = greyahp::io::parse_double(text);
  if (!v) throw UsageError(std::string(flag) + ": '" + text + "' is not a number");
  return *v;
}

std::size_t index_arg(const std::string& text, const char* flag) {
  const double v = number_arg(text, flag);
  if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) {
    throw UsageError(std::string(flag) + ": '" + text + "' is not a positive integer index");
  }
  return static_cast<std::size_t>(v);
}

// ---------------------------------------------------------------------------
// table rendering of the JSON payloads

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

void print_ranking(std::ostream& os, const json& ranking) {
  os << std::left << std::setw(6) << "rank" << std::setw(20) << "entity" << std::setw(16) << "index"
     << "ratio\n";
  for (const auto& r : ranking) {
    os << std::left << std::setw(6) << r["rank"].get<int>() << std::setw(20) << r["entity"].get<std::string>()
       << std::setw(16) << fmt(r["index"].get<double>(), 9) << fmt(r["ratio"].get<double>(), 9) << "\n";
  }
}

void print_weights(std::ostream& os, const json& w) {
  os << "criterion weights\n";
  for (std::size_t i = 0; i < w["labels"].size(); ++i) {
    os << "  " << std::left << std::setw(24) << w["labels"][i].get<std::string>()
       << fmt(w["values"][i].get<double>(), 4) << "\n";
  }
  os << "lambda_max " << fmt(w["lambda_max"].get<double>()) << "  CI " << fmt(w["ci"].get<double>(), 4)
     << "  RI " << fmt(w["ri"].get<double>(), 3) << "  CR " << fmt(w["cr"].get<double>(), 4) << "  "
     << (w["consistent"].get<bool>() ? "consistent" : "NOT consistent") << "\n";
}

void print_summary_rows(std::ostream& os, const json& rep) {
  os << std::left << std::setw(32) << "output" << std::setw(18) << "baseline" << std::setw(18) << "perturbed"
     << "delta\n";
  for (const auto& [key, d] : rep["deltas"].items()) {
    os << std::left << std::setw(32) << key << std::setw(18) << fmt(rep["baseline"][key].get<double>(), 8)
       << std::setw(18) << fmt(rep["perturbed"][key].get<double>(), 8) << fmt(d.get<double>(), 4) << "\n";
  }
}

void print_table(std::ostream& os, const json& p) {
  const std::string cmd = p.value("command", "");
  if (cmd == "forecast") {
    os << "model " << p["model"].get<std::string>() << " on " << p["n"].get<int>() << " points\n";
    for (const auto& [k, v] : p["params"].items()) os << "  " << k << " = " << fmt(v.get<double>(), 10) << "\n";
    if (p.contains("accuracy")) {
      const auto& a = p["accuracy"];
      os << "Q " << fmt(a["q"].get<double>(), 4) << "  C " << fmt(a["c"].get<double>(), 4) << "  p "
         << fmt(a["p"].get<double>(), 4) << "  grade " << a["grade"].get<std::string>() << "\n";
      if (p["saturation"].is_null()) {
        os << "no saturation: " << p.value("saturation_note", "") << "\n";
      } else {
        os << "saturates at k=" << p["saturation"]["time"].get<long long>() << " value "
           << fmt(p["saturation"]["value"].get<double>(), 10) << "\n";
      }
    }
    if (p.contains("fit_quality")) {
      os << "R^2 " << fmt(p["fit_quality"]["r2"].get<double>(), 6) << "  converged "
         << (p["fit_quality"]["converged"].get<bool>() ? "yes" : "no") << "\n";
    }
    os << std::left << std::setw(6) << "k" << std::setw(14) << "period" << "fitted\n";
    const auto& fitted = p["fitted"];
    for (std::size_t i = 0; i < fitted.size(); ++i) {
      const std::string label = p.contains("periods") ? p["periods"][i].get<std::string>() : "";
      os << std::left << std::setw(6) << i + 1 << std::setw(14) << label << fmt(fitted[i].get<double>(), 10) << "\n";
    }
    for (std::size_t i = 0; i < p["forecast"].size(); ++i) {
      os << std::left << std::setw(6) << fitted.size() + i + 1 << std::setw(14) << "(forecast)"
         << fmt(p["forecast"][i].get<double>(), 10) << "\n";
    }
  } else if (cmd == "allocate") {
    if (p.contains("weights")) print_weights(os, p["weights"]);
    print_ranking(os, p["ranking"]);
    for (const auto& w : p["warnings"]) os << "warning: " << w.get<std::string>() << "\n";
  } else if (cmd == "sensitivity") {
    os << "perturbation " << p["spec"].dump() << "\n";
    print_summary_rows(os, p);
    if (!p["rank_shifts"].empty()) {
      os << "rank shifts\n";
      for (const auto& r : p["rank_shifts"]) {
        const int o = r["old_rank"].get<int>(), n = r["new_rank"].get<int>();
        os << "  " << std::left << std::setw(20) << r["entity"].get<std::string>() << o << " -> " << n
           << (n < o ? "  up" : n > o ? "  down" : "") << "\n";
      }
    }
    for (const auto& note : p["notes"]) os << "note: " << note.get<std::string>() << "\n";
  } else if (cmd == "simulate") {
    print_weights(os, p["weights"]);
    os << std::left << std::setw(8) << "period";
    for (const auto& e : p["entities"]) os << std::setw(14) << e.get<std::string>();
    os << "\n";
    for (const auto& period : p["periods"]) {
      os << std::left << std::setw(8) << period["period"].get<int>();
      for (const auto& share : period["proportions"]) os << std::setw(14) << fmt(share.get<double>(), 6);
      os << "\n";
    }
  } else {
    os << p.dump(2) << "\n";
  }
}

// ---------------------------------------------------------------------------
// shared input assembly

struct AllocationInputs {
  std::string matrix;
  std::string indicators;
  std::vector<std::string> directions;
  std::vector<std::string> max_share;
  bool prenormalized = false;
};

greyahp::api::AllocateRequest allocation_request(const AllocationInputs& in,
                                                 const greyahp::io::ProjectConfig& cfg, bool need_matrix,
                                                 std::vector<std::string>* repairs) {
  greyahp::api::AllocateRequest req;
  const std::string matrix_path = !in.matrix.empty() ? in.matrix : cfg.matrix.string();
  const std::string indicators_path = !in.indicators.empty() ? in.indicators : cfg.indicators.string();
  const fs::path ind = existing(indicators_path, "--indicators");

  greyahp::io::DirectionMap directions = cfg.directions;
  for (const auto& d : in.directions) {
    auto [name, value] = split_assignment(d, "--direction");
    directions[name] = greyahp::parse_direction(value);
  }
  // Criteria without an explicit direction default to benefit.
  for (const auto& c : greyahp::io::peek_criteria(ind)) directions.try_emplace(c, greyahp::Direction::Benefit);
  req.indicators = greyahp::io::load_indicators(ind, directions);
  req.normalized = in.prenormalized || cfg.indicators_normalized;

  if (need_matrix || !matrix_path.empty()) {
    req.matrix = greyahp::io::load_matrix(existing(matrix_path, "--matrix"), repairs);
    req.has_matrix = true;
  }
  req.max_share = cfg.max_share;
  for (const auto& m : in.max_share) {
    auto [name, value] = split_assignment(m, "--max-share");
    req.max_share[name] = number_arg(value, "--max-share");
  }
  req.tol = cfg.ahp_tol;
  req.max_iter = cfg.ahp_max_iter;
  return req;
}

greyahp::io::ProjectConfig maybe_config(const std::string& path) {
  if (path.empty()) return {};
  return greyahp::io::load_project(existing(path, "--config"));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grey Verhulst forecasting and AHP allocation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(greyahp::api::kVersion));
  std::string format = "json";
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "table"}));

  // forecast
  auto* forecast = app.add_subcommand("forecast", "fit a saturation model to a series");
  std::string f_series, f_model, f_config;
  std::optional<double> f_eps;
  std::optional<int> f_horizon;
  forecast->add_option("--series", f_series, "series CSV (period,value)");
  forecast->add_option("--model", f_model, "verhulst or logistic")->check(CLI::IsMember({"verhulst", "logistic"}));
  forecast->add_option("--eps", f_eps, "relative change threshold for the saturation time");
  forecast->add_option("--horizon", f_horizon, "periods to forecast beyond the data");
  forecast->add_option("--config", f_config, "project config file");

  // allocate
  auto* allocate = app.add_subcommand("allocate", "score and share entities");
  AllocationInputs a_in;
  std::string a_method, a_betas, a_config;
  allocate->add_option("--matrix", a_in.matrix, "pairwise matrix CSV");
  allocate->add_option("--indicators", a_in.indicators, "indicator table CSV");
  allocate->add_option("--direction", a_in.directions, "CRITERION=benefit|cost (repeatable)");
  allocate->add_option("--max-share", a_in.max_share, "ENTITY=cap (repeatable)");
  allocate->add_flag("--prenormalized", a_in.prenormalized, "indicator values are already in [0,1]");
  allocate->add_option("--method", a_method, "ahp or factor")->check(CLI::IsMember({"ahp", "factor"}));
  allocate->add_option("--betas", a_betas, "factor betas, intercept first, comma separated");
  allocate->add_option("--config", a_config, "project config file");

  // sensitivity
  auto* sensitivity = app.add_subcommand("sensitivity", "one-at-a-time perturbation study");
  AllocationInputs s_in;
  std::string s_series, s_config, s_remove, s_set, s_scale_matrix, s_scale_indicator;
  std::optional<double> s_eps;
  sensitivity->add_option("--series", s_series, "series CSV (forecast subject)");
  sensitivity->add_option("--matrix", s_in.matrix, "pairwise matrix CSV (allocation subject)");
  sensitivity->add_option("--indicators", s_in.indicators, "indicator table CSV (allocation subject)");
  sensitivity->add_option("--direction", s_in.directions, "CRITERION=benefit|cost (repeatable)");
  sensitivity->add_flag("--prenormalized", s_in.prenormalized, "indicator values are already in [0,1]");
  sensitivity->add_option("--eps", s_eps, "saturation threshold");
  sensitivity->add_option("--remove-point", s_remove, "K: drop period K (1-based)");
  sensitivity->add_option("--set-point", s_set, "K=VALUE: overwrite period K");
  sensitivity->add_option("--scale-matrix-entry", s_scale_matrix, "I,J=FACTOR: scale judgment (I,J)");
  sensitivity->add_option("--scale-indicator", s_scale_indicator, "ENTITY,CRITERION=FACTOR");
  sensitivity->add_option("--config", s_config, "project config file");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run the inflow feedback loop");
  std::string m_config, m_inflows;
  simulate->add_option("--config", m_config, "project config file")->required();
  simulate->add_option("--inflows", m_inflows, "comma separated inflows, overrides simulate.inflows");

  // serve
  auto* serve = app.add_subcommand("serve", "run the JSON HTTP service");
  int port = 8080;
  if (const char* env = std::getenv("GREYAHP_PORT")) port = std::atoi(env);
  std::string host = "127.0.0.1";
  std::string static_dir = "web";
  serve->add_option("--port", port, "listen port (default $GREYAHP_PORT or 8080)");
  serve->add_option("--host", host, "bind address");
  serve->add_option("--static-dir", static_dir, "directory of UI assets served at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_usage(e.what());
  }

  std::vector<std::string> warnings;
  try {
    json payload;
    if (*forecast) {
      const auto cfg = maybe_config(f_config);
      greyahp::api::ForecastRequest req;
      req.series = greyahp::io::load_series(existing(!f_series.empty() ? f_series : cfg.series.string(), "--series"));
      req.model = !f_model.empty() ? f_model : cfg.forecast_model;
      req.eps = f_eps.value_or(cfg.forecast_eps);
      req.horizon = f_horizon.value_or(cfg.forecast_horizon);
      if (req.horizon < 0) throw UsageError("--horizon must be nonnegative");
      payload = greyahp::api::run_forecast(req);
    } else if (*allocate) {
      const auto cfg = maybe_config(a_config);
      const std::string method = !a_method.empty() ? a_method : cfg.allocate_method;
      auto req = allocation_request(a_in, cfg, method == "ahp", &warnings);
      req.method = method;
      req.betas = cfg.betas;
      if (!a_betas.empty()) req.betas = greyahp::io::parse_number_list(a_betas, "--betas");
      if (method == "factor" && req.betas.empty()) throw UsageError("--method factor requires --betas");
      payload = greyahp::api::run_allocate(req);
    } else if (*sensitivity) {
      const auto cfg = maybe_config(s_config);
      const int given = !s_remove.empty() + !s_set.empty() + !s_scale_matrix.empty() + !s_scale_indicator.empty();
      if (given != 1) throw UsageError("give exactly one perturbation flag");
      greyahp::api::SensitivityRequest req;
      auto& spec = req.spec;
      if (!s_remove.empty()) {
        spec.kind = greyahp::PerturbationKind::RemovePoint;
        spec.index = index_arg(s_remove, "--remove-point");
      } else if (!s_set.empty()) {
        auto [k, v] = split_assignment(s_set, "--set-point");
        spec.kind = greyahp::PerturbationKind::SetPoint;
        spec.index = index_arg(k, "--set-point");
        spec.value = number_arg(v, "--set-point");
      } else if (!s_scale_matrix.empty()) {
        auto [cell, f] = split_assignment(s_scale_matrix, "--scale-matrix-entry");
        const auto parts = greyahp::io::split(cell);
        if (parts.size() != 2) throw UsageError("--scale-matrix-entry expects I,J=FACTOR");
        spec.kind = greyahp::PerturbationKind::ScaleMatrixEntry;
        spec.row = index_arg(parts[0], "--scale-matrix-entry");
        spec.col = index_arg(parts[1], "--scale-matrix-entry");
        spec.value = number_arg(f, "--scale-matrix-entry");
      } else {
        auto [target, f] = split_assignment(s_scale_indicator, "--scale-indicator");
        const auto parts = greyahp::io::split(target);
        if (parts.size() != 2) throw UsageError("--scale-indicator expects ENTITY,CRITERION=FACTOR");
        spec.kind = greyahp::PerturbationKind::ScaleIndicator;
        spec.entity = parts[0];
        spec.criterion = parts[1];
        spec.value = number_arg(f, "--scale-indicator");
      }
      const bool series_kind = spec.kind == greyahp::PerturbationKind::RemovePoint ||
                               spec.kind == greyahp::PerturbationKind::SetPoint;
      if (series_kind) {
        req.subject = "forecast";
        req.forecast.series =
            greyahp::io::load_series(existing(!s_series.empty() ? s_series : cfg.series.string(), "--series"));
        req.forecast.eps = s_eps.value_or(cfg.forecast_eps);
      } else {
        req.subject = "allocation";
        req.allocation = allocation_request(s_in, cfg, true, &warnings);
      }
      payload = greyahp::api::run_sensitivity(req);
    } else if (*simulate) {
      const auto cfg = greyahp::io::load_project(existing(m_config, "--config"));
      greyahp::api::SimulateRequest req;
      auto alloc = allocation_request({}, cfg, true, &warnings);
      req.matrix = alloc.matrix;
      req.indicators = alloc.indicators;
      auto effective = cfg;
      if (!m_inflows.empty()) effective.inflows = greyahp::io::parse_number_list(m_inflows, "--inflows");
      if (effective.inflows.empty()) throw UsageError("simulate needs simulate.inflows or --inflows");
      req.inflows = effective.inflows;
      req.feedback = greyahp::io::feedback_config(effective, req.indicators);
      payload = greyahp::api::run_simulate(req);
    } else if (*serve) {
      auto server = greyahp::service::make_server(static_dir);
      std::cerr << "greyahp " << greyahp::api::kVersion << " listening on http://" << host << ":" << port << "\n";
      if (!server->listen(host, port)) {
        std::cerr << "cannot listen on " << host << ":" << port << "\n";
        return 1;
      }
      return 0;
    }

    if (!warnings.empty()) {
      for (const auto& w : warnings) payload["warnings"].push_back(w);
    }
    if (format == "table") {
      print_table(std::cout, payload);
    } else {
      std::cout << payload.dump(2) << "\n";
    }
    return 0;
  } catch (const UsageError& e) {
    return report_usage(e.what());
  } catch (const Error& e) {
    std::cout << greyahp::api::error_payload(e).dump(2) << "\n";
    std::cerr << "error: " << e.code_name() << ": " << e.what() << "\n";
    return 1;
  }
}
