#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "schottky/exact.hpp"
#include "schottky/json_io.hpp"
#include "schottky/kp.hpp"
#include "schottky/relation.hpp"
#include "schottky/theta.hpp"

namespace schottky::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitInconclusive = 3;

enum class OutputFormat { Json, Table };

struct CliConfig {
  std::string subcommand;
  std::optional<int> g;
  std::optional<std::string> input_path;
  std::uint64_t seed = 0;
  double tol = 1e-13;
  int n_starts = 32;
  std::string c_constant = "1";
  int samples = 8;
  double spread = 0.5;
  OutputFormat output = OutputFormat::Json;
};

namespace detail {

using nlohmann::json;

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("malformed JSON in '" + path + "': " + e.what());
  }
}

inline int require_g(const CliConfig& cfg) {
  if (!cfg.g) throw InvalidArgument(cfg.subcommand + " requires --g");
  return *cfg.g;
}

inline PeriodMatrix load_tau(const CliConfig& cfg) {
  if (cfg.input_path) {
    auto tau = io::parse_period_matrix(read_json_file(*cfg.input_path));
    if (cfg.g && *cfg.g != tau.genus())
      throw DimensionMismatch("--g " + std::to_string(*cfg.g) + " does not match input genus " +
                              std::to_string(tau.genus()));
    return tau;
  }
  if (!cfg.g) throw InvalidArgument(cfg.subcommand + " requires --input or --g");
  return sample_siegel(*cfg.g, cfg.seed, cfg.spread);
}

inline TruncationPolicy policy(const CliConfig& cfg) {
  TruncationPolicy p;
  p.tol = cfg.tol;
  return p;
}

inline std::string format_scalar(const json& v) {
  if (v.is_object() && v.contains("num") && v.contains("den")) {
    const auto den = v["den"].get<std::string>();
    return den == "1" ? v["num"].get<std::string>() : v["num"].get<std::string>() + "/" + den;
  }
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "-";
  if (v.is_number_float()) {
    std::ostringstream os;
    os << std::setprecision(17) << v.get<double>();
    return os.str();
  }
  return v.dump();
}

inline void write_table(const json& report, std::ostream& out) {
  std::size_t width = 0;
  for (const auto& [key, _] : report.items()) width = std::max(width, key.size());
  for (const auto& [key, value] : report.items()) {
    out << std::left << std::setw(static_cast<int>(width) + 2) << key;
    if (value.is_array()) {
      for (std::size_t i = 0; i < value.size(); ++i) out << (i ? " " : "") << format_scalar(value[i]);
    } else {
      out << format_scalar(value);
    }
    out << '\n';
  }
}

inline json dispatch(const CliConfig& cfg, int& exit_code) {
  exit_code = kExitOk;
  const auto& cmd = cfg.subcommand;
  if (cmd == "degrees") return io::degree_report_json(degree_report(require_g(cfg)));
  if (cmd == "bound")
    return io::bound_report_json(degree_bound(require_g(cfg), ExactRational::parse(cfg.c_constant)));
  if (cmd == "nss-sizes") return io::nss_json(nullstellensatz_sizes(require_g(cfg)));
  if (cmd == "sample") return io::period_matrix_json(sample_siegel(require_g(cfg), cfg.seed, cfg.spread));
  if (cmd == "theta-eval") {
    const auto jet = theta_jet(load_tau(cfg), policy(cfg));
    json out = io::jet_json(jet);
    out["tau"] = io::period_matrix_json(jet.tau);
    return out;
  }
  if (cmd == "rank-test") {
    const auto jet = theta_jet(load_tau(cfg), policy(cfg));
    const auto rank = rank_test(sasaki_matrix(jet), default_rank_tol(jet.genus()));
    return {{"rank", rank.rank},
            {"full_rank", jet.pairs() + 1},
            {"singular_values", rank.singular_values},
            {"decomposable_suspected", rank.rank < jet.pairs() + 1}};
  }
  if (cmd == "kp-test") {
    const auto jet = theta_jet(load_tau(cfg), policy(cfg));
    SolverConfig solver;
    solver.n_starts = cfg.n_starts;
    solver.seed = cfg.seed;
    const auto report = strict_min(jet, solver);
    if (report.decision == Decision::Inconclusive) exit_code = kExitInconclusive;
    return io::kp_report_json(report);
  }
  if (cmd == "relation-test") {
    if (!cfg.input_path) throw InvalidArgument("relation-test requires --input <polynomial.json>");
    const auto poly = io::parse_polynomial(read_json_file(*cfg.input_path));
    const double worst = relation_test(poly, require_g(cfg), cfg.samples, cfg.seed, policy(cfg));
    return {{"g", *cfg.g}, {"samples", cfg.samples}, {"seed", cfg.seed}, {"max_abs", worst}};
  }
  throw InvalidArgument("unknown subcommand '" + cmd + "'");
}

}  // namespace detail

/// Runs one CLI invocation; args excludes the program name. Reports go to
/// `out`, a single "<ErrorCode>: message" line goes to `err` on failure.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig cfg;
  CLI::App app{"Theta constants, KP Schottky test and exact degree arithmetic"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string output = "json";
  std::map<std::string, std::string> formats{{"json", "json"}, {"table", "table"}};
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--g", cfg.g, "genus");
    sub->add_option("--output", output, "json or table")->transform(CLI::IsMember(formats));
  };
  auto add_tau = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input_path, "period matrix JSON file");
    sub->add_option("--seed", cfg.seed, "seed for sampled period matrices and solver starts");
    sub->add_option("--tol", cfg.tol, "absolute truncation tolerance");
    sub->add_option("--spread", cfg.spread, "sampling spread when --input is absent");
  };

  struct Sub { const char* name; const char* help; };
  const Sub subs[] = {{"degrees", "exact degrees of the theta images"},
                      {"bound", "upper bound on the Jacobian-locus degree"},
                      {"nss-sizes", "effective Nullstellensatz system sizes"},
                      {"theta-eval", "theta constants with first and second derivatives"},
                      {"kp-test", "KP-equation Schottky test"},
                      {"rank-test", "rank of the theta-gradient matrix"},
                      {"relation-test", "screen a homogeneous polynomial relation"},
                      {"sample", "sample a period matrix"}};
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    add_common(sub);
    const std::string name = s.name;
    if (name == "theta-eval" || name == "kp-test" || name == "rank-test") add_tau(sub);
    if (name == "kp-test") sub->add_option("--n-starts", cfg.n_starts, "optimizer starts");
    if (name == "bound") sub->add_option("--c", cfg.c_constant, "volume constant p/q");
    if (name == "relation-test") {
      sub->add_option("--input", cfg.input_path, "polynomial JSON file");
      sub->add_option("--samples", cfg.samples, "number of sampled period matrices");
      sub->add_option("--seed", cfg.seed, "sampling seed");
      sub->add_option("--tol", cfg.tol, "absolute truncation tolerance");
    }
    if (name == "sample") {
      sub->add_option("--seed", cfg.seed, "sampling seed");
      sub->add_option("--spread", cfg.spread, "entry spread");
    }
  }

  if (!args.empty() && !args.front().empty() && args.front()[0] != '-') {
    const bool known = std::any_of(std::begin(subs), std::end(subs),
                                   [&](const Sub& s) { return args.front() == s.name; });
    if (!known) {
      err << "UsageError: unknown subcommand '" << args.front() << "'\n";
      return kExitValidation;
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "UsageError: " << msg << '\n';
    return kExitValidation;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();
  cfg.output = output == "table" ? OutputFormat::Table : OutputFormat::Json;

  try {
    int exit_code = kExitOk;
    const auto report = detail::dispatch(cfg, exit_code);
    if (cfg.output == OutputFormat::Json)
      out << report.dump(2) << '\n';
    else
      detail::write_table(report, out);
    return exit_code;
  } catch (const Error& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << e.code() << ": " << msg << '\n';
    return kExitValidation;
  }
}

}  // namespace schottky::cli
