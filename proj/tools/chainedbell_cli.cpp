// chainedbell command-line front-end. Talks to the library exclusively through
// the C API in chainedbell.h.
//
// Exit codes: 0 ok, 2 usage / parse / invalid parameters, 3 LP solver
// failure, 4 a model predicate failed (checkmodel).

#include "chainedbell/chainedbell.h"

#include <CLI11.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;
constexpr int kExitPredicate = 4;

struct CliFailure {
  int exit_code;
  std::string message;
};

int exit_code_for(cb_status status) {
  switch (status) {
    case CB_OK:
      return kExitOk;
    case CB_ERR_SOLVER:
      return kExitSolver;
    case CB_ERR_INTERNAL:
      return 1;
    default:
      return kExitUsage;
  }
}

void check(cb_status status) {
  if (status == CB_OK) return;
  std::string msg = cb_last_error();
  if (status == CB_ERR_PARSE && cb_last_error_line() == 0) msg = "parse error: " + msg;
  throw CliFailure{exit_code_for(status), msg};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ScenarioPtr = std::unique_ptr<cb_scenario, Deleter<cb_scenario, cb_scenario_free>>;
using ReportPtr = std::unique_ptr<cb_chained_report, Deleter<cb_chained_report, cb_chained_report_free>>;
using ModelPtr = std::unique_ptr<cb_model, Deleter<cb_model, cb_model_free>>;
using LpPtr = std::unique_ptr<cb_lp_result, Deleter<cb_lp_result, cb_lp_result_free>>;
using TrialsPtr = std::unique_ptr<cb_trials, Deleter<cb_trials, cb_trials_free>>;

std::string real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

using Cell = std::variant<std::string, double, std::uint64_t, bool>;

std::string render_csv(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* d = std::get_if<double>(&c)) return real(*d);
  if (const auto* u = std::get_if<std::uint64_t>(&c)) return std::to_string(*u);
  return std::get<bool>(c) ? "true" : "false";
}

std::string render_json(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return "\"" + *s + "\"";
  if (const auto* d = std::get_if<double>(&c)) {
    return std::isfinite(*d) ? real(*d) : std::string("null");
  }
  return render_csv(c);
}

// Fixed-column table rendered as CSV, JSON lines or key=value lines.
class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add(std::vector<Cell> row) { rows_.push_back(std::move(row)); }

  void write(std::ostream& out, const std::string& format) const {
    if (format == "csv") {
      for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
      out << '\n';
      for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << render_csv(row[i]);
        out << '\n';
      }
    } else if (format == "json-lines") {
      for (const auto& row : rows_) {
        out << '{';
        for (std::size_t i = 0; i < row.size(); ++i) {
          out << (i ? "," : "") << '"' << columns_[i] << "\":" << render_json(row[i]);
        }
        out << "}\n";
      }
    } else {
      for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) out << columns_[i] << '=' << render_csv(row[i]) << '\n';
      }
    }
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

struct GlobalOptions {
  double tolerance = 0.0;  // 0 selects each command's default
  std::string format;
  std::string output;
};

void emit(const GlobalOptions& g, const Table& table, const std::string& default_format) {
  const std::string format = g.format.empty() ? default_format : g.format;
  if (g.output.empty()) {
    table.write(std::cout, format);
    return;
  }
  std::ofstream out(g.output);
  if (!out) throw CliFailure{kExitUsage, "cannot open output file " + g.output};
  table.write(out, format);
}

void require_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw CliFailure{kExitUsage, "--alpha must lie in [0, 1], got " + real(alpha)};
  }
}

ScenarioPtr scenario_from(std::optional<std::size_t> n, std::optional<double> epsilon) {
  if (n.has_value() == epsilon.has_value()) {
    throw CliFailure{kExitUsage, "exactly one of --n and --epsilon is required"};
  }
  cb_scenario* s = nullptr;
  if (n) {
    check(cb_scenario_equally_spaced(*n, &s));
  } else {
    check(cb_scenario_for_epsilon(*epsilon, &s));
  }
  return ScenarioPtr(s);
}

// ---- chained ---------------------------------------------------------------

struct ChainedArgs {
  double alpha = -1.0;
  std::optional<std::size_t> n;
  std::optional<double> epsilon;
  std::string source = "trace";
  bool terms = false;
};

int run_chained(const GlobalOptions& g, const ChainedArgs& args) {
  require_alpha(args.alpha);
  ScenarioPtr scenario = scenario_from(args.n, args.epsilon);
  cb_chained_source source = CB_SOURCE_TRACE;
  if (args.source == "printed") source = CB_SOURCE_CLOSED_FORM_PRINTED;
  if (args.source == "corrected") source = CB_SOURCE_CLOSED_FORM_CORRECTED;

  cb_chained_report* raw = nullptr;
  check(cb_chained_evaluate(args.alpha, scenario.get(), source, &raw));
  ReportPtr report(raw);
  const std::size_t n = cb_chained_report_n(report.get());

  if (args.terms) {
    std::vector<double> terms(2 * n);
    check(cb_chained_report_terms(report.get(), terms.data(), terms.size()));
    Table table({"n", "index", "a_index", "b_index", "event", "probability"});
    for (std::size_t k = 0; k < 2 * n; ++k) {
      const std::size_t link = k / 2;
      const bool closing = k + 1 == 2 * n;
      const std::size_t a = k % 2 == 0 ? link : (closing ? 0 : link + 1);
      table.add({std::uint64_t{n}, std::uint64_t{k + 1}, std::uint64_t{a}, std::uint64_t{link},
                 std::string(closing ? "equal" : "unequal"), terms[k]});
    }
    emit(g, table, "csv");
    return kExitOk;
  }

  Table table({"alpha", "n", "source", "value", "trace_value", "closed_form_printed",
               "closed_form_corrected", "quantum_upper_bound", "small_angle_bound",
               "local_lower_bound"});
  table.add({args.alpha, std::uint64_t{n}, args.source, cb_chained_report_value(report.get()),
             cb_chained_report_trace_value(report.get()),
             cb_chained_report_closed_form(report.get(), CB_SOURCE_CLOSED_FORM_PRINTED),
             cb_chained_report_closed_form(report.get(), CB_SOURCE_CLOSED_FORM_CORRECTED),
             cb_chained_report_quantum_upper_bound(report.get()), cb_chain_small_angle_bound(n),
             cb_chained_report_local_lower_bound(report.get())});
  emit(g, table, "csv");
  return kExitOk;
}

// ---- feasibility -----------------------------------------------------------

struct FeasibilityArgs {
  double alpha = -1.0;
  double epsilon = 0.0;
  std::size_t z_count = 0;
  std::string pairs = "all";
  std::string model_output;
};

int run_feasibility(const GlobalOptions& g, const FeasibilityArgs& args) {
  require_alpha(args.alpha);
  if (!(args.epsilon > 0.0)) throw CliFailure{kExitUsage, "--epsilon must be positive"};
  if (args.z_count == 0) throw CliFailure{kExitUsage, "--z must be at least 1"};
  ScenarioPtr scenario = scenario_from(std::nullopt, args.epsilon);

  cb_lp_result* raw = nullptr;
  check(cb_lp_max_advantage(args.alpha, scenario.get(), args.z_count,
                            args.pairs == "chain" ? CB_PAIRS_CHAIN : CB_PAIRS_ALL, g.tolerance, &raw));
  LpPtr result(raw);
  const double t_star = cb_lp_result_t_star(result.get());

  if (!args.model_output.empty()) {
    cb_model* model = nullptr;
    check(cb_lp_result_model(result.get(), &model));
    ModelPtr owned(model);
    check(cb_model_save(owned.get(), args.model_output.c_str()));
  }

  Table table({"alpha", "epsilon", "n", "z_count", "pairs", "t_star", "a_star", "chained_bound",
               "max_residual", "verdict"});
  table.add({args.alpha, args.epsilon, std::uint64_t{cb_scenario_size(scenario.get())},
             std::uint64_t{args.z_count}, args.pairs, t_star,
             std::uint64_t{cb_lp_result_a_star(result.get())},
             cb_lp_result_chained_bound(result.get()), cb_lp_result_max_residual(result.get()),
             std::string(t_star < args.epsilon ? "ADVANTAGE-EXCLUDED" : "ADVANTAGE-FEASIBLE")});
  emit(g, table, "csv");
  return kExitOk;
}

// ---- certify ---------------------------------------------------------------

struct CertifyArgs {
  double alpha = -1.0;
  std::size_t n = 0;
  std::uint64_t rounds = 0;
  std::uint64_t seed = 0;
  double confidence = 0.99;
  std::string schedule = "chain-only";
  std::string interval = "hoeffding";
  std::string trials_output;
};

int run_certify(const GlobalOptions& g, const CertifyArgs& args) {
  require_alpha(args.alpha);
  if (!(args.confidence > 0.0 && args.confidence < 1.0)) {
    throw CliFailure{kExitUsage, "--confidence must lie in (0, 1)"};
  }
  ScenarioPtr scenario = scenario_from(args.n, std::nullopt);
  const cb_schedule schedule =
      args.schedule == "uniform" ? CB_SCHEDULE_UNIFORM : CB_SCHEDULE_CHAIN_ONLY;
  const cb_interval_mode mode =
      args.interval == "clopper-pearson" ? CB_INTERVAL_CLOPPER_PEARSON : CB_INTERVAL_HOEFFDING;

  cb_trials* raw = nullptr;
  check(cb_sample_rounds(args.alpha, scenario.get(), args.rounds, args.seed, schedule, &raw));
  TrialsPtr trials(raw);
  if (!args.trials_output.empty()) check(cb_trials_write_log(trials.get(), args.trials_output.c_str()));

  cb_certificate cert{};
  check(cb_certify(trials.get(), scenario.get(), args.confidence, mode, &cert));

  cb_chained_report* report_raw = nullptr;
  check(cb_chained_evaluate(args.alpha, scenario.get(), CB_SOURCE_TRACE, &report_raw));
  ReportPtr report(report_raw);

  Table table({"format", "rng", "seed", "alpha", "n", "rounds", "schedule", "interval", "confidence",
               "chain_samples", "i_n_hat", "half_width", "lower_bound", "certified_epsilon",
               "i_n_quantum"});
  table.add({std::string("chainedbell-certificate/1"), std::string(cb_rng_algorithm()),
             std::uint64_t{args.seed}, args.alpha, std::uint64_t{args.n}, std::uint64_t{args.rounds},
             args.schedule, args.interval, cert.confidence, std::uint64_t{cert.n_rounds},
             cert.i_n_hat, cert.half_width, cert.lower_bound, cert.certified_epsilon,
             cb_chained_report_trace_value(report.get())});
  emit(g, table, "kv");
  return kExitOk;
}

// ---- checkmodel ------------------------------------------------------------

int run_checkmodel(const GlobalOptions& g, const std::string& path) {
  const double tol = g.tolerance > 0.0 ? g.tolerance : 1e-9;
  cb_model* raw = nullptr;
  const cb_status status = cb_model_load(path.c_str(), tol, &raw);
  if (status == CB_ERR_PARSE) {
    throw CliFailure{kExitUsage, path + ":" + std::string(cb_last_error())};
  }
  check(status);
  ModelPtr model(raw);

  cb_model_check c{};
  check(cb_model_check_run(model.get(), tol, &c));

  Table table({"predicate", "pass", "max_deviation", "value"});
  table.add({std::string("normalization"), bool(c.normalization.pass), c.normalization.max_deviation, 0.0});
  table.add({std::string("no_signalling"), bool(c.no_signalling.pass), c.no_signalling.max_deviation, 0.0});
  table.add({std::string("no_conspiracy"), bool(c.no_conspiracy.pass), c.no_conspiracy.max_deviation, 0.0});
  table.add({std::string("averaging"), bool(c.averaging.pass), c.averaging.max_deviation, 0.0});
  table.add({std::string("advantage"), true, 0.0, c.advantage});
  table.add({std::string("bkp"), bool(c.bkp.pass), c.bkp.max_deviation,
             c.bkp_applicable ? c.bkp_min_slack : std::nan("")});
  emit(g, table, "csv");

  const bool ok = c.normalization.pass && c.no_signalling.pass && c.no_conspiracy.pass &&
                  c.averaging.pass && c.bkp.pass;
  return ok ? kExitOk : kExitPredicate;
}

// ---- model (fixture generator) ----------------------------------------------

struct ModelArgs {
  std::string kind = "identity";
  double alpha = -1.0;
  std::optional<std::size_t> n;
  std::optional<double> epsilon;
  std::size_t z_count = 2;
  std::string pairs = "all";
  std::string path;
};

int run_model(const GlobalOptions& g, const ModelArgs& args) {
  require_alpha(args.alpha);
  ScenarioPtr scenario = scenario_from(args.n, args.epsilon);
  cb_model* raw = nullptr;
  if (args.kind == "identity") {
    check(cb_model_identity(args.alpha, scenario.get(), &raw));
  } else if (args.kind == "product") {
    check(cb_model_product_state(args.alpha, scenario.get(), &raw));
  } else {
    cb_lp_result* lp = nullptr;
    check(cb_lp_max_advantage(args.alpha, scenario.get(), args.z_count,
                              args.pairs == "chain" ? CB_PAIRS_CHAIN : CB_PAIRS_ALL, g.tolerance, &lp));
    LpPtr owned(lp);
    check(cb_lp_result_model(owned.get(), &raw));
  }
  ModelPtr model(raw);
  check(cb_model_save(model.get(), args.path.c_str()));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chained Bell measures, advantage LPs and finite-statistics certificates"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--tolerance", global.tolerance, "Override the command's comparison tolerance")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", global.format, "Output format")
      ->check(CLI::IsMember({"csv", "json-lines", "kv"}));
  app.add_option("--output", global.output, "Write output to a file instead of stdout");

  ChainedArgs chained;
  auto* cmd_chained = app.add_subcommand("chained", "Evaluate I_N and its bounds");
  cmd_chained->add_option("--alpha", chained.alpha, "State parameter in [0,1]")->required();
  auto* chained_n = cmd_chained->add_option("--n", chained.n, "Equally spaced settings per side");
  auto* chained_eps = cmd_chained->add_option("--epsilon", chained.epsilon, "Target advantage");
  chained_n->excludes(chained_eps);
  cmd_chained->add_option("--source", chained.source, "Reported value")
      ->check(CLI::IsMember({"trace", "printed", "corrected"}));
  cmd_chained->add_flag("--terms", chained.terms, "Emit the 2N chain terms instead");

  FeasibilityArgs feas;
  auto* cmd_feas = app.add_subcommand("feasibility", "Maximise predictive advantage by LP");
  cmd_feas->add_option("--alpha", feas.alpha, "State parameter in [0,1]")->required();
  cmd_feas->add_option("--epsilon", feas.epsilon, "Target advantage")->required();
  cmd_feas->add_option("--z", feas.z_count, "Number of decomposition atoms")->required();
  cmd_feas->add_option("--pairs", feas.pairs, "Setting pairs constrained by the LP")
      ->check(CLI::IsMember({"all", "chain"}));
  cmd_feas->add_option("--model-output", feas.model_output, "Save the optimal decomposition");

  CertifyArgs cert;
  auto* cmd_cert = app.add_subcommand("certify", "Sample rounds and certify I_N");
  cmd_cert->add_option("--alpha", cert.alpha, "State parameter in [0,1]")->required();
  cmd_cert->add_option("--n", cert.n, "Equally spaced settings per side")->required();
  cmd_cert->add_option("--rounds", cert.rounds, "Number of rounds")->required();
  cmd_cert->add_option("--seed", cert.seed, "RNG seed")->required();
  cmd_cert->add_option("--confidence", cert.confidence, "Confidence level in (0,1)");
  cmd_cert->add_option("--schedule", cert.schedule, "Setting schedule")
      ->check(CLI::IsMember({"chain-only", "uniform"}));
  cmd_cert->add_option("--interval", cert.interval, "Interval construction")
      ->check(CLI::IsMember({"hoeffding", "clopper-pearson"}));
  cmd_cert->add_option("--trials-output", cert.trials_output, "Write the trial log (CSV)");

  std::string model_path;
  auto* cmd_check = app.add_subcommand("checkmodel", "Run every predicate on a model file");
  cmd_check->add_option("path", model_path, "Model file")->required();

  ModelArgs model;
  auto* cmd_model = app.add_subcommand("model", "Write a decomposition model file");
  cmd_model->add_option("--kind", model.kind, "Model to build")
      ->check(CLI::IsMember({"identity", "product", "lp"}));
  cmd_model->add_option("--alpha", model.alpha, "State parameter in [0,1]")->required();
  auto* model_n = cmd_model->add_option("--n", model.n, "Equally spaced settings per side");
  auto* model_eps = cmd_model->add_option("--epsilon", model.epsilon, "Target advantage");
  model_n->excludes(model_eps);
  cmd_model->add_option("--z", model.z_count, "Atoms (lp kind)");
  cmd_model->add_option("--pairs", model.pairs, "Setting pairs (lp kind)")
      ->check(CLI::IsMember({"all", "chain"}));
  cmd_model->add_option("path", model.path, "Destination file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (cmd_chained->parsed()) return run_chained(global, chained);
    if (cmd_feas->parsed()) return run_feasibility(global, feas);
    if (cmd_cert->parsed()) return run_certify(global, cert);
    if (cmd_check->parsed()) return run_checkmodel(global, model_path);
    if (cmd_model->parsed()) return run_model(global, model);
  } catch (const CliFailure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.exit_code;
  }
  return kExitUsage;
}
