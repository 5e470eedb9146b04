// extern "C" surface over the C++ core. Exceptions never cross this boundary:
// each entry point funnels through guard(), which maps chainedbell::Error
// codes onto cb_status and records the message for cb_last_error().

#include "chainedbell/chainedbell.h"

#include "chainedbell/chained_bell.hpp"
#include "chainedbell/decomposition.hpp"
#include "chainedbell/error.hpp"
#include "chainedbell/experiment.hpp"
#include "chainedbell/model_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <new>
#include <optional>
#include <string>

using namespace chainedbell;

struct cb_scenario {
  ScenarioSettings settings;
};

struct cb_chained_report {
  ChainedBellReport report;
  double trace_value;
  double printed;
  double corrected;
};

struct cb_model {
  DecompositionModel model;
};

struct cb_lp_result {
  LpAdvantageResult result;
};

struct cb_trials {
  std::vector<TrialRecord> records;
};

namespace {

thread_local std::string g_error;
thread_local std::size_t g_error_line = 0;
thread_local std::size_t g_error_column = 0;

cb_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
      return CB_ERR_INVALID_ARGUMENT;
    case ErrorCode::precondition:
      return CB_ERR_PRECONDITION;
    case ErrorCode::parse:
      return CB_ERR_PARSE;
    case ErrorCode::solver:
      return CB_ERR_SOLVER;
    case ErrorCode::io:
      return CB_ERR_IO;
  }
  return CB_ERR_INTERNAL;
}

template <class F>
cb_status guard(F&& fn) {
  g_error.clear();
  g_error_line = 0;
  g_error_column = 0;
  try {
    fn();
    return CB_OK;
  } catch (const ParseError& e) {
    g_error = e.what();
    g_error_line = e.line();
    g_error_column = e.column();
    return CB_ERR_PARSE;
  } catch (const Error& e) {
    g_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_error = "out of memory";
    return CB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_error = e.what();
    return CB_ERR_INTERNAL;
  }
}

template <class T>
void require(const T* p, const char* what) {
  if (p == nullptr) throw Error(ErrorCode::invalid_argument, std::string(what) + " is NULL");
}

std::vector<MeasurementAngle> angles(const double* values, std::size_t n) {
  std::vector<MeasurementAngle> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.emplace_back(values[k]);
  return out;
}

}  // namespace

extern "C" {

const char* cb_last_error(void) { return g_error.c_str(); }
size_t cb_last_error_line(void) { return g_error_line; }
size_t cb_last_error_column(void) { return g_error_column; }
const char* cb_version(void) { return "1.0.0"; }

cb_status cb_joint_probability(double alpha, double theta_a, double theta_b, int x, int y,
                               double* out) {
  return guard([&] {
    require(out, "out");
    *out = joint_probability(EntangledPairState(alpha), MeasurementAngle(theta_a),
                             MeasurementAngle(theta_b), x, y);
  });
}

cb_status cb_alice_marginal(double alpha, double theta_a, double theta_b, int x, double* out) {
  return guard([&] {
    require(out, "out");
    *out = marginal(EntangledPairState(alpha), MeasurementAngle(theta_a), MeasurementAngle(theta_b), x);
  });
}

cb_status cb_decorrelation_check(double alpha, double theta_a, double theta_b, int* out) {
  return guard([&] {
    require(out, "out");
    *out = decorrelation_check(EntangledPairState(alpha), MeasurementAngle(theta_a),
                               MeasurementAngle(theta_b))
               ? 1
               : 0;
  });
}

cb_status cb_scenario_create(const double* alice, const double* bob, size_t n, cb_scenario** out) {
  return guard([&] {
    require(out, "out");
    require(alice, "alice");
    require(bob, "bob");
    *out = new cb_scenario{ScenarioSettings(angles(alice, n), angles(bob, n))};
  });
}

cb_status cb_scenario_equally_spaced(size_t n, cb_scenario** out) {
  return guard([&] {
    require(out, "out");
    *out = new cb_scenario{equally_spaced_settings(n)};
  });
}

cb_status cb_scenario_for_epsilon(double epsilon, cb_scenario** out) {
  return guard([&] {
    require(out, "out");
    *out = new cb_scenario{settings_for_epsilon(epsilon).settings};
  });
}

size_t cb_scenario_size(const cb_scenario* s) { return s ? s->settings.n() : 0; }

cb_status cb_scenario_angles(const cb_scenario* s, double* alice, double* bob) {
  return guard([&] {
    require(s, "scenario");
    for (std::size_t k = 0; k < s->settings.n(); ++k) {
      if (alice) alice[k] = s->settings.alice()[k].radians();
      if (bob) bob[k] = s->settings.bob()[k].radians();
    }
  });
}

void cb_scenario_free(cb_scenario* s) { delete s; }

cb_status cb_chained_evaluate(double alpha, const cb_scenario* s, cb_chained_source source,
                              cb_chained_report** out) {
  return guard([&] {
    require(out, "out");
    require(s, "scenario");
    const EntangledPairState state(alpha);
    ChainedSource src = ChainedSource::trace;
    switch (source) {
      case CB_SOURCE_TRACE:
        break;
      case CB_SOURCE_CLOSED_FORM_PRINTED:
        src = ChainedSource::closed_form_printed;
        break;
      case CB_SOURCE_CLOSED_FORM_CORRECTED:
        src = ChainedSource::closed_form_corrected;
        break;
      default:
        throw Error(ErrorCode::invalid_argument, "unknown chained source");
    }
    ChainedBellReport report = chained_value(state, s->settings, src);
    double trace = 0.0;
    for (double t : report.terms) trace += t;
    *out = new cb_chained_report{
        std::move(report), trace,
        chained_value_closed_form(state, s->settings, ClosedForm::printed),
        chained_value_closed_form(state, s->settings, ClosedForm::corrected)};
  });
}

size_t cb_chained_report_n(const cb_chained_report* r) { return r ? r->report.n : 0; }
double cb_chained_report_value(const cb_chained_report* r) { return r ? r->report.value : NAN; }
double cb_chained_report_trace_value(const cb_chained_report* r) { return r ? r->trace_value : NAN; }

double cb_chained_report_closed_form(const cb_chained_report* r, cb_chained_source variant) {
  if (!r) return NAN;
  switch (variant) {
    case CB_SOURCE_TRACE:
      return r->trace_value;
    case CB_SOURCE_CLOSED_FORM_PRINTED:
      return r->printed;
    case CB_SOURCE_CLOSED_FORM_CORRECTED:
      return r->corrected;
  }
  return NAN;
}

double cb_chained_report_quantum_upper_bound(const cb_chained_report* r) {
  return r ? r->report.quantum_upper_bound : NAN;
}
double cb_chained_report_local_lower_bound(const cb_chained_report* r) {
  return r ? r->report.local_lower_bound : NAN;
}

cb_status cb_chained_report_terms(const cb_chained_report* r, double* out, size_t capacity) {
  return guard([&] {
    require(r, "report");
    require(out, "out");
    if (capacity < r->report.terms.size()) {
      throw Error(ErrorCode::invalid_argument, "term buffer too small");
    }
    std::copy(r->report.terms.begin(), r->report.terms.end(), out);
  });
}

void cb_chained_report_free(cb_chained_report* r) { delete r; }

double cb_chain_quantum_bound(size_t n) { return chain_quantum_bound(n); }
double cb_chain_small_angle_bound(size_t n) { return chain_small_angle_bound(n); }

cb_status cb_local_deterministic_minimum(size_t n, size_t* out) {
  return guard([&] {
    require(out, "out");
    *out = local_deterministic_minimum(n);
  });
}

cb_status cb_closed_form_discrepancy(size_t samples, size_t max_n, uint64_t seed, double tol,
                                     cb_discrepancy* out) {
  return guard([&] {
    require(out, "out");
    const ClosedFormDiscrepancy d = compare_closed_forms(samples, max_n, seed, tol);
    *out = {d.samples, d.max_printed_error, d.max_corrected_error, d.printed_failures,
            d.corrected_failures, d.tol};
  });
}

cb_status cb_model_load(const char* path, double tol, cb_model** out) {
  return guard([&] {
    require(out, "out");
    require(path, "path");
    *out = new cb_model{load_model(path, tol)};
  });
}

cb_status cb_model_parse(const char* text, double tol, cb_model** out) {
  return guard([&] {
    require(out, "out");
    require(text, "text");
    *out = new cb_model{parse_model(std::string_view(text), tol)};
  });
}

cb_status cb_model_save(const cb_model* m, const char* path) {
  return guard([&] {
    require(m, "model");
    require(path, "path");
    save_model(path, m->model);
  });
}

cb_status cb_model_serialize(const cb_model* m, char* buf, size_t capacity, size_t* needed) {
  return guard([&] {
    require(m, "model");
    const std::string text = serialize_model(m->model);
    if (needed) *needed = text.size() + 1;
    if (capacity == 0) return;
    require(buf, "buf");
    const std::size_t n = std::min(capacity - 1, text.size());
    std::memcpy(buf, text.data(), n);
    buf[n] = '\0';
  });
}

cb_status cb_model_identity(double alpha, const cb_scenario* s, cb_model** out) {
  return guard([&] {
    require(out, "out");
    require(s, "scenario");
    *out = new cb_model{identity_model(EntangledPairState(alpha), s->settings)};
  });
}

cb_status cb_model_product_state(double alpha, const cb_scenario* s, cb_model** out) {
  return guard([&] {
    require(out, "out");
    require(s, "scenario");
    *out = new cb_model{construct_product_state_model(EntangledPairState(alpha), s->settings)};
  });
}

size_t cb_model_atoms(const cb_model* m) { return m ? m->model.z_count() : 0; }
void cb_model_free(cb_model* m) { delete m; }

cb_status cb_model_check_run(const cb_model* m, double tol, cb_model_check* out) {
  return guard([&] {
    require(m, "model");
    require(out, "out");
    const DecompositionModel& model = m->model;
    cb_model_check check{};

    const PredicateResult norm = check_normalization(model, tol);
    check.normalization = {norm.pass ? 1 : 0, norm.max_deviation};

    PredicateResult ns{true, 0.0};
    for (const BehaviorBox& box : model.boxes()) {
      const PredicateResult r = check_no_signalling(box, tol);
      ns.pass = ns.pass && r.pass;
      ns.max_deviation = std::max(ns.max_deviation, r.max_deviation);
    }
    check.no_signalling = {ns.pass ? 1 : 0, ns.max_deviation};

    const PredicateResult nc = check_no_conspiracy(model);
    check.no_conspiracy = {nc.pass ? 1 : 0, nc.max_deviation};

    const PredicateResult avg = averages_to_quantum(model, tol);
    check.averaging = {avg.pass ? 1 : 0, avg.max_deviation};

    const AdvantageReport adv = advantage(model);
    check.advantage = adv.epsilon_achieved;
    check.witness_z = adv.witness.z;
    check.witness_a = adv.witness.a;
    check.witness_x = adv.witness.x;

    if (ns.pass) {
      const BkpCheck bkp = bkp_bound_check(model, tol);
      check.bkp_applicable = 1;
      check.bkp = {bkp.pass ? 1 : 0, bkp.min_slack < 0.0 ? -bkp.min_slack : 0.0};
      check.bkp_min_slack = bkp.min_slack;
    } else {
      check.bkp_applicable = 0;
      check.bkp = {0, 0.0};
      check.bkp_min_slack = NAN;
    }
    *out = check;
  });
}

cb_status cb_lp_max_advantage(double alpha, const cb_scenario* s, size_t z_count,
                              cb_pair_set pairs, double tol, cb_lp_result** out) {
  return guard([&] {
    require(out, "out");
    require(s, "scenario");
    LpOptions options;
    options.pairs = pairs == CB_PAIRS_CHAIN ? PairSet::chain : PairSet::all;
    if (tol > 0.0) options.tol = tol;
    *out = new cb_lp_result{lp_max_advantage(EntangledPairState(alpha), s->settings, z_count, options)};
  });
}

double cb_lp_result_t_star(const cb_lp_result* r) { return r ? r->result.t_star : NAN; }
double cb_lp_result_chained_bound(const cb_lp_result* r) { return r ? r->result.chained_bound : NAN; }
size_t cb_lp_result_a_star(const cb_lp_result* r) { return r ? r->result.a_star : 0; }
double cb_lp_result_max_residual(const cb_lp_result* r) { return r ? r->result.max_residual : NAN; }

cb_status cb_lp_result_model(const cb_lp_result* r, cb_model** out) {
  return guard([&] {
    require(r, "result");
    require(out, "out");
    if (!r->result.model) throw Error(ErrorCode::precondition, "LP result carries no model");
    *out = new cb_model{*r->result.model};
  });
}

void cb_lp_result_free(cb_lp_result* r) { delete r; }

const char* cb_rng_algorithm(void) { return kRngAlgorithm.data(); }

cb_status cb_sample_rounds(double alpha, const cb_scenario* s, uint64_t rounds, uint64_t seed,
                           cb_schedule schedule, cb_trials** out) {
  return guard([&] {
    require(out, "out");
    require(s, "scenario");
    const Schedule sched = schedule == CB_SCHEDULE_UNIFORM ? Schedule::uniform : Schedule::chain_only;
    *out = new cb_trials{sample_rounds(EntangledPairState(alpha), s->settings, rounds, seed, sched)};
  });
}

size_t cb_trials_count(const cb_trials* t) { return t ? t->records.size() : 0; }

cb_status cb_trials_get(const cb_trials* t, size_t index, cb_trial_record* out) {
  return guard([&] {
    require(t, "trials");
    require(out, "out");
    if (index >= t->records.size()) throw Error(ErrorCode::invalid_argument, "trial index out of range");
    const TrialRecord& r = t->records[index];
    *out = {r.round, r.a_index, r.b_index, r.x, r.y};
  });
}

cb_status cb_trials_write_log(const cb_trials* t, const char* path) {
  return guard([&] {
    require(t, "trials");
    require(path, "path");
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io, std::string("cannot write trial log ") + path);
    write_trial_log(out, t->records);
    if (!out) throw Error(ErrorCode::io, std::string("failed writing trial log ") + path);
  });
}

cb_status cb_trials_read_log(const char* path, cb_trials** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, std::string("cannot open trial log ") + path);
    *out = new cb_trials{read_trial_log(in)};
  });
}

cb_status cb_certify(const cb_trials* t, const cb_scenario* s, double confidence,
                     cb_interval_mode mode, cb_certificate* out) {
  return guard([&] {
    require(t, "trials");
    require(s, "scenario");
    require(out, "out");
    const IntervalMode m =
        mode == CB_INTERVAL_CLOPPER_PEARSON ? IntervalMode::clopper_pearson : IntervalMode::hoeffding;
    const EmpiricalCertificate c = estimate_chained(t->records, s->settings, confidence, m);
    *out = {c.n_rounds, c.i_n_hat, c.confidence, c.half_width, c.certified_epsilon, c.lower_bound, mode};
  });
}

void cb_trials_free(cb_trials* t) { delete t; }

}  // extern "C"
