#include "sigmaqc/sigmaqc.h"

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <sstream>
#include <string>

#include "sigmaqc/run.hpp"

struct sqc_case {
  sqc::CaseBundle bundle;
};

struct sqc_solution {
  sqc::RunReport report;
};

namespace {

thread_local std::string last_error;

sqc_status fail(sqc_status s, const std::string& message) {
  last_error = message;
  return s;
}

/// Maps exceptions escaping the C++ core onto status codes.
template <class F>
sqc_status guarded(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const sqc::CaseError& e) {
    return fail(SQC_ERR_UNKNOWN_CASE, e.what());
  } catch (const sqc::EllipticityError& e) {
    return fail(SQC_ERR_ELLIPTICITY, e.what());
  } catch (const sqc::SolverError& e) {
    return fail(SQC_ERR_SOLVER, e.what());
  } catch (const sqc::ConfigError& e) {
    return fail(SQC_ERR_CONFIG, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(SQC_ERR_ARGUMENT, e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(SQC_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(SQC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SQC_ERR_INTERNAL, "unknown error");
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* sqc_version(void) { return "0.1.0"; }

const char* sqc_last_error(void) { return last_error.c_str(); }

size_t sqc_case_count(void) { return sqc::case_names().size(); }

const char* sqc_case_name(size_t index) {
  const auto& names = sqc::case_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

sqc_status sqc_case_create(const char* name, const char* params, sqc_case** out) {
  if (name == nullptr || out == nullptr) return fail(SQC_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const auto p = params == nullptr ? std::map<std::string, double>{} : sqc::parse_params(params);
    *out = new sqc_case{sqc::make_case(name, p)};
    return SQC_OK;
  });
}

void sqc_case_destroy(sqc_case* c) { delete c; }

sqc_status sqc_case_solve(const sqc_case* c, int n, sqc_solution** out) {
  if (c == nullptr || out == nullptr) return fail(SQC_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    sqc::RunConfig config;
    config.case_name = c->bundle.name;
    config.params = c->bundle.params;
    config.grids = {n};
    if (n < 2) throw std::invalid_argument("degenerate grid");
    *out = new sqc_solution{sqc::run(config)};
    return SQC_OK;
  });
}

void sqc_solution_destroy(sqc_solution* s) { delete s; }

sqc_status sqc_solution_dilatation(const sqc_solution* s, sqc_dilatation_summary* out) {
  if (s == nullptr || out == nullptr) return fail(SQC_ERR_ARGUMENT, "null argument");
  const sqc::DilatationReport& d = s->report.grids.front().dilatation;
  *out = {d.sup_d_sigma, d.inf_d_sigma, d.harnack_H, d.identity_residual, d.degenerate_count,
          d.degenerate_dominated ? 1 : 0};
  return SQC_OK;
}

sqc_status sqc_solution_analysis(const sqc_solution* s, sqc_analysis_summary* out) {
  if (s == nullptr || out == nullptr) return fail(SQC_ERR_ARGUMENT, "null argument");
  const sqc::AnalysisReport& a = s->report.grids.front().analysis;
  *out = {};
  out->p = a.p;
  out->delta = a.delta;
  out->bmo_norm = a.bmo_norm;
  out->ap_constant = a.ap.constant;
  out->ap_infinite = a.ap.infinite ? 1 : 0;
  out->harnack_H = a.harnack.H;
  out->has_global = a.has_global ? 1 : 0;
  if (a.has_global) {
    out->energy_sigma = a.energy_sigma;
    out->trace_integral = a.trace_integral;
    out->area_integral = a.area_integral;
    out->sup_d_sigma = a.sup_d_sigma;
    out->C = a.C;
    out->bound_M = a.bound_M;
    out->chain_ok = a.chain_ok ? 1 : 0;
  }
  return SQC_OK;
}

sqc_status sqc_solution_metric(const sqc_solution* s, const char* name, double* value) {
  if (s == nullptr || name == nullptr || value == nullptr) return fail(SQC_ERR_ARGUMENT, "null argument");
  const auto& m = s->report.grids.front().metrics;
  const auto it = m.find(name);
  if (it == m.end()) return fail(SQC_ERR_ARGUMENT, std::string("no metric '") + name + "'");
  *value = it->second;
  return SQC_OK;
}

sqc_status sqc_solution_export(const sqc_solution* s, const char* field, char** text) {
  if (s == nullptr || field == nullptr || text == nullptr) return fail(SQC_ERR_ARGUMENT, "null argument");
  *text = nullptr;
  return guarded([&] {
    std::ostringstream os;
    sqc::write_field(os, s->report, s->report.grids.front(), field);
    *text = copy_string(os.str());
    return SQC_OK;
  });
}

void sqc_string_free(char* text) { std::free(text); }

sqc_status sqc_run_file(const char* config, const char* out_dir, int* exit_code) {
  if (config == nullptr || exit_code == nullptr) return fail(SQC_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    std::optional<std::filesystem::path> dir;
    if (out_dir != nullptr) dir = out_dir;
    std::ostringstream err;
    *exit_code = sqc::run_command(config, dir, std::cout, err);
    std::cerr << err.str();
    if (*exit_code == sqc::exit_config_error) last_error = err.str();
    return SQC_OK;
  });
}

sqc_status sqc_export_file(const char* config, const char* field, char** text, int* exit_code) {
  if (config == nullptr || field == nullptr || text == nullptr || exit_code == nullptr) {
    return fail(SQC_ERR_ARGUMENT, "null argument");
  }
  *text = nullptr;
  return guarded([&] {
    std::ostringstream out;
    std::ostringstream err;
    *exit_code = sqc::export_command(config, field, out, err);
    if (*exit_code == sqc::exit_ok) {
      *text = copy_string(out.str());
    } else {
      last_error = err.str();
    }
    return SQC_OK;
  });
}

}  // extern "C"
