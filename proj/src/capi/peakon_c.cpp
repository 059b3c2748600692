#include "peakon/peakon.h"

#include <cstring>
#include <new>
#include <string>

#include "core/errors.hpp"
#include "core/experiment.hpp"

struct peakon_config {
  peakon::ExperimentConfig c;
};

struct peakon_run {
  peakon::RunResult r;
  std::string first_failure;
};

namespace {

thread_local std::string g_last_error;

peakon_status status_of(peakon::ErrorKind k) {
  using peakon::ErrorKind;
  switch (k) {
    case ErrorKind::InvalidArgument: return PEAKON_ERR_INVALID_ARGUMENT;
    case ErrorKind::InvalidGrid: return PEAKON_ERR_INVALID_GRID;
    case ErrorKind::BoundaryDecay: return PEAKON_ERR_BOUNDARY_DECAY;
    case ErrorKind::Continuity: return PEAKON_ERR_CONTINUITY;
    case ErrorKind::JacobianDegenerate: return PEAKON_ERR_JACOBIAN;
    case ErrorKind::StepSize: return PEAKON_ERR_STEP_SIZE;
    case ErrorKind::Parse: return PEAKON_ERR_PARSE;
    case ErrorKind::Validation: return PEAKON_ERR_VALIDATION;
    case ErrorKind::Io: return PEAKON_ERR_IO;
  }
  return PEAKON_ERR_INTERNAL;
}

peakon_status fail_with(peakon_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

template <class F>
peakon_status guarded(F&& f) {
  try {
    return f();
  } catch (const peakon::Error& e) {
    return fail_with(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail_with(PEAKON_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail_with(PEAKON_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail_with(PEAKON_ERR_INTERNAL, "unknown error");
  }
}

peakon_status null_arg(const char* what) { return fail_with(PEAKON_ERR_NULL_ARGUMENT, std::string(what) + " is NULL"); }

}  // namespace

extern "C" {

const char* peakon_version(void) { return "1.0.0"; }

const char* peakon_status_string(peakon_status s) {
  switch (s) {
    case PEAKON_OK: return "ok";
    case PEAKON_ERR_NULL_ARGUMENT: return "null argument";
    case PEAKON_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PEAKON_ERR_PARSE: return "parse error";
    case PEAKON_ERR_VALIDATION: return "validation error";
    case PEAKON_ERR_IO: return "i/o error";
    case PEAKON_ERR_INVALID_GRID: return "invalid grid";
    case PEAKON_ERR_BOUNDARY_DECAY: return "boundary decay violated";
    case PEAKON_ERR_CONTINUITY: return "continuity violated";
    case PEAKON_ERR_JACOBIAN: return "degenerate jacobian";
    case PEAKON_ERR_STEP_SIZE: return "bad step size";
    case PEAKON_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case PEAKON_ERR_OUT_OF_RANGE: return "out of range";
    case PEAKON_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* peakon_last_error(void) { return g_last_error.c_str(); }

peakon_status peakon_config_new(peakon_config** out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new peakon_config{};
    return PEAKON_OK;
  });
}

peakon_status peakon_config_parse(const char* text, peakon_config** out) {
  if (!text) return null_arg("text");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new peakon_config{peakon::parse_config(text)};
    return PEAKON_OK;
  });
}

peakon_status peakon_config_load(const char* path, peakon_config** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new peakon_config{peakon::load_config(path)};
    return PEAKON_OK;
  });
}

peakon_status peakon_config_set(peakon_config* cfg, const char* key, const char* value) {
  if (!cfg) return null_arg("cfg");
  if (!key) return null_arg("key");
  if (!value) return null_arg("value");
  return guarded([&] {
    auto next = cfg->c;
    peakon::set_config_value(next, key, value);
    peakon::validate(next);
    cfg->c = std::move(next);
    return PEAKON_OK;
  });
}

peakon_status peakon_config_serialize(const peakon_config* cfg, char* buf, size_t cap, size_t* len) {
  if (!cfg) return null_arg("cfg");
  if (!len) return null_arg("len");
  return guarded([&] {
    const auto s = peakon::serialize(cfg->c);
    *len = s.size();
    if (!buf) return PEAKON_OK;
    if (cap < s.size() + 1) return fail_with(PEAKON_ERR_BUFFER_TOO_SMALL, "need " + std::to_string(s.size() + 1) + " bytes");
    std::memcpy(buf, s.c_str(), s.size() + 1);
    return PEAKON_OK;
  });
}

void peakon_config_free(peakon_config* cfg) { delete cfg; }

peakon_status peakon_run_experiment(const peakon_config* cfg, peakon_run** out) {
  if (!cfg) return null_arg("cfg");
  if (!out) return null_arg("out");
  return guarded([&] {
    auto* run = new peakon_run{peakon::run_experiment(cfg->c), {}};
    run->first_failure = run->r.first_failure();
    *out = run;
    return PEAKON_OK;
  });
}

int peakon_run_passed(const peakon_run* run) { return run && run->r.passed() ? 1 : 0; }

size_t peakon_run_audit_count(const peakon_run* run) { return run ? run->r.audits.size() : 0; }

peakon_status peakon_run_audit(const peakon_run* run, size_t index, const char** name, peakon_audit_status* status,
                               const char** detail) {
  if (!run) return null_arg("run");
  if (index >= run->r.audits.size()) {
    return fail_with(PEAKON_ERR_OUT_OF_RANGE, "audit index " + std::to_string(index) + " out of range");
  }
  const auto& a = run->r.audits[index];
  if (name) *name = a.name.c_str();
  if (detail) *detail = a.detail.c_str();
  if (status) {
    *status = a.status == peakon::AuditStatus::Pass   ? PEAKON_AUDIT_PASS
              : a.status == peakon::AuditStatus::Fail ? PEAKON_AUDIT_FAIL
                                                      : PEAKON_AUDIT_SKIPPED;
  }
  return PEAKON_OK;
}

const char* peakon_run_first_failure(const peakon_run* run) { return run ? run->first_failure.c_str() : ""; }

peakon_status peakon_run_report_value(const peakon_run* run, const char* key, double* out) {
  if (!run) return null_arg("run");
  if (!key) return null_arg("key");
  if (!out) return null_arg("out");
  const auto& rep = run->r.report;
  const std::pair<const char*, const std::optional<double>*> table[] = {
      {"rate", &rep.rate},       {"r2", &rep.r2},         {"t0_estimate", &rep.t0_estimate}, {"T_num", &rep.T_num},
      {"T_riccati", &rep.T_riccati}, {"pq_max", &rep.pq_max}, {"E_drift", &rep.E_drift}, {"F_drift", &rep.F_drift},
  };
  for (const auto& [k, v] : table) {
    if (std::strcmp(k, key) != 0) continue;
    if (!v->has_value()) return fail_with(PEAKON_ERR_OUT_OF_RANGE, std::string(key) + " not set by this scenario");
    *out = **v;
    return PEAKON_OK;
  }
  return fail_with(PEAKON_ERR_OUT_OF_RANGE, std::string("unknown report key '") + key + "'");
}

void peakon_run_free(peakon_run* run) { delete run; }

}  // extern "C"
