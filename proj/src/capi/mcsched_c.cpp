#include "mcsched.h"

#include <exception>
#include <filesystem>
#include <memory>
#include <string>

#include "../core/harness.hpp"

struct mcs_config {
  mcsched::ExperimentConfig cfg;
};

namespace {

thread_local std::string g_last_error;

mcs_status fail(mcs_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <typename Fn>
mcs_status guard(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    return fail(MCS_ERR_INVALID, e.what());
  } catch (const std::domain_error& e) {
    return fail(MCS_ERR_INVALID, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(MCS_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(MCS_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(MCS_ERR_RUNTIME, "unknown error");
  }
}

}  // namespace

extern "C" {

const char* mcs_version(void) { return mcsched::kVersion; }

const char* mcs_last_error(void) { return g_last_error.c_str(); }

mcs_status mcs_config_load(const char* path, mcs_config** out) {
  if (!path || !out) return fail(MCS_ERR_INVALID, "null argument");
  return guard([&]() {
    try {
      auto cfg = new mcs_config{mcsched::load_config_file(path)};
      *out = cfg;
      return MCS_OK;
    } catch (const std::runtime_error& e) {
      // load failures on the file itself are IO errors
      return fail(MCS_ERR_IO, e.what());
    }
  });
}

mcs_status mcs_config_parse(const char* text, mcs_config** out) {
  if (!text || !out) return fail(MCS_ERR_INVALID, "null argument");
  return guard([&]() {
    *out = new mcs_config{mcsched::parse_config_text(text)};
    return MCS_OK;
  });
}

mcs_status mcs_config_set(mcs_config* cfg, const char* line) {
  if (!cfg || !line) return fail(MCS_ERR_INVALID, "null argument");
  return guard([&]() {
    mcsched::apply_config_line(cfg->cfg, line);
    return MCS_OK;
  });
}

void mcs_config_free(mcs_config* cfg) { delete cfg; }

mcs_status mcs_run(const mcs_config* cfg) {
  if (!cfg) return fail(MCS_ERR_INVALID, "null config");
  return guard([&]() {
    const auto rr = mcsched::run_experiment(cfg->cfg);
    mcsched::write_run_outputs(rr);
    return MCS_OK;
  });
}

mcs_status mcs_sweep(const mcs_config* cfg, const char* mode, long long fixed) {
  if (!cfg || !mode) return fail(MCS_ERR_INVALID, "null argument");
  return guard([&]() {
    const auto m = mcsched::parse_sweep_mode(mode);
    const auto rr = mcsched::run_experiment(cfg->cfg);
    mcsched::write_run_outputs(rr);
    mcsched::figure_sweep(rr, m, fixed);
    return MCS_OK;
  });
}

mcs_status mcs_verify(const mcs_config* cfg, const char* check, long long* slots,
                      long long* violations) {
  if (!cfg || !check) return fail(MCS_ERR_INVALID, "null argument");
  return guard([&]() {
    const auto kind = mcsched::parse_verify_check(check);
    const auto rep = mcsched::verify_experiment(cfg->cfg, kind);
    if (slots) *slots = rep.slots_checked;
    if (violations) *violations = rep.violations;
    return MCS_OK;
  });
}

mcs_status mcs_bench(const mcs_config* cfg) {
  if (!cfg) return fail(MCS_ERR_INVALID, "null config");
  return guard([&]() {
    const auto rows = mcsched::bench_experiment(cfg->cfg);
    const auto path =
        std::filesystem::path(cfg->cfg.output_dir) / "bench.csv";
    mcsched::write_bench_csv(rows, path.string());
    return MCS_OK;
  });
}

mcs_status mcs_upper_bound(int L, double q, int b, const char* arrival_model,
                           double* out_value) {
  if (!out_value) return fail(MCS_ERR_INVALID, "null out_value");
  return guard([&]() {
    mcsched::BoundParams bp;
    bp.L = L;
    bp.q = q;
    bp.b = b;
    std::unique_ptr<mcsched::ArrivalCgf> cgf;
    if (arrival_model && *arrival_model) {
      const auto model = mcsched::parse_arrival_model(arrival_model);
      cgf = std::make_unique<mcsched::ArrivalCgf>(model);
      bp.cgf = cgf.get();
    }
    *out_value = mcsched::compute_upper_bound(bp).value;
    return MCS_OK;
  });
}

}  // extern "C"
