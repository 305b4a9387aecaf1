#include "occtime/occtime.h"

#include <exception>
#include <new>
#include <string>

#include "commands.hpp"
#include "occtime/error.hpp"
#include "occtime/stable_law.hpp"
#include "occtime/theory.hpp"

struct occt_law {
  occtime::StableLaw law;
};

struct occt_config {
  occtime::CommandOptions options;
};

struct occt_report {
  occtime::CommandOutput output;
};

namespace {

thread_local std::string last_error;

occt_status fail(occt_status status, const char* message)
{
  last_error = message;
  return status;
}

// Runs body, mapping exceptions to status codes.
template <class F>
occt_status guarded(F&& body)
{
  try {
    last_error.clear();
    body();
    return OCCT_OK;
  } catch (const occtime::DomainError& e) {
    return fail(OCCT_DOMAIN_ERROR, e.what());
  } catch (const occtime::NumericError& e) {
    return fail(OCCT_NUMERIC_ERROR, e.what());
  } catch (const std::bad_alloc&) {
    return fail(OCCT_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(OCCT_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(OCCT_INTERNAL_ERROR, "unknown error");
  }
}

#define OCCT_REQUIRE_ARG(cond, what) \
  if (!(cond)) return fail(OCCT_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* occt_version(void) { return OCCTIME_VERSION; }

const char* occt_last_error(void) { return last_error.c_str(); }

occt_status occt_law_create(double alpha, occt_law** out)
{
  OCCT_REQUIRE_ARG(out, "null output pointer");
  *out = nullptr;
  return guarded([&] { *out = new occt_law{occtime::StableLaw(alpha)}; });
}

void occt_law_destroy(occt_law* law) { delete law; }

occt_status occt_law_density(const occt_law* law, double x, double t, double* out)
{
  OCCT_REQUIRE_ARG(law && out, "null argument");
  return guarded([&] { *out = law->law.density(x, t); });
}

occt_status occt_law_tail_prob(const occt_law* law, double x, double t, double* out)
{
  OCCT_REQUIRE_ARG(law && out, "null argument");
  return guarded([&] { *out = law->law.tail_prob(x, t); });
}

occt_status occt_law_abs_moment(const occt_law* law, double p, double* out)
{
  OCCT_REQUIRE_ARG(law && out, "null argument");
  return guarded([&] { *out = law->law.abs_moment(p); });
}

occt_status occt_law_sample(const occt_law* law, uint64_t seed, uint64_t stream_id, double* out, size_t count)
{
  OCCT_REQUIRE_ARG(law && (out || count == 0), "null argument");
  return guarded([&] {
    occtime::RngStream rng(seed, stream_id);
    law->law.sample(rng, std::span<double>(out, count));
  });
}

occt_status occt_exact_riemann_error(double alpha, double T, int64_t n, double* out)
{
  OCCT_REQUIRE_ARG(out, "null output pointer");
  return guarded([&] { *out = occtime::exact_riemann_error(occtime::StableLaw::shared(alpha), T, n); });
}

occt_status occt_riemann_limit(double alpha, double T, double* out)
{
  OCCT_REQUIRE_ARG(out, "null output pointer");
  return guarded([&] { *out = occtime::theorem1_limit(occtime::StableLaw::shared(alpha), T).value; });
}

occt_status occt_tilde_C(double alpha, double* out)
{
  OCCT_REQUIRE_ARG(out, "null output pointer");
  return guarded([&] { *out = occtime::tilde_C(alpha); });
}

occt_status occt_config_create(occt_config** out)
{
  OCCT_REQUIRE_ARG(out, "null output pointer");
  *out = nullptr;
  return guarded([&] { *out = new occt_config{}; });
}

void occt_config_destroy(occt_config* config) { delete config; }

occt_status occt_config_set(occt_config* config, const char* key, const char* value)
{
  OCCT_REQUIRE_ARG(config && key && value, "null argument");
  return guarded([&] { config->options[key] = value; });
}

occt_status occt_run(const char* command, const occt_config* config, occt_report** out)
{
  OCCT_REQUIRE_ARG(command && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    static const occtime::CommandOptions empty;
    auto output = occtime::run_command(command, config ? config->options : empty);
    *out = new occt_report{std::move(output)};
  });
}

void occt_report_destroy(occt_report* report) { delete report; }

const char* occt_report_table(const occt_report* report) { return report ? report->output.table.c_str() : ""; }

const char* occt_report_manifest(const occt_report* report)
{
  return report ? report->output.manifest.c_str() : "";
}

const char* occt_report_summary(const occt_report* report) { return report ? report->output.summary.c_str() : ""; }

int occt_report_passed(const occt_report* report) { return report && report->output.passed ? 1 : 0; }

}  // extern "C"
