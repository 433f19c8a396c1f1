#include "bbmlab/bbmlab.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "bbmlab/commands.hpp"
#include "bbmlab/config.hpp"
#include "bbmlab/ensemble.hpp"
#include "bbmlab/error.hpp"
#include "bbmlab/verify.hpp"

struct bbm_config {
  bbmlab::Config config;
};

struct bbm_report {
  std::string text;
  std::string json;
  std::string hash;
};

namespace {

thread_local std::string last_error;

bbm_status status_of(bbmlab::ErrorKind kind) {
  switch (kind) {
    case bbmlab::ErrorKind::InvalidArgument: return BBM_USAGE;
    case bbmlab::ErrorKind::Io: return BBM_IO;
    case bbmlab::ErrorKind::Resource: return BBM_RESOURCE;
    case bbmlab::ErrorKind::CheckFailed: return BBM_CHECK_FAILED;
    case bbmlab::ErrorKind::Internal: return BBM_INTERNAL;
  }
  return BBM_INTERNAL;
}

template <typename Fn>
bbm_status guarded(Fn&& fn) {
  last_error.clear();
  try {
    return fn();
  } catch (const bbmlab::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return BBM_RESOURCE;
  } catch (const std::exception& e) {
    last_error = e.what();
    return BBM_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return BBM_INTERNAL;
  }
}

bbm_status copy_out(const std::string& s, char** out) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  *out = p;
  return BBM_OK;
}

bbm_status null_argument(const char* what) {
  last_error = std::string(what) + " must not be NULL";
  return BBM_USAGE;
}

}  // namespace

extern "C" {

const char* bbm_version(void) { return BBMLAB_VERSION; }

const char* bbm_last_error(void) { return last_error.c_str(); }

bbm_status bbm_config_new(bbm_config** out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new bbm_config{};
    return BBM_OK;
  });
}

bbm_status bbm_config_load(const char* path, bbm_config** out) {
  if (!path || !out) return null_argument("path and out");
  *out = nullptr;
  return guarded([&] {
    *out = new bbm_config{bbmlab::load_config(path)};
    return BBM_OK;
  });
}

bbm_status bbm_config_parse(const char* json_text, bbm_config** out) {
  if (!json_text || !out) return null_argument("json_text and out");
  *out = nullptr;
  return guarded([&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
      throw bbmlab::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    *out = new bbm_config{bbmlab::config_from_json(j)};
    return BBM_OK;
  });
}

void bbm_config_free(bbm_config* config) { delete config; }

bbm_status bbm_config_set(bbm_config* config, const char* path, const char* value) {
  if (!config || !path || !value) return null_argument("config, path and value");
  return guarded([&] {
    nlohmann::json v;
    try {
      v = nlohmann::json::parse(value);
    } catch (const nlohmann::json::parse_error&) {
      v = std::string(value);
    }
    bbmlab::set_config_value(config->config, path, v);
    return BBM_OK;
  });
}

bbm_status bbm_config_to_json(const bbm_config* config, char** out) {
  if (!config || !out) return null_argument("config and out");
  return guarded([&] { return copy_out(bbmlab::to_json(config->config).dump(2), out); });
}

bbm_status bbm_config_validate(const bbm_config* config) {
  if (!config) return null_argument("config");
  return guarded([&] {
    bbmlab::validate(config->config);
    return BBM_OK;
  });
}

bbm_status bbm_run(const bbm_config* config, bbm_report** out) {
  if (!config || !out) return null_argument("config and out");
  *out = nullptr;
  return guarded([&] {
    const bbmlab::CommandOutcome r = bbmlab::run_command(config->config);
    *out = new bbm_report{r.text, r.record.dump(2), r.manifest_hash};
    return r.checks_passed ? BBM_OK : BBM_CHECK_FAILED;
  });
}

const char* bbm_report_text(const bbm_report* report) { return report ? report->text.c_str() : ""; }
const char* bbm_report_json(const bbm_report* report) { return report ? report->json.c_str() : ""; }
const char* bbm_report_manifest_hash(const bbm_report* report) { return report ? report->hash.c_str() : ""; }
void bbm_report_free(bbm_report* report) { delete report; }

bbm_status bbm_config_fields(char** out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& f : bbmlab::config_field_docs()) {
      arr.push_back({{"path", f.path}, {"default", f.default_value}, {"symbol", f.symbol}, {"meaning", f.meaning}});
    }
    return copy_out(arr.dump(), out);
  });
}

bbm_status bbm_suite_names(char** out) {
  if (!out) return null_argument("out");
  return guarded([&] { return copy_out(nlohmann::json(bbmlab::suite_names()).dump(), out); });
}

bbm_status bbm_functional_keys(char** out) {
  if (!out) return null_argument("out");
  return guarded([&] { return copy_out(nlohmann::json(bbmlab::catalog_keys()).dump(), out); });
}

unsigned bbm_resolve_workers(unsigned requested) { return bbmlab::resolve_workers(requested); }

void bbm_string_free(char* s) { std::free(s); }

}  // extern "C"
