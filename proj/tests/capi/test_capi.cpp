// Exercises the shared library through its C header only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>

#include "bbmlab/bbmlab.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  bbm_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("version and catalogs") {
  CHECK(std::strlen(bbm_version()) > 0);
  char* s = nullptr;
  REQUIRE(bbm_suite_names(&s) == BBM_OK);
  CHECK(take(s).find("\"normalization\"") != std::string::npos);
  REQUIRE(bbm_functional_keys(&s) == BBM_OK);
  CHECK(take(s).find("\"inv_x\"") != std::string::npos);
  REQUIRE(bbm_config_fields(&s) == BBM_OK);
  CHECK(take(s).find("engine.dt") != std::string::npos);
}

TEST_CASE("config handle lifecycle and error reporting") {
  bbm_config* c = nullptr;
  REQUIRE(bbm_config_new(&c) == BBM_OK);
  CHECK(bbm_config_set(c, "engine.dt", "0.02") == BBM_OK);
  CHECK(bbm_config_set(c, "command", "constants") == BBM_OK);
  CHECK(bbm_config_set(c, "engine.nothing", "1") == BBM_USAGE);
  CHECK(std::string(bbm_last_error()).find("engine.nothing") != std::string::npos);
  char* text = nullptr;
  REQUIRE(bbm_config_to_json(c, &text) == BBM_OK);
  const std::string json = take(text);
  CHECK(json.find("\"dt\": 0.02") != std::string::npos);

  bbm_config* again = nullptr;
  REQUIRE(bbm_config_parse(json.c_str(), &again) == BBM_OK);
  REQUIRE(bbm_config_to_json(again, &text) == BBM_OK);
  CHECK(take(text) == json);
  bbm_config_free(again);

  CHECK(bbm_config_set(c, "engine.dt", "-1") == BBM_OK);
  CHECK(bbm_config_validate(c) == BBM_USAGE);
  CHECK(std::string(bbm_last_error()).find("engine.dt") != std::string::npos);
  bbm_config_free(c);

  CHECK(bbm_config_parse("{not json", &c) == BBM_USAGE);
  CHECK(c == nullptr);
  CHECK(bbm_config_load("/nonexistent.json", &c) == BBM_IO);
  CHECK(bbm_config_new(nullptr) == BBM_USAGE);
}

TEST_CASE("running a command through the handle") {
  bbm_config* c = nullptr;
  REQUIRE(bbm_config_new(&c) == BBM_OK);
  bbm_config_set(c, "command", "constants");
  bbm_config_set(c, "functional", "inv_x");
  bbm_config_set(c, "out", "capi_out");
  bbm_report* r = nullptr;
  REQUIRE(bbm_run(c, &r) == BBM_OK);
  CHECK(std::string(bbm_report_json(r)).find("\"logt_coeff\"") != std::string::npos);
  CHECK(std::strlen(bbm_report_manifest_hash(r)) == 16);
  bbm_report_free(r);

  bbm_config_set(c, "command", "simulate");
  bbm_config_set(c, "engine.horizon", "15");
  bbm_config_set(c, "engine.max_particles", "10");
  CHECK(bbm_run(c, &r) == BBM_RESOURCE);
  CHECK(r == nullptr);
  CHECK(std::string(bbm_last_error()).find("particle") != std::string::npos);
  bbm_config_free(c);
}
