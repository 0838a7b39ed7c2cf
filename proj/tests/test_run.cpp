#include <cstdlib>

#include <doctest.h>

#include "rsc/error.hpp"
#include "rsc/run.hpp"

using namespace rsc;

namespace {

Errc config_code(const char* text, Command c = Command::solve) {
  try {
    parse_config(text, c);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::domain_error;
}

}  // namespace

TEST_CASE("config defaults and overrides") {
  const auto cfg = parse_config(R"({"n": 5, "prescription": {"family": "bertrand", "c": 0.2, "q": 3}})",
                                Command::solve);
  CHECK(cfg.n == 5);
  CHECK(cfg.prescription.family == "bertrand");
  CHECK(cfg.prescription.q == 3.0);
  CHECK(cfg.tol == 1e-10);
  CHECK(make_radial(cfg.prescription, cfg.n).dimension() == 5);
}

TEST_CASE("config rejections") {
  CHECK(config_code(R"({"bogus": 1})") == Errc::config_error);
  CHECK(config_code(R"({"n": 1})") == Errc::config_error);
  CHECK(config_code(R"({"n": 3.5})") == Errc::config_error);
  CHECK(config_code(R"({"tol": 1e-20})") == Errc::config_error);
  CHECK(config_code(R"({"r_max": 500})") == Errc::config_error);
  CHECK(config_code(R"({"prescription": {"family": "power-deficit", "q": 2}})") == Errc::config_error);
  CHECK(config_code(R"({"prescription": {"family": "directional"}})") == Errc::config_error);
  CHECK(config_code(R"({"command": "verify"})") == Errc::config_error);
  CHECK(config_code("{not json") == Errc::config_error);
  CHECK(config_code(R"({"n": 4})", Command::verify) == Errc::config_error);
}

TEST_CASE("format_double round-trips") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
}
