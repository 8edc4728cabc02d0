#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <unistd.h>

#include <json.hpp>

#include "nfba/nfba.h"

namespace {

nfba_field* preset(const char* name) {
  nfba_field* f = nullptr;
  REQUIRE(nfba_field_preset(name, &f) == NFBA_OK);
  return f;
}

nlohmann::json take_json(char* s) {
  auto j = nlohmann::json::parse(s);
  nfba_string_free(s);
  return j;
}

int cli(const std::string& args) {
  std::string cmd = std::string("\"") + NFBA_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("fields load, describe and report their Dirichlet constant") {
  nfba_field* f = preset("Q(sqrt2)");
  char* out = nullptr;
  REQUIRE(nfba_field_describe(f, &out) == NFBA_OK);
  auto j = take_json(out);
  CHECK(j["degree"] == 2);
  CHECK(j["discriminant"] == "8");
  double c = 0;
  REQUIRE(nfba_dirichlet_constant(f, &c) == NFBA_OK);
  CHECK(c == doctest::Approx(std::sqrt(8.0)));
  nfba_field_free(f);

  nfba_field* g = nullptr;
  REQUIRE(nfba_field_load(NFBA_SOURCE_DIR "/fields/qi.json", &g) == NFBA_OK);
  nfba_field_free(g);

  CHECK(nfba_field_preset("Q(sqrt7)", &g) != NFBA_OK);
  CHECK(std::string(nfba_last_error()).size() > 0);
  CHECK(nfba_field_load("/nonexistent/field.json", &g) == NFBA_ERR_IO);
  nfba_field_free(nullptr);
  nfba_string_free(nullptr);
}

TEST_CASE("certify verdicts and errors") {
  nfba_field* q = preset("Q");
  nfba_verdict v = NFBA_CERTIFIED;
  char* out = nullptr;
  REQUIRE(nfba_certify(q, "2/7", 10, 0.1, 0.5, 0, &v, &out) == NFBA_OK);
  CHECK(v == NFBA_REFUTED);
  CHECK(take_json(out)["verdict"] == "refuted");

  REQUIRE(nfba_certify(q, "phi", 10, 0.1, 0.5, 0, &v, &out) == NFBA_OK);
  CHECK(v == NFBA_CERTIFIED);
  nfba_string_free(out);

  CHECK(nfba_certify(q, "1/0", 10, 0.1, 0.5, 0, &v, &out) == NFBA_ERR_PARSE);
  CHECK(nfba_certify(q, "0.3", 10, 2.0, 0.5, 0, &v, &out) == NFBA_ERR_PRECONDITION);
  CHECK(std::string(nfba_last_error()).find("epsilon") != std::string::npos);
  CHECK(nfba_certify(nullptr, "0.3", 10, 0.1, 0.5, 0, &v, &out) == NFBA_ERR_ARGUMENT);
  nfba_field_free(q);
}

TEST_CASE("trace and dirichlet produce CSV") {
  nfba_field* q = preset("Q");
  char* csv = nullptr;
  REQUIRE(nfba_trace(q, "phi", 1, 0.5, 1, 0, &csv) == NFBA_OK);
  std::string s(csv);
  nfba_string_free(csv);
  CHECK(s.rfind("t,delta_H,witness_p,witness_q,derivative_at_witness\n", 0) == 0);

  REQUIRE(nfba_dirichlet(q, "phi", 5, 0, &csv) == NFBA_OK);
  s = csv;
  nfba_string_free(csv);
  CHECK(s.find("phi,5.0000000000000000e+00,-8,5,") != std::string::npos);
  nfba_field_free(q);
}

TEST_CASE("play, write, read and replay") {
  nfba_field* q = preset("Q");
  nfba_play_options o;
  nfba_play_options_init(&o);
  o.rounds = 12;
  o.seed = 3;
  nfba_transcript* t = nullptr;
  REQUIRE(nfba_play(q, &o, &t) == NFBA_OK);
  nfba_verdict v = NFBA_REFUTED;
  REQUIRE(nfba_transcript_verdict(t, &v) == NFBA_OK);
  CHECK(v == NFBA_CERTIFIED);

  char path[] = "/tmp/nfba_capi_XXXXXX";
  int fd = mkstemp(path);
  REQUIRE(fd >= 0);
  close(fd);
  REQUIRE(nfba_transcript_write(t, path) == NFBA_OK);
  nfba_transcript* back = nullptr;
  REQUIRE(nfba_transcript_read(path, &back) == NFBA_OK);
  int legal = 0;
  char* rep = nullptr;
  REQUIRE(nfba_transcript_replay(back, &legal, &rep) == NFBA_OK);
  CHECK(legal == 1);
  auto j = take_json(rep);
  CHECK(j["recomputed_verdict"] == "certified");
  char* summary = nullptr;
  REQUIRE(nfba_transcript_summary(back, &summary) == NFBA_OK);
  CHECK(take_json(summary)["terminated_reason"] == "max-rounds");
  nfba_transcript_free(back);
  nfba_transcript_free(t);
  std::remove(path);

  o.bob = "target:1/2";
  o.alice = "dummy";
  REQUIRE(nfba_play(q, &o, &t) == NFBA_OK);
  REQUIRE(nfba_transcript_verdict(t, &v) == NFBA_OK);
  CHECK(v == NFBA_REFUTED);
  nfba_transcript_free(t);

  o.bob = "sideways";
  CHECK(nfba_play(q, &o, &t) == NFBA_ERR_PARSE);
  nfba_field_free(q);
}

TEST_CASE("cli exit codes") {
  CHECK(cli("certify --x 1/3") == 2);
  CHECK(cli("certify --x phi") == 0);
  CHECK(cli("certify --x phi --x 1/3 --jobs 2") == 2);
  CHECK(cli("certify --x foo") == 64);
  CHECK(cli("certify") == 64);
  CHECK(cli("frobnicate") == 64);
  CHECK(cli("play --alice bogus") == 64);
  CHECK(cli("play --field nonsense") == 64);
  CHECK(cli("replay --in /nonexistent.jsonl") == 74);
  CHECK(cli("field --field 'Q(zeta8)'") == 0);
  setenv("NFBA_PRECISION", "abc", 1);
  CHECK(cli("certify --x phi") == 64);
  setenv("NFBA_PRECISION", "256", 1);
  CHECK(cli("certify --x phi") == 0);
  unsetenv("NFBA_PRECISION");
}
