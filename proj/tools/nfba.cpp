// Command-line front end over the C API.
#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "nfba/nfba.h"

namespace {

constexpr int kExitParse = 64;
constexpr int kExitIo = 74;
constexpr int kExitSoftware = 70;

struct Failure {
  int code;
};

int exit_code_for(nfba_status s) {
  switch (s) {
    case NFBA_ERR_PARSE:
    case NFBA_ERR_CONFIG:
    case NFBA_ERR_ARGUMENT: return kExitParse;
    case NFBA_ERR_IO: return kExitIo;
    default: return kExitSoftware;
  }
}

void check(nfba_status s) {
  if (s == NFBA_OK) return;
  std::cerr << "nfba: " << nfba_last_error() << '\n';
  throw Failure{exit_code_for(s)};
}

struct StringOut {
  char* p = nullptr;
  ~StringOut() { nfba_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct FieldHandle {
  nfba_field* p = nullptr;
  ~FieldHandle() { nfba_field_free(p); }
};

struct TranscriptHandle {
  nfba_transcript* p = nullptr;
  ~TranscriptHandle() { nfba_transcript_free(p); }
};

/* A path to a field JSON file, or a preset name. */
void open_field(const std::string& spec, FieldHandle& out) {
  if (std::filesystem::is_regular_file(spec))
    check(nfba_field_load(spec.c_str(), &out.p));
  else
    check(nfba_field_preset(spec.c_str(), &out.p));
}

int default_precision() {
  const char* env = std::getenv("NFBA_PRECISION");
  if (!env || !*env) return 0;
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 0 || v > 1 << 20) {
    std::cerr << "nfba: NFBA_PRECISION must be a nonnegative integer\n";
    throw Failure{kExitParse};
  }
  return static_cast<int>(v);
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) {
    std::cerr << "nfba: cannot write " << path << '\n';
    throw Failure{kExitIo};
  }
  out << text;
}

int verdict_exit(nfba_verdict v) { return static_cast<int>(v); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Badly approximable S-numbers: certification, games and diagnostics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(nfba_version()));

  std::string field_spec = "Q";
  int precision = -1;
  auto add_field = [&](CLI::App* sub) {
    sub->add_option("--field", field_spec, "Field JSON file or preset name")->capture_default_str();
    sub->add_option("--precision", precision, "Working precision in bits (default: NFBA_PRECISION or built-in)");
  };

  auto* certify = app.add_subcommand("certify", "Finite-horizon badly-approximable check; exit 0/2/3");
  std::vector<std::string> xs;
  double horizon = 10, epsilon = 0.1, spacing = 0.5;
  unsigned jobs = 1;
  add_field(certify);
  certify->add_option("--x", xs, "Point (x-spec); repeat for a batch")->required()->allow_extra_args(false);
  certify->add_option("--horizon", horizon)->capture_default_str();
  certify->add_option("--epsilon", epsilon)->capture_default_str();
  certify->add_option("--spacing", spacing)->capture_default_str();
  certify->add_option("--jobs", jobs, "Parallel certifications for a batch")->capture_default_str();

  auto* play = app.add_subcommand("play", "Absolute game with a BA certifier; writes a JSONL transcript");
  nfba_play_options popts;
  nfba_play_options_init(&popts);
  std::string alice = "main", bob = "random", playground = "minkowski", out_path;
  add_field(play);
  play->add_option("--beta", popts.beta)->capture_default_str();
  play->add_option("--rounds", popts.rounds)->capture_default_str();
  play->add_option("--seed", popts.seed)->capture_default_str();
  play->add_option("--alice", alice, "main | dummy")->capture_default_str();
  play->add_option("--bob", bob, "random | hugger | target:<x-spec>")->capture_default_str();
  play->add_option("--playground", playground, "minkowski | interval | cantor")->capture_default_str();
  play->add_option("--out", out_path, "Transcript path (JSONL)");

  auto* replay = app.add_subcommand("replay", "Revalidate a transcript; exit 0 legal, 2 illegal");
  std::string in_path;
  replay->add_option("--in", in_path)->required();

  auto* dirichlet = app.add_subcommand("dirichlet", "Strong Dirichlet witness as CSV");
  std::string x_one;
  double Q = 16;
  add_field(dirichlet);
  dirichlet->add_option("--x", x_one)->required();
  dirichlet->add_option("--Q", Q)->capture_default_str();

  auto* diffuse = app.add_subcommand("diffuse", "Diffuseness report for a sampled curve");
  std::string curve_path, family_path;
  double tolerance = 1e-6;
  diffuse->add_option("--curve", curve_path)->required();
  diffuse->add_option("--family", family_path)->required();
  diffuse->add_option("--tolerance", tolerance)->capture_default_str();

  auto* trace = app.add_subcommand("trace", "CSV of t and delta_H along the flow");
  double tmax = 5, step = 0.1, cutoff = 1;
  std::string trace_out;
  add_field(trace);
  trace->add_option("--x", x_one)->required();
  trace->add_option("--tmax", tmax)->capture_default_str();
  trace->add_option("--step", step)->capture_default_str();
  trace->add_option("--cutoff", cutoff)->capture_default_str();
  trace->add_option("--out", trace_out);

  auto* field = app.add_subcommand("field", "Describe a field");
  add_field(field);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (precision < 0) precision = default_precision();

    if (*certify) {
      FieldHandle f;
      open_field(field_spec, f);
      std::vector<std::string> reports(xs.size());
      std::vector<nfba_verdict> verdicts(xs.size(), NFBA_INCONCLUSIVE);
      std::vector<nfba_status> status(xs.size(), NFBA_OK);
      std::vector<std::string> errors(xs.size());
      auto run = [&](size_t i) {
        char* rep = nullptr;
        status[i] = nfba_certify(f.p, xs[i].c_str(), horizon, epsilon, spacing, precision, &verdicts[i], &rep);
        if (status[i] == NFBA_OK)
          reports[i] = rep;
        else
          errors[i] = nfba_last_error();
        nfba_string_free(rep);
      };
      const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(xs.size())));
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          for (size_t i = w; i < xs.size(); i += workers) run(i);
        });
      for (auto& th : pool) th.join();
      int code = 0;
      for (size_t i = 0; i < xs.size(); ++i) {
        if (status[i] != NFBA_OK) {
          std::cerr << "nfba: " << xs[i] << ": " << errors[i] << '\n';
          return exit_code_for(status[i]);
        }
        std::cout << reports[i] << '\n';
        code = std::max(code, verdict_exit(verdicts[i]));
      }
      return code;
    }

    if (*play) {
      FieldHandle f;
      open_field(field_spec, f);
      popts.precision = precision;
      popts.alice = alice.c_str();
      popts.bob = bob.c_str();
      popts.playground = playground.c_str();
      TranscriptHandle t;
      check(nfba_play(f.p, &popts, &t.p));
      if (!out_path.empty()) check(nfba_transcript_write(t.p, out_path.c_str()));
      StringOut summary;
      check(nfba_transcript_summary(t.p, &summary.p));
      std::cout << summary.str() << '\n';
      return 0;
    }

    if (*replay) {
      TranscriptHandle t;
      check(nfba_transcript_read(in_path.c_str(), &t.p));
      int legal = 0;
      StringOut rep;
      check(nfba_transcript_replay(t.p, &legal, &rep.p));
      std::cout << rep.str() << '\n';
      return legal ? 0 : 2;
    }

    if (*dirichlet) {
      FieldHandle f;
      open_field(field_spec, f);
      StringOut csv;
      check(nfba_dirichlet(f.p, x_one.c_str(), Q, precision, &csv.p));
      emit(csv.str(), "");
      return 0;
    }

    if (*diffuse) {
      StringOut rep;
      check(nfba_diffuse(curve_path.c_str(), family_path.c_str(), tolerance, &rep.p));
      std::cout << rep.str() << '\n';
      return 0;
    }

    if (*trace) {
      FieldHandle f;
      open_field(field_spec, f);
      StringOut csv;
      check(nfba_trace(f.p, x_one.c_str(), tmax, step, cutoff, precision, &csv.p));
      emit(csv.str(), trace_out);
      return 0;
    }

    if (*field) {
      FieldHandle f;
      open_field(field_spec, f);
      StringOut rep;
      check(nfba_field_describe(f.p, &rep.p));
      std::cout << rep.str() << '\n';
      return 0;
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return 0;
}
