#include "nfba/nfba.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "nfba/diffuse.hpp"
#include "nfba/dirichlet.hpp"
#include "nfba/error.hpp"
#include "nfba/flow.hpp"
#include "nfba/games.hpp"
#include "nfba/xspec.hpp"

struct nfba_field {
  std::shared_ptr<const nfba::NumberField> field;
};

struct nfba_transcript {
  nfba::Transcript transcript;
};

namespace {

using nlohmann::json;

thread_local std::string last_error;

nfba_status status_of(nfba::ErrorKind kind) {
  switch (kind) {
    case nfba::ErrorKind::Parse: return NFBA_ERR_PARSE;
    case nfba::ErrorKind::Config: return NFBA_ERR_CONFIG;
    case nfba::ErrorKind::Domain: return NFBA_ERR_DOMAIN;
    case nfba::ErrorKind::Precondition: return NFBA_ERR_PRECONDITION;
    case nfba::ErrorKind::Budget: return NFBA_ERR_BUDGET;
    case nfba::ErrorKind::InvariantViolation: return NFBA_ERR_INVARIANT;
    case nfba::ErrorKind::Io: return NFBA_ERR_IO;
    case nfba::ErrorKind::Internal: return NFBA_ERR_INTERNAL;
  }
  return NFBA_ERR_INTERNAL;
}

struct NullArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

template <class F>
nfba_status guarded(F&& body) {
  last_error.clear();
  try {
    body();
    return NFBA_OK;
  } catch (const nfba::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const NullArgument& e) {
    last_error = e.what();
    return NFBA_ERR_ARGUMENT;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return NFBA_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return NFBA_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw NullArgument(what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

int resolve_precision(int precision) { return precision > 0 ? precision : nfba::kDefaultPrecision; }

nfba_verdict verdict_code(nfba::Verdict v) {
  switch (v) {
    case nfba::Verdict::Certified: return NFBA_CERTIFIED;
    case nfba::Verdict::Refuted: return NFBA_REFUTED;
    case nfba::Verdict::Inconclusive: return NFBA_INCONCLUSIVE;
  }
  return NFBA_INCONCLUSIVE;
}

json point_json(const nfba::SNumber& x) {
  json out = json::array();
  for (int v = 0; v < x.size(); ++v) {
    if (x.layout().kinds[v] == nfba::PlaceKind::Real)
      out.push_back(x[v].re.to_string(20));
    else
      out.push_back(json::array({x[v].re.to_string(20), x[v].im.to_string(20)}));
  }
  return out;
}

json certificate_json(const nfba::BACertificate& c) {
  json j = {{"verdict", nfba::to_string(c.verdict)},
            {"epsilon", c.epsilon.to_string(17)},
            {"times", c.times.size()},
            {"lower_bound", c.lower_bound.to_string(17)},
            {"kink_seen", c.kink_seen},
            {"vectors_checked", c.vectors_checked}};
  if (!c.times.empty()) j["last_time"] = c.times.back().to_string(17);
  if (c.witness)
    j["witness"] = {{"pt", nfba::to_string(c.witness->pt)},
                    {"time", c.witness->time.to_string(17)},
                    {"height", c.witness->height.to_string(17)},
                    {"derivative", c.witness->derivative}};
  return j;
}

std::string read_file(const char* path) {
  std::ifstream in(path);
  if (!in) nfba::fail(nfba::ErrorKind::Io, std::string("cannot open ") + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

extern "C" {

const char* nfba_version(void) { return "0.1.0"; }

const char* nfba_last_error(void) { return last_error.c_str(); }

void nfba_string_free(char* s) { std::free(s); }

nfba_status nfba_field_load(const char* path, nfba_field** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new nfba_field{std::make_shared<nfba::NumberField>(nfba::NumberField::load(path))};
  });
}

nfba_status nfba_field_preset(const char* name, nfba_field** out) {
  return guarded([&] {
    require(name && out, "null argument");
    *out = new nfba_field{std::make_shared<nfba::NumberField>(nfba::NumberField::preset(name))};
  });
}

void nfba_field_free(nfba_field* field) { delete field; }

nfba_status nfba_field_describe(const nfba_field* field, char** json_out) {
  return guarded([&] {
    require(field && json_out, "null argument");
    const auto& f = *field->field;
    json places = json::array();
    for (auto k : f.layout().kinds) places.push_back(k == nfba::PlaceKind::Real ? "real" : "complex");
    json j = {{"name", f.name()},
              {"degree", f.degree()},
              {"places", places},
              {"discriminant", f.discriminant().get_str()},
              {"unit_rank", f.unit_rank()},
              {"dirichlet_constant", nfba::dirichlet_constant(f).to_string(17)},
              {"config", f.config().to_json()}};
    *json_out = dup_string(j.dump(2));
  });
}

nfba_status nfba_dirichlet_constant(const nfba_field* field, double* out) {
  return guarded([&] {
    require(field && out, "null argument");
    *out = nfba::dirichlet_constant(*field->field).to_double();
  });
}

nfba_status nfba_certify(const nfba_field* field, const char* xspec, double horizon, double epsilon, double spacing,
                         int precision, nfba_verdict* verdict, char** json_out) {
  return guarded([&] {
    require(field && xspec && verdict, "null argument");
    const int prec = resolve_precision(precision);
    auto x = nfba::parse_xspec(*field->field, xspec, prec);
    auto cert = nfba::certify_ba(*field->field, x.value, nfba::Real(horizon, prec), nfba::Real(epsilon, prec),
                                 nfba::Real(spacing, prec));
    *verdict = verdict_code(cert.verdict);
    if (json_out) {
      json j = certificate_json(cert);
      j["field"] = field->field->name();
      j["x"] = xspec;
      j["horizon"] = horizon;
      j["spacing"] = spacing;
      *json_out = dup_string(j.dump(2));
    }
  });
}

nfba_status nfba_trace(const nfba_field* field, const char* xspec, double tmax, double step, double cutoff,
                       int precision, char** csv_out) {
  return guarded([&] {
    require(field && xspec && csv_out, "null argument");
    const int prec = resolve_precision(precision);
    auto x = nfba::parse_xspec(*field->field, xspec, prec);
    auto rows = nfba::flow_trace(*field->field, x.value, nfba::Real(tmax, prec), nfba::Real(step, prec),
                                 nfba::Real(cutoff, prec));
    std::ostringstream out;
    nfba::write_trace_csv(out, rows);
    *csv_out = dup_string(out.str());
  });
}

nfba_status nfba_dirichlet(const nfba_field* field, const char* xspec, double Q, int precision, char** csv_out) {
  return guarded([&] {
    require(field && xspec && csv_out, "null argument");
    const int prec = resolve_precision(precision);
    auto x = nfba::parse_xspec(*field->field, xspec, prec);
    auto res = nfba::strong_dirichlet_solve(*field->field, x.value, nfba::Real(Q, prec));
    std::ostringstream out;
    nfba::write_dirichlet_csv_header(out);
    if (res.witness) nfba::write_dirichlet_csv_row(out, xspec, *res.witness);
    *csv_out = dup_string(out.str());
  });
}

nfba_status nfba_diffuse(const char* curve_csv_path, const char* family_json_path, double tangency_tolerance,
                         char** json_out) {
  return guarded([&] {
    require(curve_csv_path && family_json_path && json_out, "null argument");
    std::istringstream curve_in(read_file(curve_csv_path));
    auto curve = nfba::read_curve_csv(curve_in);
    json fam;
    try {
      fam = json::parse(read_file(family_json_path));
    } catch (const json::exception& e) {
      nfba::fail(nfba::ErrorKind::Parse, std::string("family JSON: ") + e.what());
    }
    auto family = nfba::family_from_json(fam);
    nfba::DiffuseOptions opts;
    if (tangency_tolerance > 0) opts.tangency_tolerance = tangency_tolerance;
    auto rep = nfba::curve_diffuse_params(curve, family, opts);
    double rho_min = rep.rho.empty() ? 0.0 : *std::min_element(rep.rho.begin(), rep.rho.end());
    json j = {{"a", rep.a},
              {"b", rep.b},
              {"c", rep.c},
              {"beta_bound", rep.beta_bound},
              {"tangency", rep.tangency},
              {"worst_t", curve.nodes[rep.worst_node].t},
              {"worst_subspace", rep.worst_subspace},
              {"nodes", curve.nodes.size()},
              {"rho_min", rho_min}};
    *json_out = dup_string(j.dump(2));
  });
}

void nfba_play_options_init(nfba_play_options* options) {
  if (!options) return;
  options->beta = 0.1;
  options->rounds = 30;
  options->seed = 1;
  options->precision = 0;
  options->alice = "main";
  options->bob = "random";
  options->playground = "minkowski";
}

nfba_status nfba_play(const nfba_field* field, const nfba_play_options* options, nfba_transcript** out) {
  return guarded([&] {
    require(field && options && out, "null argument");
    const auto& f = field->field;
    nfba::GameConfig c;
    c.beta = options->beta;
    c.field = f;
    c.playground = std::shared_ptr<const nfba::Playground>(
        nfba::make_playground(options->playground ? options->playground : "minkowski", f->layout()));
    c.family = {nfba::FamilyKind::HK, static_cast<int>(nfba::hk_qualifying_subsets(f->layout()).size())};
    c.max_rounds = options->rounds;
    c.precision = resolve_precision(options->precision);
    c.seed = options->seed;
    nfba::BaCertifierSpec cert;
    cert.beta = options->beta;
    c.certifiers.push_back(cert);
    nfba::check_config(c);

    const std::string alice_name = options->alice ? options->alice : "main";
    nfba::AliceStrategy alice;
    if (alice_name == "main")
      alice = nfba::alice_main_strategy(f, options->beta);
    else if (alice_name == "dummy")
      alice = nfba::alice_dummy();
    else
      nfba::fail(nfba::ErrorKind::Parse, "unknown alice strategy '" + alice_name + "'");

    const std::string bob_name = options->bob ? options->bob : "random";
    nfba::BobStrategy bob;
    if (bob_name == "random")
      bob = nfba::bob_random();
    else if (bob_name == "hugger")
      bob = nfba::bob_hugger();
    else if (bob_name.rfind("target:", 0) == 0)
      bob = nfba::bob_target_seeking(nfba::parse_xspec(*f, bob_name.substr(7), nfba::game_precision(c)).value);
    else
      nfba::fail(nfba::ErrorKind::Parse, "unknown bob strategy '" + bob_name + "'");

    auto t = std::make_unique<nfba_transcript>();
    t->transcript = nfba::play(c, alice, bob);
    *out = t.release();
  });
}

nfba_status nfba_transcript_read(const char* path, nfba_transcript** out) {
  return guarded([&] {
    require(path && out, "null argument");
    std::ifstream in(path);
    if (!in) nfba::fail(nfba::ErrorKind::Io, std::string("cannot open ") + path);
    auto t = std::make_unique<nfba_transcript>();
    t->transcript = nfba::read_transcript(in);
    *out = t.release();
  });
}

nfba_status nfba_transcript_write(const nfba_transcript* transcript, const char* path) {
  return guarded([&] {
    require(transcript && path, "null argument");
    std::ofstream out(path);
    if (!out) nfba::fail(nfba::ErrorKind::Io, std::string("cannot write ") + path);
    nfba::write_transcript(out, transcript->transcript);
    if (!out) nfba::fail(nfba::ErrorKind::Io, std::string("write failed: ") + path);
  });
}

nfba_status nfba_transcript_summary(const nfba_transcript* transcript, char** json_out) {
  return guarded([&] {
    require(transcript && json_out, "null argument");
    const auto& t = transcript->transcript;
    json j = {{"alice", t.alice_name},
              {"bob", t.bob_name},
              {"terminated_reason", nfba::to_string(t.reason)},
              {"bob_balls", t.bob_rounds()},
              {"limit_center", point_json(t.limit.center)},
              {"limit_radius", t.limit.radius.to_string(6)},
              {"certifier_verdict", t.verdict ? json(nfba::to_string(*t.verdict)) : json(nullptr)}};
    if (t.forfeit) j["forfeit"] = {{"rule", t.forfeit->rule}, {"message", t.forfeit->message}};
    json certs = json::array();
    for (const auto& c : t.certificates) certs.push_back(certificate_json(c));
    j["certificates"] = certs;
    *json_out = dup_string(j.dump(2));
  });
}

nfba_status nfba_transcript_replay(const nfba_transcript* transcript, int* legal_out, char** json_out) {
  return guarded([&] {
    require(transcript && legal_out, "null argument");
    auto rep = nfba::replay(transcript->transcript);
    *legal_out = rep.legal ? 1 : 0;
    if (json_out) {
      json j = {{"legal", rep.legal},
                {"recorded_verdict", rep.recorded_verdict ? json(nfba::to_string(*rep.recorded_verdict)) : json(nullptr)},
                {"recomputed_verdict",
                 rep.recomputed_verdict ? json(nfba::to_string(*rep.recomputed_verdict)) : json(nullptr)}};
      if (rep.violation)
        j["violation"] = {{"move", *rep.bad_move}, {"rule", rep.violation->rule}, {"message", rep.violation->message}};
      *json_out = dup_string(j.dump(2));
    }
  });
}

nfba_status nfba_transcript_verdict(const nfba_transcript* transcript, nfba_verdict* out) {
  return guarded([&] {
    require(transcript && out, "null argument");
    const auto& v = transcript->transcript.verdict;
    *out = v ? verdict_code(*v) : NFBA_INCONCLUSIVE;
  });
}

void nfba_transcript_free(nfba_transcript* transcript) { delete transcript; }

}  // extern "C"
