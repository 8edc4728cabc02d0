#ifndef NFBA_H
#define NFBA_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nfba_status {
  NFBA_OK = 0,
  NFBA_ERR_PARSE = 1,
  NFBA_ERR_CONFIG = 2,
  NFBA_ERR_DOMAIN = 3,
  NFBA_ERR_PRECONDITION = 4,
  NFBA_ERR_BUDGET = 5,
  NFBA_ERR_INVARIANT = 6,
  NFBA_ERR_IO = 7,
  NFBA_ERR_INTERNAL = 8,
  NFBA_ERR_ARGUMENT = 9
} nfba_status;

typedef enum nfba_verdict {
  NFBA_CERTIFIED = 0,
  NFBA_REFUTED = 2,
  NFBA_INCONCLUSIVE = 3
} nfba_verdict;

typedef struct nfba_field nfba_field;
typedef struct nfba_transcript nfba_transcript;

const char* nfba_version(void);
/* Message of the last failed call on this thread; empty when none. */
const char* nfba_last_error(void);
/* Frees strings returned through char** out-parameters. */
void nfba_string_free(char* s);

nfba_status nfba_field_load(const char* path, nfba_field** out);
/* "Q", "Q(i)", "Q(sqrt2)", "Q(sqrt5)", "Q(zeta3)", "Q(zeta8)". */
nfba_status nfba_field_preset(const char* name, nfba_field** out);
void nfba_field_free(nfba_field* field);
/* JSON: name, degree, places, discriminant, unit rank, Dirichlet constant. */
nfba_status nfba_field_describe(const nfba_field* field, char** json_out);
nfba_status nfba_dirichlet_constant(const nfba_field* field, double* out);

/* precision <= 0 selects the library default everywhere below. */

/* At each t_n = n spacing <= horizon, refutes if some vector below epsilon is
 * still shrinking; report is JSON. */
nfba_status nfba_certify(const nfba_field* field, const char* xspec, double horizon, double epsilon, double spacing,
                         int precision, nfba_verdict* verdict, char** json_out);
/* CSV with columns t, delta_H, witness_p, witness_q, derivative_at_witness. */
nfba_status nfba_trace(const nfba_field* field, const char* xspec, double tmax, double step, double cutoff,
                       int precision, char** csv_out);
/* CSV header and one witness row for the strong Dirichlet bound at Q. */
nfba_status nfba_dirichlet(const nfba_field* field, const char* xspec, double Q, int precision, char** csv_out);
/* Diffuseness report (JSON) of a sampled curve against a subspace family. */
nfba_status nfba_diffuse(const char* curve_csv_path, const char* family_json_path, double tangency_tolerance,
                         char** json_out);

typedef struct nfba_play_options {
  double beta;
  int rounds;
  uint64_t seed;
  int precision;
  /* "main" or "dummy". */
  const char* alice;
  /* "random", "hugger" or "target:<x-spec>". */
  const char* bob;
  /* "minkowski" (default when NULL), "interval" or "cantor". */
  const char* playground;
} nfba_play_options;

void nfba_play_options_init(nfba_play_options* options);
nfba_status nfba_play(const nfba_field* field, const nfba_play_options* options, nfba_transcript** out);

nfba_status nfba_transcript_read(const char* path, nfba_transcript** out);
nfba_status nfba_transcript_write(const nfba_transcript* transcript, const char* path);
/* JSON: terminated_reason, rounds, limit estimate, verdict. */
nfba_status nfba_transcript_summary(const nfba_transcript* transcript, char** json_out);
/* Revalidates every move and recomputes the verdict; legal_out is 1 or 0. */
nfba_status nfba_transcript_replay(const nfba_transcript* transcript, int* legal_out, char** json_out);
/* NFBA_INCONCLUSIVE when the transcript has no certifier. */
nfba_status nfba_transcript_verdict(const nfba_transcript* transcript, nfba_verdict* out);
void nfba_transcript_free(nfba_transcript* transcript);

#ifdef __cplusplus
}
#endif

#endif
