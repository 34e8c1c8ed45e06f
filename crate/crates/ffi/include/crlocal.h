#ifndef CRLOCAL_H
#define CRLOCAL_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum CrlStatus {
  CRL_STATUS_OK = 0,
  CRL_STATUS_NULL_POINTER = 1,
  CRL_STATUS_INVALID_UTF8 = 2,
  CRL_STATUS_PANIC = 3,
  CRL_STATUS_REAL_HAS_NO_VALUATION = 10,
  CRL_STATUS_SINGULAR = 11,
  CRL_STATUS_WRONG_FIELD = 12,
  CRL_STATUS_FIELD_MISMATCH = 13,
  CRL_STATUS_DIMENSION_MISMATCH = 14,
  CRL_STATUS_NOT_INVARIANT = 15,
  CRL_STATUS_NOT_CR = 16,
  CRL_STATUS_NOT_IN_BIG_CELL = 17,
  CRL_STATUS_NOT_PARABOLIC = 18,
  CRL_STATUS_NOT_UNIPOTENT = 19,
  CRL_STATUS_LEVI_MISMATCH = 20,
  CRL_STATUS_NOT_REAL_FIELD = 21,
  CRL_STATUS_NOT_ATTAINED = 22,
  CRL_STATUS_PRIME_MISMATCH = 23,
  CRL_STATUS_BAD_T = 24,
  CRL_STATUS_INVALID_INPUT = 25,
  CRL_STATUS_PARSE = 26,
} CrlStatus;

typedef struct CrlRepresentation CrlRepresentation;

typedef struct CrlMinimizeResult {
  double lambda;
  /* 0 attained, 1 diverged, 2 budget exhausted. */
  int32_t status;
  size_t iterations;
  double gradient_norm;
} CrlMinimizeResult;

CrlStatus crl_representation_from_json(const char *json, CrlRepresentation **out);

void crl_representation_free(CrlRepresentation *rep);

size_t crl_representation_dim(const CrlRepresentation *rep);

CrlStatus crl_is_cr(const CrlRepresentation *rep, uint64_t seed, bool *out);

CrlStatus crl_is_nonparabolic(const CrlRepresentation *rep, uint64_t seed, bool *out);

CrlStatus crl_semisimplify_json(const CrlRepresentation *rep, uint64_t seed, char **out);

CrlStatus crl_minimize(const CrlRepresentation *rep, size_t budget, CrlMinimizeResult *out);

void crl_string_free(char *s);

const char *crl_last_error_message(void);

#ifdef __cplusplus
}
#endif

#endif
