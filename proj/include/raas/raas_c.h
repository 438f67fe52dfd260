#ifndef RAAS_C_H
#define RAAS_C_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(RAAS_BUILDING_LIBRARY)
#define RAAS_API __attribute__((visibility("default")))
#else
#define RAAS_API
#endif

typedef enum raas_status {
  RAAS_OK = 0,
  RAAS_ERR_ARGUMENT = 1,  /* null handle or invalid argument */
  RAAS_ERR_CONFIG = 2,    /* config parse or validation failure */
  RAAS_ERR_IO = 3,        /* output could not be written */
  RAAS_ERR_NUMERIC = 4,   /* non-convergence or non-finite value */
  RAAS_ERR_INVARIANT = 5, /* a proven bound was breached during a run */
  RAAS_ERR_VERIFY = 6,    /* verification finished with violations */
  RAAS_ERR_INTERNAL = 7
} raas_status;

/* Opaque experiment handle: a validated config. */
typedef struct raas_experiment raas_experiment;

/* Message for the last non-OK status on the calling thread. Never NULL. */
RAAS_API const char* raas_last_error(void);
RAAS_API const char* raas_version(void);

/* Strings returned through char** are owned by the caller. */
RAAS_API void raas_string_free(char* s);

RAAS_API raas_status raas_experiment_load(const char* path, raas_experiment** out);
RAAS_API raas_status raas_experiment_parse(const char* json_text, raas_experiment** out);
RAAS_API void raas_experiment_free(raas_experiment* e);

/* out_dir NULL: the config's directory. formats: comma list of csv, svg.
   jobs <= 0: the config's value. summary may be NULL. */
RAAS_API raas_status raas_experiment_run(raas_experiment* e, const char* out_dir,
                                         const char* formats, int jobs, char** summary);
RAAS_API raas_status raas_experiment_sweep(raas_experiment* e, const char* out_dir,
                                           const char* formats, int jobs, char** summary);
/* RAAS_ERR_VERIFY when any check fails; the report is filled either way. */
RAAS_API raas_status raas_experiment_verify(raas_experiment* e, int jobs, char** report);
RAAS_API raas_status raas_experiment_constants(raas_experiment* e, char** json_out);

/* Scalar building blocks. */
RAAS_API raas_status raas_solve_alpha(double gamma_hat, double gamma_prev,
                                      double alpha_prev, double theta,
                                      double vartheta, double mu, double* alpha_out);
RAAS_API double raas_auxiliary_step(double gamma, double alpha, double theta,
                                    double vartheta);

#ifdef __cplusplus
}
#endif

#endif /* RAAS_C_H */
