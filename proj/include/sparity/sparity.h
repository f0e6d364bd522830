// Copyright 2026 The sparity Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


/* C interface to the sparity library. Every call returns an sp_status;
 * on failure sp_last_error() describes the problem (per thread). Strings
 * returned through char** are owned by the caller and released with
 * sp_string_free. Requests and reports are JSON documents; requests may
 * also be written as "key = value" lines. */

#ifndef SPARITY_SPARITY_H_
#define SPARITY_SPARITY_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SP_API __declspec(dllexport)
#else
#define SP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sp_status {
  SP_OK = 0,
  SP_ERR_INVALID_ARGUMENT = 1,
  SP_ERR_SCALE_GUARD = 2,
  SP_ERR_CONFIG = 3,
  SP_ERR_IO = 4,
  SP_ERR_INFEASIBLE = 5,
  SP_ERR_INTERNAL = 99
} sp_status;

SP_API const char* sp_version(void);
SP_API const char* sp_status_name(sp_status status);
/* Message of the last failed call on this thread; "" after a success. */
SP_API const char* sp_last_error(void);
SP_API void sp_string_free(char* text);

/* Network parameters. */
typedef struct sp_params sp_params;

/* scheme_json: {"variant": "uniform" | "oversparse" | "undersparse",
 * "s", "eps_init", "bias_grid", "second_layer", "symmetric_pairing"}. */
SP_API sp_status sp_params_init(const char* scheme_json, int width, int n,
                                uint64_t seed, sp_params** out);
SP_API sp_status sp_params_shape(const sp_params* params, int* width, int* n);
/* x holds n entries. */
SP_API sp_status sp_params_forward(const sp_params* params, const double* x,
                                   size_t len, double* out);
SP_API sp_status sp_params_to_json(const sp_params* params, char** out);
SP_API void sp_params_free(sp_params* params);

/* Labelled samples of a parity. */
typedef struct sp_dataset sp_dataset;

SP_API sp_status sp_dataset_generate(int n, const int* support, size_t k,
                                     size_t m, uint64_t seed,
                                     sp_dataset** out);
SP_API sp_status sp_dataset_full_cube(int n, const int* support, size_t k,
                                      sp_dataset** out);
SP_API sp_status sp_dataset_shape(const sp_dataset* data, size_t* rows,
                                  int* n);
/* Copies row `row` into x (n entries) and its label into y. */
SP_API sp_status sp_dataset_row(const sp_dataset* data, size_t row, double* x,
                                double* y);
/* Fraction of rows with sign(output) != label (output 0 counts as -1). */
SP_API sp_status sp_params_error(const sp_params* params,
                                 const sp_dataset* data, double* out);
SP_API void sp_dataset_free(sp_dataset* data);

/* Grid sweeps. */
typedef struct sp_sweep sp_sweep;

/* workers = 0 reads SPARITY_WORKERS, else uses the hardware concurrency. */
SP_API sp_status sp_sweep_run(const char* config_text, int workers,
                              sp_sweep** out);
/* Loads a results CSV; cells are recomputed from its rows. */
SP_API sp_status sp_sweep_load_csv(const char* path, sp_sweep** out);
SP_API sp_status sp_sweep_counts(const sp_sweep* sweep, size_t* cells,
                                 size_t* records);
/* {"cells", "frontier"}; frontier is null when the grid is too small. */
SP_API sp_status sp_sweep_summary_json(const sp_sweep* sweep, char** out);
/* {"cells", "records"} */
SP_API sp_status sp_sweep_to_json(const sp_sweep* sweep, char** out);
/* format: "csv" or "json". Writes results.<format> under dir and returns
 * the path through path_out (may be NULL). */
SP_API sp_status sp_sweep_emit(const sp_sweep* sweep, const char* format,
                               const char* dir, const char* manifest_json,
                               char** path_out);
SP_API void sp_sweep_free(sp_sweep* sweep);

/* Runs a subcommand: "fourier", "popgrad", "train", "lottery", "sqcheck",
 * "theory-oversparse" or "theory-undersparse". */
SP_API sp_status sp_run_command(const char* name, const char* request,
                                char** report_json);

/* Converts a JSON or "key = value" request into canonical JSON text. */
SP_API sp_status sp_parse_document(const char* text, char** json_out);

/* Validates a sweep document and returns it with every default filled. */
SP_API sp_status sp_parse_config(const char* text, char** canonical_json);

/* {"subcommand", "version", "seed", "config", "outputs"} */
SP_API sp_status sp_manifest_json(const char* subcommand,
                                  const char* config_json, uint64_t seed,
                                  const char* outputs_json, char** out);

/* records_json: an array of run records. */
SP_API sp_status sp_write_records_csv(const char* records_json,
                                      const char* manifest_json,
                                      const char* path);
SP_API sp_status sp_write_traces_csv(const char* records_json,
                                     const char* manifest_json,
                                     const char* path);
/* Writes a JSON report object with the manifest stored under "manifest". */
SP_API sp_status sp_write_report(const char* path, const char* report_json,
                                 const char* manifest_json);

#ifdef __cplusplus
}
#endif

#endif /* SPARITY_SPARITY_H_ */
