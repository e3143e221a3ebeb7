// Copyright 2026 The fairgsp Authors
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

#ifndef FAIRGSP_FAIRGSP_H_
#define FAIRGSP_FAIRGSP_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(FAIRGSP_BUILDING_LIBRARY)
#define FAIRGSP_API __declspec(dllexport)
#else
#define FAIRGSP_API __declspec(dllimport)
#endif
#else
#define FAIRGSP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every call returning int returns one of these. */
enum {
  FG_OK = 0,
  FG_ERR_INVALID_ARGUMENT = 1,
  FG_ERR_OUT_OF_RANGE = 2,
  FG_ERR_DEGENERATE = 3,
  FG_ERR_VALIDATION = 4,
  FG_ERR_PARSE = 5,
  FG_ERR_NOT_FOUND = 6,
  FG_ERR_IO = 7,
  FG_ERR_RUNTIME = 8,
  FG_ERR_BUFFER_TOO_SMALL = 9
};

typedef struct fg_config fg_config;
typedef struct fg_instance fg_instance;

FAIRGSP_API const char* fg_version(void);

/* Message of the last failed call on this thread; "" after a success. */
FAIRGSP_API const char* fg_last_error(void);

/* Experiment configs. */
FAIRGSP_API int fg_config_load(const char* path, fg_config** out);
FAIRGSP_API int fg_config_parse(const char* json_text, const char* base_dir, fg_config** out);
FAIRGSP_API void fg_config_destroy(fg_config* cfg);
FAIRGSP_API int fg_config_set_seed(fg_config* cfg, uint64_t seed);
FAIRGSP_API int fg_config_set_output(fg_config* cfg, const char* dir);
/* "gsp", "beta-fair" or "gsp-efx". */
FAIRGSP_API int fg_config_set_mechanism(fg_config* cfg, const char* mechanism);
FAIRGSP_API int fg_config_set_threads(fg_config* cfg, size_t threads);
FAIRGSP_API int fg_config_validate(const fg_config* cfg);
/* Normalized config as JSON. Writes at most cap bytes including the NUL;
   *needed receives the full size. Returns FG_ERR_BUFFER_TOO_SMALL when
   cap < *needed. buf may be NULL when cap is 0. */
FAIRGSP_API int fg_config_normalized(const fg_config* cfg, char* buf, size_t cap, size_t* needed);
/* Runs the experiment and writes its output directory. */
FAIRGSP_API int fg_experiment_run(const fg_config* cfg, size_t* runs_written);

/* A single auction market: n bidders and n slots. groups[i] is 0 for h and
   1 for l. Every bidder gets `grid` as both type and bid grid. */
FAIRGSP_API int fg_instance_create(size_t n, const int* groups, const double* ctr_h,
                                   const double* ctr_l, double gamma_h, double gamma_l,
                                   const double* grid, size_t grid_len, fg_instance** out);
FAIRGSP_API void fg_instance_destroy(fg_instance* inst);
FAIRGSP_API size_t fg_instance_size(const fg_instance* inst);

/* One mechanism run on a bid profile. slot_of receives 0-based final slots;
   payments the final prices; compensation (may be NULL) p^G - p^C.
   xi_h and xi_l are ignored for "gsp". */
FAIRGSP_API int fg_run_mechanism(const fg_instance* inst, const char* mechanism, int xi_h,
                                 int xi_l, const double* bids, size_t* slot_of,
                                 double* payments, double* compensation);

/* Realized utilities under the mechanism's final outcome. */
FAIRGSP_API int fg_utilities(const fg_instance* inst, const char* mechanism, int xi_h, int xi_l,
                             const double* bids, const double* values, double* utilities);

#ifdef __cplusplus
}
#endif

#endif /* FAIRGSP_FAIRGSP_H_ */
