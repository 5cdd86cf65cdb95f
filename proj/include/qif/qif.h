/*
 * Copyright 2026 The QIF Toolkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to the QIF toolkit.
 *
 * Every function returns a qif_status. On failure the message is available
 * from qif_last_error() on the calling thread until the next call. Objects
 * are opaque handles released with their matching *_free function; passing
 * NULL to a *_free function is a no-op.
 */
#ifndef QIF_QIF_H
#define QIF_QIF_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(QIF_BUILDING_LIBRARY)
#define QIF_API __declspec(dllexport)
#else
#define QIF_API __declspec(dllimport)
#endif
#else
#define QIF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  QIF_OK = 0,
  QIF_ERR_INTERNAL = 1,
  QIF_ERR_INVALID = 2,   /* invalid config or argument */
  QIF_ERR_NUMERICAL = 3  /* singular fields, non-finite results */
} qif_status;

typedef enum { QIF_FORMAT_CSV = 0, QIF_FORMAT_JSON = 1 } qif_format;

typedef struct qif_buffer qif_buffer;
typedef struct qif_filter qif_filter;
typedef struct qif_fields qif_fields;
typedef struct qif_table qif_table;

typedef struct {
  int threads;       /* <= 0 selects the hardware concurrency */
  int has_seed;      /* nonzero: seed overrides the config */
  uint64_t seed;
  qif_format format;
} qif_options;

QIF_API const char* qif_version(void);
QIF_API const char* qif_last_error(void);
QIF_API void qif_options_init(qif_options* opt);

/* Owned text result. */
QIF_API const char* qif_buffer_data(const qif_buffer* b);
QIF_API size_t qif_buffer_size(const qif_buffer* b);
QIF_API void qif_buffer_free(qif_buffer* b);

/* Filter design from a FilterSpec JSON document. */
QIF_API qif_status qif_filter_design(const char* spec_json, qif_filter** out);
QIF_API size_t qif_filter_size(const qif_filter* f);
QIF_API double qif_filter_dt(const qif_filter* f);
QIF_API qif_status qif_filter_samples(const qif_filter* f, double* out, size_t n);
/* |F(f)| of the kernel about its midpoint at n frequencies (MHz). */
QIF_API qif_status qif_filter_magnitude(const qif_filter* f, const double* freq_mhz, double* out, size_t n);
QIF_API void qif_filter_free(qif_filter* f);

/* Control fields; mode is "exact_arcsin" or "simplified" (NULL: exact). */
QIF_API qif_status qif_fields_from_filter(const qif_filter* f, const char* mode, qif_fields** out);
QIF_API size_t qif_fields_size(const qif_fields* c);
QIF_API double qif_fields_dt(const qif_fields* c);
QIF_API qif_status qif_fields_epsilon(const qif_fields* c, double* out, size_t n);
QIF_API qif_status qif_fields_delta(const qif_fields* c, double* out, size_t n);
/* Noise- and signal-free propagation from |0>; writes <sigma_z(t_f)>. */
QIF_API qif_status qif_fields_closure(const qif_fields* c, double dt_us, double* sz);
QIF_API void qif_fields_free(qif_fields* c);

/* Sweeps. experiment may be NULL when the config names it. */
QIF_API qif_status qif_sweep_run(const char* config_json, const char* experiment, const qif_options* opt,
                                 qif_table** out);
QIF_API qif_status qif_table_from_csv(const char* csv, qif_table** out);
QIF_API size_t qif_table_rows(const qif_table* t);
QIF_API size_t qif_table_cols(const qif_table* t);
QIF_API qif_status qif_table_render(const qif_table* t, qif_format format, qif_buffer** out);
/* kind is "line" or "heatmap". */
QIF_API qif_status qif_table_plot_svg(const qif_table* t, const char* kind, qif_buffer** out);
QIF_API void qif_table_free(qif_table* t);

/* Single-run commands: "design", "fields", "simulate", "cpmg",
 * "export-waveform". The result is rendered in opt->format where it applies. */
QIF_API qif_status qif_command_run(const char* command, const char* config_json, const qif_options* opt,
                                   qif_buffer** out);

#ifdef __cplusplus
}
#endif

#endif /* QIF_QIF_H */
