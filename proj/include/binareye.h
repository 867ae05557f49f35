/* C API for the binareye toolchain: network compilation, bit-exact
 * simulation and the calibrated cycle/energy model, behind opaque handles.
 *
 * Every function returning int yields 0 on success and a nonzero error
 * code otherwise; be_last_error() describes the most recent failure on
 * the calling thread. Strings returned through char** are owned by the
 * caller and must be released with be_string_free().
 */
#ifndef BINAREYE_H
#define BINAREYE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define BE_OK 0
#define BE_ERROR 1

typedef struct be_net be_net;
typedef struct be_weights be_weights;
typedef struct be_program be_program;
typedef struct be_memimg be_memimg;
typedef struct be_image be_image;
typedef struct be_result be_result;

const char* be_version(void);
const char* be_last_error(void);
void be_string_free(char* s);

/* --- network descriptions ------------------------------------------- */
int be_net_parse_file(const char* path, be_net** out);
int be_net_parse_string(const char* text, be_net** out);
/* Built-in nets; currently "benchmark9". */
int be_net_builtin(const char* name, int s_mode, be_net** out);
/* Empty string when every hardware constraint holds; otherwise one
 * diagnostic per line. */
int be_net_check(const be_net* net, char** diagnostics);
int be_net_smode(const be_net* net);
void be_net_free(be_net* net);

/* --- parameters ------------------------------------------------------ */
int be_weights_random(const be_net* net, uint64_t seed, be_weights** out);
void be_weights_free(be_weights* w);

/* --- programs --------------------------------------------------------- */
int be_compile(const be_net* net, const be_weights* weights,
               be_program** program, be_memimg** image);
int be_program_assemble(const char* text, be_program** out);
int be_program_disassemble(const be_program* program, char** text);
/* Accepts either assembly text or the binary "BNRP" container. */
int be_program_load(const char* path, be_program** out);
int be_program_save(const be_program* program, const char* path, int binary);
void be_program_free(be_program* program);

/* --- weight containers ------------------------------------------------ */
int be_memimg_save(const be_memimg* image, const char* path);
int be_memimg_load(const char* path, be_memimg** out);
int be_memimg_stats(const be_memimg* image, uint64_t* weight_bytes,
                    uint64_t* fc_bytes);
void be_memimg_free(be_memimg* image);

/* --- images ------------------------------------------------------------ */
/* Raw 3,072-byte RGB or P6 PPM; *warning receives a note (or NULL). */
int be_image_load(const char* path, be_image** out, char** warning);
int be_image_random(uint64_t seed, be_image** out);
void be_image_free(be_image* image);

/* --- simulation --------------------------------------------------------- */
int be_run(const be_program* program, const be_memimg* image,
           const be_image* input, int collect_trace, be_result** out);
int be_result_label(const be_result* result); /* -1 when no FC layer ran */
size_t be_result_num_scores(const be_result* result);
int be_result_scores(const be_result* result, int64_t* scores, size_t cap);
int be_result_write_trace(const be_result* result, const char* path);
int be_result_summary(const be_result* result, char** text);
void be_result_free(be_result* result);

/* --- performance model --------------------------------------------------
 * freq_hz <= 0 selects the 6 MHz default; budget/battery/frame values
 * <= 0 select the defaults (1 mW, 810 mWh, QQVGA 160x120). */
int be_report_net(const be_net* net, double freq_hz, double budget_mw,
                  double battery_mwh, int frame_w, int frame_h, int kv_format,
                  char** text);
int be_report_trace(const char* trace_path, double freq_hz, double budget_mw,
                    double battery_mwh, int frame_w, int frame_h, int kv_format,
                    char** text);
/* Reference-network table at S = 1, 2 and 4. */
int be_bench(double freq_hz, int kv_format, char** text);

/* --- oracle equivalence -------------------------------------------------- */
int be_verify(uint64_t first_seed, int count, int inputs_per_net, int jobs,
              char** report, int* passed);

#ifdef __cplusplus
}
#endif

#endif /* BINAREYE_H */
