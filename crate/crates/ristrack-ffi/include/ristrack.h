#ifndef RISTRACK_H
#define RISTRACK_H

/* Generated by cbindgen from the ristrack-ffi crate; do not edit by hand. */

#include <stdint.h>
#include <stddef.h>
#include <stdbool.h>

// Incident-model selector for [`rt_codebook_generate`].
typedef enum RtIncidentKind {
  // Boresight feed at `d_feed_m`; spherical wavefront.
  RtIncidentNear = 0,
  // Plane wave from (`theta_tx_deg`, `phi_tx_deg`).
  RtIncidentFar = 1,
} RtIncidentKind;

// Status code of every fallible call.
typedef enum RtStatus {
  RtOk = 0,
  // A required pointer argument was null.
  RtNullArgument = 1,
  // Arguments failed validation (ranges, sizes, unknown names).
  RtInvalidArgument = 2,
  // The computation rejected the inputs (domain error).
  RtDomainError = 3,
  // A file or frame failed to parse.
  RtParseError = 4,
  // Filesystem failure.
  RtIoError = 5,
  // The caller buffer is too small; nothing was written.
  RtBufferTooSmall = 6,
} RtStatus;

// Opaque codebook handle; create with `rt_codebook_generate` or
// `rt_codebook_load`, release with `rt_codebook_free`.
typedef struct RtCodebook RtCodebook;

// Incident-wave description; the fields not selected by `kind` are ignored.
typedef struct RtIncident {
  enum RtIncidentKind kind;
  double d_feed_m;
  double theta_tx_deg;
  double phi_tx_deg;
} RtIncident;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copy the last error message of this thread into `buf` (NUL-terminated).
// Returns the number of bytes written including the terminator, or the
// required size when `buf` is null or too small.
//
// # Safety
// `buf` must be null or valid for `cap` bytes.
uintptr_t rt_last_error(char *buf, uintptr_t cap);

// Library version as a static NUL-terminated string.
const char *rt_version(void);

// Synthesize a codebook over a pitch/azimuth lattice (degrees).
//
// # Safety
// `incident`, the two axis arrays, and `out` must be valid for the given
// lengths; `out` receives an owned handle on success.
enum RtStatus rt_codebook_generate(uint32_t rows,
                                   uint32_t cols,
                                   double spacing_over_lambda,
                                   double freq_hz,
                                   const struct RtIncident *incident,
                                   const double *theta_deg,
                                   uintptr_t theta_len,
                                   const double *phi_deg,
                                   uintptr_t phi_len,
                                   struct RtCodebook **out);

// Load a codebook file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be valid.
enum RtStatus rt_codebook_load(const char *path, struct RtCodebook **out);

// Write a codebook file.
//
// # Safety
// `book` must be a live handle; `path` a NUL-terminated string.
enum RtStatus rt_codebook_save(const struct RtCodebook *book, const char *path);

// Number of entries, or 0 for a null handle.
//
// # Safety
// `book` must be null or a live handle.
uintptr_t rt_codebook_len(const struct RtCodebook *book);

// Panel dimensions of the codebook.
//
// # Safety
// All pointers must be valid.
enum RtStatus rt_codebook_dims(const struct RtCodebook *book,
                               uintptr_t *out_rows,
                               uintptr_t *out_cols);

// Index of the entry nearest to a direction (degrees), great-circle
// metric, ties to the lower index.
//
// # Safety
// `book` and `out_index` must be valid.
enum RtStatus rt_codebook_nearest(const struct RtCodebook *book,
                                  double theta_deg,
                                  double phi_deg,
                                  uintptr_t *out_index);

// Desired direction of an entry, in degrees.
//
// # Safety
// All pointers must be valid.
enum RtStatus rt_codebook_entry_desired(const struct RtCodebook *book,
                                        uintptr_t index,
                                        double *out_theta_deg,
                                        double *out_phi_deg);

// Copy an entry's bits row-major into `out_bits` as 0/1 bytes.
// `out_written` receives rows*cols.
//
// # Safety
// `out_bits` must be valid for `cap` bytes.
enum RtStatus rt_codebook_entry_bits(const struct RtCodebook *book,
                                     uintptr_t index,
                                     uint8_t *out_bits,
                                     uintptr_t cap,
                                     uintptr_t *out_written);

// Release a codebook handle; a null pointer is a no-op.
//
// # Safety
// `book` must be null or a handle obtained from this library, not yet
// freed.
void rt_codebook_free(struct RtCodebook *book);

// Peak-normalized azimuth cut of one entry at fixed pitch: fills
// `out_gain_db` (one value per `phi_deg` sample, 0 dB at the cut peak).
//
// # Safety
// `phi_deg` and `out_gain_db` must be valid for `len` values.
enum RtStatus rt_pattern_gain_db(const struct RtCodebook *book,
                                 uintptr_t index,
                                 double theta_deg,
                                 const double *phi_deg,
                                 uintptr_t len,
                                 double *out_gain_db);

// Encode a control frame. Opcodes: 1 index, 2 dynamic, 3 download.
//
// # Safety
// `payload` must be valid for `payload_len` bytes, `out` for `cap`.
enum RtStatus rt_frame_encode(uint8_t opcode,
                              const uint8_t *payload,
                              uintptr_t payload_len,
                              uint8_t *out,
                              uintptr_t cap,
                              uintptr_t *out_written);

// Decode and verify a control frame; fills the opcode byte and copies the
// payload.
//
// # Safety
// `bytes` must be valid for `len`, `out_payload` for `cap`.
enum RtStatus rt_frame_decode(const uint8_t *bytes,
                              uintptr_t len,
                              uint8_t *out_opcode,
                              uint8_t *out_payload,
                              uintptr_t cap,
                              uintptr_t *out_written);

// Run a scenario described by the JSON config schema of the CLI and write
// the per-tick trace CSV to `csv_path`.
//
// # Safety
// Both strings must be NUL-terminated.
enum RtStatus rt_simulate_csv(const char *config_json, const char *csv_path);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* RISTRACK_H */
