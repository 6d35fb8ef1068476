#ifndef FOCKFLOW_H
#define FOCKFLOW_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum FfStatus {
  FF_STATUS_OK = 0,
  FF_STATUS_NULL_ARGUMENT = 1,
  FF_STATUS_INVALID_UTF8 = 2,
  FF_STATUS_INVALID_ARGUMENT = 3,
  FF_STATUS_DATA = 4,
  FF_STATUS_NO_PROOF = 5,
  FF_STATUS_OUT_OF_RANGE = 6,
  FF_STATUS_INTERNAL = 7,
  FF_STATUS_PANIC = 8,
} FfStatus;

/**
 * A compiled parameterized circuit.
 */
typedef struct FfCircuit FfCircuit;

/**
 * The entries of a generated or loaded dataset.
 */
typedef struct FfDataset FfDataset;

/**
 * A lexicon with its storage bound.
 */
typedef struct FfLexicon FfLexicon;

/**
 * A proved discourse with its diagram.
 */
typedef struct FfProof FfProof;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *ff_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ff_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void ff_string_free(char *s);

/**
 * The bundled lexicon with storage bound `k0`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum FfStatus ff_lexicon_builtin(uintptr_t k0, struct FfLexicon **out);

/**
 * Parses lexicon text (`word<TAB>type[<TAB>copula]` per line).
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FfStatus ff_lexicon_parse(const char *text, uintptr_t k0, struct FfLexicon **out);

/**
 * # Safety
 * `lex` must be null or a handle from this library, not yet freed.
 */
void ff_lexicon_free(struct FfLexicon *lex);

/**
 * Proves a discourse; sentences end with '.'.
 *
 * # Safety
 * `lex` must be a live handle, `text` a NUL-terminated string and `out` a
 * valid pointer.
 */
enum FfStatus ff_prove(const struct FfLexicon *lex,
                       const char *text,
                       uintptr_t depth,
                       struct FfProof **out);

/**
 * Proof, sequent and diagram as one JSON document.
 *
 * # Safety
 * `proof` must be a live handle and `out` a valid pointer.
 */
enum FfStatus ff_proof_json(const struct FfProof *proof, char **out);

/**
 * Number of boxes in the proof's diagram, or `Data` when the proof has no
 * diagram.
 *
 * # Safety
 * `proof` must be a live handle and `out` a valid pointer.
 */
enum FfStatus ff_proof_box_count(const struct FfProof *proof, uintptr_t *out);

/**
 * # Safety
 * `proof` must be null or a handle from this library, not yet freed.
 */
void ff_proof_free(struct FfProof *proof);

/**
 * The 144-entry template dataset from the default vocabulary.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum FfStatus ff_dataset_generate(struct FfDataset **out);

/**
 * Loads a dataset CSV.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FfStatus ff_dataset_load(const char *path, struct FfDataset **out);

/**
 * # Safety
 * `ds` must be a live handle.
 */
uintptr_t ff_dataset_len(const struct FfDataset *ds);

/**
 * Gold label (0 subject, 1 object) of entry `index`.
 *
 * # Safety
 * `ds` must be a live handle and `out` a valid pointer.
 */
enum FfStatus ff_dataset_label(const struct FfDataset *ds, uintptr_t index, uint8_t *out);

/**
 * Surface text of entry `index`.
 *
 * # Safety
 * `ds` must be a live handle and `out` a valid pointer.
 */
enum FfStatus ff_dataset_sentence(const struct FfDataset *ds, uintptr_t index, char **out);

/**
 * # Safety
 * `ds` must be null or a handle from this library, not yet freed.
 */
void ff_dataset_free(struct FfDataset *ds);

/**
 * Builds and compiles the circuit of entry `index` under `model` (1-4) and
 * `combination` (0 spider, 1 controlled rotation) with the default ansatz.
 *
 * # Safety
 * `ds` must be a live handle and `out` a valid pointer.
 */
enum FfStatus ff_circuit_compile(const struct FfDataset *ds,
                                 uintptr_t index,
                                 uint32_t model,
                                 uint32_t combination,
                                 uintptr_t k0,
                                 struct FfCircuit **out);

/**
 * # Safety
 * `c` must be a live handle.
 */
uintptr_t ff_circuit_qubits(const struct FfCircuit *c);

/**
 * Number of parameter slots the circuit reads.
 *
 * # Safety
 * `c` must be a live handle.
 */
uintptr_t ff_circuit_slot_count(const struct FfCircuit *c);

/**
 * Name of slot `index`.
 *
 * # Safety
 * `c` must be a live handle and `out` a valid pointer.
 */
enum FfStatus ff_circuit_slot_name(const struct FfCircuit *c, uintptr_t index, char **out);

/**
 * Gate list and slots as JSON.
 *
 * # Safety
 * `c` must be a live handle and `out` a valid pointer.
 */
enum FfStatus ff_circuit_json(const struct FfCircuit *c, char **out);

/**
 * Class probabilities for angles `theta[0..len]`, one per slot in slot
 * order.
 *
 * # Safety
 * `c` must be a live handle, `theta` must point to `len` doubles and both
 * outputs must be valid pointers.
 */
enum FfStatus ff_circuit_distribution(const struct FfCircuit *c,
                                      const double *theta,
                                      uintptr_t len,
                                      double *out_l0,
                                      double *out_l1);

/**
 * # Safety
 * `c` must be null or a handle from this library, not yet freed.
 */
void ff_circuit_free(struct FfCircuit *c);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FOCKFLOW_H */
