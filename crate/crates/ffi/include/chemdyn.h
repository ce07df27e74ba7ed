#ifndef CHEMDYN_H
#define CHEMDYN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum ChemdynStatus {
  CHEMDYN_STATUS_OK = 0,
  CHEMDYN_STATUS_NULL_POINTER = 1,
  CHEMDYN_STATUS_INVALID_ARGUMENT = 2,
  CHEMDYN_STATUS_DIMENSION_MISMATCH = 3,
  CHEMDYN_STATUS_BUFFER_TOO_SMALL = 4,
  CHEMDYN_STATUS_NOT_CONVERGED = 5,
  CHEMDYN_STATUS_NUMERICAL = 6,
  CHEMDYN_STATUS_PARSE = 7,
  CHEMDYN_STATUS_IO = 8,
  CHEMDYN_STATUS_PANIC = 9,
} ChemdynStatus;

typedef enum ChemdynModelKind {
  CHEMDYN_MODEL_KIND_DOUBLE_WELL = 0,
  CHEMDYN_MODEL_KIND_HELIUM = 1,
} ChemdynModelKind;

typedef enum ChemdynMethod {
  CHEMDYN_METHOD_REAL_TIME_VQA = 0,
  CHEMDYN_METHOD_IMAG_TIME_VQA_SUBSPACE = 1,
  CHEMDYN_METHOD_GRADIENT_DESCENT_SUBSPACE = 2,
} ChemdynMethod;

/**
 * Opaque handle to a set of eigenpairs.
 */
typedef struct ChemdynEigenSet ChemdynEigenSet;

/**
 * Opaque grid handle.
 */
typedef struct ChemdynGrid ChemdynGrid;

/**
 * Opaque handle to a model: grid, Hamiltonian, dipole and pulse.
 */
typedef struct ChemdynModel ChemdynModel;

/**
 * Opaque Pauli-sum handle.
 */
typedef struct ChemdynPauliSum ChemdynPauliSum;

/**
 * Opaque spectrum handle.
 */
typedef struct ChemdynSpectrum ChemdynSpectrum;

/**
 * Opaque handle to a sampled trajectory: times (fs), dipole and populations.
 */
typedef struct ChemdynTrajectory ChemdynTrajectory;

/**
 * Circuit counts, mirroring the library's resource estimate.
 */
typedef struct ChemdynResourceEstimate {
  uint64_t metric;
  uint64_t f_kinetic;
  uint64_t f_potential;
  uint64_t energy_per_evaluation;
  uint64_t gradient_energy_evaluations;
  uint64_t total;
} ChemdynResourceEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *chemdyn_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *chemdyn_version(void);

/**
 * Kinetic matrix element for grid offset `offset`.
 *
 * # Safety
 * `out` must be a valid pointer to a `double`.
 */
enum ChemdynStatus chemdyn_kinetic_element(double mass,
                                           double spacing,
                                           int64_t offset,
                                           double *out);

/**
 * Uniform grid with `dims` axes of `points` points on `[xmin, xmax]` (bohr).
 *
 * # Safety
 * `out` must be a valid pointer; the handle is released with [`chemdyn_grid_free`].
 */
enum ChemdynStatus chemdyn_grid_new(size_t dims,
                                    size_t points,
                                    double xmin,
                                    double xmax,
                                    double mass,
                                    struct ChemdynGrid **out);

/**
 * Number of grid points `L^d`, or 0 for a null handle.
 *
 * # Safety
 * `grid` must be NULL or a live handle.
 */
size_t chemdyn_grid_size(const struct ChemdynGrid *grid);

/**
 * Coordinate of point `index` along axis `dim` (bohr).
 *
 * # Safety
 * `grid` must be a live handle and `out` a valid pointer.
 */
enum ChemdynStatus chemdyn_grid_coordinate(const struct ChemdynGrid *grid,
                                           size_t dim,
                                           size_t index,
                                           double *out);

/**
 * # Safety
 * `grid` must be NULL or a handle not yet freed.
 */
void chemdyn_grid_free(struct ChemdynGrid *grid);

/**
 * Model with its built-in default parameters.
 *
 * # Safety
 * `out` must be a valid pointer; release with [`chemdyn_model_free`].
 */
enum ChemdynStatus chemdyn_model_new(enum ChemdynModelKind kind, struct ChemdynModel **out);

/**
 * Model described by a TOML configuration string.
 *
 * # Safety
 * `toml` must be a NUL-terminated UTF-8 string and `out` a valid pointer.
 */
enum ChemdynStatus chemdyn_model_from_toml(const char *toml, struct ChemdynModel **out);

/**
 * Hilbert-space dimension of the model's grid, or 0 for a null handle.
 *
 * # Safety
 * `model` must be NULL or a live handle.
 */
size_t chemdyn_model_dim(const struct ChemdynModel *model);

/**
 * Writes the field-free Hamiltonian row-major into `out` (capacity `dim²`).
 *
 * # Safety
 * `model` must be a live handle and `out` must hold `capacity` doubles.
 */
enum ChemdynStatus chemdyn_model_hamiltonian(const struct ChemdynModel *model,
                                             double *out,
                                             size_t capacity);

/**
 * Field value (a.u.) of the model's pulse at time `t_fs`.
 *
 * # Safety
 * `model` must be a live handle and `out` a valid pointer.
 */
enum ChemdynStatus chemdyn_model_field(const struct ChemdynModel *model, double t_fs, double *out);

/**
 * # Safety
 * `model` must be NULL or a handle not yet freed.
 */
void chemdyn_model_free(struct ChemdynModel *model);

/**
 * Qubit encoding of the model's field-free Hamiltonian.
 *
 * # Safety
 * `model` must be a live handle and `out` a valid pointer; release with [`chemdyn_pauli_free`].
 */
enum ChemdynStatus chemdyn_model_encode(const struct ChemdynModel *model,
                                        struct ChemdynPauliSum **out);

/**
 * Parses the text form `coefficient LETTERS` per line.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ChemdynStatus chemdyn_pauli_parse(const char *text, struct ChemdynPauliSum **out);

/**
 * Number of terms, or 0 for a null handle.
 *
 * # Safety
 * `sum` must be NULL or a live handle.
 */
size_t chemdyn_pauli_len(const struct ChemdynPauliSum *sum);

/**
 * # Safety
 * `sum` must be NULL or a live handle.
 */
size_t chemdyn_pauli_num_qubits(const struct ChemdynPauliSum *sum);

/**
 * Writes the text form, NUL-terminated, into `buf`. `required` receives the
 * buffer size needed including the terminator, also when the buffer is too small.
 *
 * # Safety
 * `sum` must be a live handle, `buf` must hold `capacity` bytes (or be NULL
 * with `capacity` 0) and `required` must be NULL or valid.
 */
enum ChemdynStatus chemdyn_pauli_to_text(const struct ChemdynPauliSum *sum,
                                         char *buf,
                                         size_t capacity,
                                         size_t *required);

/**
 * # Safety
 * `sum` must be NULL or a handle not yet freed.
 */
void chemdyn_pauli_free(struct ChemdynPauliSum *sum);

/**
 * Lowest `count` eigenpairs of the model's field-free Hamiltonian.
 *
 * # Safety
 * `model` must be a live handle and `out` a valid pointer; release with [`chemdyn_eigenset_free`].
 */
enum ChemdynStatus chemdyn_eigensolve(const struct ChemdynModel *model,
                                      size_t count,
                                      struct ChemdynEigenSet **out);

/**
 * # Safety
 * `set` must be NULL or a live handle.
 */
size_t chemdyn_eigenset_len(const struct ChemdynEigenSet *set);

/**
 * Energies (hartree), ascending.
 *
 * # Safety
 * `set` must be a live handle and `out` must hold `capacity` doubles.
 */
enum ChemdynStatus chemdyn_eigenset_energies(const struct ChemdynEigenSet *set,
                                             double *out,
                                             size_t capacity);

/**
 * # Safety
 * `set` must be NULL or a handle not yet freed.
 */
void chemdyn_eigenset_free(struct ChemdynEigenSet *set);

/**
 * Full-grid propagation from the ground state over the model's pulse,
 * sampled every `step_fs`, with populations of the lowest `states` eigenstates.
 *
 * # Safety
 * `model` must be a live handle and `out` a valid pointer; release with [`chemdyn_trajectory_free`].
 */
enum ChemdynStatus chemdyn_propagate_exact(const struct ChemdynModel *model,
                                           double step_fs,
                                           size_t states,
                                           struct ChemdynTrajectory **out);

/**
 * Propagation in the span of `eigen`, starting in its lowest state.
 *
 * # Safety
 * `model` and `eigen` must be live handles and `out` a valid pointer.
 */
enum ChemdynStatus chemdyn_propagate_subspace(const struct ChemdynModel *model,
                                              const struct ChemdynEigenSet *eigen,
                                              double step_fs,
                                              struct ChemdynTrajectory **out);

/**
 * Number of samples, or 0 for a null handle.
 *
 * # Safety
 * `traj` must be NULL or a live handle.
 */
size_t chemdyn_trajectory_len(const struct ChemdynTrajectory *traj);

/**
 * Number of population columns, or 0 for a null handle.
 *
 * # Safety
 * `traj` must be NULL or a live handle.
 */
size_t chemdyn_trajectory_states(const struct ChemdynTrajectory *traj);

/**
 * # Safety
 * `traj` must be a live handle and `out` must hold `capacity` doubles.
 */
enum ChemdynStatus chemdyn_trajectory_times(const struct ChemdynTrajectory *traj,
                                            double *out,
                                            size_t capacity);

/**
 * # Safety
 * `traj` must be a live handle and `out` must hold `capacity` doubles.
 */
enum ChemdynStatus chemdyn_trajectory_dipole(const struct ChemdynTrajectory *traj,
                                             double *out,
                                             size_t capacity);

/**
 * Populations row-major (`len × states`).
 *
 * # Safety
 * `traj` must be a live handle and `out` must hold `capacity` doubles.
 */
enum ChemdynStatus chemdyn_trajectory_populations(const struct ChemdynTrajectory *traj,
                                                  double *out,
                                                  size_t capacity);

/**
 * # Safety
 * `traj` must be NULL or a handle not yet freed.
 */
void chemdyn_trajectory_free(struct ChemdynTrajectory *traj);

/**
 * Harmonic spectrum of a dipole trace sampled at uniform `times_au`.
 *
 * # Safety
 * `times_au` and `dipole` must each hold `len` doubles and `out` must be valid.
 */
enum ChemdynStatus chemdyn_spectrum_new(const double *times_au,
                                        const double *dipole,
                                        size_t len,
                                        double carrier_omega,
                                        size_t zero_pad,
                                        struct ChemdynSpectrum **out);

/**
 * # Safety
 * `spec` must be NULL or a live handle.
 */
size_t chemdyn_spectrum_len(const struct ChemdynSpectrum *spec);

/**
 * # Safety
 * `spec` must be a live handle and `out` must hold `capacity` doubles.
 */
enum ChemdynStatus chemdyn_spectrum_orders(const struct ChemdynSpectrum *spec,
                                           double *out,
                                           size_t capacity);

/**
 * # Safety
 * `spec` must be a live handle and `out` must hold `capacity` doubles.
 */
enum ChemdynStatus chemdyn_spectrum_intensity(const struct ChemdynSpectrum *spec,
                                              double *out,
                                              size_t capacity);

/**
 * # Safety
 * `spec` must be NULL or a handle not yet freed.
 */
void chemdyn_spectrum_free(struct ChemdynSpectrum *spec);

/**
 * Circuit counts for `n_theta` parameters on a `d`-dimensional grid of `points` per axis.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ChemdynStatus chemdyn_estimate_circuits(uint64_t n_theta,
                                             uint64_t dims,
                                             uint64_t points,
                                             enum ChemdynMethod method,
                                             struct ChemdynResourceEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHEMDYN_H */
