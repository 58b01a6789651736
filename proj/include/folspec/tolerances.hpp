#pragma once

// Default numerical gates.  All are relative: callers scale them by the
// operator norms indicated at the call site.  Experiments may override the
// scientific ones; the structural ones are fixed.

namespace folspec::tol {

inline constexpr double square = 1e-12;            // d*d etc., times ||op||^2
inline constexpr double closed = 1e-12;            // d applied to kappa_b
inline constexpr double adjoint = 1e-10;           // Gram adjointness defect
inline constexpr double intertwine = 1e-10;        // star/codifferential swaps
inline constexpr double symmetry = 1e-10;          // weighted symmetry defect
inline constexpr double anticommute = 1e-10;       // signature involution
inline constexpr double conjugation = 1e-9;        // U^-1 D' U vs D
inline constexpr double invariance_rel = 1e-8;     // spectrum comparison
inline constexpr double negative_margin = 1e-3;    // control must miss by this
inline constexpr double estimate_slack = 1e-9;     // lower-bound slack floor
inline constexpr double kernel = 1e-8;             // times max(lambda_max, 1)
inline constexpr double cluster = 1e-6;            // times max(1, |lambda|)
inline constexpr double gram_condition = 1e12;     // refuse beyond this
inline constexpr double oracle_exact = 1e-12;      // closed-form comparisons
inline constexpr double oracle_loose = 1e-10;

inline constexpr int dense_limit = 4000;           // iterative path above this
inline constexpr int quadrature_factor = 3;        // collocation oversampling
inline constexpr int dealias_buffer = 16;          // extra circle modes for
                                                   // conjugation checks

}  // namespace folspec::tol
