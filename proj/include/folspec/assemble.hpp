#pragma once

#include <utility>

#include "folspec/complex.hpp"
#include "folspec/graded_matrix.hpp"

namespace folspec {

enum class FormAction { Wedge, Contract };
enum class CodifferentialVariant { Transversal, Basic };
enum class DiracVariant { Transversal, Basic };
enum class LaplacianVariant { Basic, Twisted };

/// Exterior derivative (exact structural blocks).
GradedMatrix assemble_d(const ReducedBasicComplex& complex);

/// Transverse Hodge star (exact structural blocks, degree k -> q-k).
GradedMatrix assemble_hodge_star(const ReducedBasicComplex& complex);

/// Wedge or contraction by a one-form given through its frame components at
/// the quadrature nodes (stacked like sector-1 value tables).  Contraction is
/// the pointwise metric adjoint of wedge; both are assembled by weighted
/// projection, so the two matrices are exact Gram-adjoints of each other.
GradedMatrix assemble_form_action(const ReducedBasicComplex& complex,
                                  const Vec& oneform_values, FormAction mode,
                                  const std::string& label);

/// Same, for the complex's own mean curvature form.
GradedMatrix assemble_kappa_action(const ReducedBasicComplex& complex,
                                   FormAction mode);

/// Multiplication by a function given through its node values; degree
/// preserving, assembled by weighted projection.
GradedMatrix assemble_multiplication(const ReducedBasicComplex& complex,
                                     const Vec& function_values,
                                     const std::string& label);

/// Codifferential.  The per-degree sign of star-d-star is chosen so that the
/// basic variant is the weighted Gram adjoint of d; construction fails if no
/// sign achieves that.
GradedMatrix assemble_codifferential(const ReducedBasicComplex& complex,
                                     CodifferentialVariant variant);

/// Signs chosen for star-d-star, indexed by source degree 1..q.
std::vector<int> codifferential_signs(const ReducedBasicComplex& complex);

/// (d - half kappa wedge, its Gram adjoint).  Both square to zero.
std::pair<GradedMatrix, GradedMatrix> assemble_twisted_pair(
    const ReducedBasicComplex& complex);

GradedMatrix assemble_dirac(const ReducedBasicComplex& complex, DiracVariant variant);

GradedMatrix assemble_laplacian(const ReducedBasicComplex& complex,
                                LaplacianVariant variant);

/// d minus full kappa wedge; a differential, partner of d in the twisted
/// duality of degree k vs q-k.
GradedMatrix assemble_twisted_duality_differential(const ReducedBasicComplex& complex);

Mat gram_matrix(const ReducedBasicComplex& complex, int degree);

/// Per-degree C with C^T G C = Id; conjugating a weight-symmetric operator
/// by C yields a plainly symmetric matrix.
GradedMatrix orthonormal_change_of_basis(const ReducedBasicComplex& complex);

/// Signature package for even codimension: the complexified involution
/// i^{k(k-1)+q/2} star, its half-dimension eigenspaces, and the Dirac
/// operator restricted from the +1 to the -1 eigenspace.
struct SignatureOperator {
  GradedMatrixC involution;
  Eigen::Index dim_plus = 0, dim_minus = 0;
  MatC plus_basis, minus_basis;  // orthonormal columns spanning the eigenspaces
  MatC dirac_plus_to_minus;
};

SignatureOperator assemble_signature_operator(const ReducedBasicComplex& complex);

}  // namespace folspec
