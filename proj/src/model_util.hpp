#pragma once

#include <optional>
#include <string>
#include <vector>

#include "folspec/complex.hpp"

namespace folspec::detail {

void require_truncation(int n);

// Sector whose generators each carry one copy of a scalar basis: column
// (g, j) has the j-th basis function in frame component g and zero elsewhere.
SectorBasis generator_sector(const Mat& scalar_values,
                             std::vector<std::string> generators);

// [[0, -I], [I, 0]] on a two-family degree-1 sector: the transverse star of
// an oriented orthonormal coframe.
Mat rotation_star(Eigen::Index m);

void attach_weight(ReducedBasicComplex& c, const std::optional<WeightLiteral>& phi);

// kappa_b from its node values: stores values, projected coefficients, tail.
void attach_kappa(ReducedBasicComplex& c, const Vec& values);

void finish(ReducedBasicComplex& c);

}  // namespace folspec::detail
