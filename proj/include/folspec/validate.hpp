#pragma once

#include "folspec/lab.hpp"

namespace folspec {

/// Structural identity suite for one model: squares of the differentials,
/// the star sign law, weighted adjointness, Dirac symmetry, the duality
/// intertwining, conjugation transport, and the signature split where the
/// codimension is even.
ExperimentResult run_validation_suite(const ModelDescriptor& desc);

/// The suite across every registry model.
ExperimentResult run_validation_suite();

}  // namespace folspec
