#pragma once

#include <string>
#include <vector>

#include "folspec/complex.hpp"

namespace folspec {

ReducedBasicComplex build_carriere_model(const Eigen::Matrix2i& monodromy,
                                         int truncation);
ReducedBasicComplex build_circle_fibration_model(
    double length, const std::optional<WeightLiteral>& log_fiber_volume,
    int truncation);
ReducedBasicComplex build_torus_base_model(
    double l1, double l2, const std::optional<WeightLiteral>& log_fiber_volume,
    int truncation);
ReducedBasicComplex build_sphere_base_model(double radius, int truncation);
ReducedBasicComplex build_hopf_de_rham_model(int truncation);
ReducedBasicComplex build_hopf_spinor_model(double radius, int truncation);

/// Build a synthetic model from a descriptor file (JSON; schema documented in
/// docs/synthetic_model_schema.md).  A positive truncation_override rebuilds
/// the same model at a different truncation.
ReducedBasicComplex load_synthetic_model(const std::string& path,
                                         int truncation_override = 0);
ReducedBasicComplex parse_synthetic_model(const std::string& json_text,
                                          const std::string& source_label,
                                          int truncation_override = 0);

/// Descriptor with the registry defaults for one model kind.
ModelDescriptor default_descriptor(ModelKind kind);

/// Dispatch on descriptor.kind.  Ignores descriptor.deformations; those are
/// applied afterwards by the deformation machinery.
ReducedBasicComplex build_model(const ModelDescriptor& descriptor);

struct ModelInfo {
  std::string name;
  int codimension = 0;
  std::string module;
  int default_truncation = 0;
  std::string summary;
};

std::vector<ModelInfo> list_models();

}  // namespace folspec
