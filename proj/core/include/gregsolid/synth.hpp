#pragma once

#include <string>
#include <vector>

#include "gregsolid/boundary.hpp"
#include "gregsolid/domain.hpp"

namespace gregsolid {

/// A generated desk-scale test model: a catalog domain shape plus one
/// boundary-patch descriptor per face.
struct SynthModel {
    std::string name;
    std::string units = "mm";
    std::string domain_shape;
    std::vector<PatchDescriptor> patches;
};

/// Built-in model family:
///   - "cube": identity boundary on the unit hexahedron.
///   - "twisted_prism": triangular prism with the top face rotated by
///     `magnitude` radians and a linear twist through the side walls.
///   - "bulged_pentaprism": pentagonal prism whose top cap carries a raised
///     cosine bump of amplitude `magnitude`.
/// Throws ArgumentError for an unknown kind or negative magnitude.
SynthModel synth_model(const std::string& kind, double magnitude);

}  // namespace gregsolid
