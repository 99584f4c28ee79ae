#pragma once

#include <string>

#include "kmk/diagram.hpp"

namespace kmk {

// Canonical form of a diagram as a decorated planar map with outer-face
// designation and piece arrangement. Equal keys <=> isomorphic plane
// diagrams (relabeling of crossings, edges and components allowed; the
// plane embedding, over/under decoration, orientations and component
// partition all matter). With sphere = true the designation of the
// unbounded region is quotiented out.
std::string canonical_key(const Diagram& d, bool sphere = false);

} // namespace kmk
