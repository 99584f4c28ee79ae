#pragma once

#include <string>

#include "kmk/diagram.hpp"

namespace kmk {

// ODC v1: line-oriented text format for oriented link diagrams.
//
//   odc 1
//   c <k>: <m>                       threaded component k with edges k.1..k.m
//   o <k>: <ccw|cw> [at <edge>:<L|R>]  free circle, with placement if not root
//   x <id>: <a> <b> <c> <d> [over b|d] crossing; edges ccw, a = incoming under
//   outer: <edge>:<L|R>              unbounded face witness (optional)
//   place <k> at <edge>:<L|R> [outer <edge>:<L|R>]
//                                    placement of the non-root piece whose
//                                    smallest component is k
//
// '#' starts a comment. The overstrand direction at a crossing is deduced
// from the edge successor structure; an explicit `over` clause is emitted
// only for the rare codes where both readings are consistent.
Diagram parse_odc(const std::string& text);
std::string emit_odc(const Diagram& d);

} // namespace kmk
