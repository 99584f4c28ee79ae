#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kmk/base.hpp"

namespace kmk {

// Darts are directed edge sides. Dart 2e points at the head of edge e
// (forward dart), dart 2e+1 points at the tail (reverse dart). The face of a
// dart is the face on the left of travel along it, so the left face of edge e
// is face(fwd_dart(e)) and the right face is face(rev_dart(e)).
using Dart = int;
inline int edge_of(Dart d) { return d >> 1; }
inline bool is_rev(Dart d) { return (d & 1) != 0; }
inline Dart fwd_dart(int e) { return 2 * e; }
inline Dart rev_dart(int e) { return 2 * e + 1; }
inline Dart alpha(Dart d) { return d ^ 1; } // the opposite dart of the same edge

enum class Turn : int { ccw = +1, cw = -1 };

struct Component {
  std::vector<int> edges; // cyclic, in orientation order
  bool circle = false;    // zero-crossing component; then edges.size() == 1
  Turn turn = Turn::ccw;  // meaningful for circles only
};

// A crossing stores its four incident incoming darts in counterclockwise
// plane order. Slot 0 is the incoming under dart; slot 2 is the reverse dart
// of the under-out edge; slots 1 and 3 hold the over strand. The sign is +1
// iff the over strand enters at slot 1 (the ccw successor of under-in),
// which equals sign det(under direction, over direction) with the frame at
// angles 270/0/90/180.
struct Crossing {
  std::array<Dart, 4> rot{-1, -1, -1, -1};
};

struct Face {
  int piece = -1;
  std::vector<Dart> bnd; // boundary darts in traversal order, face on the left
};

// Placement of a non-root connected piece. `at` is a witness dart in another
// piece: the region next to that dart side hosts this piece. `outer` is a
// witness dart inside this piece naming its own unbounded face (-1 for circle
// pieces, where the turn determines it, or to request the default rule).
struct PiecePlace {
  int min_comp = -1; // identifies the piece by its smallest component id
  Dart at = -1;
  Dart outer = -1;
};

struct Violation {
  std::string what;
};

class Diagram {
public:
  // primary data ------------------------------------------------------------
  std::vector<Component> comps;
  std::vector<int> edge_comp; // edge -> component
  std::vector<Crossing> xings;
  Dart outer_witness = -1; // global outer-face witness; -1 = default rule
  std::vector<PiecePlace> places;

  // derived data (filled by rebuild) ----------------------------------------
  struct Incid {
    int xing = -1;
    int slot = -1;
  };
  std::vector<Incid> incid;    // per dart
  std::vector<int> edge_pos;   // edge -> index within its component cycle
  std::vector<int> comp_piece; // component -> piece
  int npieces = 0;
  std::vector<std::vector<int>> piece_comps;
  std::vector<Face> faces;
  std::vector<int> dart_face;
  std::vector<int> piece_outer;           // piece -> face id of its unbounded face
  std::vector<std::vector<int>> host;     // host[a][b]: face of piece b containing piece a
  std::vector<int> encl;                  // piece -> innermost enclosing piece, -1 if top-level
  std::vector<std::vector<int>> findex;   // findex[face][comp]: index, valid when comp is in face's piece

  // queries ------------------------------------------------------------------
  int nedges() const { return static_cast<int>(edge_comp.size()); }
  int ncomps() const { return static_cast<int>(comps.size()); }
  int nxings() const { return static_cast<int>(xings.size()); }
  int succ_edge(int e) const {
    const Component& c = comps[edge_comp[e]];
    return c.edges[(edge_pos[e] + 1) % c.edges.size()];
  }
  int pred_edge(int e) const {
    const Component& c = comps[edge_comp[e]];
    return c.edges[(edge_pos[e] + c.edges.size() - 1) % c.edges.size()];
  }
  int head_xing(int e) const { return incid[fwd_dart(e)].xing; }
  int tail_xing(int e) const { return incid[rev_dart(e)].xing; }
  int edge_piece(int e) const { return comp_piece[edge_comp[e]]; }
  int dart_piece(Dart d) const { return edge_piece(edge_of(d)); }

  int sign(int x) const { return is_rev(xings[x].rot[1]) ? -1 : +1; }
  // the two components through a crossing (under, over); equal for self-crossings
  std::pair<int, int> xing_comps(int x) const {
    return {edge_comp[edge_of(xings[x].rot[0])], edge_comp[edge_of(xings[x].rot[1])]};
  }
  bool self_crossing(int x) const {
    auto [u, o] = xing_comps(x);
    return u == o;
  }

  // face traversal: successor of d around its face = alpha(rot[slot(d)-1])
  Dart face_next(Dart d) const {
    const Incid& in = incid[d];
    if (in.xing < 0) return d; // circle edge: one-dart face
    return alpha(xings[in.xing].rot[(in.slot + 3) & 3]);
  }
  // the face in the angular sector between germ rays slot and slot+1
  int sector_face(int x, int slot) const { return dart_face[alpha(xings[x].rot[slot])]; }

  // default witness: left side of the globally smallest edge label, except
  // that a ccw circle's outer face is its right side
  Dart default_outer_dart() const {
    const Component& c0 = comps[0];
    int e = c0.edges[0];
    return (c0.circle && c0.turn == Turn::ccw) ? rev_dart(e) : fwd_dart(e);
  }

  // root piece (owner of the global outer witness)
  int root_piece() const { return dart_piece(outer_witness); }
  int piece_min_comp(int p) const { return piece_comps[p].front(); }

  // validation / derivation ---------------------------------------------------
  std::vector<Violation> validate() const; // never throws on bad data
  void rebuild();                          // throws DomainError when invalid

  // region of the plane next to dart d: identified as (piece, face)
  std::pair<int, int> region_at(Dart d) const { return {dart_piece(d), dart_face[d]}; }
  // true if darts a and b border a common region of the full arrangement
  bool same_region(Dart a, Dart b) const;
  // all boundary darts of the region (piece,face): the face's own boundary
  // plus the outer boundaries of pieces floating directly in it
  std::vector<Dart> region_boundary(int piece, int face) const;
  // true if some piece floats directly in region (piece, face)
  bool region_occupied(int piece, int face) const;

  // index of the region next to dart d with respect to component comp
  int ind_at_dart(Dart d, int comp) const;
  // common index of the four sectors around crossing x w.r.t. comp (which
  // must not pass through x)
  int ind_at_crossing(int x, int comp) const;
  // mean of left/right indices of the over (resp. under) strand at crossing x
  // w.r.t. that strand's own component; x must join two distinct components
  double half_index_over(int x) const;
  double half_index_under(int x) const;
  // mean of the two side indices of edge e w.r.t. comp
  double half_index_at_edge(int e, int comp) const;

  // turning direction of an embedded closed walk through this diagram.
  // `walk` lists forward darts of consecutive edges; `passages` gives, for
  // every crossing the walk goes through, the pair (arrive slot, depart
  // slot). Edges not on the walk and unused germ rays are treated as erased.
  int embedded_walk_turn(const std::vector<Dart>& walk,
                         const std::map<int, std::pair<int, int>>& passages) const;

  // ODC-style label helpers (1-based component.index)
  std::string edge_label(int e) const {
    return std::to_string(edge_comp[e] + 1) + "." + std::to_string(edge_pos[e] + 1);
  }
  std::string dart_label(Dart d) const { return edge_label(edge_of(d)) + (is_rev(d) ? ":R" : ":L"); }
};

// Crossing removal plan: connections are (arrive dart, depart dart) pairs,
// where arrive is the fwd dart of the incoming edge and depart is the rev
// dart of the outgoing edge at a removed crossing.
struct RemovalPlan {
  std::vector<int> removed_xings;
  std::vector<std::pair<Dart, Dart>> connections;
  std::vector<int> deleted_edges; // removed outright (their arcs retract)
  std::vector<int> deleted_comps; // whole components dropped (restrict)
  // Turn to use when the given old component collapses to a bare circle.
  // Needed when the pre-removal walk is not embedded (backward moves, where
  // the turning number is known to be preserved instead).
  std::map<int, Turn> comp_circle_turn;
};

struct RemovalResult {
  Diagram d;                     // not yet rebuilt; placements/outer unresolved
  std::vector<int> edge_map;     // old edge -> new edge (-1 if gone)
  std::vector<int> comp_map;     // old comp -> new comp (-1 if gone)
  std::vector<int> xing_map;     // old xing -> new xing (-1 if removed)
  std::vector<int> circle_comps; // new comps that became bare circles (turn already set)
};

// Core splice machinery shared by backward moves, smoothing and restrict.
// Turns of newly created bare circles are computed from the pre-removal
// embedding. Does not touch outer/placement designations.
RemovalResult remove_crossings(const Diagram& d, const RemovalPlan& plan);

} // namespace kmk
