#include "kmk/diagram.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <numeric>
#include <set>

namespace kmk {

namespace {

struct Dsu {
  std::vector<int> p;
  explicit Dsu(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

} // namespace

std::vector<Violation> Diagram::validate() const {
  std::vector<Violation> out;
  auto bad = [&](const std::string& w) { out.push_back({w}); };

  int ne = nedges();
  if (comps.empty()) {
    bad("diagram has no components");
    return out;
  }
  if (static_cast<int>(edge_comp.size()) != ne) {
    bad("edge table inconsistent");
    return out;
  }

  // component / edge bookkeeping
  std::vector<int> seen(ne, 0);
  for (int k = 0; k < ncomps(); ++k) {
    const Component& c = comps[k];
    if (c.edges.empty()) {
      bad("component " + std::to_string(k + 1) + " has no edges");
      return out;
    }
    if (c.circle && c.edges.size() != 1) bad("free circle " + std::to_string(k + 1) + " must have exactly one edge");
    for (int e : c.edges) {
      if (e < 0 || e >= ne) {
        bad("edge id out of range in component " + std::to_string(k + 1));
        return out;
      }
      seen[e]++;
      if (edge_comp[e] != k) bad("edge_comp inconsistent for edge " + std::to_string(e));
    }
  }
  for (int e = 0; e < ne; ++e)
    if (seen[e] != 1) {
      bad("edge " + std::to_string(e) + " appears " + std::to_string(seen[e]) + " times in component lists");
      return out;
    }
  if (!out.empty()) return out;

  std::vector<int> pos(ne, -1);
  for (const Component& c : comps)
    for (size_t i = 0; i < c.edges.size(); ++i) pos[c.edges[i]] = static_cast<int>(i);
  auto succ = [&](int e) {
    const Component& c = comps[edge_comp[e]];
    return c.edges[(pos[e] + 1) % c.edges.size()];
  };
  auto label = [&](int e) { return std::to_string(edge_comp[e] + 1) + "." + std::to_string(pos[e] + 1); };

  // incidences from rotations
  std::vector<Incid> inc(2 * ne);
  bool rot_ok = true;
  for (int x = 0; x < nxings(); ++x) {
    const auto& r = xings[x].rot;
    for (int s = 0; s < 4; ++s) {
      if (r[s] < 0 || r[s] >= 2 * ne) {
        bad("rotation arity: crossing " + std::to_string(x + 1) + " slot " + std::to_string(s) + " invalid");
        rot_ok = false;
        continue;
      }
      if (inc[r[s]].xing >= 0) {
        bad("dart used twice at crossing " + std::to_string(x + 1));
        rot_ok = false;
      }
      inc[r[s]] = {x, s};
    }
  }
  if (!rot_ok) return out;

  for (int x = 0; x < nxings(); ++x) {
    const auto& r = xings[x].rot;
    if (is_rev(r[0])) bad("crossing " + std::to_string(x + 1) + ": slot 0 must be the incoming under dart");
    if (!is_rev(r[2])) bad("crossing " + std::to_string(x + 1) + ": slot 2 must be the under-out reverse dart");
    int fwd_over = (is_rev(r[1]) ? 0 : 1) + (is_rev(r[3]) ? 0 : 1);
    if (fwd_over != 1) {
      bad("crossing " + std::to_string(x + 1) + ": over strand needs exactly one incoming dart");
      continue;
    }
    if (!is_rev(r[0]) && is_rev(r[2]) && edge_of(r[2]) != succ(edge_of(r[0])))
      bad("crossing " + std::to_string(x + 1) + ": understrand does not follow edge successor");
    Dart oin = is_rev(r[1]) ? r[3] : r[1];
    Dart oout = is_rev(r[1]) ? r[1] : r[3];
    if (!is_rev(oin) && is_rev(oout) && edge_of(oout) != succ(edge_of(oin)))
      bad("crossing " + std::to_string(x + 1) + ": overstrand does not follow edge successor");
  }
  if (!out.empty()) return out;

  // threaded edges meet crossings at both ends, circle edges at none
  for (int e = 0; e < ne; ++e) {
    bool circ = comps[edge_comp[e]].circle;
    bool h = inc[fwd_dart(e)].xing >= 0, t = inc[rev_dart(e)].xing >= 0;
    if (circ && (h || t)) bad("free-circle edge " + label(e) + " is incident to a crossing");
    if (!circ && (!h || !t)) bad("edge multiplicity: edge " + label(e) + " must meet crossings at both ends");
  }
  if (!out.empty()) return out;

  // strand continuity: head of e and tail of succ(e) share a crossing on
  // opposite rotation slots
  for (int e = 0; e < ne; ++e) {
    if (comps[edge_comp[e]].circle) continue;
    Incid h = inc[fwd_dart(e)];
    Incid t = inc[rev_dart(succ(e))];
    if (h.xing != t.xing || ((h.slot + 2) & 3) != t.slot) bad("strand continuity broken at edge " + label(e));
  }
  if (!out.empty()) return out;

  // pieces
  Dsu dsu(ncomps());
  for (int x = 0; x < nxings(); ++x)
    dsu.unite(edge_comp[edge_of(xings[x].rot[0])], edge_comp[edge_of(xings[x].rot[1])]);
  std::map<int, std::vector<int>> groups;
  for (int k = 0; k < ncomps(); ++k) groups[dsu.find(k)].push_back(k);

  // faces + Euler per piece
  std::vector<int> dface(2 * ne, -1);
  int nfaces = 0;
  for (Dart d0 = 0; d0 < 2 * ne; ++d0) {
    if (dface[d0] >= 0) continue;
    Dart d = d0;
    int guard = 0;
    do {
      dface[d] = nfaces;
      Incid in = inc[d];
      d = in.xing < 0 ? d : alpha(xings[in.xing].rot[(in.slot + 3) & 3]);
      if (++guard > 2 * ne + 4) {
        bad("face traversal does not close");
        return out;
      }
    } while (d != d0);
    nfaces++;
  }
  for (auto& [root, ks] : groups) {
    if (comps[ks.front()].circle) continue; // 0 vertices, 2 faces: spherical
    int eed = 0;
    std::set<int> fs, xs;
    for (int k : ks)
      for (int e : comps[k].edges) {
        eed++;
        fs.insert(dface[fwd_dart(e)]);
        fs.insert(dface[rev_dart(e)]);
        xs.insert(inc[fwd_dart(e)].xing);
      }
    if (static_cast<int>(xs.size()) - eed + static_cast<int>(fs.size()) != 2)
      bad("non-planar piece (V-E+F != 2) at component " + std::to_string(ks.front() + 1));
  }
  if (!out.empty()) return out;

  // designations
  std::vector<int> cp(ncomps());
  for (auto& [root, ks] : groups)
    for (int k : ks) cp[k] = ks.front(); // identify pieces by min comp here
  int np = static_cast<int>(groups.size());
  Dart ow = outer_witness >= 0 ? outer_witness : default_outer_dart();
  if (ow < 0 || ow >= 2 * ne) {
    bad("outer witness out of range");
    return out;
  }
  int rootpc = cp[edge_comp[edge_of(ow)]];
  {
    const Component& c = comps[edge_comp[edge_of(ow)]];
    if (c.circle && is_rev(ow) != (c.turn == Turn::ccw))
      bad("outer witness names the bounded side of a free circle");
  }
  std::map<int, int> placed;
  placed[rootpc] = 1;
  for (const PiecePlace& pl : places) {
    if (pl.min_comp < 0 || pl.min_comp >= ncomps()) {
      bad("placement names unknown component");
      return out;
    }
    if (pl.min_comp != cp[pl.min_comp]) bad("placement must reference a piece by its smallest component");
    int p = cp[pl.min_comp];
    if (p == rootpc) {
      bad("placement given for the root piece");
      continue;
    }
    if (placed.count(p)) {
      bad("piece placed twice");
      continue;
    }
    placed[p] = 1;
    if (pl.at < 0 || pl.at >= 2 * ne) {
      bad("missing placement witness for piece of component " + std::to_string(pl.min_comp + 1));
      continue;
    }
    if (cp[edge_comp[edge_of(pl.at)]] == p) bad("piece placed relative to itself");
    if (pl.outer >= 0 && cp[edge_comp[edge_of(pl.outer)]] != p) bad("piece outer witness not inside the piece");
    if (pl.outer >= 0 && comps[edge_comp[edge_of(pl.outer)]].circle) {
      const Component& c = comps[edge_comp[edge_of(pl.outer)]];
      if (is_rev(pl.outer) != (c.turn == Turn::ccw)) bad("circle outer witness names its bounded side");
    }
  }
  if (static_cast<int>(placed.size()) != np) bad("missing placement for a disconnected piece");
  if (!out.empty()) return out;

  // placement forest acyclic
  std::map<int, int> parent;
  for (const PiecePlace& pl : places) parent[cp[pl.min_comp]] = cp[edge_comp[edge_of(pl.at)]];
  for (auto [p, q] : parent) {
    int cur = p, steps = 0;
    (void)q;
    while (parent.count(cur)) {
      cur = parent[cur];
      if (++steps > np) {
        bad("placement cycle");
        return out;
      }
    }
  }
  return out;
}

void Diagram::rebuild() {
  auto viol = validate();
  if (!viol.empty()) {
    std::string msg = "invalid diagram:";
    for (const auto& v : viol) msg += " [" + v.what + "]";
    throw DomainError(msg);
  }

  int ne = nedges();
  edge_pos.assign(ne, -1);
  for (const Component& c : comps)
    for (size_t i = 0; i < c.edges.size(); ++i) edge_pos[c.edges[i]] = static_cast<int>(i);

  incid.assign(2 * ne, Incid{});
  for (int x = 0; x < nxings(); ++x)
    for (int s = 0; s < 4; ++s) incid[xings[x].rot[s]] = {x, s};

  // pieces, numbered by smallest component id
  {
    Dsu dsu(ncomps());
    for (int x = 0; x < nxings(); ++x) {
      auto [u, o] = xing_comps(x);
      dsu.unite(u, o);
    }
    std::map<int, std::vector<int>> groups;
    for (int k = 0; k < ncomps(); ++k) groups[dsu.find(k)].push_back(k);
    piece_comps.clear();
    for (auto& [root, ks] : groups) piece_comps.push_back(ks);
    std::sort(piece_comps.begin(), piece_comps.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    npieces = static_cast<int>(piece_comps.size());
    comp_piece.assign(ncomps(), -1);
    for (int p = 0; p < npieces; ++p)
      for (int k : piece_comps[p]) comp_piece[k] = p;
  }

  // faces
  faces.clear();
  dart_face.assign(2 * ne, -1);
  for (Dart d0 = 0; d0 < 2 * ne; ++d0) {
    if (dart_face[d0] >= 0) continue;
    Face f;
    f.piece = dart_piece(d0);
    Dart d = d0;
    do {
      dart_face[d] = static_cast<int>(faces.size());
      f.bnd.push_back(d);
      d = face_next(d);
    } while (d != d0);
    faces.push_back(std::move(f));
  }

  // resolve outer designations
  if (outer_witness < 0) outer_witness = default_outer_dart();
  piece_outer.assign(npieces, -1);
  piece_outer[root_piece()] = dart_face[outer_witness];
  for (const PiecePlace& pl : places) {
    int p = comp_piece[pl.min_comp];
    Dart od = pl.outer;
    if (od < 0) {
      const Component& c0 = comps[piece_min_comp(p)];
      od = c0.circle ? (c0.turn == Turn::ccw ? rev_dart(c0.edges[0]) : fwd_dart(c0.edges[0]))
                     : fwd_dart(c0.edges[0]);
    }
    piece_outer[p] = dart_face[od];
  }
  for (int p = 0; p < npieces; ++p)
    if (piece_outer[p] < 0) throw InternalError("piece outer unresolved");

  // host matrix: host[a][b] = face of piece b containing piece a
  host.assign(npieces, std::vector<int>(npieces, -1));
  {
    std::vector<int> parent(npieces, -1), pface(npieces, -1);
    for (const PiecePlace& pl : places) {
      int p = comp_piece[pl.min_comp];
      parent[p] = dart_piece(pl.at);
      pface[p] = dart_face[pl.at];
    }
    for (int a = 0; a < npieces; ++a)
      for (int b = 0; b < npieces; ++b) {
        if (a == b) continue;
        int cur = a, res = -1;
        while (true) {
          if (parent[cur] < 0) {
            res = piece_outer[b]; // chain reached the root: b does not enclose a
            break;
          }
          if (parent[cur] == b) {
            res = pface[cur];
            break;
          }
          cur = parent[cur];
        }
        host[a][b] = res;
      }
  }
  for (int a = 0; a < npieces; ++a)
    for (int b = a + 1; b < npieces; ++b)
      if (host[a][b] != piece_outer[b] && host[b][a] != piece_outer[a])
        throw DomainError("placement inconsistency: two pieces nested inside each other");

  // innermost enclosing piece
  encl.assign(npieces, -1);
  for (int a = 0; a < npieces; ++a) {
    std::vector<int> cands;
    for (int b = 0; b < npieces; ++b)
      if (b != a && host[a][b] != piece_outer[b]) cands.push_back(b);
    int best = -1;
    for (int b : cands) {
      bool inner = true;
      for (int b2 : cands)
        if (b2 != b && host[b][b2] == piece_outer[b2]) inner = false;
      if (inner) {
        if (best >= 0) throw InternalError("ambiguous enclosure");
        best = b;
      }
    }
    if (best < 0 && !cands.empty()) throw InternalError("no innermost enclosure");
    encl[a] = best;
  }

  // per-piece Alexander index tables, outer face = 0 for every component
  findex.assign(faces.size(), std::vector<int>(ncomps(), 0));
  {
    std::vector<char> done(faces.size(), 0);
    for (int p = 0; p < npieces; ++p) {
      if (done[piece_outer[p]]) throw InternalError("piece outer face shared");
      done[piece_outer[p]] = 1;
      std::vector<int> stack{piece_outer[p]};
      while (!stack.empty()) {
        int f = stack.back();
        stack.pop_back();
        for (Dart d : faces[f].bnd) {
          int e = edge_of(d);
          int other = dart_face[alpha(d)];
          std::vector<int> want = findex[f];
          // f is left of travel along d; for the forward dart the other side
          // is the edge's right side, one lower for the edge's component
          want[edge_comp[e]] += is_rev(d) ? +1 : -1;
          if (!done[other]) {
            findex[other] = want;
            done[other] = 1;
            stack.push_back(other);
          } else if (findex[other] != want) {
            throw InternalError("index closure failure");
          }
        }
      }
    }
  }
}

bool Diagram::same_region(Dart a, Dart b) const {
  int pa = dart_piece(a), pb = dart_piece(b);
  if (pa == pb) return dart_face[a] == dart_face[b];
  return host[pa][pb] == dart_face[b] && host[pb][pa] == dart_face[a];
}

bool Diagram::region_occupied(int piece, int face) const {
  if (face == piece_outer[piece]) {
    if (encl[piece] < 0) {
      for (int x = 0; x < npieces; ++x)
        if (x != piece && encl[x] < 0) return true;
      return false;
    }
    return region_occupied(encl[piece], host[piece][encl[piece]]);
  }
  for (int x = 0; x < npieces; ++x)
    if (x != piece && encl[x] == piece && host[x][piece] == face) return true;
  return false;
}

std::vector<Dart> Diagram::region_boundary(int piece, int face) const {
  if (face == piece_outer[piece]) {
    if (encl[piece] < 0) {
      std::vector<Dart> out;
      for (int x = 0; x < npieces; ++x)
        if (encl[x] < 0)
          for (Dart d : faces[piece_outer[x]].bnd) out.push_back(d);
      return out;
    }
    return region_boundary(encl[piece], host[piece][encl[piece]]);
  }
  std::vector<Dart> out = faces[face].bnd;
  for (int x = 0; x < npieces; ++x)
    if (x != piece && encl[x] == piece && host[x][piece] == face)
      for (Dart d : faces[piece_outer[x]].bnd) out.push_back(d);
  return out;
}

int Diagram::ind_at_dart(Dart d, int comp) const {
  int p = dart_piece(d), q = comp_piece[comp];
  if (p == q) return findex[dart_face[d]][comp];
  return findex[host[p][q]][comp];
}

int Diagram::ind_at_crossing(int x, int comp) const {
  auto [u, o] = xing_comps(x);
  if (comp == u || comp == o) throw DomainError("component passes through the crossing");
  int px = comp_piece[u];
  int q = comp_piece[comp];
  if (px == q) {
    int v = findex[sector_face(x, 0)][comp];
    for (int s = 1; s < 4; ++s)
      if (findex[sector_face(x, s)][comp] != v) throw InternalError("inconsistent indices around crossing");
    return v;
  }
  return findex[host[px][q]][comp];
}

double Diagram::half_index_over(int x) const {
  auto [u, o] = xing_comps(x);
  if (u == o) throw DomainError("half-index of a self-crossing is undefined here");
  int j = sign(x) > 0 ? 3 : 1; // over-out germ slot
  int left = sector_face(x, j), right = sector_face(x, (j + 3) & 3);
  return (findex[left][o] + findex[right][o]) / 2.0;
}

double Diagram::half_index_under(int x) const {
  auto [u, o] = xing_comps(x);
  if (u == o) throw DomainError("half-index of a self-crossing is undefined here");
  int left = sector_face(x, 2), right = sector_face(x, 1);
  return (findex[left][u] + findex[right][u]) / 2.0;
}

double Diagram::half_index_at_edge(int e, int comp) const {
  return (ind_at_dart(fwd_dart(e), comp) + ind_at_dart(rev_dart(e), comp)) / 2.0;
}

int Diagram::embedded_walk_turn(const std::vector<Dart>& walk,
                                const std::map<int, std::pair<int, int>>& passages) const {
  Dsu dsu(static_cast<int>(faces.size()));
  int p = dart_piece(walk.front());
  std::set<int> walk_edges;
  for (Dart d : walk) walk_edges.insert(edge_of(d));
  for (int k : piece_comps[p])
    for (int e : comps[k].edges)
      if (!walk_edges.count(e)) dsu.unite(dart_face[fwd_dart(e)], dart_face[rev_dart(e)]);
  for (auto& [x, pass] : passages)
    for (int s = 0; s < 4; ++s) {
      if (s == pass.first || s == pass.second) continue;
      dsu.unite(sector_face(x, (s + 3) & 3), sector_face(x, s));
    }
  int left = dsu.find(dart_face[walk.front()]);
  for (Dart d : walk)
    if (dsu.find(dart_face[d]) != left) throw InternalError("walk is not embedded");
  return left != dsu.find(piece_outer[p]) ? +1 : -1;
}

RemovalResult remove_crossings(const Diagram& d, const RemovalPlan& plan) {
  int ne = d.nedges();
  std::vector<char> xgone(d.nxings(), 0);
  for (int x : plan.removed_xings) xgone[x] = 1;
  std::vector<char> egone(ne, 0);
  for (int e : plan.deleted_edges) egone[e] = 1;
  for (int k : plan.deleted_comps)
    for (int e : d.comps[k].edges) egone[e] = 1;

  std::map<Dart, Dart> conn; // arriving fwd dart -> departing rev dart
  for (auto [a, b] : plan.connections) conn[a] = b;

  auto next_through = [&](int e) -> int { // -1: chain ends at a surviving crossing
    int hx = d.head_xing(e);
    if (hx < 0 || !xgone[hx]) return -1;
    auto it = conn.find(fwd_dart(e));
    if (it == conn.end()) throw InternalError("removal plan leaves a dangling edge end");
    return edge_of(it->second);
  };

  // maximal chains of surviving edges through removed crossings
  std::vector<int> chain_of(ne, -1);
  std::vector<std::vector<int>> chains;
  std::vector<char> chain_closed;
  for (int e = 0; e < ne; ++e) {
    if (egone[e] || chain_of[e] >= 0 || d.comps[d.edge_comp[e]].circle) continue;
    if (xgone[d.tail_xing(e)]) continue; // not a chain start
    std::vector<int> ch;
    int cur = e;
    while (true) {
      ch.push_back(cur);
      chain_of[cur] = static_cast<int>(chains.size());
      int nx = next_through(cur);
      if (nx < 0) break;
      cur = nx;
    }
    chains.push_back(std::move(ch));
    chain_closed.push_back(0);
  }
  for (int e = 0; e < ne; ++e) { // leftover cycles: all their crossings removed
    if (egone[e] || chain_of[e] >= 0 || d.comps[d.edge_comp[e]].circle) continue;
    std::vector<int> ch;
    int cur = e;
    do {
      ch.push_back(cur);
      chain_of[cur] = static_cast<int>(chains.size());
      cur = next_through(cur);
      if (cur < 0) throw InternalError("open chain discovered from the middle");
    } while (cur != e);
    chains.push_back(std::move(ch));
    chain_closed.push_back(1);
  }

  // new edge ids: chains and surviving circle edges by smallest old edge
  struct NewEdge {
    int key;
    int chain;    // -1 for a surviving circle edge
    int old_edge; // for circles
  };
  std::vector<NewEdge> order;
  for (size_t c = 0; c < chains.size(); ++c)
    order.push_back({*std::min_element(chains[c].begin(), chains[c].end()), static_cast<int>(c), -1});
  for (int e = 0; e < ne; ++e)
    if (!egone[e] && d.comps[d.edge_comp[e]].circle) order.push_back({e, -1, e});
  std::sort(order.begin(), order.end(), [](const NewEdge& a, const NewEdge& b) { return a.key < b.key; });

  RemovalResult res;
  res.edge_map.assign(ne, -1);
  std::vector<int> chain_new(chains.size(), -1);
  for (size_t i = 0; i < order.size(); ++i) {
    if (order[i].chain >= 0) {
      chain_new[order[i].chain] = static_cast<int>(i);
      for (int e : chains[order[i].chain]) res.edge_map[e] = static_cast<int>(i);
    } else {
      res.edge_map[order[i].old_edge] = static_cast<int>(i);
    }
  }
  int nne = static_cast<int>(order.size());

  // surviving crossings keep their relative order
  res.xing_map.assign(d.nxings(), -1);
  Diagram& nd = res.d;
  for (int x = 0; x < d.nxings(); ++x) {
    if (xgone[x]) continue;
    res.xing_map[x] = static_cast<int>(nd.xings.size());
    Crossing c;
    for (int s = 0; s < 4; ++s) {
      Dart od = d.xings[x].rot[s];
      c.rot[s] = 2 * res.edge_map[edge_of(od)] + (is_rev(od) ? 1 : 0);
    }
    nd.xings.push_back(c);
  }

  // successor of each new edge along its strand
  std::vector<int> next_edge(nne, -1);
  for (size_t c = 0; c < chains.size(); ++c) {
    if (chain_closed[c]) continue;
    int last = chains[c].back();
    auto in = d.incid[fwd_dart(last)];
    Dart dep = d.xings[in.xing].rot[(in.slot + 2) & 3];
    next_edge[chain_new[c]] = res.edge_map[edge_of(dep)];
  }

  // components
  struct NewComp {
    std::vector<int> edges;
    bool circle = false;
    Turn turn = Turn::ccw;
    int src_comp = -1;
    int key = 0;
  };
  std::vector<NewComp> newcomps;
  std::vector<char> edone(nne, 0);
  auto old_min_of = [&](int i) {
    return order[i].chain >= 0 ? *std::min_element(chains[order[i].chain].begin(), chains[order[i].chain].end())
                               : order[i].old_edge;
  };
  for (int i0 = 0; i0 < nne; ++i0) {
    if (edone[i0]) continue;
    NewComp c;
    if (order[i0].chain < 0) { // surviving free circle
      int oe = order[i0].old_edge;
      c = {{i0}, true, d.comps[d.edge_comp[oe]].turn, d.edge_comp[oe], oe};
      edone[i0] = 1;
    } else if (chain_closed[order[i0].chain]) { // chain closes into a bare circle
      int ch = order[i0].chain;
      int src = d.edge_comp[chains[ch][0]];
      Turn t;
      auto it = plan.comp_circle_turn.find(src);
      if (it != plan.comp_circle_turn.end()) {
        t = it->second;
      } else {
        std::vector<Dart> walk;
        std::map<int, std::pair<int, int>> passages;
        for (size_t j = 0; j < chains[ch].size(); ++j) {
          int e = chains[ch][j];
          walk.push_back(fwd_dart(e));
          int enext = chains[ch][(j + 1) % chains[ch].size()];
          passages[d.head_xing(e)] = {d.incid[fwd_dart(e)].slot, d.incid[rev_dart(enext)].slot};
        }
        t = d.embedded_walk_turn(walk, passages) > 0 ? Turn::ccw : Turn::cw;
      }
      c = {{i0}, true, t, src, old_min_of(i0)};
      edone[i0] = 1;
    } else {
      int cur = i0;
      do {
        c.edges.push_back(cur);
        edone[cur] = 1;
        cur = next_edge[cur];
        if (cur < 0) throw InternalError("threaded walk left the diagram");
      } while (cur != i0);
      auto mn = std::min_element(c.edges.begin(), c.edges.end());
      std::rotate(c.edges.begin(), mn, c.edges.end());
      c.src_comp = d.edge_comp[old_min_of(c.edges[0])];
      c.key = old_min_of(c.edges[0]);
    }
    newcomps.push_back(std::move(c));
  }
  // keep component ids stable across moves: order by source component first
  std::sort(newcomps.begin(), newcomps.end(), [](const NewComp& a, const NewComp& b) {
    return std::tie(a.src_comp, a.key) < std::tie(b.src_comp, b.key);
  });

  nd.comps.resize(newcomps.size());
  nd.edge_comp.assign(nne, -1);
  res.comp_map.assign(d.ncomps(), -1);
  std::vector<int> src_count(d.ncomps(), 0);
  for (const NewComp& c : newcomps) src_count[c.src_comp]++;
  for (size_t k = 0; k < newcomps.size(); ++k) {
    Component& c = nd.comps[k];
    c.edges = newcomps[k].edges;
    c.circle = newcomps[k].circle;
    c.turn = newcomps[k].turn;
    for (int e : c.edges) nd.edge_comp[e] = static_cast<int>(k);
    if (src_count[newcomps[k].src_comp] == 1) res.comp_map[newcomps[k].src_comp] = static_cast<int>(k);
    if (c.circle && !d.comps[newcomps[k].src_comp].circle) res.circle_comps.push_back(static_cast<int>(k));
  }
  return res;
}

} // namespace kmk
