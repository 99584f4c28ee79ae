#include "kmk/odc.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <vector>

namespace kmk {

namespace {

struct Tok {
  std::string s;
  int col;
};

std::vector<Tok> tokenize(const std::string& line) {
  std::vector<Tok> out;
  size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '#') break;
    if (isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < line.size() && !isspace(static_cast<unsigned char>(line[j])) && line[j] != '#') ++j;
    out.push_back({line.substr(i, j - i), static_cast<int>(i + 1)});
    i = j;
  }
  return out;
}

int parse_int(const Tok& t, int line) {
  try {
    size_t pos;
    int v = std::stoi(t.s, &pos);
    if (pos != t.s.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ParseError(line, t.col, "expected an integer, got '" + t.s + "'");
  }
}

// Deduce which over slot holds the incoming dart at every crossing. Returns
// per-crossing flags (true = slot 1 incoming). `forced` holds explicit `over`
// clauses (+1 = b/slot1, -1 = d/slot3, 0 = none). Crossings undecidable from
// the successor structure default to slot 1; emit writes clauses for exactly
// those.
std::vector<char> resolve_over(const std::vector<Component>& comps, const std::vector<int>& edge_comp,
                               const std::vector<std::array<int, 4>>& quads, const std::vector<int>& forced,
                               std::vector<char>* undecided_out, const std::vector<int>* lines) {
  int ne = static_cast<int>(edge_comp.size());
  std::vector<int> pos(ne, -1);
  for (const Component& c : comps)
    for (size_t i = 0; i < c.edges.size(); ++i) pos[c.edges[i]] = static_cast<int>(i);
  auto succ = [&](int e) {
    const Component& c = comps[edge_comp[e]];
    return c.edges[(pos[e] + 1) % c.edges.size()];
  };
  auto fail = [&](int x, const std::string& msg) -> ParseError {
    int ln = lines ? (*lines)[x] : 0;
    return ParseError(ln, 1, "crossing " + std::to_string(x + 1) + ": " + msg);
  };

  int nx = static_cast<int>(quads.size());
  std::vector<int> state(nx, 0); // 0 unknown, +1 b-in, -1 d-in
  std::vector<char> can_b(nx), can_d(nx);
  for (int x = 0; x < nx; ++x) {
    int b = quads[x][1], dd = quads[x][3];
    can_b[x] = succ(b) == dd;
    can_d[x] = succ(dd) == b;
    if (forced[x] == +1 && !can_b[x]) throw fail(x, "'over b' contradicts the edge successor structure");
    if (forced[x] == -1 && !can_d[x]) throw fail(x, "'over d' contradicts the edge successor structure");
    if (!can_b[x] && !can_d[x]) throw fail(x, "rotation inconsistent with edge successors");
    if (forced[x] != 0)
      state[x] = forced[x];
    else if (can_b[x] && !can_d[x])
      state[x] = +1;
    else if (can_d[x] && !can_b[x])
      state[x] = -1;
  }

  // appearances of each edge: (crossing, quad position). Position 0 forces
  // incoming, position 2 outgoing; over positions follow the crossing state.
  std::vector<std::vector<std::pair<int, int>>> app(ne);
  for (int x = 0; x < nx; ++x)
    for (int q = 0; q < 4; ++q) app[quads[x][q]].push_back({x, q});
  for (int e = 0; e < ne; ++e) {
    bool circ = comps[edge_comp[e]].circle;
    if (static_cast<int>(app[e].size()) != (circ ? 0 : 2)) {
      int ln = lines && !app[e].empty() ? (*lines)[app[e][0].first] : 0;
      throw ParseError(ln, 1,
                       "edge multiplicity: edge appears " + std::to_string(app[e].size()) + " times, expected " +
                           (circ ? "0" : "2"));
    }
  }

  // propagate "each edge is incoming exactly once"
  bool changed = true;
  auto known_in = [&](int x, int q) -> int { // +1 incoming, -1 outgoing, 0 unknown
    if (q == 0) return +1;
    if (q == 2) return -1;
    if (state[x] == 0) return 0;
    bool in = (state[x] == +1) == (q == 1);
    return in ? +1 : -1;
  };
  while (changed) {
    changed = false;
    for (int e = 0; e < ne; ++e) {
      if (app[e].empty()) continue;
      auto [x1, q1] = app[e][0];
      auto [x2, q2] = app[e][1];
      int k1 = known_in(x1, q1), k2 = known_in(x2, q2);
      if (k1 != 0 && k2 != 0) {
        if (k1 == k2) throw fail(x1, "edge is " + std::string(k1 > 0 ? "incoming" : "outgoing") + " at both ends");
        continue;
      }
      if (k1 == 0 && k2 == 0) continue;
      int xu = k1 == 0 ? x1 : x2, qu = k1 == 0 ? q1 : q2, want = -(k1 == 0 ? k2 : k1);
      int st = (want > 0) == (qu == 1) ? +1 : -1;
      if ((st == +1 && !can_b[xu]) || (st == -1 && !can_d[xu])) throw fail(xu, "rotation inconsistent with edge successors");
      state[xu] = st;
      changed = true;
    }
  }
  if (undecided_out) undecided_out->assign(nx, 0);
  std::vector<char> res(nx);
  for (int x = 0; x < nx; ++x) {
    if (state[x] == 0) {
      state[x] = +1; // documented tie-break for all-over alternating components
      if (undecided_out) (*undecided_out)[x] = 1;
    }
    res[x] = state[x] > 0;
  }
  return res;
}

} // namespace

Diagram parse_odc(const std::string& text) {
  std::vector<std::string> lines;
  {
    std::istringstream in(text);
    std::string l;
    while (std::getline(in, l)) lines.push_back(l);
  }

  struct CompDecl {
    bool circle;
    int edges;
    Turn turn;
    std::string at, outer; // witnesses as text, resolved later
    int line = 0;
  };
  std::map<int, CompDecl> decls;
  struct XDecl {
    std::array<std::string, 4> lbl;
    int over = 0;
    int line;
    std::array<int, 4> cols;
  };
  std::map<int, XDecl> xdecls;
  struct PlaceDecl {
    int comp;
    std::string at, outer;
    int line = 0;
  };
  std::vector<PlaceDecl> places;
  std::string outer_txt;
  int outer_line = 0;

  bool header = false;
  for (size_t li = 0; li < lines.size(); ++li) {
    auto toks = tokenize(lines[li]);
    if (toks.empty()) continue;
    int ln = static_cast<int>(li + 1);
    auto need = [&](size_t n) {
      if (toks.size() < n) throw ParseError(ln, toks.back().col, "truncated line");
    };
    const std::string& kw = toks[0].s;
    if (!header) {
      if (kw != "odc" || toks.size() < 2 || toks[1].s != "1")
        throw ParseError(ln, toks[0].col, "expected header 'odc 1'");
      header = true;
      continue;
    }
    auto comp_id = [&](const Tok& t) {
      std::string s = t.s;
      if (!s.empty() && s.back() == ':') s.pop_back();
      Tok u{s, t.col};
      int k = parse_int(u, ln);
      if (k < 1) throw ParseError(ln, t.col, "component ids are 1-based");
      return k - 1;
    };
    if (kw == "c") {
      need(3);
      int k = comp_id(toks[1]);
      if (decls.count(k)) throw ParseError(ln, toks[1].col, "component declared twice");
      int m = parse_int(toks[2], ln);
      if (m < 1) throw ParseError(ln, toks[2].col, "component needs at least one edge");
      decls[k] = {false, m, Turn::ccw, "", "", ln};
    } else if (kw == "o") {
      need(3);
      int k = comp_id(toks[1]);
      if (decls.count(k)) throw ParseError(ln, toks[1].col, "component declared twice");
      Turn t;
      if (toks[2].s == "ccw")
        t = Turn::ccw;
      else if (toks[2].s == "cw")
        t = Turn::cw;
      else
        throw ParseError(ln, toks[2].col, "expected ccw or cw");
      CompDecl cd{true, 1, t, "", "", ln};
      if (toks.size() >= 5 && toks[3].s == "at") cd.at = toks[4].s;
      else if (toks.size() > 3) throw ParseError(ln, toks[3].col, "expected 'at <edge>:<L|R>'");
      decls[k] = cd;
    } else if (kw == "x") {
      need(6);
      int id = comp_id(toks[1]);
      if (xdecls.count(id)) throw ParseError(ln, toks[1].col, "crossing declared twice");
      XDecl xd;
      xd.line = ln;
      for (int q = 0; q < 4; ++q) {
        xd.lbl[q] = toks[2 + q].s;
        xd.cols[q] = toks[2 + q].col;
      }
      if (toks.size() >= 8) {
        if (toks[6].s != "over" || (toks[7].s != "b" && toks[7].s != "d"))
          throw ParseError(ln, toks[6].col, "expected 'over b' or 'over d'");
        xd.over = toks[7].s == "b" ? +1 : -1;
      } else if (toks.size() == 7) {
        throw ParseError(ln, toks[6].col, "unexpected token");
      }
      xdecls[id] = xd;
    } else if (kw == "outer:") {
      need(2);
      outer_txt = toks[1].s;
      outer_line = ln;
    } else if (kw == "place") {
      need(4);
      PlaceDecl pd;
      pd.comp = comp_id(toks[1]);
      if (toks[2].s != "at") throw ParseError(ln, toks[2].col, "expected 'at'");
      pd.at = toks[3].s;
      pd.line = ln;
      if (toks.size() >= 6) {
        if (toks[4].s != "outer") throw ParseError(ln, toks[4].col, "expected 'outer'");
        pd.outer = toks[5].s;
      } else if (toks.size() == 5) {
        throw ParseError(ln, toks[4].col, "unexpected token");
      }
      places.push_back(pd);
    } else {
      throw ParseError(ln, toks[0].col, "unknown directive '" + kw + "'");
    }
  }
  if (!header) throw ParseError(1, 1, "expected header 'odc 1'");
  if (decls.empty()) throw ParseError(static_cast<int>(lines.size()), 1, "no components declared");

  int nc = decls.rbegin()->first + 1;
  for (int k = 0; k < nc; ++k)
    if (!decls.count(k)) throw ParseError(1, 1, "component " + std::to_string(k + 1) + " not declared");

  Diagram d;
  d.comps.resize(nc);
  std::vector<int> offset(nc, 0);
  {
    int next = 0;
    for (int k = 0; k < nc; ++k) {
      offset[k] = next;
      const CompDecl& cd = decls[k];
      d.comps[k].circle = cd.circle;
      d.comps[k].turn = cd.turn;
      for (int i = 0; i < cd.edges; ++i) {
        d.comps[k].edges.push_back(next++);
        d.edge_comp.push_back(k);
      }
    }
  }

  auto parse_edge = [&](const std::string& s, int ln, int col) -> int {
    size_t dot = s.find('.');
    if (dot == std::string::npos) throw ParseError(ln, col, "expected edge label <comp>.<index>");
    try {
      int k = std::stoi(s.substr(0, dot));
      int i = std::stoi(s.substr(dot + 1));
      if (k < 1 || k > nc) throw ParseError(ln, col, "unknown component in edge label");
      if (i < 1 || i > static_cast<int>(d.comps[k - 1].edges.size()))
        throw ParseError(ln, col, "edge index out of range in '" + s + "'");
      return offset[k - 1] + i - 1;
    } catch (ParseError&) {
      throw;
    } catch (...) {
      throw ParseError(ln, col, "bad edge label '" + s + "'");
    }
  };
  auto parse_dart = [&](const std::string& s, int ln, int col) -> Dart {
    size_t colon = s.rfind(':');
    if (colon == std::string::npos || colon + 2 != s.size() || (s[colon + 1] != 'L' && s[colon + 1] != 'R'))
      throw ParseError(ln, col, "expected <edge>:<L|R>, got '" + s + "'");
    int e = parse_edge(s.substr(0, colon), ln, col);
    return s[colon + 1] == 'L' ? fwd_dart(e) : rev_dart(e);
  };

  int nx = xdecls.empty() ? 0 : xdecls.rbegin()->first + 1;
  for (int x = 0; x < nx; ++x)
    if (!xdecls.count(x)) throw ParseError(1, 1, "crossing " + std::to_string(x + 1) + " not declared");
  std::vector<std::array<int, 4>> quads(nx);
  std::vector<int> forced(nx, 0), xlines(nx, 0);
  for (auto& [id, xd] : xdecls) {
    for (int q = 0; q < 4; ++q) quads[id][q] = parse_edge(xd.lbl[q], xd.line, xd.cols[q]);
    forced[id] = xd.over;
    xlines[id] = xd.line;
  }
  auto bslot = resolve_over(d.comps, d.edge_comp, quads, forced, nullptr, &xlines);

  d.xings.resize(nx);
  for (int x = 0; x < nx; ++x) {
    auto& r = d.xings[x].rot;
    r[0] = fwd_dart(quads[x][0]);
    r[2] = rev_dart(quads[x][2]);
    if (bslot[x]) {
      r[1] = fwd_dart(quads[x][1]);
      r[3] = rev_dart(quads[x][3]);
    } else {
      r[1] = rev_dart(quads[x][1]);
      r[3] = fwd_dart(quads[x][3]);
    }
  }

  if (!outer_txt.empty()) d.outer_witness = parse_dart(outer_txt, outer_line, 1);
  for (const PlaceDecl& pd : places) {
    PiecePlace pl;
    pl.min_comp = pd.comp;
    pl.at = parse_dart(pd.at, pd.line, 1);
    if (!pd.outer.empty()) pl.outer = parse_dart(pd.outer, pd.line, 1);
    d.places.push_back(pl);
  }
  for (int k = 0; k < nc; ++k) {
    const CompDecl& cd = decls[k];
    if (cd.circle && !cd.at.empty()) {
      PiecePlace pl;
      pl.min_comp = k;
      pl.at = parse_dart(cd.at, cd.line, 1);
      d.places.push_back(pl);
    }
  }

  d.rebuild(); // semantic validation
  return d;
}

std::string emit_odc(const Diagram& d) {
  std::ostringstream out;
  out << "odc 1\n";

  // which crossings need an explicit over clause
  int nx = d.nxings();
  std::vector<std::array<int, 4>> quads(nx);
  std::vector<int> forced(nx, 0);
  for (int x = 0; x < nx; ++x)
    for (int q = 0; q < 4; ++q) quads[x][q] = edge_of(d.xings[x].rot[q]);
  std::vector<char> undecided;
  resolve_over(d.comps, d.edge_comp, quads, forced, &undecided, nullptr);

  int rootp = d.root_piece();
  auto place_of = [&](int min_comp) -> const PiecePlace* {
    for (const PiecePlace& pl : d.places)
      if (pl.min_comp == min_comp) return &pl;
    return nullptr;
  };

  for (int k = 0; k < d.ncomps(); ++k) {
    const Component& c = d.comps[k];
    if (c.circle) {
      out << "o " << k + 1 << ": " << (c.turn == Turn::ccw ? "ccw" : "cw");
      if (const PiecePlace* pl = place_of(k); pl && d.comp_piece[k] != rootp) out << " at " << d.dart_label(pl->at);
      out << "\n";
    } else {
      out << "c " << k + 1 << ": " << c.edges.size() << "\n";
    }
  }
  for (int x = 0; x < nx; ++x) {
    out << "x " << x + 1 << ":";
    for (int q = 0; q < 4; ++q) out << " " << d.edge_label(quads[x][q]);
    if (undecided[x] && is_rev(d.xings[x].rot[1])) out << " over d";
    out << "\n";
  }
  out << "outer: " << d.dart_label(d.outer_witness) << "\n";
  for (int p = 0; p < d.npieces; ++p) {
    if (p == rootp) continue;
    int mc = d.piece_min_comp(p);
    if (d.comps[mc].circle) continue; // emitted inline
    const PiecePlace* pl = place_of(mc);
    if (!pl) throw InternalError("missing placement while emitting");
    out << "place " << mc + 1 << " at " << d.dart_label(pl->at);
    Dart od = pl->outer;
    if (od < 0) od = fwd_dart(d.comps[mc].edges[0]);
    out << " outer " << d.dart_label(od) << "\n";
  }
  return out.str();
}

} // namespace kmk
