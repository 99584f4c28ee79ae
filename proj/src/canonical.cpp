#include "kmk/canonical.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace kmk {

namespace {

// Rooted encoding of a threaded piece. Crossing labels are assigned by a
// breadth-first scan from the root crossing; slots need no normalization
// because slot 0 is semantically the under-in dart. Component numbers are
// assigned by first appearance. Reconstructs the decorated map completely.
struct PieceEncoder {
  const Diagram& d;
  int piece;

  std::vector<int> order;  // label -> crossing
  std::vector<int> label;  // crossing -> label
  std::map<int, int> comp_canon;

  explicit PieceEncoder(const Diagram& dd, int p) : d(dd), piece(p), label(dd.nxings(), -1) {}

  std::string encode(int root_xing) {
    order.clear();
    std::fill(label.begin(), label.end(), -1);
    comp_canon.clear();
    order.push_back(root_xing);
    label[root_xing] = 0;
    std::ostringstream out;
    for (size_t i = 0; i < order.size(); ++i) {
      int x = order[i];
      for (int s = 0; s < 4; ++s) {
        Dart away = alpha(d.xings[x].rot[s]);
        auto in = d.incid[away];
        if (label[in.xing] < 0) {
          label[in.xing] = static_cast<int>(order.size());
          order.push_back(in.xing);
        }
        int comp = d.edge_comp[edge_of(away)];
        auto it = comp_canon.find(comp);
        if (it == comp_canon.end()) it = comp_canon.emplace(comp, static_cast<int>(comp_canon.size())).first;
        out << label[in.xing] << '.' << in.slot << '.' << it->second << ';';
      }
      out << '|';
    }
    return out.str();
  }

  // identity of a face under the current labeling: its minimal (label, slot)
  std::string face_code(int f) const {
    int bl = -1, bs = -1;
    for (Dart dd_ : d.faces[f].bnd) {
      auto in = d.incid[dd_];
      int l = label[in.xing];
      if (bl < 0 || l < bl || (l == bl && in.slot < bs)) {
        bl = l;
        bs = in.slot;
      }
    }
    return std::to_string(bl) + "." + std::to_string(bs);
  }
};

struct KeyCtx {
  const Diagram& d;
  std::vector<int> outer;      // per piece: designated outer face
  std::vector<int> cturn;      // per piece: +1 ccw / -1 cw for circle pieces
  std::vector<int> parent;     // enclosure forest under this rooting

  explicit KeyCtx(const Diagram& dd) : d(dd), outer(dd.piece_outer), cturn(dd.npieces, 0) {
    for (int p = 0; p < dd.npieces; ++p) {
      int mc = dd.piece_min_comp(p);
      if (dd.comps[mc].circle) cturn[p] = dd.comps[mc].turn == Turn::ccw ? +1 : -1;
    }
    derive_forest();
  }

  void derive_forest() {
    int np = d.npieces;
    parent.assign(np, -1);
    for (int a = 0; a < np; ++a) {
      std::vector<int> cands;
      for (int b = 0; b < np; ++b)
        if (b != a && d.host[a][b] != outer[b]) cands.push_back(b);
      int best = -1;
      for (int b : cands) {
        bool inner = true;
        for (int b2 : cands)
          if (b2 != b && d.host[b][b2] == outer[b2]) inner = false;
        if (inner) {
          if (best >= 0) throw InternalError("ambiguous enclosure in canonical rooting");
          best = b;
        }
      }
      if (best < 0 && !cands.empty()) throw InternalError("no innermost enclosure in canonical rooting");
      parent[a] = best;
    }
  }

  std::string node_key(int p) const {
    std::vector<int> children;
    for (int q = 0; q < d.npieces; ++q)
      if (parent[q] == p) children.push_back(q);
    std::vector<std::pair<int, std::string>> child_keys; // (host face in p, key)
    for (int q : children) child_keys.push_back({d.host[q][p], node_key(q)});

    int mc = d.piece_min_comp(p);
    if (d.comps[mc].circle) {
      // one bounded face; children live in it
      std::vector<std::string> ks;
      for (auto& [f, k] : child_keys) ks.push_back(k);
      std::sort(ks.begin(), ks.end());
      std::string out = cturn[p] > 0 ? "(O+" : "(O-";
      for (auto& k : ks) out += " " + k;
      return out + ")";
    }

    PieceEncoder enc(d, p);
    std::set<int> xset;
    for (int k : d.piece_comps[p])
      for (int e : d.comps[k].edges) xset.insert(d.head_xing(e));
    std::string best_code;
    std::vector<int> best_roots;
    for (int x : xset) {
      std::string c = enc.encode(x) + "@" + enc.face_code(outer[p]);
      if (best_code.empty() || c < best_code) {
        best_code = c;
        best_roots = {x};
      } else if (c == best_code) {
        best_roots.push_back(x);
      }
    }
    std::string best_children;
    bool first = true;
    for (int x : best_roots) {
      enc.encode(x);
      std::vector<std::pair<std::string, std::string>> pairs;
      for (auto& [f, k] : child_keys) pairs.push_back({enc.face_code(f), k});
      std::sort(pairs.begin(), pairs.end());
      std::string s;
      for (auto& [fc, k] : pairs) s += " " + fc + "=" + k;
      if (first || s < best_children) best_children = s;
      first = false;
    }
    return "(T " + best_code + best_children + ")";
  }

  std::string key() const {
    std::vector<std::string> tops;
    for (int p = 0; p < d.npieces; ++p)
      if (parent[p] < 0) tops.push_back(node_key(p));
    std::sort(tops.begin(), tops.end());
    std::string out;
    for (auto& t : tops) out += t;
    return out;
  }
};

} // namespace

std::string canonical_key(const Diagram& d, bool sphere) {
  KeyCtx ctx(d);
  std::string best = ctx.key();
  if (!sphere) return best;

  // quotient by the choice of unbounded region: re-root at every face of
  // every piece
  for (int p = 0; p < d.npieces; ++p) {
    for (size_t f = 0; f < d.faces.size(); ++f) {
      if (d.faces[f].piece != p) continue;
      KeyCtx c2(d);
      for (int b = 0; b < d.npieces; ++b) {
        int nf = (b == p) ? static_cast<int>(f) : d.host[p][b];
        if (nf != c2.outer[b] && c2.cturn[b] != 0) c2.cturn[b] = -c2.cturn[b];
        c2.outer[b] = nf;
      }
      c2.derive_forest();
      std::string k = c2.key();
      if (k < best) best = k;
    }
  }
  return best;
}

} // namespace kmk
