#pragma once

// Derived substitutions on boundary patterns, pruned reversed coincidence
// graphs, fibre cardinalities over the odometer and periodic-point seeds.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "subshift/columns.hpp"
#include "subshift/core.hpp"
#include "subshift/height.hpp"
#include "subshift/legal.hpp"

namespace subshift {

using AxisSet = std::vector<std::size_t>;  // 0-based, sorted

// B_J: coordinates in J range over {-1, 0}, the others are 0. Sorted.
inline std::vector<Vec> boundary_support(std::size_t dim, const AxisSet& J) {
  std::vector<Vec> out;
  std::size_t n = std::size_t(1) << J.size();
  for (std::size_t mask = 0; mask < n; ++mask) {
    Vec p(dim, 0);
    for (std::size_t i = 0; i < J.size(); ++i)
      if (mask >> i & 1) p[J[i]] = -1;
    out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline AxisSet normalize_axes(AxisSet J, std::size_t dim) {
  std::sort(J.begin(), J.end());
  J.erase(std::unique(J.begin(), J.end()), J.end());
  for (std::size_t j : J)
    if (j >= dim) throw InputError("axis " + std::to_string(j + 1) + " exceeds the dimension " + std::to_string(dim));
  return J;
}

inline LegalPatterns boundary_alphabet(const Substitution& sub, const AxisSet& J) {
  require_block(sub);
  AxisSet j = normalize_axes(J, sub.dim());
  if (sub.dim() == 0) {
    LegalPatterns lp;
    lp.support = {Vec{}};
    for (std::size_t a = 0; a < sub.alphabet_size(); ++a) lp.patterns.push_back({static_cast<Letter>(a)});
    return lp;
  }
  return legal_patterns(sub, boundary_support(sub.dim(), j));
}

struct DerivedSubstitution {
  Substitution sub;                             // the derived substitution
  AxisSet J;                                    // base axes that were derived
  AxisSet free_axes;                            // base axes of the remaining coordinates
  std::vector<Vec> support;                     // B_J in base coordinates
  std::vector<std::vector<Letter>> patterns;    // base letters of each derived letter
};

inline std::string pattern_name(const Substitution& base, const std::vector<Letter>& cells) {
  bool single = std::all_of(base.names().begin(), base.names().end(), [](const std::string& s) { return s.size() == 1; });
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) out += (i && !single ? "|" : "") + base.name(cells[i]);
  return out;
}

inline DerivedSubstitution identity_derived(const Substitution& sub) {
  DerivedSubstitution d;
  d.sub = sub;
  d.free_axes.resize(sub.dim());
  std::iota(d.free_axes.begin(), d.free_axes.end(), 0);
  d.support = {Vec(sub.dim(), 0)};
  for (std::size_t a = 0; a < sub.alphabet_size(); ++a) d.patterns.push_back({static_cast<Letter>(a)});
  return d;
}

namespace detail {

// Rules of the derived substitution on the given legal B_J patterns: the cell
// at e in the image at n gets theta_m(P_e), with m_j = l_j - 1 for e_j = -1,
// m_j = 0 for e_j = 0 and m_j = n_j off J.
inline std::vector<std::vector<Letter>> derived_rules(const Substitution& s, const AxisSet& J, const std::vector<Vec>& support,
                                                      const std::vector<std::vector<Letter>>& pats, Vec* reduced_lengths) {
  const Vec& l = s.system().lengths();
  std::vector<char> in_j(s.dim(), 0);
  for (std::size_t j : J) in_j[j] = 1;
  Vec red;
  for (std::size_t j = 0; j < s.dim(); ++j)
    if (!in_j[j]) red.push_back(l[j]);
  std::map<std::vector<Letter>, Letter> index;
  for (std::size_t i = 0; i < pats.size(); ++i) index.emplace(pats[i], static_cast<Letter>(i));
  std::size_t nd = block_size(red);
  std::vector<std::vector<Letter>> rules(pats.size(), std::vector<Letter>(nd));
  for (std::size_t r = 0; r < nd; ++r) {
    Vec nhat = block_coords(red, r);
    std::vector<std::size_t> digit(support.size());
    for (std::size_t c = 0; c < support.size(); ++c) {
      Vec m(s.dim());
      std::size_t f = 0;
      for (std::size_t j = 0; j < s.dim(); ++j) m[j] = in_j[j] ? (support[c][j] == -1 ? l[j] - 1 : 0) : nhat[f++];
      digit[c] = block_index(l, m);
    }
    for (std::size_t p = 0; p < pats.size(); ++p) {
      std::vector<Letter> img(support.size());
      for (std::size_t c = 0; c < support.size(); ++c) img[c] = s.image(pats[p][c], digit[c]);
      auto it = index.find(img);
      if (it == index.end()) throw VerificationFailure("image of a legal boundary pattern is not legal");
      rules[p][r] = it->second;
    }
  }
  if (reduced_lengths) *reduced_lengths = red;
  return rules;
}

// Reorders letters by their base pattern and rebuilds names and rules.
inline DerivedSubstitution canonical_derived(const Substitution& base, AxisSet J, AxisSet free_axes, std::vector<Vec> support,
                                             std::vector<std::vector<Letter>> pats, const DigitSystem& sys,
                                             const std::vector<std::vector<Letter>>& rules) {
  std::vector<std::size_t> order(pats.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pats[x] < pats[y]; });
  std::vector<Letter> rank(pats.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<Letter>(i);
  DerivedSubstitution d;
  std::vector<std::string> names;
  std::vector<std::vector<Letter>> new_rules;
  for (std::size_t i : order) {
    d.patterns.push_back(pats[i]);
    names.push_back(pattern_name(base, pats[i]));
    std::vector<Letter> r;
    for (Letter x : rules[i]) r.push_back(rank[x]);
    new_rules.push_back(std::move(r));
  }
  d.sub = Substitution(std::move(names), sys, std::move(new_rules));
  d.J = std::move(J);
  d.free_axes = std::move(free_axes);
  d.support = std::move(support);
  return d;
}

}  // namespace detail

// Closed form of the derived substitution for the axis set J.
inline DerivedSubstitution derived_substitution(const Substitution& sub, const AxisSet& J) {
  require_block(sub);
  AxisSet j = normalize_axes(J, sub.dim());
  if (j.empty()) return identity_derived(sub);
  LegalPatterns lp = boundary_alphabet(sub, j);
  Vec red;
  auto rules = detail::derived_rules(sub, j, lp.support, lp.patterns, &red);
  AxisSet free_axes;
  for (std::size_t a = 0; a < sub.dim(); ++a)
    if (!std::binary_search(j.begin(), j.end(), a)) free_axes.push_back(a);
  return detail::canonical_derived(sub, j, free_axes, lp.support, lp.patterns, DigitSystem::block(red), rules);
}

// One derivation step along `axis` (an index into cur.free_axes), using the
// language of the current derived substitution.
inline DerivedSubstitution derive_axis(const Substitution& base, const DerivedSubstitution& cur, std::size_t axis) {
  require_block(cur.sub);
  if (axis >= cur.sub.dim()) throw InputError("axis exceeds the dimension of the derived substitution");
  std::size_t b = cur.free_axes[axis];
  AxisSet J = cur.J;
  J.push_back(b);
  std::sort(J.begin(), J.end());
  AxisSet free_axes = cur.free_axes;
  free_axes.erase(free_axes.begin() + static_cast<std::ptrdiff_t>(axis));
  // letters: base-legal patterns on the new support, split into pairs of current letters
  LegalPatterns flat = boundary_alphabet(base, J);
  std::map<std::vector<Letter>, Letter> letter_of;
  for (std::size_t i = 0; i < cur.patterns.size(); ++i) letter_of.emplace(cur.patterns[i], static_cast<Letter>(i));
  std::vector<Vec> pair_support = boundary_support(cur.sub.dim(), {axis});
  std::vector<std::vector<Letter>> pairs;
  for (const auto& cells : flat.patterns) {
    std::vector<Letter> pair;
    for (Int side : {Int(-1), Int(0)}) {
      std::vector<Letter> half;
      for (const auto& t : cur.support) {
        Vec q = t;
        q[b] = side;
        auto it = std::lower_bound(flat.support.begin(), flat.support.end(), q);
        half.push_back(cells[static_cast<std::size_t>(it - flat.support.begin())]);
      }
      auto f = letter_of.find(half);
      if (f == letter_of.end()) throw VerificationFailure("restriction of a legal pattern is not a derived letter");
      pair.push_back(f->second);
    }
    pairs.push_back(std::move(pair));
  }
  Vec red;
  auto rules = detail::derived_rules(cur.sub, {axis}, pair_support, pairs, &red);
  return detail::canonical_derived(base, J, free_axes, flat.support, flat.patterns, DigitSystem::block(red), rules);
}

// Iterated derivation along the given base axes, in the given order.
inline DerivedSubstitution derive_sequence(const Substitution& sub, const AxisSet& axes_in_order) {
  DerivedSubstitution cur = identity_derived(sub);
  for (std::size_t b : axes_in_order) {
    auto it = std::find(cur.free_axes.begin(), cur.free_axes.end(), b);
    if (it == cur.free_axes.end()) throw InputError("axis derived twice");
    cur = derive_axis(sub, cur, static_cast<std::size_t>(it - cur.free_axes.begin()));
  }
  return cur;
}

// Letter bijection between two derived substitutions of the same base that
// identifies equal base patterns and intertwines the rules.
inline std::optional<std::vector<Letter>> derived_isomorphism(const DerivedSubstitution& x, const DerivedSubstitution& y) {
  if (x.J != y.J || x.support != y.support || !(x.sub.system() == y.sub.system())) return std::nullopt;
  if (x.patterns.size() != y.patterns.size()) return std::nullopt;
  std::map<std::vector<Letter>, Letter> where;
  for (std::size_t i = 0; i < y.patterns.size(); ++i) where.emplace(y.patterns[i], static_cast<Letter>(i));
  std::vector<Letter> phi(x.patterns.size());
  for (std::size_t i = 0; i < x.patterns.size(); ++i) {
    auto it = where.find(x.patterns[i]);
    if (it == where.end()) return std::nullopt;
    phi[i] = it->second;
  }
  for (std::size_t a = 0; a < phi.size(); ++a)
    for (std::size_t t = 0; t < x.sub.digit_count(); ++t)
      if (phi[x.sub.image(static_cast<Letter>(a), t)] != y.sub.image(phi[a], t)) return std::nullopt;
  return phi;
}

// --- strongly connected components ---

struct Scc {
  std::vector<std::size_t> component;  // node -> component id
  std::vector<char> cyclic;            // per component
  std::size_t count = 0;
};

inline Scc strongly_connected(const std::vector<std::vector<std::size_t>>& adj) {
  std::size_t n = adj.size();
  Scc out;
  out.component.assign(n, static_cast<std::size_t>(-1));
  std::vector<std::size_t> idx(n, static_cast<std::size_t>(-1)), low(n, 0), stack;
  std::vector<char> on(n, 0);
  std::size_t counter = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (idx[root] != static_cast<std::size_t>(-1)) continue;
    std::vector<std::pair<std::size_t, std::size_t>> call{{root, 0}};
    idx[root] = low[root] = counter++;
    stack.push_back(root);
    on[root] = 1;
    while (!call.empty()) {
      auto& [v, e] = call.back();
      if (e < adj[v].size()) {
        std::size_t w = adj[v][e++];
        if (idx[w] == static_cast<std::size_t>(-1)) {
          idx[w] = low[w] = counter++;
          stack.push_back(w);
          on[w] = 1;
          call.push_back({w, 0});
        } else if (on[w]) {
          low[v] = std::min(low[v], idx[w]);
        }
        continue;
      }
      std::size_t done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] == idx[done]) {
        std::size_t id = out.count++;
        std::size_t size = 0;
        for (;;) {
          std::size_t w = stack.back();
          stack.pop_back();
          on[w] = 0;
          out.component[w] = id;
          ++size;
          if (w == done) break;
        }
        bool loop = std::find(adj[done].begin(), adj[done].end(), done) != adj[done].end();
        out.cyclic.push_back(size > 1 || loop);
      }
    }
  }
  return out;
}

// --- pruned reversed graph ---

struct PrunedGraph {
  DerivedSubstitution derived;
  CoincidenceGraph graph;                   // of the derived substitution
  std::size_t threshold = 0;                // column number of the base
  std::vector<std::size_t> kept;            // graph vertices of cardinality > threshold
  struct Edge {
    std::size_t from, to, digit;            // indices into kept; reversed orientation
  };
  std::vector<Edge> edges;

  std::vector<std::vector<std::size_t>> adjacency() const {
    std::vector<std::vector<std::size_t>> adj(kept.size());
    for (const auto& e : edges) adj[e.from].push_back(e.to);
    for (auto& a : adj) {
      std::sort(a.begin(), a.end());
      a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return adj;
  }
  std::size_t cardinality(std::size_t k) const { return graph.vertices[kept[k]].size(); }
};

inline PrunedGraph pruned_reversed_graph(const Substitution& sub, const AxisSet& J) {
  PrunedGraph pg;
  pg.derived = derived_substitution(sub, J);
  pg.graph = coincidence_graph(pg.derived.sub);
  pg.threshold = column_number_and_minimal_sets(sub).column_number;
  std::vector<std::size_t> pos(pg.graph.vertex_count(), static_cast<std::size_t>(-1));
  for (std::size_t v = 0; v < pg.graph.vertex_count(); ++v)
    if (pg.graph.vertices[v].size() > pg.threshold) {
      pos[v] = pg.kept.size();
      pg.kept.push_back(v);
    }
  for (std::size_t k = 0; k < pg.kept.size(); ++k) {
    std::size_t u = pg.kept[k];
    for (std::size_t t = 0; t < pg.graph.digit_count(); ++t) {
      std::size_t v = pg.graph.target[u][t];
      if (pos[v] != static_cast<std::size_t>(-1)) pg.edges.push_back({pos[v], k, t});
    }
  }
  std::sort(pg.edges.begin(), pg.edges.end(),
            [](const PrunedGraph::Edge& x, const PrunedGraph::Edge& y) { return std::tie(x.from, x.to, x.digit) < std::tie(y.from, y.to, y.digit); });
  return pg;
}

// Largest vertex cardinality on a cycle of the pruned graph; 0 when acyclic.
inline std::size_t max_cycle_cardinality(const PrunedGraph& pg) {
  Scc scc = strongly_connected(pg.adjacency());
  std::size_t best = 0;
  for (std::size_t k = 0; k < pg.kept.size(); ++k)
    if (scc.cyclic[scc.component[k]]) best = std::max(best, pg.cardinality(k));
  return best;
}

// --- Q-adic points ---

struct QadicCoord {
  bool integer = true;
  Int value = 0;
  std::vector<Int> pre;     // z_0, z_1, ...
  std::vector<Int> period;

  Int digit(std::size_t m) const {
    if (integer) return 0;
    if (m < pre.size()) return pre[m];
    return period[(m - pre.size()) % period.size()];
  }
  bool operator==(const QadicCoord& o) const { return integer == o.integer && value == o.value && pre == o.pre && period == o.period; }
};

using QadicPoint = std::vector<QadicCoord>;

namespace detail {

inline std::vector<Int> parse_digit_string(const std::string& s, Int base, const std::string& what) {
  std::vector<Int> out;
  if (s.empty()) return out;
  auto push = [&](const std::string& tok) {
    if (tok.empty()) throw InputError("empty digit in " + what);
    for (char ch : tok)
      if (ch < '0' || ch > '9') throw InputError("invalid digit '" + tok + "' in " + what);
    Int v = std::stoll(tok);
    if (v >= base) throw InputError("digit " + tok + " out of range for base " + std::to_string(base) + " in " + what);
    out.push_back(v);
  };
  if (s.find('.') != std::string::npos) {
    std::size_t start = 0;
    for (;;) {
      std::size_t dot = s.find('.', start);
      push(s.substr(start, dot - start));
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
  } else {
    for (char ch : s) push(std::string(1, ch));
  }
  return out;
}

inline std::string format_digit_string(const std::vector<Int>& d, Int base) {
  std::string out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (base > 10 && i) out += ".";
    out += std::to_string(d[i]);
  }
  return out;
}

}  // namespace detail

// "int:<v>" or "[pre:<digits>;]period:<digits>" per coordinate, comma separated;
// digits run from z_0 upward, one character each unless separated by '.'.
inline QadicPoint parse_qadic_point(const std::string& text, const Vec& lengths) {
  QadicPoint out;
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    std::size_t c = text.find(',', start);
    parts.push_back(text.substr(start, c - start));
    if (c == std::string::npos) break;
    start = c + 1;
  }
  if (parts.size() != lengths.size())
    throw InputError("point has " + std::to_string(parts.size()) + " coordinate(s), expected " + std::to_string(lengths.size()));
  for (std::size_t j = 0; j < parts.size(); ++j) {
    const std::string& p = parts[j];
    std::string what = "coordinate " + std::to_string(j + 1);
    QadicCoord q;
    if (p.rfind("int:", 0) == 0) {
      std::string v = p.substr(4);
      std::size_t used = 0;
      try {
        q.value = std::stoll(v, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (v.empty() || used != v.size()) throw InputError("invalid integer '" + v + "' in " + what);
      out.push_back(q);
      continue;
    }
    std::string pre, per;
    std::size_t semi = p.find(';');
    std::string head = semi == std::string::npos ? p : p.substr(0, semi);
    std::string tail = semi == std::string::npos ? "" : p.substr(semi + 1);
    if (semi != std::string::npos) {
      if (head.rfind("pre:", 0) != 0 || tail.rfind("period:", 0) != 0) throw InputError("expected pre:<digits>;period:<digits> in " + what);
      pre = head.substr(4);
      per = tail.substr(7);
    } else {
      if (head.rfind("period:", 0) != 0) throw InputError("expected int:<v> or period:<digits> in " + what);
      per = head.substr(7);
    }
    q.integer = false;
    q.pre = detail::parse_digit_string(pre, lengths[j], what);
    q.period = detail::parse_digit_string(per, lengths[j], what);
    if (q.period.empty()) throw InputError("empty period in " + what);
    bool zeros = std::all_of(q.period.begin(), q.period.end(), [](Int x) { return x == 0; });
    bool tops = std::all_of(q.period.begin(), q.period.end(), [&](Int x) { return x == lengths[j] - 1; });
    if (zeros || tops) throw InputError("eventually constant period in " + what + " is an integer; declare it as int:<v>");
    out.push_back(q);
  }
  return out;
}

inline std::string format_qadic_point(const QadicPoint& z, const Vec& lengths) {
  std::string out;
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (j) out += ",";
    if (z[j].integer) {
      out += "int:" + std::to_string(z[j].value);
      continue;
    }
    if (!z[j].pre.empty()) out += "pre:" + detail::format_digit_string(z[j].pre, lengths[j]) + ";";
    out += "period:" + detail::format_digit_string(z[j].period, lengths[j]);
  }
  return out;
}

// --- fibres ---

struct FibreReport {
  AxisSet J;                  // integer coordinates
  std::size_t cardinality = 0;
  std::size_t regular = 0;    // column number of the base
  bool irregular = false;
  bool periodic_point_count = false;  // all coordinates integer: seed count reported
  std::vector<std::pair<std::size_t, std::size_t>> witness;  // (graph vertex, phase) cycle
};

inline std::vector<std::size_t> fixed_point_seed_indices(const DerivedSubstitution& corner) {
  ColumnMap f = corner.sub.digit_column(0);
  std::size_t n = f.size();
  std::vector<char> periodic(n, 0);
  std::vector<int> state(n, 0);  // 0 new, 1 on path, 2 done
  for (std::size_t s = 0; s < n; ++s) {
    if (state[s]) continue;
    std::vector<std::size_t> path;
    std::size_t v = s;
    while (state[v] == 0) {
      state[v] = 1;
      path.push_back(v);
      v = f[v];
    }
    if (state[v] == 1)
      for (auto it = std::find(path.begin(), path.end(), v); it != path.end(); ++it) periodic[*it] = 1;
    for (std::size_t p : path) state[p] = 2;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (periodic[i]) out.push_back(i);
  return out;
}

struct SeedReport {
  std::size_t count = 0;
  DerivedSubstitution corner;       // zero-dimensional derived substitution
  std::vector<std::size_t> seeds;   // letters of `corner`
};

inline SeedReport fixed_point_seeds(const Substitution& sub) {
  require_block(sub);
  AxisSet all(sub.dim());
  std::iota(all.begin(), all.end(), 0);
  SeedReport r;
  r.corner = derived_substitution(sub, all);
  r.seeds = fixed_point_seed_indices(r.corner);
  r.count = r.seeds.size();
  return r;
}

inline FibreReport fibre_cardinality(const Substitution& sub, const QadicPoint& z) {
  require_block(sub);
  if (z.size() != sub.dim()) throw InputError("point dimension does not match the substitution");
  require_trivial_height(sub);
  FibreReport rep;
  for (std::size_t j = 0; j < z.size(); ++j)
    if (z[j].integer) rep.J.push_back(j);
  rep.regular = column_number_and_minimal_sets(sub).column_number;
  if (rep.J.size() == sub.dim()) {
    rep.periodic_point_count = true;
    rep.cardinality = fixed_point_seeds(sub).count;
    rep.irregular = rep.cardinality > rep.regular;
    return rep;
  }
  PrunedGraph pg = pruned_reversed_graph(sub, rep.J);
  const Vec& red = pg.derived.sub.system().lengths();
  std::size_t pre_len = 0, per_len = 1;
  for (std::size_t j : pg.derived.free_axes) {
    pre_len = std::max(pre_len, z[j].pre.size());
    per_len = std::lcm(per_len, z[j].period.size());
  }
  auto label = [&](std::size_t m) {
    Vec dg;
    for (std::size_t j : pg.derived.free_axes) dg.push_back(z[j].digit(m));
    return block_index(red, dg);
  };
  std::size_t nk = pg.kept.size();
  // radj[to-side]: reversed edges grouped by label
  std::vector<std::vector<std::vector<std::size_t>>> out_by_label(nk, std::vector<std::vector<std::size_t>>(pg.graph.digit_count()));
  for (const auto& e : pg.edges) out_by_label[e.from][e.digit].push_back(e.to);
  // preperiod: full vertex set of the unpruned reversed graph
  std::size_t nv = pg.graph.vertex_count();
  std::vector<char> full(nv, 1);
  for (std::size_t m = 0; m < pre_len; ++m) {
    std::vector<char> next(nv, 0);
    std::size_t t = label(m);
    for (std::size_t u = 0; u < nv; ++u)
      if (full[pg.graph.target[u][t]]) next[u] = 1;
    full = std::move(next);
  }
  std::vector<char> cur(nk, 0);
  for (std::size_t k = 0; k < nk; ++k) cur[k] = full[pg.kept[k]];
  // product graph (vertex, phase)
  std::size_t np = nk * per_len;
  std::vector<std::vector<std::size_t>> adj(np);
  for (std::size_t ph = 0; ph < per_len; ++ph) {
    std::size_t t = label(pre_len + ph);
    for (std::size_t v = 0; v < nk; ++v)
      for (std::size_t u : out_by_label[v][t]) adj[v * per_len + ph].push_back(u * per_len + (ph + 1) % per_len);
  }
  std::vector<char> reach(np, 0);
  std::vector<std::size_t> queue;
  for (std::size_t v = 0; v < nk; ++v)
    if (cur[v]) {
      reach[v * per_len] = 1;
      queue.push_back(v * per_len);
    }
  for (std::size_t h = 0; h < queue.size(); ++h)
    for (std::size_t w : adj[queue[h]])
      if (!reach[w]) {
        reach[w] = 1;
        queue.push_back(w);
      }
  Scc scc = strongly_connected(adj);
  std::size_t best = 0, best_node = np;
  for (std::size_t x = 0; x < np; ++x)
    if (reach[x] && scc.cyclic[scc.component[x]] && pg.cardinality(x / per_len) > best) {
      best = pg.cardinality(x / per_len);
      best_node = x;
    }
  rep.cardinality = std::max(best, rep.regular);
  rep.irregular = rep.cardinality > rep.regular;
  if (best_node != np) {
    // shortest cycle through best_node inside its component
    std::size_t comp = scc.component[best_node];
    std::vector<std::size_t> parent(np, np);
    std::vector<std::size_t> q{best_node};
    std::size_t found = np;
    for (std::size_t h = 0; h < q.size() && found == np; ++h)
      for (std::size_t w : adj[q[h]]) {
        if (scc.component[w] != comp) continue;
        if (w == best_node) {
          found = q[h];
          break;
        }
        if (parent[w] == np) {
          parent[w] = q[h];
          q.push_back(w);
        }
      }
    std::vector<std::size_t> cyc;
    for (std::size_t x = found; x != best_node; x = parent[x]) cyc.push_back(x);
    cyc.push_back(best_node);
    std::reverse(cyc.begin(), cyc.end());
    for (std::size_t x : cyc) rep.witness.push_back({pg.kept[x / per_len], x % per_len});
  }
  return rep;
}

struct SpectrumEntry {
  AxisSet J;
  std::string kind;  // interior | boundary | integer
  std::size_t value = 0;
};

struct FibreSpectrum {
  std::size_t regular = 0;
  std::vector<SpectrumEntry> entries;
};

inline std::vector<AxisSet> axis_subsets(std::size_t d) {
  std::vector<AxisSet> out;
  for (std::size_t mask = 0; mask < (std::size_t(1) << d); ++mask) {
    AxisSet s;
    for (std::size_t j = 0; j < d; ++j)
      if (mask >> j & 1) s.push_back(j);
    out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](const AxisSet& x, const AxisSet& y) { return x.size() != y.size() ? x.size() < y.size() : x < y; });
  return out;
}

inline FibreSpectrum fibre_spectrum(const Substitution& sub) {
  require_block(sub);
  require_trivial_height(sub);
  FibreSpectrum sp;
  sp.regular = column_number_and_minimal_sets(sub).column_number;
  for (const auto& J : axis_subsets(sub.dim())) {
    SpectrumEntry e;
    e.J = J;
    if (J.size() == sub.dim()) {
      e.kind = "integer";
      e.value = fixed_point_seeds(sub).count;
    } else {
      e.kind = J.empty() ? "interior" : "boundary";
      e.value = std::max(max_cycle_cardinality(pruned_reversed_graph(sub, J)), sp.regular);
    }
    sp.entries.push_back(e);
  }
  return sp;
}

inline std::string format_axes(const AxisSet& J) {
  std::string out = "{";
  for (std::size_t i = 0; i < J.size(); ++i) out += (i ? "," : "") + std::to_string(J[i] + 1);
  return out + "}";
}

// --- sofic presentation ---

inline std::string digit_tuple(const DigitSystem& s, std::size_t t) {
  Vec c = s.digit(t);
  std::string out = "(";
  for (std::size_t i = 0; i < c.size(); ++i) out += (i ? "," : "") + std::to_string(c[i]);
  return out + ")";
}

inline std::string pruned_edge_list(const PrunedGraph& pg) {
  std::ostringstream os;
  const auto& names = pg.derived.sub.names();
  for (const auto& e : pg.edges)
    os << format_set(names, pg.graph.vertices[pg.kept[e.from]]) << " -> " << format_set(names, pg.graph.vertices[pg.kept[e.to]])
       << " [label=" << digit_tuple(pg.derived.sub.system(), e.digit) << "]\n";
  return os.str();
}

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline std::string pruned_to_dot(const PrunedGraph& pg, const std::string& name) {
  std::ostringstream os;
  const auto& names = pg.derived.sub.names();
  os << "digraph " << name << " {\n";
  for (std::size_t k = 0; k < pg.kept.size(); ++k)
    os << "  v" << pg.kept[k] << " [label=\"" << dot_escape(format_set(names, pg.graph.vertices[pg.kept[k]])) << "\\n" << pg.cardinality(k)
       << "\"];\n";
  for (const auto& e : pg.edges)
    os << "  v" << pg.kept[e.from] << " -> v" << pg.kept[e.to] << " [label=\"" << digit_tuple(pg.derived.sub.system(), e.digit) << "\"];\n";
  os << "}\n";
  return os.str();
}

struct SoficExport {
  std::vector<AxisSet> J;
  std::vector<PrunedGraph> graphs;

  std::string dot() const {
    std::string out;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
      std::string nm = "Z_J";
      for (std::size_t j : J[i]) nm += std::to_string(j + 1);
      out += pruned_to_dot(graphs[i], nm);
    }
    return out;
  }
  std::string edge_list() const {
    std::string out;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
      out += "# J=" + format_axes(J[i]) + "\n";
      out += pruned_edge_list(graphs[i]);
    }
    return out;
  }
};

inline SoficExport sofic_export(const Substitution& sub) {
  require_block(sub);
  require_trivial_height(sub);
  SoficExport out;
  for (const auto& J : axis_subsets(sub.dim())) {
    if (J.size() == sub.dim()) continue;
    PrunedGraph pg = pruned_reversed_graph(sub, J);
    if (pg.kept.empty()) continue;
    out.J.push_back(J);
    out.graphs.push_back(std::move(pg));
  }
  return out;
}

}  // namespace subshift
