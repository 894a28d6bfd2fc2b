#pragma once

// Column semigroup: coincidence graph, minimal sets, idempotents, encodings.

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "subshift/core.hpp"

namespace subshift {

using LetterSet = std::vector<Letter>;  // sorted, distinct
using Perm = std::vector<std::size_t>;

inline LetterSet image_of(const ColumnMap& f, const LetterSet& s) {
  LetterSet r;
  r.reserve(s.size());
  for (Letter a : s) r.push_back(f[a]);
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

inline LetterSet full_set(std::size_t n) {
  LetterSet s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = static_cast<Letter>(i);
  return s;
}

inline LetterSet range_of(const ColumnMap& f) { return image_of(f, full_set(f.size())); }

inline bool is_idempotent(const ColumnMap& f) { return compose(f, f) == f; }

inline std::string format_set(const std::vector<std::string>& names, const LetterSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + names[s[i]];
  return out + "}";
}

inline std::string format_address(const Address& w) {
  std::string out = "[";
  for (std::size_t i = 0; i < w.size(); ++i) out += (i ? "," : "") + std::to_string(w[i]);
  return out + "]";
}

// --- permutations of [0, n) ---

inline Perm perm_identity(std::size_t n) {
  Perm p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  return p;
}

// f o g
inline Perm perm_compose(const Perm& f, const Perm& g) {
  Perm r(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) r[i] = f[g[i]];
  return r;
}

inline Perm perm_inverse(const Perm& p) {
  Perm r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[p[i]] = i;
  return r;
}

inline bool is_permutation(const Perm& p) {
  std::vector<char> seen(p.size(), 0);
  for (std::size_t x : p) {
    if (x >= p.size() || seen[x]) return false;
    seen[x] = 1;
  }
  return true;
}

// Cycle notation, e.g. "(b c)" or "id"; labels default to indices.
inline std::string cycle_notation(const Perm& p, const std::vector<std::string>* names = nullptr) {
  std::vector<char> done(p.size(), 0);
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (done[i] || p[i] == i) continue;
    out += "(";
    std::size_t j = i;
    bool first = true;
    while (!done[j]) {
      done[j] = 1;
      out += (first ? "" : " ") + (names ? (*names)[j] : std::to_string(j));
      first = false;
      j = p[j];
    }
    out += ")";
  }
  return out.empty() ? "id" : out;
}

inline Perm letter_perm(const ColumnMap& f) { return Perm(f.begin(), f.end()); }

// --- coincidence graph ---

struct CoincidenceGraph {
  std::vector<LetterSet> vertices;              // discovery order
  std::vector<std::vector<std::size_t>> target; // target[v][digit]
  std::map<LetterSet, std::size_t> index;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t digit_count() const { return target.empty() ? 0 : target[0].size(); }

  std::multiset<std::size_t> cardinalities() const {
    std::multiset<std::size_t> m;
    for (const auto& v : vertices) m.insert(v.size());
    return m;
  }
};

// Closure of the full alphabet under one-digit columns, breadth first.
inline CoincidenceGraph coincidence_graph(const Substitution& sub) {
  CoincidenceGraph g;
  std::vector<ColumnMap> cols;
  for (std::size_t i = 0; i < sub.digit_count(); ++i) cols.push_back(sub.digit_column(i));
  g.vertices.push_back(full_set(sub.alphabet_size()));
  g.index.emplace(g.vertices.back(), 0);
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    std::vector<std::size_t> row(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) {
      LetterSet img = image_of(cols[i], g.vertices[v]);
      auto it = g.index.find(img);
      if (it == g.index.end()) {
        it = g.index.emplace(img, g.vertices.size()).first;
        g.vertices.push_back(img);
      }
      row[i] = it->second;
    }
    g.target.push_back(std::move(row));
  }
  return g;
}

inline std::string digit_label(const DigitSystem& s, std::size_t i) {
  if (s.dim() == 1) return std::to_string(s.digit(i)[0]);
  return format_vec(s.digit(i));
}

inline std::string graph_to_dot(const CoincidenceGraph& g, const Substitution& sub, const std::string& name = "coincidence") {
  std::ostringstream os;
  os << "digraph " << name << " {\n";
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    os << "  v" << v << " [label=\"" << format_set(sub.names(), g.vertices[v]) << "\\n" << g.vertices[v].size() << "\"];\n";
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    for (std::size_t i = 0; i < g.target[v].size(); ++i)
      os << "  v" << v << " -> v" << g.target[v][i] << " [label=\"" << digit_label(sub.system(), i) << "\"];\n";
  os << "}\n";
  return os.str();
}

// --- minimal sets ---

struct MinimalSetFamily {
  std::size_t column_number = 0;
  std::vector<LetterSet> sets;
  // Filled by idempotent_realization_power.
  std::size_t realization_power = 0;
  std::vector<Address> idempotent_addresses;  // aligned with sets
  std::vector<ColumnMap> idempotents;

  std::ptrdiff_t find(const LetterSet& s) const {
    auto it = std::find(sets.begin(), sets.end(), s);
    return it == sets.end() ? -1 : it - sets.begin();
  }
};

inline MinimalSetFamily column_number_and_minimal_sets(const CoincidenceGraph& g) {
  MinimalSetFamily f;
  f.column_number = g.vertices.front().size();
  for (const auto& v : g.vertices) f.column_number = std::min(f.column_number, v.size());
  for (const auto& v : g.vertices)
    if (v.size() == f.column_number) f.sets.push_back(v);
  return f;
}

inline MinimalSetFamily column_number_and_minimal_sets(const Substitution& sub) {
  return column_number_and_minimal_sets(coincidence_graph(sub));
}

// Smallest level at which every minimal set is the image of an idempotent
// column. Columns of one level are kept as a set of distinct maps with the
// lexicographically smallest realizing address; the search stops with
// BoundExceeded once the sequence of level sets repeats.
inline MinimalSetFamily idempotent_realization_power(const Substitution& sub, std::size_t max_level = 256) {
  MinimalSetFamily fam = column_number_and_minimal_sets(sub);
  std::vector<ColumnMap> digit_cols;
  for (std::size_t i = 0; i < sub.digit_count(); ++i) digit_cols.push_back(sub.digit_column(i));
  std::map<ColumnMap, Address> level;
  for (std::size_t i = 0; i < digit_cols.size(); ++i) level.emplace(digit_cols[i], Address{i});
  std::set<std::vector<ColumnMap>> history;
  for (std::size_t k = 1; k <= max_level; ++k) {
    std::vector<Address> addr(fam.sets.size());
    std::vector<ColumnMap> maps(fam.sets.size());
    std::vector<char> have(fam.sets.size(), 0);
    for (const auto& [f, w] : level) {
      if (!is_idempotent(f)) continue;
      auto m = fam.find(range_of(f));
      if (m < 0) continue;
      if (!have[m] || w < addr[m]) {
        have[m] = 1;
        addr[m] = w;
        maps[m] = f;
      }
    }
    if (std::all_of(have.begin(), have.end(), [](char c) { return c != 0; })) {
      fam.realization_power = k;
      fam.idempotent_addresses = std::move(addr);
      fam.idempotents = std::move(maps);
      return fam;
    }
    std::vector<ColumnMap> key;
    for (const auto& kv : level) key.push_back(kv.first);
    if (!history.insert(key).second) break;
    std::map<ColumnMap, Address> next;
    for (const auto& [f, w] : level)
      for (std::size_t i = 0; i < digit_cols.size(); ++i) {
        ColumnMap h = compose(digit_cols[i], f);
        Address nw = w;
        nw.push_back(i);
        auto it = next.find(h);
        if (it == next.end())
          next.emplace(std::move(h), std::move(nw));
        else if (nw < it->second)
          it->second = std::move(nw);
      }
    level = std::move(next);
  }
  throw VerificationFailure("no level realizes every minimal set by an idempotent column", "BoundExceeded");
}

// --- encodings and beta maps ---

struct Encoding {
  std::size_t c = 0;
  LetterSet reference_set;  // M0
  ColumnMap iota;           // idempotent with image M0
  std::vector<std::size_t> nu;      // letter -> [c]
  ColumnMap iota_bar;       // idempotent with image tau[M0]
  std::vector<std::size_t> nu_bar;  // letter -> [c]
};

// nu = nu0 o iota, nu0 ordering M0 by alphabet index.
inline Encoding base_encoding(const MinimalSetFamily& fam, std::size_t reference = 0) {
  Encoding e;
  e.c = fam.column_number;
  e.reference_set = fam.sets.at(reference);
  e.iota = fam.idempotents.at(reference);
  std::vector<std::size_t> nu0(e.iota.size(), 0);
  for (std::size_t i = 0; i < e.reference_set.size(); ++i) nu0[e.reference_set[i]] = i;
  e.nu.resize(e.iota.size());
  for (std::size_t a = 0; a < e.iota.size(); ++a) e.nu[a] = nu0[e.iota[a]];
  e.iota_bar = e.iota;
  e.nu_bar = e.nu;
  return e;
}

// beta^{-1}_{M,f} = nu o f o (nu|_M)^{-1} for a given encoding nu.
inline Perm beta_inverse_with(const std::vector<std::size_t>& nu, std::size_t c, const LetterSet& m, const ColumnMap& f) {
  if (m.size() != c) throw InputError("beta map needs a set of cardinality c");
  Perm inv(c, c);
  for (Letter a : m) {
    if (inv[nu[a]] != c) throw VerificationFailure("encoding is not injective on a minimal set");
    inv[nu[a]] = a;
  }
  Perm r(c);
  for (std::size_t i = 0; i < c; ++i) r[i] = nu[f[inv[i]]];
  if (!is_permutation(r)) throw VerificationFailure("column does not act bijectively on a minimal set");
  return r;
}

inline Perm beta_inverse(const Encoding& e, const LetterSet& m, const ColumnMap& f, bool barred = false) {
  return beta_inverse_with(barred ? e.nu_bar : e.nu, e.c, m, f);
}

inline Perm beta(const Encoding& e, const LetterSet& m, const ColumnMap& f, bool barred = false) {
  return perm_inverse(beta_inverse(e, m, f, barred));
}

inline Perm beta(const Substitution& sub, const Encoding& e, const LetterSet& m, const Address& addr, bool barred = false) {
  return beta(e, m, column(sub, addr), barred);
}

}  // namespace subshift
