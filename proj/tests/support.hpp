#pragma once

// Fixture loading, random instances and brute-force oracles shared by the tests.
// The oracles deliberately avoid the library's supertile and column code.

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "subshift/subshift.hpp"

namespace testsupport {

using namespace subshift;

inline std::string fixture_path(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name + ".sub"; }

inline Substitution load(const std::string& name) { return load_manifest(fixture_path(name)).substitution(); }

inline const std::vector<std::string>& all_fixtures() {
  static const std::vector<std::string> names = {"subs_rev", "rho", "thue_morse", "period_doubling", "bijective_height3", "rot180",
                                                 "rot90",    "coinc_c4", "manta", "halfhex_decorated", "helix"};
  return names;
}

inline const std::vector<std::string>& block_fixtures_2d() {
  static const std::vector<std::string> names = {"bijective_height3", "rot180", "rot90", "coinc_c4", "manta", "halfhex_decorated"};
  return names;
}

// One-dimensional substitution from single-character letters: {"aacbaa", ...}.
inline Substitution word_sub(const std::string& letters, const std::vector<std::string>& images) {
  std::vector<std::string> names;
  for (char ch : letters) names.push_back(std::string(1, ch));
  std::vector<std::vector<Letter>> rules;
  for (const auto& w : images) {
    std::vector<Letter> r;
    for (char ch : w) r.push_back(static_cast<Letter>(letters.find(ch)));
    rules.push_back(r);
  }
  return Substitution(names, DigitSystem::block({static_cast<Int>(images.at(0).size())}), rules);
}

inline LetterSet set_of(const Substitution& s, const std::string& names) {
  LetterSet out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(s.letter(cur));
    cur.clear();
  };
  for (char ch : names) {
    if (ch == ' ' || ch == ',') flush();
    else cur += ch;
  }
  flush();
  std::sort(out.begin(), out.end());
  return out;
}

// Permutation from cycles written with letter names, e.g. {{"a","c"},{"d","f"}}.
inline Perm perm_of(const Substitution& s, const std::vector<std::vector<std::string>>& cycles) {
  Perm p = perm_identity(s.alphabet_size());
  for (const auto& c : cycles)
    for (std::size_t i = 0; i < c.size(); ++i) p[s.letter(c[i])] = s.letter(c[(i + 1) % c.size()]);
  return p;
}

// Random block substitution; callers filter for the properties they need.
inline Substitution random_block_sub(std::mt19937_64& rng, std::size_t dim, std::size_t letters, Int max_len) {
  std::uniform_int_distribution<Int> len(2, max_len);
  Vec lengths(dim);
  for (auto& l : lengths) l = len(rng);
  if (dim == 2 && std::uniform_int_distribution<int>(0, 1)(rng)) lengths[1] = lengths[0];
  DigitSystem sys = DigitSystem::block(lengths);
  std::uniform_int_distribution<Letter> pick(0, static_cast<Letter>(letters - 1));
  std::vector<std::string> names;
  for (std::size_t a = 0; a < letters; ++a) names.push_back(std::string(1, static_cast<char>('a' + a)));
  std::vector<std::vector<Letter>> rules(letters, std::vector<Letter>(sys.size()));
  for (auto& r : rules)
    for (auto& x : r) x = pick(rng);
  return Substitution(names, sys, rules);
}

// --- oracles ---

// Letter at position n of the level-k supertile of a, read digit by digit from
// the top level down using plain base-l arithmetic.
inline Letter naive_cell(const Substitution& s, Letter a, const Vec& n, std::size_t k) {
  const Vec& l = s.system().lengths();
  std::size_t d = l.size();
  Letter cur = a;
  for (std::size_t level = k; level-- > 0;) {
    Vec digit(d);
    for (std::size_t j = 0; j < d; ++j) {
      Int p = 1;
      for (std::size_t i = 0; i < level; ++i) p *= l[j];
      digit[j] = (n[j] / p) % l[j];
    }
    std::size_t idx = 0;
    for (std::size_t j = 0; j < d; ++j) idx = idx * static_cast<std::size_t>(l[j]) + static_cast<std::size_t>(digit[j]);
    cur = s.rules()[cur][idx];
  }
  return cur;
}

inline void for_each_point(const Vec& box, const std::function<void(const Vec&)>& f) {
  std::size_t d = box.size();
  Vec p(d, 0);
  if (d == 0) {
    f(p);
    return;
  }
  for (;;) {
    f(p);
    std::size_t j = d;
    while (j-- > 0) {
      if (++p[j] < box[j]) break;
      p[j] = 0;
      if (j == 0) return;
    }
  }
}

// Mirror-style action on the level-k box: rotate about the box centre.
inline Vec box_action(const Mat& a, const Vec& n, const Vec& box) {
  std::size_t d = n.size();
  Vec twice(d), out(d, 0);
  for (std::size_t j = 0; j < d; ++j) twice[j] = 2 * n[j] - (box[j] - 1);
  for (std::size_t i = 0; i < d; ++i) {
    Int v = 0;
    for (std::size_t j = 0; j < d; ++j) v += a[i][j] * twice[j];
    out[i] = (v + box[i] - 1) / 2;
  }
  return out;
}

// supertile(tau a)[A.n] == tau(supertile(a)[n]) for all a and n at level k.
inline bool naive_shuffle_check(const Substitution& s, const Perm& tau, const Mat& a, std::size_t k) {
  Vec box = s.system().lengths();
  for (auto& x : box) {
    Int p = 1;
    for (std::size_t i = 0; i < k; ++i) p *= x;
    x = p;
  }
  bool ok = true;
  for (Letter b = 0; b < s.alphabet_size() && ok; ++b)
    for_each_point(box, [&](const Vec& n) {
      if (!ok) return;
      Vec m = box_action(a, n, box);
      if (!in_box(box, m) || naive_cell(s, static_cast<Letter>(tau[b]), m, k) != tau[naive_cell(s, b, n, k)]) ok = false;
    });
  return ok;
}

inline std::vector<Perm> all_perms(std::size_t n) {
  std::vector<Perm> out;
  Perm p = perm_identity(n);
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// Column number by brute force over all column maps of levels 1..kmax.
inline std::size_t brute_column_number(const Substitution& s, std::size_t kmax) {
  std::size_t n = s.alphabet_size(), best = n;
  std::set<ColumnMap> level;
  for (std::size_t i = 0; i < s.digit_count(); ++i) level.insert(s.digit_column(i));
  for (std::size_t k = 1; k <= kmax; ++k) {
    for (const auto& f : level) best = std::min(best, std::set<Letter>(f.begin(), f.end()).size());
    std::set<ColumnMap> next;
    for (const auto& f : level)
      for (std::size_t i = 0; i < s.digit_count(); ++i) {
        ColumnMap g(n);
        for (std::size_t a = 0; a < n; ++a) g[a] = s.image(f[a], i);
        next.insert(g);
      }
    level = std::move(next);
  }
  return best;
}

// One-dimensional height from a long fixed-point prefix:
// gcd{k : u_k = u_0, gcd(k, l) = 1}.
inline Int gcd_height_1d(const Substitution& s, std::size_t min_len) {
  Int l = s.system().lengths()[0];
  ColumnMap f0 = s.digit_column(0);
  // a letter on a cycle of the first column; iterate a multiple of the cycle length
  Letter seed = 0;
  std::size_t period = 0;
  for (Letter a = 0; a < s.alphabet_size() && !period; ++a) {
    Letter b = f0[a];
    for (std::size_t i = 1; i <= s.alphabet_size(); ++i, b = f0[b])
      if (b == a) {
        seed = a;
        period = i;
        break;
      }
  }
  std::vector<Letter> u{seed};
  std::size_t steps = 0;
  while (u.size() < min_len || steps % period != 0) {
    std::vector<Letter> next;
    for (Letter x : u)
      for (std::size_t i = 0; i < s.digit_count(); ++i) next.push_back(s.image(x, i));
    u = std::move(next);
    ++steps;
  }
  Int g = 0;
  for (std::size_t k = 1; k < u.size(); ++k)
    if (u[k] == u[0]) g = std::gcd(g, static_cast<Int>(k));
  // largest divisor of g coprime to l
  for (Int c = std::gcd(g, l); c > 1; c = std::gcd(g, l)) g /= c;
  return g;
}

// Patterns on `support` read off level-n supertiles, for increasing n until
// two successive levels agree.
inline std::set<std::vector<Letter>> extracted_patterns(const Substitution& s, const std::vector<Vec>& support,
                                                        std::size_t max_cells = 1 << 20) {
  std::set<std::vector<Letter>> prev;
  for (std::size_t n = 1;; ++n) {
    Vec box = block_power_lengths(s.system().lengths(), n);
    std::size_t cells = block_size(box) * s.alphabet_size();
    if (cells > max_cells) return prev;
    std::set<std::vector<Letter>> cur;
    for (Letter a = 0; a < s.alphabet_size(); ++a)
      for_each_point(box, [&](const Vec& base) {
        std::vector<Letter> pat;
        for (const auto& off : support) {
          Vec p = vec_add(base, off);
          if (!in_box(box, p)) return;
          pat.push_back(naive_cell(s, a, p, n));
        }
        cur.insert(pat);
      });
    if (n > 1 && cur == prev) return cur;
    prev = std::move(cur);
  }
}

// Fibre simulation: the level-L tiles around the origin form a legal B_J
// pattern; following the digits of z down to level m gives the level-m tiles,
// and the number of distinct level-m windows is counted.
inline std::size_t simulated_fibre(const Substitution& s, const QadicPoint& z, std::size_t m, std::size_t extra,
                                   const std::set<std::vector<Letter>>& legal, const std::vector<Vec>& support) {
  const Vec& l = s.system().lengths();
  std::size_t d = l.size(), L = m + extra;
  std::set<std::vector<std::vector<Letter>>> windows;
  for (const auto& pat : legal) {
    std::vector<std::vector<Letter>> w;
    for (std::size_t e = 0; e < support.size(); ++e) {
      Letter cur = pat[e];
      for (std::size_t level = L; level-- > m;) {
        std::size_t idx = 0;
        for (std::size_t j = 0; j < d; ++j) {
          Int dg = z[j].integer ? (support[e][j] == -1 ? l[j] - 1 : 0) : z[j].digit(level);
          idx = idx * static_cast<std::size_t>(l[j]) + static_cast<std::size_t>(dg);
        }
        cur = s.rules()[cur][idx];
      }
      Vec box = block_power_lengths(l, m);
      std::vector<Letter> tile;
      for_each_point(box, [&](const Vec& p) { tile.push_back(naive_cell(s, cur, p, m)); });
      w.push_back(std::move(tile));
    }
    windows.insert(std::move(w));
  }
  return windows.size();
}

inline std::vector<Vec> boundary_cells(std::size_t d, const QadicPoint& z) {
  std::vector<Vec> out{Vec(d, 0)};
  for (std::size_t j = 0; j < d; ++j)
    if (z[j].integer) {
      std::size_t n = out.size();
      for (std::size_t i = 0; i < n; ++i) {
        Vec p = out[i];
        p[j] = -1;
        out.push_back(p);
      }
    }
  std::sort(out.begin(), out.end());
  return out;
}

inline QadicCoord periodic(std::vector<Int> period, std::vector<Int> pre = {}) {
  QadicCoord c;
  c.integer = false;
  c.pre = std::move(pre);
  c.period = std::move(period);
  return c;
}

inline QadicCoord integer_coord(Int v = 0) {
  QadicCoord c;
  c.value = v;
  return c;
}

// --- symmetry search against the exhaustive shuffle check ---

using Pair = std::pair<Perm, Mat>;

inline bool distinct_rules(const Substitution& s) {
  std::set<std::vector<Letter>> r(s.rules().begin(), s.rules().end());
  return r.size() == s.alphabet_size();
}

inline std::size_t cells_at(const Substitution& s, std::size_t k) { return block_size(block_power_lengths(s.system().lengths(), k)); }

inline std::set<Pair> brute_pairs(const Substitution& s, std::size_t k) {
  std::set<Pair> out;
  for (const auto& g : box_symmetry_group(s.system().lengths()))
    for (const auto& tau : all_perms(s.alphabet_size()))
      if (naive_shuffle_check(s, tau, g.A, k) && naive_shuffle_check(s, tau, g.A, 2 * k)) out.insert({tau, g.A});
  return out;
}

inline std::set<Pair> found_pairs(const SearchReport& r) {
  std::set<Pair> out;
  for (const auto& f : r.found) out.insert({f.tau, f.A});
  return out;
}

}  // namespace testsupport
