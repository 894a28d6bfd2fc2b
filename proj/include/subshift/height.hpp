#pragma once

// Return module, height lattice and the induced alphabet partition.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "subshift/columns.hpp"
#include "subshift/core.hpp"
#include "subshift/lattice.hpp"

namespace subshift {

// A letter on a cycle of the column at the origin digit (or of digit 0 when
// the origin is not a digit), so that its supertiles nest into a periodic point.
inline Letter seed_letter(const Substitution& sub) {
  auto zero = sub.system().find_digit(Vec(sub.dim(), 0));
  ColumnMap f = sub.digit_column(zero.value_or(0));
  std::size_t n = sub.alphabet_size();
  for (Letter a = 0; a < n; ++a) {
    Letter b = f[a];
    for (std::size_t p = 0; p < n; ++p) {
      if (b == a) return a;
      b = f[b];
    }
  }
  throw HypothesisViolation("no letter is periodic under the origin column", "NoFixedLetter");
}

struct ReturnModule {
  Lattice lattice;
  std::size_t level = 0;    // level of the last supertile scanned
  bool stabilized = false;  // identical bases on two successive levels (k >= 3)
};

inline ReturnModule return_module(const Substitution& sub, std::size_t max_cells = std::size_t(1) << 21) {
  require_primitive(sub);
  const std::size_t d = sub.dim();
  Letter seed = seed_letter(sub);
  ReturnModule out;
  std::optional<Mat> prev;
  Mat basis;
  for (std::size_t k = 1;; ++k) {
    std::size_t cells = 1;
    for (std::size_t i = 0; i < k; ++i) cells *= sub.digit_count();
    if (cells > max_cells && k > 1) break;
    Pattern p = supertile(sub, seed, k);
    std::map<Letter, Vec> first;
    basis.clear();
    for (std::size_t i = 0; i < p.cells.size(); ++i) {
      auto [it, fresh] = first.emplace(p.cells[i], p.support[i]);
      if (fresh) continue;
      Vec diff = vec_sub(p.support[i], it->second);
      if (basis.size() == d) {
        Lattice cur = Lattice::from_generators(basis, d);
        if (cur.contains(diff)) continue;
      }
      basis.push_back(diff);
      basis = hermite_rows(basis, d);
    }
    out.level = k;
    if (basis.size() == d) {
      if (prev && *prev == basis && k >= 3) {
        out.stabilized = true;
        break;
      }
      prev = basis;
    }
  }
  if (basis.size() != d) throw HypothesisViolation("return module is not of full rank (periodic input?)");
  out.lattice = Lattice::from_generators(basis, d);
  return out;
}

struct HeightResult {
  Lattice return_module;
  Lattice gamma;
  std::size_t scanned_level = 0;
  bool stabilized = false;
  bool coprime = false;
  bool minimal = false;
  bool trivial() const { return gamma.is_standard(); }
};

inline std::vector<Int> prime_factors(Int n) {
  std::vector<Int> ps;
  for (Int p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      ps.push_back(p);
      while (n % p == 0) n /= p;
    }
  if (n > 1) ps.push_back(n);
  return ps;
}

// Sublattices of prime index p inside `outer`.
inline std::vector<Lattice> prime_index_sublattices(const Lattice& outer, Int p) {
  const std::size_t d = outer.dim();
  const Mat& h = outer.basis();
  std::vector<Lattice> out;
  for (std::size_t i = 0; i < d; ++i) {
    // HNF with pivot p in column i; free entries above it in [0, p).
    std::size_t free = i;
    std::vector<Int> coef(free, 0);
    while (true) {
      Mat t = identity_matrix(d);
      t[i][i] = p;
      for (std::size_t j = 0; j < free; ++j) t[j][i] = coef[j];
      Mat gens;
      for (const auto& row : t) {
        Vec g(d, 0);
        for (std::size_t j = 0; j < d; ++j)
          for (std::size_t c = 0; c < d; ++c) g[c] += row[j] * h[j][c];
        gens.push_back(g);
      }
      out.push_back(Lattice::from_generators(gens, d));
      std::size_t pos = 0;
      while (pos < free && ++coef[pos] == p) coef[pos++] = 0;
      if (pos == free) break;
    }
  }
  return out;
}

// Saturation Gamma = U_m (Q^{-m} L cap Z^d), then verified: Gamma + Q Z^d = Z^d,
// and no proper sublattice of Gamma containing L is coprime with Q Z^d. It is
// enough to test maximal (prime-index) sublattices: any coprime lattice between
// L and Gamma lies in one of them, and coprimality passes to superlattices.
inline HeightResult height_lattice(const Substitution& sub) {
  ReturnModule rm = return_module(sub);
  HeightResult out;
  out.return_module = rm.lattice;
  out.scanned_level = rm.level;
  out.stabilized = rm.stabilized;
  const Mat& q = sub.system().Q();
  const Lattice& qz = sub.system().supertile_lattice();
  Lattice g = rm.lattice;
  for (std::size_t iter = 0; iter < 256; ++iter) {
    Lattice next = g.sum(g.preimage(q));
    if (next == g) break;
    g = next;
  }
  out.gamma = g;
  out.coprime = g.sum(qz).is_standard();
  if (!out.coprime || !g.contains(rm.lattice))
    throw VerificationFailure("saturated lattice " + g.to_string() + " is not coprime with the supertile lattice", "SaturationInvalid");
  Int idx = rm.lattice.index() / g.index();
  out.minimal = true;
  for (Int p : prime_factors(idx))
    for (const auto& cand : prime_index_sublattices(g, p))
      if (cand.contains(rm.lattice) && cand.sum(qz).is_standard()) out.minimal = false;
  if (!out.minimal)
    throw VerificationFailure("saturated lattice " + g.to_string() + " is not the smallest coprime lattice containing the return module",
                              "SaturationInvalid");
  return out;
}

inline bool matrix_preserves_lattice(const Mat& a, const Lattice& gamma) { return gamma.image(a) == gamma; }

struct HeightData {
  Lattice gamma;
  std::vector<Vec> fundamental_domain;
  std::vector<Vec> partition;  // letter -> coset representative
  Vec anchor;                  // k0 (the seed supertile origin)
  std::vector<LetterSet> classes() const {
    std::vector<LetterSet> out;
    for (const auto& r : fundamental_domain) {
      LetterSet s;
      for (std::size_t a = 0; a < partition.size(); ++a)
        if (partition[a] == r) s.push_back(static_cast<Letter>(a));
      out.push_back(s);
    }
    return out;
  }
};

inline HeightData alphabet_partition(const Substitution& sub, const Lattice& gamma, std::size_t level = 0) {
  Primitivity pr = is_primitive(sub);
  if (!pr.primitive) throw HypothesisViolation("substitution is not primitive", "NotPrimitive");
  std::size_t k = std::max<std::size_t>(level, pr.exponent);
  for (;;) {
    std::size_t cells = 1;
    for (std::size_t i = 0; i < k; ++i) cells *= sub.digit_count();
    if (cells >= 4096 || cells * sub.digit_count() > (std::size_t(1) << 20)) break;
    ++k;
  }
  HeightData hd;
  hd.gamma = gamma;
  hd.fundamental_domain = gamma.fundamental_domain();
  hd.anchor = Vec(sub.dim(), 0);
  Pattern p = supertile(sub, seed_letter(sub), k);
  std::vector<std::optional<Vec>> cls(sub.alphabet_size());
  for (std::size_t i = 0; i < p.cells.size(); ++i) {
    Vec r = gamma.reduce(p.support[i]);
    auto& c = cls[p.cells[i]];
    if (!c)
      c = r;
    else if (*c != r)
      throw HypothesisViolation("letter '" + sub.name(p.cells[i]) + "' occurs in two residue classes", "InconsistentPartition");
  }
  for (std::size_t a = 0; a < cls.size(); ++a) {
    if (!cls[a]) throw HypothesisViolation("letter '" + sub.name(static_cast<Letter>(a)) + "' does not occur in the scanned supertile");
    hd.partition.push_back(*cls[a]);
  }
  return hd;
}

inline void require_trivial_height(const Substitution& sub) {
  HeightResult h = height_lattice(sub);
  if (!h.trivial())
    throw HypothesisViolation("height lattice " + h.gamma.to_string() + " is not trivial", "HeightNonTrivial");
}

}  // namespace subshift
