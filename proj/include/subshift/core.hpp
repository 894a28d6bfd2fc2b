#pragma once

// Digit systems, substitutions, supertiles and columns.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "subshift/error.hpp"
#include "subshift/lattice.hpp"

namespace subshift {

using Letter = std::uint32_t;
using ColumnMap = std::vector<Letter>;  // letter -> letter
using Address = std::vector<std::size_t>;  // digit indices [n_{k-1}, ..., n_0]

inline std::size_t block_size(const Vec& lengths) {
  std::size_t n = 1;
  for (Int l : lengths) n *= static_cast<std::size_t>(l);
  return n;
}

// Canonical cell order of a box: lexicographic, last coordinate fastest.
inline std::size_t block_index(const Vec& lengths, const Vec& coords) {
  std::size_t idx = 0;
  for (std::size_t j = 0; j < lengths.size(); ++j) idx = idx * static_cast<std::size_t>(lengths[j]) + static_cast<std::size_t>(coords[j]);
  return idx;
}

inline Vec block_coords(const Vec& lengths, std::size_t idx) {
  Vec c(lengths.size());
  for (std::size_t j = lengths.size(); j-- > 0;) {
    c[j] = static_cast<Int>(idx % static_cast<std::size_t>(lengths[j]));
    idx /= static_cast<std::size_t>(lengths[j]);
  }
  return c;
}

inline bool in_box(const Vec& lengths, const Vec& p) {
  for (std::size_t j = 0; j < lengths.size(); ++j)
    if (p[j] < 0 || p[j] >= lengths[j]) return false;
  return true;
}

class DigitSystem {
 public:
  DigitSystem() = default;

  // Box [0,l_1-1] x ... x [0,l_d-1] with Q = diag(l); dimension zero allowed.
  static DigitSystem block(const Vec& lengths) {
    DigitSystem s;
    s.dim_ = lengths.size();
    s.lengths_ = lengths;
    s.block_ = true;
    s.q_ = diagonal_matrix(lengths);
    for (Int l : lengths)
      if (l < 1) throw InputError("block side lengths must be positive");
    std::size_t n = block_size(lengths);
    s.digits_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) s.digits_.push_back(block_coords(lengths, i));
    s.finish();
    return s;
  }

  static DigitSystem explicit_digits(const Mat& q, const std::vector<Vec>& digits) {
    DigitSystem s;
    s.dim_ = q.size();
    for (const auto& row : q)
      if (row.size() != s.dim_) throw InputError("expansion matrix must be square");
    for (const auto& dgt : digits)
      if (dgt.size() != s.dim_) throw InputError("digit dimension does not match the expansion matrix");
    s.q_ = q;
    s.digits_ = digits;
    s.finish();
    return s;
  }

  std::size_t dim() const { return dim_; }
  const Mat& Q() const { return q_; }
  const std::vector<Vec>& digits() const { return digits_; }
  const Vec& digit(std::size_t i) const { return digits_[i]; }
  std::size_t size() const { return digits_.size(); }
  bool is_block() const { return block_; }
  const Vec& lengths() const { return lengths_; }
  Int det() const { return det_; }

  std::optional<std::size_t> find_digit(const Vec& v) const {
    if (block_) {
      if (v.size() != dim_ || !in_box(lengths_, v)) return std::nullopt;
      return block_index(lengths_, v);
    }
    auto it = digit_lookup_.find(v);
    if (it == digit_lookup_.end()) return std::nullopt;
    return it->second;
  }

  // n = Q s + digit(i); returns (s, i). Empty optional when the residue class
  // of n carries no digit (only possible for invalid systems).
  std::optional<std::pair<Vec, std::size_t>> split(const Vec& n) const {
    if (block_) {
      Vec s(dim_), r(dim_);
      for (std::size_t j = 0; j < dim_; ++j) {
        s[j] = floor_div(n[j], lengths_[j]);
        r[j] = n[j] - s[j] * lengths_[j];
      }
      return std::make_pair(s, block_index(lengths_, r));
    }
    auto it = residue_lookup_.find(qlat_.reduce(n));
    if (it == residue_lookup_.end()) return std::nullopt;
    Vec diff = vec_sub(n, digits_[it->second]);
    Vec s = mat_vec(adj_, diff);
    for (auto& x : s) {
      if (x % det_ != 0) return std::nullopt;
      x /= det_;
    }
    return std::make_pair(s, it->second);
  }

  // Residue class key of n modulo Q Z^d.
  Vec residue(const Vec& n) const { return qlat_.reduce(n); }

  const Lattice& supertile_lattice() const { return qlat_; }

  bool operator==(const DigitSystem& o) const { return q_ == o.q_ && digits_ == o.digits_ && block_ == o.block_; }

 private:
  void finish() {
    det_ = dim_ == 0 ? 1 : determinant(q_);
    if (dim_ > 0) {
      if (det_ == 0) throw InputError("expansion matrix is singular");
      adj_ = adjugate(q_);
      qlat_ = Lattice::from_columns(q_);
    } else {
      qlat_ = Lattice::from_generators({}, 0);
    }
    for (std::size_t i = 0; i < digits_.size(); ++i) {
      digit_lookup_.emplace(digits_[i], i);
      residue_lookup_.emplace(qlat_.reduce(digits_[i]), i);
    }
  }

  std::size_t dim_ = 0;
  Mat q_;
  std::vector<Vec> digits_;
  Vec lengths_;
  bool block_ = false;
  Int det_ = 1;
  Mat adj_;
  Lattice qlat_;
  std::map<Vec, std::size_t> digit_lookup_;
  std::map<Vec, std::size_t> residue_lookup_;
};

// All violations of the complete-residue-system and expansivity conditions.
inline std::vector<std::string> validate_digit_system(const DigitSystem& s) {
  std::vector<std::string> out;
  if (s.dim() == 0) return out;
  Int adet = s.det() < 0 ? -s.det() : s.det();
  if (adet < 2) out.push_back("|det Q| must be at least 2");
  if (static_cast<Int>(s.size()) != adet)
    out.push_back("number of digits (" + std::to_string(s.size()) + ") differs from |det Q| (" + std::to_string(adet) + ")");
  std::map<Vec, std::size_t> seen;
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto [it, fresh] = seen.emplace(s.residue(s.digit(i)), i);
    if (!fresh)
      out.push_back("duplicate residue class: digits " + format_vec(s.digit(it->second)) + " and " + format_vec(s.digit(i)));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(s.dim()), static_cast<Eigen::Index>(s.dim()));
  for (std::size_t i = 0; i < s.dim(); ++i)
    for (std::size_t j = 0; j < s.dim(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = static_cast<double>(s.Q()[i][j]);
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()[i]) < 1.0 + 1e-9) {
      out.push_back("expansion matrix has an eigenvalue of modulus <= 1");
      break;
    }
  return out;
}

struct Pattern {
  std::vector<Vec> support;
  std::vector<Letter> cells;

  std::optional<Letter> at(const Vec& p) const {
    for (std::size_t i = 0; i < support.size(); ++i)
      if (support[i] == p) return cells[i];
    return std::nullopt;
  }
  bool operator==(const Pattern& o) const { return support == o.support && cells == o.cells; }
};

class Substitution {
 public:
  Substitution() = default;
  Substitution(std::vector<std::string> names, DigitSystem system, std::vector<std::vector<Letter>> rules)
      : names_(std::move(names)), system_(std::move(system)), rules_(std::move(rules)) {
    if (names_.empty()) throw InputError("alphabet must not be empty");
    std::map<std::string, Letter> seen;
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (!seen.emplace(names_[i], static_cast<Letter>(i)).second) throw InputError("duplicate letter '" + names_[i] + "'");
    if (rules_.size() != names_.size()) throw InputError("rule count differs from alphabet size");
    for (std::size_t a = 0; a < rules_.size(); ++a) {
      if (rules_[a].size() != system_.size())
        throw InputError("rule for letter '" + names_[a] + "' has " + std::to_string(rules_[a].size()) + " cells, expected " +
                         std::to_string(system_.size()));
      for (Letter b : rules_[a])
        if (b >= names_.size()) throw InputError("rule for letter '" + names_[a] + "' uses an unknown letter");
    }
    index_ = std::move(seen);
  }

  std::size_t alphabet_size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(Letter a) const { return names_[a]; }
  const DigitSystem& system() const { return system_; }
  std::size_t dim() const { return system_.dim(); }
  std::size_t digit_count() const { return system_.size(); }
  const std::vector<std::vector<Letter>>& rules() const { return rules_; }
  Letter image(Letter a, std::size_t digit) const { return rules_[a][digit]; }

  std::optional<Letter> find_letter(const std::string& n) const {
    auto it = index_.find(n);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  Letter letter(const std::string& n) const {
    auto l = find_letter(n);
    if (!l) throw InputError("unknown letter '" + n + "'");
    return *l;
  }

  // One-digit column theta_i.
  ColumnMap digit_column(std::size_t i) const {
    ColumnMap c(names_.size());
    for (std::size_t a = 0; a < names_.size(); ++a) c[a] = rules_[a][i];
    return c;
  }

  bool operator==(const Substitution& o) const { return names_ == o.names_ && system_ == o.system_ && rules_ == o.rules_; }

 private:
  std::vector<std::string> names_;
  DigitSystem system_;
  std::vector<std::vector<Letter>> rules_;
  std::map<std::string, Letter> index_;
};

inline Vec address_position(const DigitSystem& s, const Address& word) {
  Vec n(s.dim(), 0);
  for (std::size_t d : word) n = vec_add(mat_vec(s.Q(), n), s.digit(d));
  return n;
}

// Q-adic decomposition of n at level k.
inline Address q_adic_decompose(const Vec& n, const DigitSystem& s, std::size_t k) {
  if (n.size() != s.dim()) throw InputError("point dimension mismatch");
  Address rev;
  Vec cur = n;
  for (std::size_t i = 0; i < k; ++i) {
    auto sp = s.split(cur);
    if (!sp) throw InputError("point " + format_vec(n) + " has no digit expansion", "NotInSupport");
    rev.push_back(sp->second);
    cur = sp->first;
  }
  for (Int x : cur)
    if (x != 0) throw InputError("point " + format_vec(n) + " is not in the level-" + std::to_string(k) + " support", "NotInSupport");
  return Address(rev.rbegin(), rev.rend());
}

inline ColumnMap identity_map(std::size_t n) {
  ColumnMap c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = static_cast<Letter>(i);
  return c;
}

// f o g
inline ColumnMap compose(const ColumnMap& f, const ColumnMap& g) {
  ColumnMap r(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) r[i] = f[g[i]];
  return r;
}

// theta_{n_0} o theta_{n_1} o ... o theta_{n_{k-1}}; the first word entry acts first.
inline ColumnMap column(const Substitution& sub, const Address& word) {
  ColumnMap c = identity_map(sub.alphabet_size());
  for (std::size_t d : word) {
    ColumnMap next(c.size());
    for (std::size_t a = 0; a < c.size(); ++a) next[a] = sub.image(c[a], d);
    c = std::move(next);
  }
  return c;
}

namespace detail {

// Level-k supertiles in address order: index = sum idx(n_i) |D|^i.
struct SupertileTable {
  std::vector<Vec> positions;
  std::vector<std::vector<Letter>> cells;  // per letter
};

inline SupertileTable supertile_table(const Substitution& sub, std::size_t k) {
  const auto& s = sub.system();
  SupertileTable t;
  t.positions = {Vec(s.dim(), 0)};
  t.cells.resize(sub.alphabet_size());
  for (std::size_t a = 0; a < sub.alphabet_size(); ++a) t.cells[a] = {static_cast<Letter>(a)};
  std::size_t nd = s.size();
  for (std::size_t lvl = 0; lvl < k; ++lvl) {
    std::vector<Vec> pos;
    pos.reserve(t.positions.size() * nd);
    for (const auto& p : t.positions) {
      Vec qp = mat_vec(s.Q(), p);
      for (std::size_t i = 0; i < nd; ++i) pos.push_back(vec_add(qp, s.digit(i)));
    }
    for (auto& cells : t.cells) {
      std::vector<Letter> next;
      next.reserve(cells.size() * nd);
      for (Letter b : cells)
        for (std::size_t i = 0; i < nd; ++i) next.push_back(sub.image(b, i));
      cells = std::move(next);
    }
    t.positions = std::move(pos);
  }
  return t;
}

// Block supertiles directly in canonical box order.
inline std::vector<std::vector<Letter>> block_supertiles(const Substitution& sub, std::size_t k) {
  const Vec& l = sub.system().lengths();
  std::size_t d = l.size();
  Vec cur(d, 1);
  std::vector<std::vector<Letter>> out(sub.alphabet_size());
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = {static_cast<Letter>(a)};
  for (std::size_t lvl = 0; lvl < k; ++lvl) {
    Vec next(d);
    for (std::size_t j = 0; j < d; ++j) next[j] = cur[j] * l[j];
    std::size_t n = block_size(next);
    for (auto& cells : out) {
      std::vector<Letter> nc(n);
      for (std::size_t idx = 0; idx < n; ++idx) {
        Vec c = block_coords(next, idx), parent(d), r(d);
        for (std::size_t j = 0; j < d; ++j) {
          parent[j] = c[j] / l[j];
          r[j] = c[j] % l[j];
        }
        nc[idx] = sub.image(cells[block_index(cur, parent)], block_index(l, r));
      }
      cells = std::move(nc);
    }
    cur = next;
  }
  return out;
}

}  // namespace detail

inline Vec block_power_lengths(const Vec& l, std::size_t k) {
  Vec r(l.size(), 1);
  for (std::size_t j = 0; j < l.size(); ++j)
    for (std::size_t i = 0; i < k; ++i) r[j] *= l[j];
  return r;
}

// Level-k supertile of a; block supports are listed in canonical box order,
// other supports in address order.
inline Pattern supertile(const Substitution& sub, Letter a, std::size_t k) {
  Pattern p;
  if (sub.system().is_block()) {
    Vec lk = block_power_lengths(sub.system().lengths(), k);
    auto tiles = detail::block_supertiles(sub, k);
    p.cells = std::move(tiles[a]);
    p.support.reserve(p.cells.size());
    for (std::size_t i = 0; i < p.cells.size(); ++i) p.support.push_back(block_coords(lk, i));
    return p;
  }
  auto t = detail::supertile_table(sub, k);
  p.support = std::move(t.positions);
  p.cells = std::move(t.cells[a]);
  return p;
}

inline Substitution power(const Substitution& sub, std::size_t k) {
  if (k == 0) throw InputError("power exponent must be at least 1");
  if (k == 1) return sub;
  if (sub.system().is_block()) {
    Vec lk = block_power_lengths(sub.system().lengths(), k);
    return Substitution(sub.names(), DigitSystem::block(lk), detail::block_supertiles(sub, k));
  }
  auto t = detail::supertile_table(sub, k);
  Mat qk = mat_pow(sub.system().Q(), static_cast<unsigned>(k));
  return Substitution(sub.names(), DigitSystem::explicit_digits(qk, t.positions), std::move(t.cells));
}

struct Primitivity {
  bool primitive = false;
  std::size_t exponent = 0;
};

// Smallest k <= |A|^2 with a strictly positive k-th incidence power.
inline Primitivity is_primitive(const Substitution& sub) {
  std::size_t n = sub.alphabet_size();
  std::vector<std::vector<char>> m(n, std::vector<char>(n, 0));
  for (std::size_t a = 0; a < n; ++a)
    for (Letter b : sub.rules()[a]) m[a][b] = 1;
  auto cur = m;
  for (std::size_t k = 1; k <= n * n; ++k) {
    bool pos = true;
    for (std::size_t a = 0; a < n && pos; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (!cur[a][b]) {
          pos = false;
          break;
        }
    if (pos) return {true, k};
    std::vector<std::vector<char>> next(n, std::vector<char>(n, 0));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t c = 0; c < n; ++c)
        if (cur[a][c])
          for (std::size_t b = 0; b < n; ++b)
            if (m[c][b]) next[a][b] = 1;
    cur = std::move(next);
  }
  return {false, 0};
}

inline void require_primitive(const Substitution& sub) {
  if (!is_primitive(sub).primitive) throw HypothesisViolation("substitution is not primitive", "NotPrimitive");
}

inline void require_block(const Substitution& sub) {
  if (!sub.system().is_block()) throw InputError("operation requires a block substitution");
}

}  // namespace subshift
