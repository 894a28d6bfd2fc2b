#pragma once

// Integer vectors, matrices and full-rank lattices in Hermite normal form.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "subshift/error.hpp"

namespace subshift {

using Int = std::int64_t;
using Vec = std::vector<Int>;
using Mat = std::vector<Vec>;  // row-major

inline Int floor_div(Int a, Int b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline Int floor_mod(Int a, Int b) { return a - floor_div(a, b) * b; }

inline Int checked_mul(Int a, Int b) {
  __int128 r = static_cast<__int128>(a) * b;
  if (r > INT64_MAX || r < INT64_MIN) throw VerificationFailure("integer overflow in lattice arithmetic");
  return static_cast<Int>(r);
}

inline Int checked_add(Int a, Int b) {
  __int128 r = static_cast<__int128>(a) + b;
  if (r > INT64_MAX || r < INT64_MIN) throw VerificationFailure("integer overflow in lattice arithmetic");
  return static_cast<Int>(r);
}

inline Mat identity_matrix(std::size_t d) {
  Mat m(d, Vec(d, 0));
  for (std::size_t i = 0; i < d; ++i) m[i][i] = 1;
  return m;
}

inline Mat diagonal_matrix(const Vec& diag) {
  Mat m(diag.size(), Vec(diag.size(), 0));
  for (std::size_t i = 0; i < diag.size(); ++i) m[i][i] = diag[i];
  return m;
}

inline Vec mat_vec(const Mat& m, const Vec& v) {
  Vec r(m.size(), 0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) r[i] = checked_add(r[i], checked_mul(m[i][j], v[j]));
  return r;
}

inline Mat mat_mul(const Mat& a, const Mat& b) {
  std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  Mat r(n, Vec(m, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t t = 0; t < k; ++t)
      for (std::size_t j = 0; j < m; ++j) r[i][j] = checked_add(r[i][j], checked_mul(a[i][t], b[t][j]));
  return r;
}

inline Mat mat_pow(const Mat& a, unsigned k) {
  Mat r = identity_matrix(a.size());
  for (unsigned i = 0; i < k; ++i) r = mat_mul(r, a);
  return r;
}

inline Mat transpose(const Mat& a) {
  if (a.empty()) return {};
  Mat t(a[0].size(), Vec(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
  return t;
}

inline Vec vec_add(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec vec_sub(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

// Fraction-free (Bareiss) determinant.
inline Int determinant(Mat a) {
  std::size_t n = a.size();
  if (n == 0) return 1;
  Int sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t p = k + 1;
      while (p < n && a[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(a[k], a[p]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        __int128 v = static_cast<__int128>(a[i][j]) * a[k][k] - static_cast<__int128>(a[i][k]) * a[k][j];
        a[i][j] = static_cast<Int>(v / prev);
      }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

inline Mat minor_matrix(const Mat& a, std::size_t r, std::size_t c) {
  Mat m;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i == r) continue;
    Vec row;
    for (std::size_t j = 0; j < a.size(); ++j)
      if (j != c) row.push_back(a[i][j]);
    m.push_back(row);
  }
  return m;
}

// adj(a) with a * adj(a) = det(a) * I.
inline Mat adjugate(const Mat& a) {
  std::size_t n = a.size();
  Mat adj(n, Vec(n, 0));
  if (n == 1) {
    adj[0][0] = 1;
    return adj;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Int cof = determinant(minor_matrix(a, i, j));
      adj[j][i] = ((i + j) % 2 == 0) ? cof : -cof;
    }
  return adj;
}

// Inverse of a unimodular matrix.
inline Mat unimodular_inverse(const Mat& a) {
  Int det = determinant(a);
  if (det != 1 && det != -1) throw InputError("matrix is not invertible over the integers");
  Mat adj = adjugate(a);
  for (auto& row : adj)
    for (auto& x : row) x *= det;
  return adj;
}

inline std::string format_vec(const Vec& v, char open = '(', char close = ')') {
  std::ostringstream os;
  os << open;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << close;
  return os.str();
}

inline std::string format_mat(const Mat& m) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < m.size(); ++i) os << (i ? "," : "") << format_vec(m[i], '[', ']');
  os << ']';
  return os.str();
}

// Row-style Hermite normal form of the row span of `gens` (all of length d).
// Returns the nonzero rows; pivots strictly increase, pivot entries positive,
// entries above a pivot reduced into [0, pivot).
inline Mat hermite_rows(Mat gens, std::size_t d) {
  std::size_t row = 0;
  for (std::size_t col = 0; col < d && row < gens.size(); ++col) {
    // gcd-combine all rows >= row in this column into `row`.
    for (std::size_t i = row + 1; i < gens.size(); ++i) {
      while (gens[i][col] != 0) {
        if (gens[row][col] == 0) {
          std::swap(gens[row], gens[i]);
          continue;
        }
        Int q = floor_div(gens[i][col], gens[row][col]);
        for (std::size_t j = col; j < d; ++j) gens[i][j] = checked_add(gens[i][j], -checked_mul(q, gens[row][j]));
        if (gens[i][col] != 0) std::swap(gens[row], gens[i]);
      }
    }
    if (gens[row][col] == 0) continue;
    if (gens[row][col] < 0)
      for (std::size_t j = col; j < d; ++j) gens[row][j] = -gens[row][j];
    for (std::size_t i = 0; i < row; ++i) {
      Int q = floor_div(gens[i][col], gens[row][col]);
      if (q != 0)
        for (std::size_t j = col; j < d; ++j) gens[i][j] = checked_add(gens[i][j], -checked_mul(q, gens[row][j]));
    }
    ++row;
  }
  gens.resize(row);
  return gens;
}

// Basis of {v in Z^n : M v = 0} for an r x n integer matrix M.
inline Mat integer_kernel(const Mat& m, std::size_t n) {
  // Column reduction of M tracked on U = I_n; kernel = columns of U whose
  // image column vanished.
  Mat a = m;
  Mat u = identity_matrix(n);
  std::size_t r = a.size();
  std::size_t pivot_col = 0;
  auto col_axpy = [&](std::size_t dst, std::size_t src, Int q) {
    for (std::size_t i = 0; i < r; ++i) a[i][dst] = checked_add(a[i][dst], -checked_mul(q, a[i][src]));
    for (std::size_t i = 0; i < n; ++i) u[i][dst] = checked_add(u[i][dst], -checked_mul(q, u[i][src]));
  };
  auto col_swap = [&](std::size_t x, std::size_t y) {
    for (std::size_t i = 0; i < r; ++i) std::swap(a[i][x], a[i][y]);
    for (std::size_t i = 0; i < n; ++i) std::swap(u[i][x], u[i][y]);
  };
  for (std::size_t i = 0; i < r && pivot_col < n; ++i) {
    for (std::size_t j = pivot_col + 1; j < n; ++j) {
      while (a[i][j] != 0) {
        if (a[i][pivot_col] == 0) {
          col_swap(pivot_col, j);
          continue;
        }
        col_axpy(j, pivot_col, floor_div(a[i][j], a[i][pivot_col]));
        if (a[i][j] != 0) col_swap(pivot_col, j);
      }
    }
    if (a[i][pivot_col] != 0) ++pivot_col;
  }
  Mat ker;
  for (std::size_t j = pivot_col; j < n; ++j) {
    Vec v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = u[i][j];
    ker.push_back(v);
  }
  return ker;
}

// Full-rank sublattice of Z^d; basis rows in Hermite normal form.
class Lattice {
 public:
  Lattice() = default;

  static Lattice from_generators(const std::vector<Vec>& gens, std::size_t d) {
    Lattice l;
    l.d_ = d;
    l.basis_ = hermite_rows(gens, d);
    if (l.basis_.size() != d) throw HypothesisViolation("generators do not span a full-rank lattice");
    return l;
  }

  // Lattice spanned by the columns of m (e.g. Q Z^d).
  static Lattice from_columns(const Mat& m) { return from_generators(transpose(m), m.size()); }

  static Lattice standard(std::size_t d) { return from_generators(identity_matrix(d), d); }

  // Rank of a generating set (without requiring full rank).
  static std::size_t rank_of(const std::vector<Vec>& gens, std::size_t d) { return hermite_rows(gens, d).size(); }

  std::size_t dim() const { return d_; }
  const Mat& basis() const { return basis_; }

  Int index() const {
    Int p = 1;
    for (std::size_t i = 0; i < d_; ++i) p *= basis_[i][i];
    return p;
  }

  bool is_standard() const { return index() == 1; }

  // Canonical representative in the box prod [0, h_ii).
  Vec reduce(Vec v) const {
    for (std::size_t i = 0; i < d_; ++i) {
      Int q = floor_div(v[i], basis_[i][i]);
      if (q != 0)
        for (std::size_t j = i; j < d_; ++j) v[j] -= q * basis_[i][j];
    }
    return v;
  }

  bool contains(const Vec& v) const {
    Vec r = reduce(v);
    return std::all_of(r.begin(), r.end(), [](Int x) { return x == 0; });
  }

  bool contains(const Lattice& other) const {
    return std::all_of(other.basis_.begin(), other.basis_.end(), [&](const Vec& v) { return contains(v); });
  }

  // Coset representatives of Z^d / this, in lexicographic order.
  std::vector<Vec> fundamental_domain() const {
    std::vector<Vec> reps{Vec(d_, 0)};
    for (std::size_t i = 0; i < d_; ++i) {
      std::vector<Vec> next;
      for (const auto& r : reps)
        for (Int t = 0; t < basis_[i][i]; ++t) {
          Vec v = r;
          v[i] = t;
          next.push_back(v);
        }
      reps = std::move(next);
    }
    return reps;
  }

  Lattice sum(const Lattice& other) const {
    Mat g = basis_;
    g.insert(g.end(), other.basis_.begin(), other.basis_.end());
    return from_generators(g, d_);
  }

  // A * this.
  Lattice image(const Mat& a) const {
    Mat g;
    for (const auto& b : basis_) g.push_back(mat_vec(a, b));
    return from_generators(g, d_);
  }

  // {x in Z^d : Q x in this}.
  Lattice preimage(const Mat& q) const {
    // Solve Q x - H^T y = 0 over the integers, keep the x part.
    Mat sys(d_, Vec(2 * d_, 0));
    for (std::size_t i = 0; i < d_; ++i) {
      for (std::size_t j = 0; j < d_; ++j) sys[i][j] = q[i][j];
      for (std::size_t j = 0; j < d_; ++j) sys[i][d_ + j] = -basis_[j][i];
    }
    Mat ker = integer_kernel(sys, 2 * d_);
    Mat xs;
    for (const auto& k : ker) xs.emplace_back(k.begin(), k.begin() + static_cast<std::ptrdiff_t>(d_));
    return from_generators(xs, d_);
  }

  bool operator==(const Lattice& o) const { return d_ == o.d_ && basis_ == o.basis_; }
  bool operator!=(const Lattice& o) const { return !(*this == o); }

  std::string to_string() const { return format_mat(basis_); }

 private:
  std::size_t d_ = 0;
  Mat basis_;
};

}  // namespace subshift
