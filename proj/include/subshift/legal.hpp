#pragma once

// Legal patterns on a finite support by fixpoint closure.
//
// A pattern on S + t inside a level-k supertile is the image of a pattern
// on the set of its level-(k-1) parents, whose shape depends only on t mod Q.
// Closing the family of parent shapes and iterating from single letters gives
// exactly the legal patterns of every shape in the family.

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "subshift/core.hpp"

namespace subshift {

struct LetterVecHash {
  std::size_t operator()(const std::vector<Letter>& v) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (Letter x : v) {
      h ^= x + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h;
  }
};

struct LegalPatterns {
  std::vector<Vec> support;                   // sorted lexicographically
  std::vector<std::vector<Letter>> patterns;  // cells aligned with support, sorted
  std::vector<std::string> warnings;
};

namespace detail {

using Shape = std::vector<Vec>;

inline Shape normalize_shape(std::vector<Vec> pts, Vec* offset = nullptr) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  Vec base = pts.front();
  for (auto& p : pts) p = vec_sub(p, base);
  if (offset) *offset = base;
  return pts;
}

struct ParentRule {
  std::size_t source;                // shape id of the parents
  std::vector<std::size_t> parent;   // per target cell: index into source shape
  std::vector<std::size_t> digit;    // per target cell: digit inside the parent
};

class ClosureEngine {
 public:
  explicit ClosureEngine(const Substitution& sub) : sub_(sub) {}

  std::size_t add_shape(const Shape& s) {
    auto it = ids_.find(s);
    if (it != ids_.end()) return it->second;
    std::size_t id = shapes_.size();
    ids_.emplace(s, id);
    shapes_.push_back(s);
    rules_.emplace_back();
    pending_.push_back(id);
    return id;
  }

  void close_family() {
    const auto& sys = sub_.system();
    while (!pending_.empty()) {
      std::size_t id = pending_.front();
      pending_.pop_front();
      Shape shape = shapes_[id];
      if (shape.size() == 1) continue;  // single letters are the base case
      for (std::size_t t = 0; t < sys.size(); ++t) {
        std::vector<Vec> parents;
        std::vector<std::size_t> digits;
        for (const auto& p : shape) {
          auto sp = sys.split(vec_add(p, sys.digit(t)));
          if (!sp) throw InputError("digit system is not a complete residue system");
          parents.push_back(sp->first);
          digits.push_back(sp->second);
        }
        Vec off;
        Shape src = normalize_shape(parents, &off);
        ParentRule r;
        r.digit = digits;
        for (const auto& p : parents) {
          Vec q = vec_sub(p, off);
          r.parent.push_back(static_cast<std::size_t>(std::lower_bound(src.begin(), src.end(), q) - src.begin()));
        }
        if (shapes_.size() > 4096) throw VerificationFailure("legality closure: parent-shape family does not stabilize");
        r.source = add_shape(src);
        rules_[id].push_back(std::move(r));
      }
    }
  }

  void run() {
    close_family();
    std::size_t n = shapes_.size();
    legal_.assign(n, {});
    order_.assign(n, {});
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> consumers(n);
    for (std::size_t id = 0; id < n; ++id)
      for (std::size_t r = 0; r < rules_[id].size(); ++r) consumers[rules_[id][r].source].push_back({id, r});
    std::deque<std::pair<std::size_t, std::size_t>> work;
    for (std::size_t id = 0; id < n; ++id)
      if (shapes_[id].size() == 1)
        for (std::size_t a = 0; a < sub_.alphabet_size(); ++a) insert(id, {static_cast<Letter>(a)}, work);
    while (!work.empty()) {
      auto [sid, pidx] = work.front();
      work.pop_front();
      std::vector<Letter> src = order_[sid][pidx];
      for (auto [tid, ridx] : consumers[sid]) {
        const ParentRule& r = rules_[tid][ridx];
        std::vector<Letter> cells(r.parent.size());
        for (std::size_t c = 0; c < cells.size(); ++c) cells[c] = sub_.image(src[r.parent[c]], r.digit[c]);
        insert(tid, std::move(cells), work);
      }
    }
  }

  const std::vector<std::vector<Letter>>& patterns(std::size_t id) const { return order_[id]; }

 private:
  void insert(std::size_t id, std::vector<Letter> cells, std::deque<std::pair<std::size_t, std::size_t>>& work) {
    if (legal_[id].insert(cells).second) {
      order_[id].push_back(std::move(cells));
      work.push_back({id, order_[id].size() - 1});
    }
  }

  const Substitution& sub_;
  std::map<Shape, std::size_t> ids_;
  std::vector<Shape> shapes_;
  std::vector<std::vector<ParentRule>> rules_;
  std::deque<std::size_t> pending_;
  std::vector<std::unordered_set<std::vector<Letter>, LetterVecHash>> legal_;
  std::vector<std::vector<std::vector<Letter>>> order_;
};

inline std::vector<std::vector<Letter>> closure_on(const Substitution& sub, const std::vector<Vec>& sorted_support) {
  ClosureEngine eng(sub);
  Shape shape = normalize_shape(sorted_support);
  std::size_t id = eng.add_shape(shape);
  eng.add_shape(Shape{Vec(sub.dim(), 0)});
  eng.run();
  auto pats = eng.patterns(id);
  std::sort(pats.begin(), pats.end());
  return pats;
}

}  // namespace detail

// Legal patterns with the given support. Letters themselves count as legal,
// which matches the language of a primitive substitution and defines the
// language of non-primitive ones built from their letters.
inline LegalPatterns legal_patterns(const Substitution& sub, std::vector<Vec> support, bool check_extension = false) {
  if (support.empty()) throw InputError("support must not be empty");
  for (const auto& p : support)
    if (p.size() != sub.dim()) throw InputError("support point dimension mismatch");
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  LegalPatterns out;
  out.support = support;
  out.patterns = detail::closure_on(sub, support);
  if (check_extension) {
    for (std::size_t axis = 0; axis < sub.dim(); ++axis)
      for (Int sign : {Int(-1), Int(1)}) {
        std::vector<Vec> ext = support;
        for (const auto& p : support) {
          Vec q = p;
          q[axis] += sign;
          ext.push_back(q);
        }
        std::sort(ext.begin(), ext.end());
        ext.erase(std::unique(ext.begin(), ext.end()), ext.end());
        auto big = detail::closure_on(sub, ext);
        std::vector<std::size_t> where;
        for (const auto& p : support)
          where.push_back(static_cast<std::size_t>(std::lower_bound(ext.begin(), ext.end(), p) - ext.begin()));
        std::set<std::vector<Letter>> restricted;
        for (const auto& b : big) {
          std::vector<Letter> r;
          for (std::size_t w : where) r.push_back(b[w]);
          restricted.insert(r);
        }
        std::size_t missing = 0;
        for (const auto& p : out.patterns)
          if (!restricted.count(p)) ++missing;
        if (missing)
          out.warnings.push_back("NonExtensible: " + std::to_string(missing) + " legal pattern(s) have no extension along axis " +
                                 std::to_string(axis + 1) + (sign < 0 ? " (negative side)" : " (positive side)"));
      }
  }
  return out;
}

}  // namespace subshift
