#include "doctest.h"
#include "support.hpp"

using namespace subshift;
using namespace testsupport;

TEST_CASE("coincidence graph of the reversible example") {
  Substitution s = load("subs_rev");
  CoincidenceGraph g = coincidence_graph(s);
  REQUIRE(g.vertex_count() == 3);
  auto v = [&](const std::string& n) { return g.index.at(set_of(s, n)); };
  std::size_t abc = v("a b c"), ab = v("a b"), ac = v("a c");
  std::vector<std::size_t> from_abc{ab, abc, ac, ab, abc, ac};
  std::vector<std::size_t> from_ab{ab, ac, ac, ab, ac, ac};
  std::vector<std::size_t> from_ac{ab, ab, ac, ab, ab, ac};
  CHECK(g.target[abc] == from_abc);
  CHECK(g.target[ab] == from_ab);
  CHECK(g.target[ac] == from_ac);

  MinimalSetFamily f = column_number_and_minimal_sets(g);
  CHECK(f.column_number == 2);
  std::set<LetterSet> sets(f.sets.begin(), f.sets.end());
  CHECK(sets == std::set<LetterSet>{set_of(s, "a b"), set_of(s, "a c")});
}

TEST_CASE("bijective substitutions have one vertex") {
  Substitution tm = load("thue_morse");
  CoincidenceGraph g = coincidence_graph(tm);
  CHECK(g.vertex_count() == 1);
  CHECK(g.target[0] == std::vector<std::size_t>{0, 0});
  MinimalSetFamily f = column_number_and_minimal_sets(tm);
  CHECK(f.column_number == 2);
  CHECK(f.sets.size() == 1);

  Substitution b = load("bijective_height3");
  CHECK(column_number_and_minimal_sets(b).column_number == b.alphabet_size());
}

TEST_CASE("idempotent realization") {
  Substitution s = load("subs_rev");
  MinimalSetFamily f = idempotent_realization_power(s);
  CHECK(f.realization_power == 1);
  REQUIRE(f.sets.size() == 2);
  for (std::size_t i = 0; i < f.sets.size(); ++i) {
    if (f.sets[i] == set_of(s, "a b")) CHECK(f.idempotent_addresses[i] == Address{0});
    if (f.sets[i] == set_of(s, "a c")) CHECK(f.idempotent_addresses[i] == Address{5});
  }

  Substitution tm = load("thue_morse");
  MinimalSetFamily t = idempotent_realization_power(tm);
  CHECK(t.realization_power == 1);
  CHECK(t.idempotent_addresses[0] == Address{0});

  Substitution rho = load("rho");
  MinimalSetFamily r = idempotent_realization_power(rho);
  CHECK(r.column_number == 3);
  CHECK(rho.digit_column(1) == identity_map(rho.alphabet_size()));
  for (std::size_t i = 0; i < r.sets.size(); ++i) {
    ColumnMap f2 = column(rho, r.idempotent_addresses[i]);
    CHECK(is_idempotent(f2));
    CHECK(range_of(f2) == r.sets[i]);
  }

  // every fixture: addresses realize idempotents with the right images
  for (const auto& name : all_fixtures()) {
    CAPTURE(name);
    Substitution x = load(name);
    MinimalSetFamily m = idempotent_realization_power(x);
    for (std::size_t i = 0; i < m.sets.size(); ++i) {
      CHECK(m.idempotent_addresses[i].size() == m.realization_power);
      ColumnMap g = column(x, m.idempotent_addresses[i]);
      CHECK(g == m.idempotents[i]);
      CHECK(is_idempotent(g));
      CHECK(range_of(g) == m.sets[i]);
    }
  }
}

TEST_CASE("beta table of the reversible example") {
  Substitution s = load("subs_rev");
  MinimalSetFamily f = idempotent_realization_power(s);
  Encoding e = base_encoding(f);
  CHECK(e.nu == std::vector<std::size_t>{0, 1, 1});
  Perm id{0, 1}, sw{1, 0};
  std::vector<Perm> row{id, id, sw, sw, id, id};
  for (const auto& m : {set_of(s, "a b"), set_of(s, "a c")})
    for (std::size_t j = 0; j < 6; ++j) {
      CAPTURE(j);
      CHECK(beta(s, e, m, {j}) == row[j]);
    }
  // images of minimal sets under the columns
  LetterSet m1 = set_of(s, "a b"), m2 = set_of(s, "a c");
  std::vector<LetterSet> img1{m1, m2, m2, m1, m2, m2}, img2{m1, m1, m2, m1, m1, m2};
  for (std::size_t j = 0; j < 6; ++j) {
    CHECK(image_of(s.digit_column(j), m1) == img1[j]);
    CHECK(image_of(s.digit_column(j), m2) == img2[j]);
  }
  // the idempotent realizing M gives the identity
  for (std::size_t i = 0; i < f.sets.size(); ++i) CHECK(beta(e, f.sets[i], f.idempotents[i]) == perm_identity(2));
}

TEST_CASE("permutation helpers") {
  Perm p{1, 2, 0, 4, 3};
  CHECK(cycle_notation(p) == "(0 1 2)(3 4)");
  CHECK(cycle_notation(perm_identity(3)) == "id");
  CHECK(perm_compose(p, perm_inverse(p)) == perm_identity(5));
  CHECK(is_permutation(p));
  CHECK_FALSE(is_permutation({0, 0, 1}));
}
