#include "doctest.h"
#include "support.hpp"

using namespace subshift;
using namespace testsupport;

namespace {

struct Prepared {
  Substitution sub, pw;
  MinimalSetFamily pfam;
  std::size_t level;
};

Prepared prepare(const Substitution& s) {
  MinimalSetFamily fam = idempotent_realization_power(s);
  Substitution pw = power(s, fam.realization_power);
  return {s, pw, lift_family(s, fam, pw), fam.realization_power};
}

std::vector<std::size_t> inverse_table(const std::vector<std::size_t>& fwd) {
  std::vector<std::size_t> inv(fwd.size());
  for (std::size_t i = 0; i < fwd.size(); ++i) inv[fwd[i]] = i;
  return inv;
}

GeomCandidate flip1() { return GeomCandidate::block({{-1}}, {6}); }

bool has_pair(const SearchReport& r, const Perm& tau, const Mat& a) {
  return std::any_of(r.found.begin(), r.found.end(), [&](const ExtSymmetry& s) { return s.tau == tau && s.A == a; });
}

// Multiplication table of the group generated by some permutations.
std::vector<std::vector<std::size_t>> perm_group_table(const std::vector<Perm>& gens) {
  std::vector<Perm> elems{perm_identity(gens.at(0).size())};
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (const auto& g : gens) {
      Perm p = perm_compose(g, elems[i]);
      if (std::find(elems.begin(), elems.end(), p) == elems.end()) elems.push_back(p);
    }
  std::vector<std::vector<std::size_t>> t(elems.size(), std::vector<std::size_t>(elems.size()));
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (std::size_t j = 0; j < elems.size(); ++j)
      t[i][j] = static_cast<std::size_t>(std::find(elems.begin(), elems.end(), perm_compose(elems[i], elems[j])) - elems.begin());
  return t;
}

}  // namespace

TEST_CASE("box symmetry groups") {
  auto g1 = box_symmetry_group({6});
  REQUIRE(g1.size() == 2);
  CHECK(g1[0].A == Mat{{1}});
  CHECK(g1[1].A == Mat{{-1}});
  CHECK(box_symmetry_group({2, 2}).size() == 8);
  CHECK(box_symmetry_group({6, 4}).size() == 4);
  CHECK(box_symmetry_group({3, 3, 3}).size() == 48);
  CHECK(box_symmetry_group({4, 4})[0].A == identity_matrix(2));
  CHECK_THROWS_AS(GeomCandidate::block({{0, 1}, {1, 0}}, {6, 4}), InputError);
  CHECK_THROWS_AS(GeomCandidate::block({{2, 0}, {0, 1}}, {3, 3}), InputError);
}

TEST_CASE("odot on boxes") {
  CHECK(odot(flip1(), {0}, 1) == Vec{5});
  CHECK(odot(flip1(), {7}, 2) == Vec{28});
  GeomCandidate id = GeomCandidate::block(identity_matrix(2), {5, 5});
  CHECK(odot(id, {3, 1}, 1) == Vec{3, 1});
  GeomCandidate rot = GeomCandidate::block({{0, 1}, {-1, 0}}, {5, 5});
  CHECK(odot(rot, {0, 0}, 1) == Vec{0, 4});
  std::set<Vec> image;
  for_each_point({5, 5}, [&](const Vec& n) { image.insert(odot(rot, n, 1)); });
  CHECK(image.size() == 25);
  CHECK_THROWS_AS(odot(rot, {5, 0}, 1), InputError);
  // level-2 action agrees with the independent centred formula
  for_each_point({25, 25}, [&](const Vec& n) { CHECK(odot(rot, n, 2) == box_action(rot.A, n, {25, 25})); });
}

TEST_CASE("explicit candidates on the helix") {
  Substitution h = load("helix");
  GeomCandidate r = GeomCandidate::explicit_table({{0, -1}, {1, 0}}, h.system(), {0, 3, 4, 2, 1});
  // the rotation commutes with Q, so its digit action is the linear one
  Substitution h3 = power(h, 3);
  for (std::size_t i = 0; i < h3.digit_count(); ++i) {
    Vec n = h3.system().digit(i);
    CHECK(odot(r, n, 3, &h.system()) == mat_vec(r.A, n));
  }
  CHECK_THROWS_AS(GeomCandidate::explicit_table({{0, -1}, {1, 0}}, h.system(), {0, 1, 2, 3, 4}), InputError);
  CHECK_THROWS_AS(GeomCandidate::explicit_table({{1, 0}, {0, -1}}, h.system(), {0, 1, 2, 4, 3}), InputError);
  CHECK_THROWS_AS(GeomCandidate::explicit_table(identity_matrix(2), h.system(), {0, 0, 2, 3, 4}), InputError);

  SearchOptions opts;
  opts.candidates = load_manifest(fixture_path("helix")).candidates();
  REQUIRE(opts.candidates.size() == 4);
  SearchReport rep = enumerate_supertile_shuffling(h, opts);
  // exhaustive comparison with the direct check
  std::set<std::pair<Perm, Mat>> brute, found;
  for (const auto& g : opts.candidates)
    for (const auto& t : all_perms(h.alphabet_size()))
      if (oracle_direct_check(h, t, g, rep.level) && oracle_direct_check(h, t, g, 2 * rep.level)) brute.insert({t, g.A});
  for (const auto& s : rep.found) found.insert({s.tau, s.A});
  CHECK(found == brute);
  CHECK_THROWS_AS(enumerate_supertile_shuffling(h), InputError);
}

TEST_CASE("conditions on the reversible example") {
  Substitution s = load("subs_rev");
  Prepared p = prepare(s);
  CHECK(p.level == 1);
  Perm bc = perm_of(s, {{"b", "c"}});
  GeomCandidate flip = flip1(), id = box_symmetry_group({6})[0];
  auto fwd = odot_table(flip, s, p.pw, p.level);
  auto inv = inverse_table(fwd);
  CHECK(fwd == std::vector<std::size_t>{5, 4, 3, 2, 1, 0});

  Condition1Result c1 = check_condition1(p.pw, p.pfam, bc, inv);
  CHECK(c1.ok);
  CHECK_FALSE(c1.counterexample);
  // spot value: theta_0(M2) = M1 = tau[theta_5(M1)]
  LetterSet m1 = set_of(s, "a b"), m2 = set_of(s, "a c");
  CHECK(image_of(s.digit_column(0), m2) == m1);
  CHECK(tau_image(bc, image_of(s.digit_column(5), m1)) == m1);

  CHECK(check_condition1(p.pw, p.pfam, perm_identity(3), inverse_table(odot_table(id, s, p.pw, 1))).ok);

  EncodingResult er = build_encodings(p.pw, p.pfam, bc, fwd);
  REQUIRE(er.encoding);
  CHECK(er.encoding->nu == er.encoding->nu_bar);
  Condition2Result c2 = check_condition2(*er.encoding, bc);
  REQUIRE(c2.ok);
  CHECK(c2.tau_prime == perm_identity(2));
  CHECK(check_condition3(p.pw, p.pfam, *er.encoding, bc, c2.tau_prime, fwd).ok);

  // tau = (a b) merges the nu-classes {b, c}
  Perm ab = perm_of(s, {{"a", "b"}});
  Condition2Result bad = check_condition2(base_encoding(p.pfam), ab);
  CHECK_FALSE(bad.ok);
  CHECK(bad.reason.rfind("IllDefined", 0) == 0);

  // the letter swap alone is not a symmetry
  auto idf = odot_table(id, s, p.pw, 1);
  CHECK_FALSE(check_condition1(p.pw, p.pfam, bc, inverse_table(idf)).ok);
  EncodingResult er2 = build_encodings(p.pw, p.pfam, bc, idf);
  CHECK_FALSE(er2.encoding);
  CHECK(er2.reason.rfind("IncompatibleGeometry", 0) == 0);
  CHECK_FALSE(oracle_direct_check(s, bc, id, 1));
  CHECK_FALSE(oracle_direct_check(s, bc, id, 2));

  Encoding base = base_encoding(p.pfam);
  CHECK(check_condition3(p.pw, p.pfam, base, perm_identity(3), perm_identity(2), idf).ok);

  CHECK(oracle_direct_check(s, bc, flip, 1));
  CHECK(oracle_direct_check(s, bc, flip, 2));
  CHECK(oracle_direct_check(s, perm_identity(3), id, 2));
  CHECK(naive_shuffle_check(s, bc, flip.A, 2));

  SearchReport rep = enumerate_supertile_shuffling(s);
  CHECK(has_pair(rep, bc, {{-1}}));
  CHECK(has_pair(rep, perm_identity(3), {{1}}));
  CHECK(rep.found.size() == 2);
  CHECK(rep.group_name == "C2");
  for (const auto& f : rep.found) CHECK(f.level == 1);
  std::string text = format_report(rep, s);
  CHECK(text.find("tau=(b c)  A=[[-1]]  level=1") != std::string::npos);
}

TEST_CASE("rho: the reversor is not supertile-shuffling") {
  Substitution s = load("rho");
  Prepared p = prepare(s);
  Perm tau = perm_of(s, {{"0", "3"}, {"1", "6"}, {"2", "5"}});
  GeomCandidate flip = GeomCandidate::block({{-1}}, {5});

  // at level 1: theta_1(tau[M]) differs from tau[theta_3(M)] for M = {1,3,5}
  LetterSet m = set_of(s, "1 3 5");
  CHECK(image_of(s.digit_column(1), tau_image(tau, m)) != tau_image(tau, image_of(s.digit_column(3), m)));

  auto fwd = odot_table(flip, s, p.pw, p.level);
  Condition1Result c1 = check_condition1(p.pw, p.pfam, tau, inverse_table(fwd));
  CHECK_FALSE(c1.ok);
  REQUIRE(c1.counterexample);
  CHECK(c1.counterexample->first == m);
  CHECK(std::find(c1.failing_sets.begin(), c1.failing_sets.end(), m) != c1.failing_sets.end());

  CHECK_FALSE(oracle_direct_check(s, tau, flip, 2));
  CHECK_FALSE(naive_shuffle_check(s, tau, flip.A, 2));

  SearchReport rep = enumerate_supertile_shuffling(s);
  for (const auto& f : rep.found) CHECK(f.A == Mat{{1}});
  CHECK(rep.psi_image == std::vector<Mat>{{{1}}});
  CHECK(rep.group_name == "C1");
}

TEST_CASE("example with height lattice 3Z x Z") {
  Substitution s = load("bijective_height3");
  SearchReport rep = enumerate_supertile_shuffling(s);
  CHECK(rep.level == 2);
  CHECK(rep.bijective_mode);
  std::vector<Mat> want{{{-1, 0}, {0, -1}}, {{-1, 0}, {0, 1}}, {{1, 0}, {0, -1}}, {{1, 0}, {0, 1}}};
  CHECK(rep.psi_image == want);
  CHECK(rep.group_name == "C2×C2");
  CHECK(has_pair(rep, perm_identity(6), {{1, 0}, {0, -1}}));
  CHECK(has_pair(rep, perm_of(s, {{"a", "c"}, {"d", "f"}}), {{-1, 0}, {0, 1}}));
  std::size_t rotations = 0;
  for (const auto& r : rep.rejected) {
    CHECK(r.reason == "height-filter");
    CHECK(r.conditions_evaluated);
    CHECK(r.conditions_also_fail);
    if (r.A == Mat{{0, -1}, {1, 0}} || r.A == Mat{{0, 1}, {-1, 0}}) ++rotations;
  }
  CHECK(rotations == 2);

  // column conjugation: theta_{A(.)j} o tau = tau o theta_j at level k*
  Substitution pw = power(s, rep.level);
  for (const auto& f : rep.found) {
    GeomCandidate g = GeomCandidate::block(f.A, s.system().lengths());
    auto fwd = odot_table(g, s, pw, rep.level);
    for (std::size_t j = 0; j < pw.digit_count(); ++j) {
      ColumnMap lhs = compose(pw.digit_column(fwd[j]), ColumnMap(f.tau.begin(), f.tau.end()));
      ColumnMap rhs = compose(ColumnMap(f.tau.begin(), f.tau.end()), pw.digit_column(j));
      CHECK(lhs == rhs);
    }
  }

  // the column at e1 has order 6, the one at its rotated position order 2
  GeomCandidate rot = GeomCandidate::block({{0, -1}, {1, 0}}, {4, 4});
  Vec e1{1, 0};
  Vec re1 = odot(rot, e1, 2);
  CHECK(re1 == box_action({{0, -1}, {1, 0}}, e1, {16, 16}));
  CHECK(re1 == Vec{15, 1});
  ColumnMap c1 = pw.digit_column(*pw.system().find_digit(e1));
  ColumnMap c2 = pw.digit_column(*pw.system().find_digit(re1));
  auto order = [](const ColumnMap& f) {
    ColumnMap g = f;
    std::size_t k = 1;
    while (g != identity_map(f.size())) {
      g = compose(f, g);
      ++k;
    }
    return k;
  };
  CHECK(order(c1) == 6);
  CHECK(order(c2) == 2);

  SearchOptions no_eval;
  no_eval.evaluate_filtered = false;
  SearchReport quick = enumerate_supertile_shuffling(s, no_eval);
  CHECK(quick.psi_image == want);
  for (const auto& r : quick.rejected) CHECK_FALSE(r.conditions_evaluated);

  SearchOptions nofilter;
  nofilter.height_filter = false;
  SearchReport open = enumerate_supertile_shuffling(s, nofilter);
  CHECK(open.psi_image == want);
  for (const auto& r : open.rejected) CHECK(r.reason != "height-filter");
}

TEST_CASE("searches on the square fixtures") {
  SearchReport r90 = enumerate_supertile_shuffling(load("rot90"));
  CHECK(r90.group_name == "D4");
  CHECK(r90.psi_image.size() == 8);
  SearchReport c4 = enumerate_supertile_shuffling(load("coinc_c4"));
  CHECK(c4.group_name == "C4");
  SearchReport r180 = enumerate_supertile_shuffling(load("rot180"));
  CHECK(r180.group_name == "C2");
  for (const auto& r : {r90, c4, r180}) {
    CHECK(r.closed);
    CHECK(pairs_closed(r.found));
  }
}

TEST_CASE("prune and no-prune agree on fixtures") {
  for (const auto& name : {"subs_rev", "rho", "thue_morse", "period_doubling", "rot180", "rot90", "coinc_c4", "bijective_height3"}) {
    CAPTURE(name);
    Substitution s = load(name);
    SearchOptions a, b;
    b.prune = false;
    SearchReport x = enumerate_supertile_shuffling(s, a), y = enumerate_supertile_shuffling(s, b);
    REQUIRE(x.found.size() == y.found.size());
    for (std::size_t i = 0; i < x.found.size(); ++i) {
      CHECK(x.found[i].tau == y.found[i].tau);
      CHECK(x.found[i].A == y.found[i].A);
    }
  }
}

TEST_CASE("group identification") {
  CHECK(identify_group({{0}}) == "C1");
  CHECK(identify_group(perm_group_table({{1, 0}})) == "C2");
  CHECK(identify_group(perm_group_table({{1, 2, 3, 0}})) == "C4");
  CHECK(identify_group(perm_group_table({{1, 0, 2, 3}, {0, 1, 3, 2}})) == "C2×C2");
  CHECK(identify_group(perm_group_table({{1, 2, 3, 0}, {3, 2, 1, 0}})) == "D4");
  CHECK(identify_group(perm_group_table({{1, 0, 2}, {1, 2, 0}})) == "S3");
  CHECK(identify_group(perm_group_table({{1, 2, 0, 4, 3}})) == "C6");
  CHECK(identify_group(perm_group_table({{1, 0, 2, 3, 4}, {0, 1, 3, 4, 2}})) == "C6");
  // A4 on four points
  CHECK(identify_group(perm_group_table({{1, 2, 0, 3}, {1, 0, 3, 2}})) == "A4");
  // Q8 as a regular permutation group
  {
    // elements 1,i,j,k,-1,-i,-j,-k; left multiplication by i and j
    Perm li{1, 4, 3, 6, 5, 0, 7, 2}, lj{2, 7, 4, 1, 6, 3, 0, 5};
    CHECK(identify_group(perm_group_table({li, lj})) == "Q8");
  }
  CHECK(identify_group(perm_group_table({{1, 0, 2, 3, 4, 5}, {0, 1, 3, 2, 4, 5}, {0, 1, 2, 3, 5, 4}})) == "C2×C2×C2");
  bool closed = true;
  CHECK(identify_matrix_group({{{1, 0}, {0, 1}}, {{0, -1}, {1, 0}}}, &closed) == "not a group");
  CHECK_FALSE(closed);
}
