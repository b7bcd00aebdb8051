#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "oracles.hpp"
#include "pge/errors.hpp"
#include "pge/metrics.hpp"
#include "pge/timing.hpp"

using namespace pge;
using namespace pge::testing;

namespace {

ScoredTriple st(double score, Label gold) {
  ScoredTriple s;
  s.score = score;
  s.gold = gold;
  return s;
}

std::vector<ScoredTriple> random_scored(RngStream& rng, std::size_t n) {
  std::vector<ScoredTriple> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(st(rng.uniform_real(-5, 5),
                     rng.uniform_index(2) == 0 ? Label::correct : Label::incorrect));
  }
  return out;
}

}  // namespace

TEST_CASE("select_threshold: separable pair picks the midpoint") {
  const std::vector<ScoredTriple> valid{st(0.9, Label::correct), st(0.1, Label::incorrect)};
  CHECK(select_threshold(valid) == doctest::Approx(0.5));
}

TEST_CASE("select_threshold: interleaved scores fall back to the larger sentinel") {
  const std::vector<ScoredTriple> valid{st(1, Label::correct), st(2, Label::incorrect),
                                        st(3, Label::correct), st(4, Label::incorrect)};
  CHECK(select_threshold(valid) == doctest::Approx(5.0));  // max score + 1
}

TEST_CASE("select_threshold: six points with one inversion match the sweep oracle") {
  const std::vector<ScoredTriple> valid{st(0.8, Label::correct),   st(0.6, Label::correct),
                                        st(0.3, Label::correct),   st(0.7, Label::incorrect),
                                        st(0.2, Label::incorrect), st(0.1, Label::incorrect)};
  const double theta = select_threshold(valid);
  CHECK(theta == doctest::Approx(0.25));
  std::vector<double> scores;
  std::vector<bool> is_correct;
  for (const auto& s : valid) {
    scores.push_back(s.score);
    is_correct.push_back(s.gold == Label::correct);
  }
  CHECK(theta == doctest::Approx(threshold_oracle(scores, is_correct)));
}

TEST_CASE("select_threshold: oracle equivalence on random sets") {
  RngStream rng(606);
  for (int trial = 0; trial < 100; ++trial) {
    const auto valid = random_scored(rng, 2 + rng.uniform_index(40));
    bool has_c = false, has_i = false;
    for (const auto& s : valid) {
      has_c = has_c || s.gold == Label::correct;
      has_i = has_i || s.gold == Label::incorrect;
    }
    if (!has_c || !has_i) continue;
    std::vector<double> scores;
    std::vector<bool> is_correct;
    for (const auto& s : valid) {
      scores.push_back(s.score);
      is_correct.push_back(s.gold == Label::correct);
    }
    CHECK(select_threshold(valid) == doctest::Approx(threshold_oracle(scores, is_correct)).epsilon(1e-12));
  }
}

TEST_CASE("select_threshold: single-class validation set is degenerate") {
  const std::vector<ScoredTriple> valid{st(0.9, Label::correct), st(0.8, Label::correct)};
  CHECK_THROWS_WITH_AS(select_threshold(valid), doctest::Contains("degenerate"), DataError);
}

TEST_CASE("pr_metrics: perfect ranking") {
  // positive class = incorrect, ranked ascending: all incorrect at the bottom
  const std::vector<ScoredTriple> test{st(0.1, Label::incorrect), st(0.2, Label::incorrect),
                                       st(0.8, Label::correct), st(0.9, Label::correct)};
  const auto report = pr_metrics(test, PositiveClass::incorrect, {0.9});
  CHECK(report.pr_auc == doctest::Approx(1.0));
  REQUIRE(report.r_at_p.size() == 1);
  CHECK(report.r_at_p[0].second == doctest::Approx(1.0));
}

TEST_CASE("pr_metrics: single positive ranked last gives AP 0.25") {
  const std::vector<ScoredTriple> test{st(0.1, Label::correct), st(0.2, Label::correct),
                                       st(0.3, Label::correct), st(0.9, Label::incorrect)};
  const auto report = pr_metrics(test, PositiveClass::incorrect, {});
  CHECK(report.pr_auc == doctest::Approx(0.25));
}

TEST_CASE("pr_metrics: curve recall is non-decreasing along the sweep") {
  RngStream rng(607);
  const auto test = random_scored(rng, 30);
  const auto report = pr_metrics(test, PositiveClass::incorrect, {});
  for (std::size_t i = 1; i < report.curve.size(); ++i) {
    CHECK(report.curve[i].recall >= report.curve[i - 1].recall);
  }
}

TEST_CASE("pr_metrics: brute-force oracle equivalence on 100 random sets") {
  RngStream rng(608);
  const std::vector<double> levels{0.5, 0.7, 0.9};
  int done = 0;
  while (done < 100) {
    const auto test = random_scored(rng, 1 + rng.uniform_index(50));
    for (auto positive : {PositiveClass::incorrect, PositiveClass::correct}) {
      const Label pos_label =
          positive == PositiveClass::incorrect ? Label::incorrect : Label::correct;
      std::size_t n_pos = 0;
      for (const auto& s : test) n_pos += s.gold == pos_label ? 1 : 0;
      if (n_pos == 0) continue;
      std::vector<double> scores;
      std::vector<bool> pos;
      for (const auto& s : test) {
        scores.push_back(s.score);
        pos.push_back(s.gold == pos_label);
      }
      const auto want =
          pr_oracle(scores, pos, positive == PositiveClass::incorrect, levels);
      const auto got = pr_metrics(test, positive, levels);
      CHECK(std::fabs(got.pr_auc - want.pr_auc) < 1e-9);
      for (std::size_t i = 0; i < levels.size(); ++i) {
        CHECK(std::fabs(got.r_at_p[i].second - want.r_at_p[i]) < 1e-9);
      }
      ++done;
    }
  }
}

TEST_CASE("pr_metrics: invariant under strictly monotone score transformations") {
  RngStream rng(609);
  auto test = random_scored(rng, 25);
  bool has_pos = false;
  for (auto& s : test) has_pos = has_pos || s.gold == Label::incorrect;
  if (!has_pos) test[0].gold = Label::incorrect;
  const auto before = pr_metrics(test, PositiveClass::incorrect, {0.6, 0.8});
  for (auto& s : test) s.score = std::exp(0.3 * s.score) + 2.0;  // strictly increasing
  const auto after = pr_metrics(test, PositiveClass::incorrect, {0.6, 0.8});
  CHECK(before.pr_auc == doctest::Approx(after.pr_auc).epsilon(1e-12));
  for (std::size_t i = 0; i < before.r_at_p.size(); ++i) {
    CHECK(before.r_at_p[i].second == doctest::Approx(after.r_at_p[i].second).epsilon(1e-12));
  }
}

TEST_CASE("pr_metrics: R@P is non-increasing in the precision target") {
  RngStream rng(610);
  for (int trial = 0; trial < 20; ++trial) {
    auto test = random_scored(rng, 20);
    bool has_pos = false;
    for (auto& s : test) has_pos = has_pos || s.gold == Label::incorrect;
    if (!has_pos) test[0].gold = Label::incorrect;
    const std::vector<double> levels{0.2, 0.4, 0.6, 0.8, 0.95};
    const auto report = pr_metrics(test, PositiveClass::incorrect, levels);
    for (std::size_t i = 1; i < levels.size(); ++i) {
      CHECK(report.r_at_p[i].second <= report.r_at_p[i - 1].second + 1e-12);
    }
  }
}

TEST_CASE("pr_metrics: no positive-class triples is an error") {
  const std::vector<ScoredTriple> test{st(0.5, Label::correct)};
  CHECK_THROWS_AS(pr_metrics(test, PositiveClass::incorrect, {}), DataError);
}

TEST_CASE("fuse_ranks: R_avg formula spot values") {
  RawTriple t1{"p1", "a", "v1", Label::unlabeled};
  RawTriple t2{"p2", "a", "v2", Label::unlabeled};
  const auto fused = fuse_ranks({{t1, 1}, {t2, 2}}, {{t1, 1}, {t2, 4}});
  REQUIRE(fused.size() == 2);
  CHECK(fused[0].r_avg == doctest::Approx(1.0));       // (1/1 + 1/1) / 2
  CHECK(fused[1].r_avg == doctest::Approx(0.375));     // (1/2 + 1/4) / 2
  CHECK(fused[0].triple.title == "p1");
}

TEST_CASE("fuse_ranks: three-triple hand-computed order") {
  RawTriple t1{"p1", "a", "v1", Label::unlabeled};
  RawTriple t2{"p2", "a", "v2", Label::unlabeled};
  RawTriple t3{"p3", "a", "v3", Label::unlabeled};
  const auto fused = fuse_ranks({{t1, 1}, {t2, 2}, {t3, 3}}, {{t1, 3}, {t2, 1}, {t3, 2}});
  REQUIRE(fused.size() == 3);
  CHECK(fused[0].triple.title == "p2");  // 0.75
  CHECK(fused[1].triple.title == "p1");  // 0.666...
  CHECK(fused[2].triple.title == "p3");  // 0.41666...
  CHECK(fused[0].r_avg == doctest::Approx(0.75));
  CHECK(fused[1].r_avg == doctest::Approx(2.0 / 3.0));
  CHECK(fused[2].r_avg == doctest::Approx(5.0 / 12.0));

  // ascending flag flips the order
  const auto asc = fuse_ranks({{t1, 1}, {t2, 2}, {t3, 3}}, {{t1, 3}, {t2, 1}, {t3, 2}}, false);
  CHECK(asc[0].triple.title == "p3");
  CHECK(asc[2].triple.title == "p2");
}

TEST_CASE("fuse_ranks: permutation of the input listing does not change the result") {
  RngStream rng(611);
  std::vector<RankedTriple> a, b;
  for (int i = 0; i < 12; ++i) {
    RawTriple t{"p" + std::to_string(i), "a", "v" + std::to_string(i), Label::unlabeled};
    a.push_back({t, i + 1});
  }
  std::vector<int> branks(12);
  std::iota(branks.begin(), branks.end(), 1);
  rng.shuffle(branks);
  for (int i = 0; i < 12; ++i) b.push_back({a[static_cast<std::size_t>(i)].triple, branks[static_cast<std::size_t>(i)]});

  const auto base = fuse_ranks(a, b);
  auto a2 = a;
  auto b2 = b;
  rng.shuffle(b2);  // listing order of B is irrelevant
  const auto again = fuse_ranks(a2, b2);
  REQUIRE(base.size() == again.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(base[i].triple.title == again[i].triple.title);
    CHECK(base[i].r_avg == doctest::Approx(again[i].r_avg));
  }
}

TEST_CASE("fuse_ranks: mismatched triple sets are a coverage error") {
  RawTriple t1{"p1", "a", "v1", Label::unlabeled};
  RawTriple t2{"p2", "a", "v2", Label::unlabeled};
  RawTriple t3{"p3", "a", "v3", Label::unlabeled};
  CHECK_THROWS_AS(fuse_ranks({{t1, 1}, {t2, 2}}, {{t1, 1}, {t3, 2}}), DataError);
  CHECK_THROWS_AS(fuse_ranks({{t1, 1}}, {{t1, 1}, {t3, 2}}), DataError);
}

TEST_CASE("fuse_ranks: duplicate ranks are rejected") {
  RawTriple t1{"p1", "a", "v1", Label::unlabeled};
  RawTriple t2{"p2", "a", "v2", Label::unlabeled};
  CHECK_THROWS_AS(fuse_ranks({{t1, 1}, {t2, 1}}, {{t1, 1}, {t2, 2}}), DataError);
}

TEST_CASE("fuse_ranks: equal R_avg breaks ties by rank_a") {
  RawTriple t1{"p1", "a", "v1", Label::unlabeled};
  RawTriple t2{"p2", "a", "v2", Label::unlabeled};
  // (1/1 + 1/2)/2 == (1/2 + 1/1)/2
  const auto fused = fuse_ranks({{t2, 2}, {t1, 1}}, {{t1, 2}, {t2, 1}});
  CHECK(fused[0].triple.title == "p1");  // rank_a 1 beats rank_a 2
}

TEST_CASE("confidence_report: uniform C=1 on both groups") {
  const std::vector<double> c(10, 1.0);
  std::vector<bool> corrupt(10, false);
  corrupt[3] = corrupt[7] = true;
  const auto report = confidence_report(c, corrupt);
  CHECK(report.count_clean[19] == 8);
  CHECK(report.count_corrupt[19] == 2);
  for (int b = 0; b < 19; ++b) {
    CHECK(report.count_clean[static_cast<std::size_t>(b)] == 0);
    CHECK(report.count_corrupt[static_cast<std::size_t>(b)] == 0);
  }
  CHECK(report.gap == doctest::Approx(0.0));
  CHECK(report.detector_auc == doctest::Approx(0.5));  // all tied
}

TEST_CASE("confidence_report: perfect separation") {
  std::vector<double> c;
  std::vector<bool> corrupt;
  for (int i = 0; i < 6; ++i) {
    c.push_back(1.0);
    corrupt.push_back(false);
  }
  for (int i = 0; i < 4; ++i) {
    c.push_back(0.0);
    corrupt.push_back(true);
  }
  const auto report = confidence_report(c, corrupt);
  CHECK(report.gap == doctest::Approx(1.0));
  CHECK(report.detector_auc == doctest::Approx(1.0));
  CHECK(report.count_clean[19] == 6);
  CHECK(report.count_corrupt[0] == 4);
}

TEST_CASE("confidence_report: AUC matches the pairwise oracle with ties") {
  RngStream rng(612);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 5 + rng.uniform_index(40);
    std::vector<double> c(n);
    std::vector<bool> corrupt(n);
    bool any_pos = false, any_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
      c[i] = std::round(rng.uniform_real(0.0, 1.0) * 8.0) / 8.0;  // coarse grid forces ties
      corrupt[i] = rng.uniform_index(3) == 0;
      (corrupt[i] ? any_pos : any_neg) = true;
    }
    if (!any_pos || !any_neg) continue;
    const auto report = confidence_report(c, corrupt);
    CHECK(report.detector_auc ==
          doctest::Approx(pairwise_auc_oracle(c, corrupt)).epsilon(1e-12));
  }
}

TEST_CASE("accuracy_at applies the score > theta rule") {
  const std::vector<ScoredTriple> s{st(0.9, Label::correct), st(0.4, Label::incorrect),
                                    st(0.6, Label::incorrect)};
  CHECK(accuracy_at(s, 0.7) == doctest::Approx(1.0));
  CHECK(accuracy_at(s, 0.5) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("time_training: one row per ratio, empty list gives an empty table") {
  const auto graph = toy_graph();
  ModelConfig mc;
  mc.encoder.d_word = 6;
  mc.encoder.d_embed = 4;
  mc.encoder.n_filters = 2;
  mc.encoder.max_len = 8;
  mc.score.gamma = 2.0;
  TrainConfig tc;
  tc.epochs = 1;
  tc.k_neg = 1;
  tc.batch_size = 8;
  tc.noise_aware = false;
  tc.exec = ExecMode::serial;

  const auto rows = time_training(graph, mc, tc, {0.5, 1.0});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].first == doctest::Approx(0.5));
  CHECK(rows[1].first == doctest::Approx(1.0));
  CHECK(rows[0].second >= 0.0);
  CHECK(rows[1].second >= 0.0);

  CHECK(time_training(graph, mc, tc, {}).empty());
}
