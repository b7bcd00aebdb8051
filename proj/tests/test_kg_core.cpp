#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "helpers.hpp"
#include "pge/errors.hpp"
#include "pge/graph.hpp"
#include "pge/sampling.hpp"
#include "pge/vocabulary.hpp"

using namespace pge;
using namespace pge::testing;

TEST_CASE("load_triples: single record") {
  TempDir tmp;
  write_file(tmp.file("t.tsv"), "A Chips\tflavor\tspicy\n");
  const auto g = load_triples(tmp.file("t.tsv"), {});
  CHECK(g.triples().size() == 1);
  CHECK(g.attributes().size() == 1);
  CHECK(g.titles().size() == 1);
  CHECK(g.values().size() == 1);
  CHECK(g.attributes()[0] == "flavor");
  CHECK(g.triples()[0].title_text == "A Chips");
  CHECK(g.triples()[0].value_text == "spicy");
}

TEST_CASE("load_triples: duplicate lines collapse to one triple") {
  TempDir tmp;
  write_file(tmp.file("t.tsv"), "A Chips\tflavor\tspicy\nA Chips\tflavor\tspicy\n");
  const auto g = load_triples(tmp.file("t.tsv"), {});
  CHECK(g.triples().size() == 1);
}

TEST_CASE("load_triples: malformed line names its line number") {
  TempDir tmp;
  write_file(tmp.file("t.tsv"), "A Chips\tflavor\tspicy\nbad line without tabs\n");
  CHECK_THROWS_WITH_AS(load_triples(tmp.file("t.tsv"), {}),
                       doctest::Contains("line 2"), DataError);
}

TEST_CASE("load_triples: empty file is an empty-input error") {
  TempDir tmp;
  write_file(tmp.file("t.tsv"), "");
  CHECK_THROWS_WITH_AS(load_triples(tmp.file("t.tsv"), {}), doctest::Contains("empty"),
                       DataError);
}

TEST_CASE("load_triples: labels parse and bad labels are rejected") {
  TempDir tmp;
  write_file(tmp.file("t.tsv"), "p\tflavor\tv\t1\nq\tflavor\tw\t0\n");
  const auto g = load_triples(tmp.file("t.tsv"), {});
  CHECK(g.triples()[0].label == Label::correct);
  CHECK(g.triples()[1].label == Label::incorrect);

  write_file(tmp.file("bad.tsv"), "p\tflavor\tv\t7\n");
  CHECK_THROWS_AS(load_triples(tmp.file("bad.tsv"), {}), DataError);
}

TEST_CASE("load_triples: comments are skipped, attribute order is first-seen") {
  TempDir tmp;
  write_file(tmp.file("t.tsv"), "# header comment\np\tflavor\tv\nq\tscent\tw\nr\tflavor\tu\n");
  const auto g = load_triples(tmp.file("t.tsv"), {});
  CHECK(g.attributes() == std::vector<std::string>{"flavor", "scent"});
}

TEST_CASE("preprocess: plain two-token text") {
  Vocabulary vocab;
  vocab.add("spicy");
  vocab.add("queso");
  const auto seq = preprocess("Spicy Queso", vocab, 32, 1);
  REQUIRE(seq.size() == 2);
  CHECK(seq[0] == vocab.lookup("spicy"));
  CHECK(seq[1] == vocab.lookup("queso"));
  CHECK(seq[0] != Vocabulary::kUnkIndex);
}

TEST_CASE("preprocess: all-stopword text falls back to a single unk token") {
  Vocabulary vocab({"the", "of", "a"});
  const auto seq = preprocess("the of a", vocab, 32, 1);
  REQUIRE(seq.size() == 1);
  CHECK(seq[0] == Vocabulary::kUnkIndex);
}

TEST_CASE("preprocess: truncation to max_len") {
  Vocabulary vocab;
  std::string text;
  for (int i = 0; i < 50; ++i) text += "tok" + std::to_string(i) + " ";
  const auto seq = preprocess(text, vocab, 32, 1);
  CHECK(seq.size() == 32);
}

TEST_CASE("preprocess: right-pads up to the max filter width") {
  Vocabulary vocab;
  vocab.add("solo");
  const auto seq = preprocess("solo", vocab, 32, 3);
  REQUIRE(seq.size() == 3);
  CHECK(seq[0] == vocab.lookup("solo"));
  CHECK(seq[1] == Vocabulary::kPadIndex);
  CHECK(seq[2] == Vocabulary::kPadIndex);
}

TEST_CASE("preprocess: punctuation strips and case folds") {
  Vocabulary vocab;
  vocab.add("chips");
  vocab.add("and");
  vocab.add("crisps");
  const auto seq = preprocess("Chips-and-Crisps!", vocab, 32, 1);
  REQUIRE(seq.size() == 3);
  CHECK(seq[2] == vocab.lookup("crisps"));
}

TEST_CASE("sample_negatives: forced choice with |V|=2") {
  TempDir tmp;
  write_file(tmp.file("t.tsv"), "p\tflavor\tx\nq\tflavor\ty\n");
  const auto g = load_triples(tmp.file("t.tsv"), {});
  RngStream rng(1);
  const auto negs = sample_negatives(g.triples()[0], g, 1, rng, false);
  REQUIRE(negs.size() == 1);
  CHECK(negs[0] == "y");
}

TEST_CASE("sample_negatives: exhausted pool is an error") {
  TempDir tmp;
  write_file(tmp.file("t.tsv"), "p\tflavor\tx\nq\tflavor\tx\n");
  const auto g = load_triples(tmp.file("t.tsv"), {});
  REQUIRE(g.values().size() == 1);
  RngStream rng(1);
  CHECK_THROWS_WITH_AS(sample_negatives(g.triples()[0], g, 1, rng, false),
                       doctest::Contains("exhausted"), DataError);
}

TEST_CASE("sample_negatives: deterministic under a fixed seed") {
  std::vector<RawTriple> records;
  for (int i = 0; i < 100; ++i) {
    records.push_back({"p" + std::to_string(i), "flavor", "v" + std::to_string(i),
                       Label::unlabeled});
  }
  const auto g = build_graph(records, {});
  RngStream rng1(99), rng2(99);
  const auto a = sample_negatives(g.triples()[3], g, 5, rng1, false);
  const auto b = sample_negatives(g.triples()[3], g, 5, rng2, false);
  CHECK(a == b);
}

TEST_CASE("sample_negatives: never returns the observed value, filtered skips known triples") {
  TempDir tmp;
  write_file(tmp.file("t.tsv"), "p\tflavor\tx\np\tflavor\ty\nq\tflavor\tz\nr\tflavor\tw\n");
  const auto g = load_triples(tmp.file("t.tsv"), {});
  RngStream rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto unfiltered = sample_negatives(g.triples()[0], g, 3, rng, false);
    for (const auto& v : unfiltered) CHECK(v != "x");
    const auto filtered = sample_negatives(g.triples()[0], g, 3, rng, true);
    for (const auto& v : filtered) {
      CHECK(v != "x");
      CHECK(v != "y");  // (p, flavor, y) is observed
    }
  }
}

TEST_CASE("inject_noise: count, log size and originals retained") {
  std::vector<RawTriple> records;
  for (int i = 0; i < 10; ++i) {
    records.push_back({"p" + std::to_string(i), "flavor", "v" + std::to_string(i),
                       Label::unlabeled});
  }
  const auto g = build_graph(records, {});
  RngStream rng(3);
  const auto res = inject_noise(g, 0.1, rng);
  CHECK(res.graph.triples().size() == 11);
  CHECK(res.log.size() == 1);
}

TEST_CASE("inject_noise: ceiling rule on the corruption count") {
  std::vector<RawTriple> records;
  for (int i = 0; i < 15; ++i) {
    records.push_back({"p" + std::to_string(i), "flavor", "v" + std::to_string(i),
                       Label::unlabeled});
  }
  const auto g = build_graph(records, {});
  RngStream rng(3);
  const auto res = inject_noise(g, 0.1, rng);  // ceil(1.5) = 2
  CHECK(res.log.size() == 2);
  CHECK(res.graph.triples().size() == 17);
}

TEST_CASE("inject_noise: deterministic log under a fixed seed") {
  const auto g = toy_graph();
  RngStream rng1(11), rng2(11);
  const auto a = inject_noise(g, 0.5, rng1);
  const auto b = inject_noise(g, 0.5, rng2);
  REQUIRE(a.log.size() == b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    CHECK(a.log[i].original.title_text == b.log[i].original.title_text);
    CHECK(a.log[i].corrupted.value_text == b.log[i].corrupted.value_text);
  }
}

TEST_CASE("inject_noise: corrupted triples differ from originals only in value") {
  std::vector<RawTriple> records;
  for (int i = 0; i < 40; ++i) {
    records.push_back({"p" + std::to_string(i), i % 2 == 0 ? "flavor" : "scent",
                       "v" + std::to_string(i % 13), Label::unlabeled});
  }
  const auto g = build_graph(records, {});
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    RngStream rng(seed);
    const auto res = inject_noise(g, 0.3, rng);
    CHECK(res.graph.triples().size() == g.triples().size() + res.log.size());
    for (const auto& rec : res.log) {
      CHECK(rec.original.title_text == rec.corrupted.title_text);
      CHECK(rec.original.attribute_id == rec.corrupted.attribute_id);
      CHECK(rec.original.value_text != rec.corrupted.value_text);
      // the corruption never duplicates an observed triple
      CHECK_FALSE(g.observed(g.title_id(rec.corrupted.title_text), rec.corrupted.attribute_id,
                             g.value_id(rec.corrupted.value_text)));
    }
  }
}

TEST_CASE("inject_noise: head_or_tail mode corrupts exactly one side") {
  std::vector<RawTriple> records;
  for (int i = 0; i < 30; ++i) {
    records.push_back({"p" + std::to_string(i), "rel", "v" + std::to_string(i), Label::unlabeled});
  }
  const auto g = build_graph(records, {});
  RngStream rng(17);
  const auto res = inject_noise(g, 0.5, rng, NoiseMode::head_or_tail);
  bool saw_head = false, saw_tail = false;
  for (const auto& rec : res.log) {
    const bool title_changed = rec.original.title_text != rec.corrupted.title_text;
    const bool value_changed = rec.original.value_text != rec.corrupted.value_text;
    CHECK(title_changed != value_changed);
    saw_head = saw_head || title_changed;
    saw_tail = saw_tail || value_changed;
  }
  CHECK(saw_head);
  CHECK(saw_tail);
}

TEST_CASE("build_inductive_split: shared title removes the triple") {
  std::vector<RawTriple> train = {{"p1", "a", "v1", Label::unlabeled},
                                  {"p2", "a", "v2", Label::unlabeled}};
  const auto g = build_graph(train, {});
  const auto split = build_inductive_split(g, {{"p1", "a", "v3", Label::unlabeled}});
  REQUIRE(split.triples().size() == 1);
  CHECK(split.triples()[0].title_text == "p2");
}

TEST_CASE("build_inductive_split: shared value removes the triple") {
  std::vector<RawTriple> train = {{"p1", "a", "v1", Label::unlabeled},
                                  {"p2", "a", "v2", Label::unlabeled}};
  const auto g = build_graph(train, {});
  const auto split = build_inductive_split(g, {{"q", "a", "v2", Label::unlabeled}});
  REQUIRE(split.triples().size() == 1);
  CHECK(split.triples()[0].title_text == "p1");
}

TEST_CASE("build_inductive_split: disjoint test leaves training unchanged") {
  const auto g = toy_graph();
  const auto split =
      build_inductive_split(g, {{"zeta fresh", "flavor", "minty", Label::unlabeled}});
  CHECK(split.triples().size() == g.triples().size());
}

TEST_CASE("build_inductive_split: exhaustive disjointness on random graphs") {
  RngStream rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<RawTriple> records;
    const std::size_t n = 20 + rng.uniform_index(80);
    for (std::size_t i = 0; i < n; ++i) {
      records.push_back({"p" + std::to_string(rng.uniform_index(30)), "a",
                         "v" + std::to_string(rng.uniform_index(30)), Label::unlabeled});
    }
    const auto g = build_graph(records, {});
    std::vector<RawTriple> test;
    for (int k = 0; k < 5; ++k) {
      test.push_back({"p" + std::to_string(rng.uniform_index(30)), "a",
                      "v" + std::to_string(rng.uniform_index(30)), Label::unlabeled});
    }
    const auto split = build_inductive_split(g, test);
    std::set<std::string> test_entities;
    for (const auto& t : test) {
      test_entities.insert(t.title);
      test_entities.insert(t.value);
    }
    for (const auto& t : split.triples()) {
      CHECK(test_entities.count(t.title_text) == 0);
      CHECK(test_entities.count(t.value_text) == 0);
    }
  }
}

TEST_CASE("TSV round-trip: save then load yields an equal graph") {
  TempDir tmp;
  RngStream rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<RawTriple> records;
    const std::size_t n = 5 + rng.uniform_index(40);
    for (std::size_t i = 0; i < n; ++i) {
      RawTriple r{"title " + std::to_string(rng.uniform_index(15)),
                  rng.uniform_index(2) == 0 ? "flavor" : "scent",
                  "value " + std::to_string(rng.uniform_index(15)), Label::unlabeled};
      const auto lab = rng.uniform_index(3);
      if (lab == 1) r.label = Label::correct;
      if (lab == 2) r.label = Label::incorrect;
      records.push_back(std::move(r));
    }
    const auto g = build_graph(records, {"the"});
    const auto path = tmp.file("roundtrip.tsv");
    save_triples(g, path);
    const auto g2 = load_triples(path, {"the"});

    REQUIRE(g2.triples().size() == g.triples().size());
    for (std::size_t i = 0; i < g.triples().size(); ++i) {
      CHECK(g.triples()[i].title_text == g2.triples()[i].title_text);
      CHECK(g.triples()[i].value_text == g2.triples()[i].value_text);
      CHECK(g.triples()[i].attribute_id == g2.triples()[i].attribute_id);
      CHECK(g.triples()[i].label == g2.triples()[i].label);
    }
    CHECK(g.attributes() == g2.attributes());
    CHECK(g.titles() == g2.titles());
    CHECK(g.values() == g2.values());
    CHECK(g.vocab() == g2.vocab());
  }
}

TEST_CASE("corruption log round-trips") {
  TempDir tmp;
  const auto g = toy_graph();
  RngStream rng(3);
  const auto res = inject_noise(g, 0.4, rng);
  const auto path = tmp.file("log.tsv");
  save_corruption_log(res.log, res.graph.attributes(), path);
  const auto rows = read_corruption_log(path);
  REQUIRE(rows.size() == res.log.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].orig_title == res.log[i].original.title_text);
    CHECK(rows[i].orig_value == res.log[i].original.value_text);
    CHECK(rows[i].corrupt_value == res.log[i].corrupted.value_text);
  }
}
