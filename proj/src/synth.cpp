#include "pge/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pge/errors.hpp"
#include "pge/rng.hpp"

namespace pge {

const std::vector<SynthTheme>& builtin_themes() {
  static const std::vector<SynthTheme> themes = {
      {"spicy snacks",
       {"spicy queso", "hot chili", "fiery habanero", "spicy bbq"},
       {"chipotle pepper", "cayenne pepper", "carolina reaper", "jalapeno powder"},
       {"tortilla chips", "bean chips", "corn crisps"}},
      {"sweet candy",
       {"strawberry", "caramel swirl", "vanilla fudge", "honey glaze"},
       {"cane sugar", "corn syrup", "cocoa butter", "vanilla bean"},
       {"candy brittle", "gummy bears", "chocolate bars"}},
      {"herbal care",
       {"mint fresh", "lavender calm", "eucalyptus breeze", "tea tree"},
       {"peppermint oil", "lavender extract", "eucalyptus oil", "tea tree oil"},
       {"shampoo", "conditioner", "body wash"}},
      {"citrus drinks",
       {"lemon zest", "orange burst", "lime twist", "grapefruit splash"},
       {"lemon juice", "orange extract", "lime concentrate", "citric acid"},
       {"sparkling water", "fruit soda", "iced tea"}},
  };
  return themes;
}

namespace {

const char* kSizePhrases[] = {"2 oz pack of 6", "12 oz bag", "family size", "5 oz pack of 4"};

template <typename T>
const T& pick(const std::vector<T>& items, RngStream& rng) {
  return items[rng.uniform_index(items.size())];
}

void validate_spec(const SynthSpec& spec, const std::vector<SynthTheme>& themes) {
  std::vector<std::string> problems;
  if (spec.n_products < 1) problems.push_back("n_products must be >= 1");
  if (spec.noise_ratio < 0.0 || spec.noise_ratio > 1.0)
    problems.push_back("noise_ratio must be in [0, 1]");
  if (spec.n_valid < 2 || spec.n_valid % 2 != 0)
    problems.push_back("n_valid must be even and >= 2");
  if (spec.n_test < 2 || spec.n_test % 2 != 0) problems.push_back("n_test must be even and >= 2");
  if (themes.empty()) problems.push_back("theme table is empty");
  for (const auto& t : themes) {
    if (t.flavors.empty() || t.ingredients.empty() || t.categories.empty()) {
      problems.push_back("theme '" + t.name + "' has an empty value vocabulary");
    }
  }
  const long needed = spec.n_valid + spec.n_test;
  if (needed > 3L * spec.n_products) {
    problems.push_back("n_valid + n_test exceeds the number of generated triples");
  }
  if (!problems.empty()) {
    std::string msg = "invalid synth spec:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw ValidationError(msg);
  }
}

}  // namespace

SynthResult generate_synth(const SynthSpec& spec) {
  const auto& themes = spec.themes.empty() ? builtin_themes() : spec.themes;
  validate_spec(spec, themes);

  RngStream product_rng(splitmix64(spec.seed + 11));
  RngStream noise_rng(splitmix64(spec.seed + 12));
  RngStream eval_rng(splitmix64(spec.seed + 13));

  std::vector<RawTriple> records;
  records.reserve(static_cast<std::size_t>(spec.n_products) * 3);
  for (int p = 0; p < spec.n_products; ++p) {
    const auto& theme = themes[product_rng.uniform_index(themes.size())];
    const std::string& flavor = pick(theme.flavors, product_rng);
    const std::string& ingredient = pick(theme.ingredients, product_rng);
    const std::string& category = pick(theme.categories, product_rng);
    const char* size_phrase = kSizePhrases[product_rng.uniform_index(4)];
    const std::string title =
        "brand" + std::to_string(p) + " " + category + " " + flavor + " " + size_phrase;
    records.push_back({title, "flavor", flavor, Label::unlabeled});
    records.push_back({title, "ingredient", ingredient, Label::unlabeled});
    records.push_back({title, "category", category, Label::unlabeled});
  }

  ProductGraph clean = build_graph(records, {});

  SynthResult result;
  if (spec.noise_ratio > 0.0) {
    NoiseResult noisy = inject_noise(clean, spec.noise_ratio, noise_rng, NoiseMode::value_only);
    result.train = std::move(noisy.graph);
    result.log = std::move(noisy.log);
  } else {
    result.train = clean;
  }

  // Labeled splits: originals keep label 1, fresh corruptions (never added to
  // the graph) get label 0, classes balanced within each split.
  const std::size_t n_clean = clean.triples().size();
  std::vector<std::size_t> indices(n_clean);
  std::iota(indices.begin(), indices.end(), 0);
  eval_rng.shuffle(indices);

  const auto half = static_cast<std::size_t>(spec.n_valid + spec.n_test) / 2;
  std::vector<RawTriple> correct, incorrect;
  correct.reserve(half);
  incorrect.reserve(half);
  for (std::size_t i = 0; i < half; ++i) {
    RawTriple r = to_raw(clean, clean.triples()[indices[i]]);
    r.label = Label::correct;
    correct.push_back(std::move(r));
  }
  for (std::size_t i = half; i < 2 * half; ++i) {
    const std::size_t idx = indices[i];
    const auto& t = clean.triples()[idx];
    const std::int32_t fresh = sample_replacement_value(
        clean, clean.triple_title_id(idx), t.attribute_id, eval_rng);
    RawTriple r = to_raw(clean, t);
    r.value = clean.values()[static_cast<std::size_t>(fresh)];
    r.label = Label::incorrect;
    incorrect.push_back(std::move(r));
  }

  const auto nv_half = static_cast<std::size_t>(spec.n_valid) / 2;
  for (std::size_t i = 0; i < nv_half; ++i) {
    result.valid.push_back(correct[i]);
    result.valid.push_back(incorrect[i]);
  }
  for (std::size_t i = nv_half; i < half; ++i) {
    result.test.push_back(correct[i]);
    result.test.push_back(incorrect[i]);
  }
  eval_rng.shuffle(result.valid);
  eval_rng.shuffle(result.test);
  return result;
}

}  // namespace pge
