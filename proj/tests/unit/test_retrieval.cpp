#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "socon/retrieval.hpp"
#include "test_support.hpp"

using namespace socon;

namespace {

PolarKey key_of(std::initializer_list<double> vals) {
  PolarKey k;
  k.values.resize(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double v : vals) k.values[i++] = v;
  return k;
}

PolarKey random_key(Rng& rng, int dim) {
  PolarKey k;
  k.values.resize(dim);
  for (int i = 0; i < dim; ++i) k.values[i] = rng.uniform01();
  return k;
}

// Brute-force k-NN with the same exclusion and (distance, id) tie rule.
std::vector<Candidate> brute_force(const KeyIndex& index, std::int64_t query_id,
                                   const PolarKey& key, const RetrievalConfig& cfg) {
  struct Scored {
    double dist;
    std::int64_t id;
  };
  std::vector<Scored> all;
  for (const auto& [id, k] : index.entries()) {
    if (id > query_id - cfg.exclusion_gap && id <= query_id) continue;
    all.push_back({(k - key.values).norm(), id});
  }
  std::sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.id < b.id;
  });
  if (static_cast<int>(all.size()) > cfg.top_k) all.resize(cfg.top_k);
  std::vector<Candidate> out;
  for (const auto& s : all) out.push_back({s.id, s.dist});
  return out;
}

}  // namespace

TEST_CASE("insert grows the index; duplicates and dimension mismatches fail") {
  KeyIndex index;
  index.insert(0, key_of({0.0, 0.0}));
  CHECK(index.size() == 1);
  CHECK_THROWS_AS(index.insert(0, key_of({1.0, 1.0})), std::invalid_argument);
  CHECK_THROWS_AS(index.insert(1, key_of({1.0, 1.0, 1.0})), std::invalid_argument);
  index.insert(1, key_of({3.0, 4.0}));
  CHECK(index.size() == 2);
}

TEST_CASE("query returns the nearest key") {
  KeyIndex index;
  index.insert(0, key_of({0.0, 0.0}));  // A
  index.insert(1, key_of({3.0, 4.0}));  // B
  RetrievalConfig cfg;
  cfg.exclusion_gap = 0;
  cfg.top_k = 1;

  const auto got = index.query(100, key_of({0.0, 0.1}), cfg);
  REQUIRE(got.size() == 1);
  CHECK(got[0].frame_id == 0);
  CHECK(got[0].key_distance == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("exclusion window removes recent frames from consideration") {
  KeyIndex index;
  index.insert(98, key_of({0.0, 0.0}));  // A, recent
  index.insert(1, key_of({3.0, 4.0}));   // B, old
  RetrievalConfig cfg;
  cfg.exclusion_gap = 50;
  cfg.top_k = 1;

  const auto got = index.query(100, key_of({0.0, 0.1}), cfg);
  REQUIRE(got.size() == 1);
  CHECK(got[0].frame_id == 1);
  // sqrt(3^2 + 3.9^2)
  CHECK(got[0].key_distance == doctest::Approx(std::hypot(3.0, 3.9)).epsilon(1e-12));
  CHECK(got[0].key_distance == doctest::Approx(4.9203658400570172).epsilon(1e-12));
}

TEST_CASE("empty candidate set is an empty result, not an error") {
  KeyIndex index;
  index.insert(99, key_of({0.0, 0.0}));
  RetrievalConfig cfg;
  cfg.exclusion_gap = 50;
  const auto got = index.query(100, key_of({0.0, 0.0}), cfg);
  CHECK(got.empty());
  KeyIndex empty;
  CHECK(empty.query(0, key_of({0.0}), cfg).empty());
}

TEST_CASE("1000 random inserts are all retrievable") {
  KeyIndex index;
  Rng rng(17);
  std::vector<PolarKey> keys;
  for (int i = 0; i < 1000; ++i) {
    keys.push_back(random_key(rng, 8));
    index.insert(i, keys.back());
  }
  CHECK(index.size() == 1000);
  RetrievalConfig cfg;
  cfg.exclusion_gap = 0;
  cfg.top_k = 1;
  for (int i = 0; i < 1000; i += 37) {
    const auto got = index.query(2000, keys[static_cast<size_t>(i)], cfg);
    REQUIRE(got.size() == 1);
    CHECK(got[0].key_distance == 0.0);
    CHECK(got[0].frame_id == i);
  }
}

TEST_CASE("kd-tree equals brute force with exclusion and ties") {
  Rng rng(23);
  KeyIndex index;
  const int dim = 6;
  for (int i = 0; i < 400; ++i) {
    PolarKey k = random_key(rng, dim);
    // Quantize so exact distance ties actually occur.
    for (int d = 0; d < dim; ++d) k.values[d] = std::round(k.values[d] * 4.0) / 4.0;
    index.insert(i, k);
  }
  for (int trial = 0; trial < 200; ++trial) {
    PolarKey q = random_key(rng, dim);
    for (int d = 0; d < dim; ++d) q.values[d] = std::round(q.values[d] * 4.0) / 4.0;
    RetrievalConfig cfg;
    cfg.exclusion_gap = trial % 3 == 0 ? 50 : 0;
    cfg.top_k = 1 + trial % 7;
    const std::int64_t query_id = 380 + trial % 40;
    const auto fast = index.query(query_id, q, cfg);
    const auto slow = brute_force(index, query_id, q, cfg);
    REQUIRE(fast.size() == slow.size());
    for (size_t k = 0; k < fast.size(); ++k) {
      CHECK(fast[k].frame_id == slow[k].frame_id);
      CHECK(fast[k].key_distance == doctest::Approx(slow[k].key_distance).epsilon(1e-12));
    }
  }
}

TEST_CASE("returned distances are non-decreasing") {
  Rng rng(29);
  KeyIndex index;
  for (int i = 0; i < 200; ++i) index.insert(i, random_key(rng, 5));
  RetrievalConfig cfg;
  cfg.exclusion_gap = 0;
  cfg.top_k = 10;
  for (int trial = 0; trial < 50; ++trial) {
    const auto got = index.query(1000, random_key(rng, 5), cfg);
    for (size_t k = 1; k < got.size(); ++k)
      CHECK(got[k].key_distance >= got[k - 1].key_distance);
  }
}

TEST_CASE("keys.jsonl round-trips the index") {
  Rng rng(31);
  KeyIndex index;
  for (int i = 0; i < 50; ++i) index.insert(i * 3, random_key(rng, 7));
  socon_test::TempDir tmp("keys_jsonl");
  save_keys_jsonl(index, tmp.path() / "keys.jsonl");
  const KeyIndex loaded = load_keys_jsonl(tmp.path() / "keys.jsonl");
  REQUIRE(loaded.size() == index.size());
  for (size_t k = 0; k < index.entries().size(); ++k) {
    CHECK(loaded.entries()[k].first == index.entries()[k].first);
    CHECK((loaded.entries()[k].second - index.entries()[k].second).cwiseAbs().maxCoeff() ==
          0.0);
  }
}
