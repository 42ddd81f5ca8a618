#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <set>
#include <utility>
#include <vector>

#include "socon/descriptor.hpp"
#include "socon/kdtree.hpp"

namespace socon {

struct RetrievalConfig {
  int exclusion_gap = 50;  // most recent frames to skip
  int top_k = 1;

  void validate() const {
    if (exclusion_gap < 0) throw std::invalid_argument("retrieval.exclusion_gap must be >= 0");
    if (top_k < 1) throw std::invalid_argument("retrieval.top_k must be >= 1");
  }
};

/// A proposed loop candidate: frame id and Euclidean polar-key distance.
struct Candidate {
  std::int64_t frame_id = -1;
  double key_distance = 0.0;
};

/**
 * KD-tree index over polar keys. Insert is exclusive; queries are safe to run
 * concurrently between inserts (the tree is rebuilt eagerly on insert).
 * Answers are exact: identical to a brute-force Euclidean scan with ties
 * broken by the smaller frame id.
 */
class KeyIndex {
 public:
  KeyIndex() = default;

  std::size_t size() const { return entries_.size(); }
  int dim() const { return dim_; }

  /// First insert fixes the key dimension; frame ids must be unique.
  void insert(std::int64_t frame_id, const PolarKey& key);

  /**
   * Up to cfg.top_k nearest entries to `key`, excluding frame ids in
   * (query_id - exclusion_gap, query_id]. Ascending distance, ties by
   * smaller frame id. Empty result when nothing is eligible.
   */
  std::vector<Candidate> query(std::int64_t query_id, const PolarKey& key,
                               const RetrievalConfig& cfg) const;

  const std::vector<std::pair<std::int64_t, Eigen::VectorXd>>& entries() const {
    return entries_;
  }

 private:
  int dim_ = 0;
  std::vector<std::pair<std::int64_t, Eigen::VectorXd>> entries_;
  std::set<std::int64_t> seen_ids_;
  std::shared_ptr<const KdTree> tree_;
};

/// Persistence: one JSON record {"frame_id": ..., "key": [...]} per line.
void save_keys_jsonl(const KeyIndex& index, const std::filesystem::path& path);
KeyIndex load_keys_jsonl(const std::filesystem::path& path);

}  // namespace socon
