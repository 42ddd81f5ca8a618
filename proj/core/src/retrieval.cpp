#include "socon/retrieval.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>

namespace socon {

void KeyIndex::insert(std::int64_t frame_id, const PolarKey& key) {
  if (entries_.empty()) {
    if (key.dim() < 1) throw std::invalid_argument("KeyIndex: key must be non-empty");
    dim_ = key.dim();
  } else if (key.dim() != dim_) {
    throw std::invalid_argument("KeyIndex: key dimension " + std::to_string(key.dim()) +
                                " does not match index dimension " + std::to_string(dim_));
  }
  if (!seen_ids_.insert(frame_id).second)
    throw std::invalid_argument("KeyIndex: duplicate frame_id " + std::to_string(frame_id));
  entries_.emplace_back(frame_id, key.values);

  std::vector<double> pts;
  pts.reserve(entries_.size() * static_cast<size_t>(dim_));
  std::vector<std::int64_t> ids;
  ids.reserve(entries_.size());
  for (const auto& [id, k] : entries_) {
    ids.push_back(id);
    pts.insert(pts.end(), k.data(), k.data() + dim_);
  }
  tree_ = std::make_shared<const KdTree>(dim_, std::move(pts), std::move(ids));
}

std::vector<Candidate> KeyIndex::query(std::int64_t query_id, const PolarKey& key,
                                       const RetrievalConfig& cfg) const {
  cfg.validate();
  std::vector<Candidate> out;
  if (!tree_) return out;
  if (key.dim() != dim_)
    throw std::invalid_argument("KeyIndex: query key dimension mismatch");

  const std::int64_t lo = query_id - cfg.exclusion_gap;  // excluded: (lo, query_id]
  const auto accept = [&](std::int64_t id) { return !(id > lo && id <= query_id); };
  const auto found = tree_->nearest(key.values.data(), cfg.top_k, accept);
  out.reserve(found.size());
  for (const auto& n : found) out.push_back({n.id, std::sqrt(n.dist_sq)});
  return out;
}

void save_keys_jsonl(const KeyIndex& index, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_keys_jsonl: cannot open " + path.string());
  for (const auto& [id, key] : index.entries()) {
    nlohmann::json rec;
    rec["frame_id"] = id;
    rec["key"] = std::vector<double>(key.data(), key.data() + key.size());
    out << rec.dump() << "\n";
  }
}

KeyIndex load_keys_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_keys_jsonl: cannot open " + path.string());
  KeyIndex index;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto rec = nlohmann::json::parse(line);
    PolarKey key;
    const auto& arr = rec.at("key");
    key.values.resize(static_cast<Eigen::Index>(arr.size()));
    for (size_t i = 0; i < arr.size(); ++i) key.values[static_cast<Eigen::Index>(i)] = arr[i];
    index.insert(rec.at("frame_id").get<std::int64_t>(), key);
  }
  return index;
}

}  // namespace socon
