// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#include "scenesearch/aesrank.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "jsonl.hpp"
#include "scenesearch/error.hpp"
#include "scenesearch/linear_svm.hpp"

namespace scenesearch::aesrank {

using detail::json;

VoteSheet group_votes(std::span<const VoteRecord> records) {
  std::map<std::pair<VideoId, SceneId>, SceneVotes> grouped;
  for (const auto& r : records) {
    auto& scene = grouped[{r.video_id, r.scene_id}];
    scene.video_id = r.video_id;
    scene.scene_id = r.scene_id;
    scene.votes.emplace_back(r.shot_id, r.votes);
  }
  VoteSheet out;
  for (auto& [key, scene] : grouped) {
    std::sort(scene.votes.begin(), scene.votes.end());
    out.push_back(std::move(scene));
  }
  return out;
}

VoteSheet load_votes(const std::filesystem::path& path, const Dataset& dataset) {
  std::vector<VoteRecord> records;
  for (const auto& row : detail::read_jsonl(path)) {
    try {
      VoteRecord r;
      r.scene_id = detail::field<SceneId>(row.value, "scene_id");
      r.shot_id = detail::field<ShotId>(row.value, "shot_id");
      r.votes = detail::field<int>(row.value, "votes");
      bool found = false;
      for (const auto& v : dataset.videos) {
        if (v.shot_index(r.shot_id)) {
          r.video_id = v.id();
          found = true;
          break;
        }
      }
      if (!found) throw std::invalid_argument("unknown shot " + std::to_string(r.shot_id));
      records.push_back(r);
    } catch (const std::invalid_argument& e) {
      throw Error(Errc::parse, path.string() + ":" + std::to_string(row.line_number) + ": " + e.what());
    }
  }
  return group_votes(records);
}

std::vector<PreferencePair> pairs_from_votes(const VoteSheet& votes) {
  std::vector<PreferencePair> pairs;
  for (const auto& scene : votes) {
    for (const auto& [a, va] : scene.votes) {
      for (const auto& [b, vb] : scene.votes) {
        if (a != b && va > vb) pairs.push_back({scene.video_id, scene.scene_id, a, b});
      }
    }
  }
  return pairs;
}

namespace {

std::span<const float> phi_of(const hypercolumn::PhiTable& phi, ShotId shot) {
  auto it = phi.find(shot);
  if (it == phi.end()) throw Error(Errc::missing_features, "no phi for keyframe of shot " + std::to_string(shot));
  return it->second.data();
}

}  // namespace

RankModel train_rank(std::span<const PreferencePair> pairs, const hypercolumn::PhiTable& phi, double c) {
  if (pairs.empty()) throw Error(Errc::no_pairs, "ranking needs at least one preference pair");

  std::set<ShotId> referenced;
  for (const auto& p : pairs) {
    referenced.insert(p.better);
    referenced.insert(p.worse);
  }
  const std::size_t dim = phi_of(phi, *referenced.begin()).size();

  std::vector<double> mean(dim, 0.0), var(dim, 0.0);
  for (ShotId s : referenced) {
    const auto f = phi_of(phi, s);
    if (f.size() != dim) throw Error(Errc::dimension_mismatch, "phi vectors differ in length");
    for (std::size_t k = 0; k < dim; ++k) mean[k] += f[k];
  }
  const auto count = static_cast<double>(referenced.size());
  for (auto& m : mean) m /= count;
  for (ShotId s : referenced) {
    const auto f = phi_of(phi, s);
    for (std::size_t k = 0; k < dim; ++k) {
      const double d = f[k] - mean[k];
      var[k] += d * d;
    }
  }

  RankModel model;
  model.c = c;
  model.pairs = pairs.size();
  std::vector<float> mean_f(dim), std_f(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    mean_f[k] = static_cast<float>(mean[k]);
    const auto sd = static_cast<float>(std::sqrt(var[k] / count));
    std_f[k] = sd > 0.0f ? sd : 1.0f;
  }
  model.feature_mean = Tensor::vector(mean_f);
  model.feature_std = Tensor::vector(std_f);

  // Standardize with the stored f32 statistics so scoring matches training.
  svm::Samples diffs(pairs.size(), dim);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto a = phi_of(phi, pairs[i].better);
    const auto b = phi_of(phi, pairs[i].worse);
    auto row = diffs.row(i);
    for (std::size_t k = 0; k < dim; ++k) {
      const double za = (static_cast<double>(a[k]) - mean_f[k]) / std_f[k];
      const double zb = (static_cast<double>(b[k]) - mean_f[k]) / std_f[k];
      row[k] = za - zb;
    }
  }
  const auto solved = svm::train_unbiased_svm(diffs, c);
  model.w = Tensor::vector(std::vector<float>(solved.w.begin(), solved.w.end()));

  const std::vector<double> wq(model.w.data().begin(), model.w.data().end());
  const std::vector<int> ones(pairs.size(), 1);
  model.objective_value = svm::hinge_objective(wq, 0.0, diffs, ones, c);
  return model;
}

double rank_score(const RankModel& model, std::span<const float> phi) {
  if (phi.size() != model.w.size()) {
    throw Error(Errc::dimension_mismatch, "phi has " + std::to_string(phi.size()) + " components, model expects " +
                                              std::to_string(model.w.size()));
  }
  double s = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    s += static_cast<double>(model.w[k]) * ((static_cast<double>(phi[k]) - model.feature_mean[k]) /
                                             static_cast<double>(model.feature_std[k]));
  }
  return s;
}

double swapped_pairs_pct(std::span<const PreferencePair> pairs, const std::function<double(ShotId)>& score) {
  if (pairs.empty()) throw Error(Errc::no_pairs, "swapped-pairs metric needs at least one pair");
  std::size_t swapped = 0;
  for (const auto& p : pairs) {
    if (score(p.better) <= score(p.worse)) ++swapped;
  }
  return 100.0 * static_cast<double>(swapped) / static_cast<double>(pairs.size());
}

double swapped_pairs_pct(const RankModel& model, std::span<const PreferencePair> pairs,
                         const hypercolumn::PhiTable& phi) {
  return swapped_pairs_pct(pairs, [&](ShotId s) { return rank_score(model, phi_of(phi, s)); });
}

std::vector<LeaveOneOutRow> leave_one_out(const Dataset& dataset, const VoteSheet& votes,
                                          const hypercolumn::PhiTable& phi, double c) {
  const auto all = pairs_from_votes(votes);
  std::vector<LeaveOneOutRow> rows;
  for (const auto& video : dataset.videos) {
    std::vector<PreferencePair> train, test;
    for (const auto& p : all) (p.video_id == video.id() ? test : train).push_back(p);
    if (test.empty() || train.empty()) continue;
    const auto model = train_rank(train, phi, c);
    rows.push_back({video.id(), video.entry.title, train.size(), test.size(), swapped_pairs_pct(model, test, phi)});
  }
  return rows;
}

void save_model(const std::filesystem::path& path, const RankModel& model) {
  const json doc = {
      {"w", detail::tensor_to_base64(model.w)},
      {"feature_mean", detail::tensor_to_base64(model.feature_mean)},
      {"feature_std", detail::tensor_to_base64(model.feature_std)},
      {"C", model.c},
      {"objective_value", model.objective_value},
      {"pairs", model.pairs},
  };
  detail::write_text_file(path, doc.dump(2) + "\n");
}

RankModel load_model(const std::filesystem::path& path) {
  const json doc = detail::read_json_file(path);
  try {
    RankModel m;
    m.w = detail::tensor_from_base64(detail::field<std::string>(doc, "w"));
    m.feature_mean = detail::tensor_from_base64(detail::field<std::string>(doc, "feature_mean"));
    m.feature_std = detail::tensor_from_base64(detail::field<std::string>(doc, "feature_std"));
    m.c = detail::field<double>(doc, "C");
    m.objective_value = detail::field<double>(doc, "objective_value");
    m.pairs = doc.value("pairs", std::size_t{0});
    if (m.w.dims() != m.feature_mean.dims() || m.w.dims() != m.feature_std.dims() || m.w.rank() != 1) {
      throw std::invalid_argument("w, feature_mean and feature_std must be vectors of equal length");
    }
    for (float s : m.feature_std.data()) {
      if (!(s > 0.0f)) throw std::invalid_argument("feature_std must be > 0");
    }
    return m;
  } catch (const std::invalid_argument& e) {
    throw Error(Errc::parse, path.string() + ": " + e.what());
  }
}

}  // namespace scenesearch::aesrank
