// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#include "scenesearch/hypercolumn.hpp"

#include <algorithm>
#include <cmath>

#include "scenesearch/error.hpp"
#include "scenesearch/parallel.hpp"
#include "scenesearch/tensor_io.hpp"

namespace scenesearch::hypercolumn {

namespace {

// Source coordinate and interpolation weight for output index i.
struct Tap {
  std::size_t lo;
  std::size_t hi;
  double frac;
};

std::vector<Tap> taps(std::size_t src, std::size_t dst) {
  std::vector<Tap> out(dst);
  for (std::size_t i = 0; i < dst; ++i) {
    if (src == 1 || dst == 1) {
      out[i] = {0, 0, 0.0};
      continue;
    }
    // i * (src-1) is an exact integer, so equal sizes map i -> i exactly.
    const double pos = static_cast<double>(i * (src - 1)) / static_cast<double>(dst - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    lo = std::min(lo, src - 1);
    const std::size_t hi = std::min(lo + 1, src - 1);
    out[i] = {lo, hi, pos - static_cast<double>(lo)};
  }
  return out;
}

std::vector<double> resize_to_double(const Tensor& map, std::size_t size) {
  const std::size_t h = map.rows();
  const std::size_t w = map.cols();
  const auto ty = taps(h, size);
  const auto tx = taps(w, size);
  std::vector<double> out(size * size);
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t c = 0; c < size; ++c) {
      const double a = map(ty[r].lo, tx[c].lo);
      const double b = map(ty[r].lo, tx[c].hi);
      const double d = map(ty[r].hi, tx[c].lo);
      const double e = map(ty[r].hi, tx[c].hi);
      const double top = a + (b - a) * tx[c].frac;
      const double bottom = d + (e - d) * tx[c].frac;
      out[r * size + c] = top + (bottom - top) * ty[r].frac;
    }
  }
  return out;
}

std::vector<double> gaussian_values(std::size_t size, double sigma_b) {
  const double sigma = sigma_b * static_cast<double>(size);
  const double center = 0.5 * static_cast<double>(size - 1);
  std::vector<double> g(size * size);
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t c = 0; c < size; ++c) {
      const double dr = static_cast<double>(r) - center;
      const double dc = static_cast<double>(c) - center;
      g[r * size + c] = std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));
    }
  }
  return g;
}

}  // namespace

ActivationBundle ActivationBundle::load(const std::filesystem::path& keyframe_dir, ShotId shot) {
  ActivationBundle bundle;
  for (std::size_t b = 1; b <= kBlockCount; ++b) {
    const auto path = keyframe_dir / block_file_name(shot, b);
    if (!std::filesystem::exists(path)) {
      throw Error(Errc::incomplete_bundle, path.string() + " not found");
    }
    bundle.block_maps.push_back(load_tensor(path));
  }
  return bundle;
}

Tensor bilinear_resize(const Tensor& map, std::size_t size) {
  if (map.rank() != 2) throw Error(Errc::bad_dims, "bilinear_resize expects a rank-2 map");
  if (size == 0) throw Error(Errc::invalid_config, "resize target must be >= 1");
  const auto values = resize_to_double(map, size);
  return Tensor({size, size}, std::vector<float>(values.begin(), values.end()));
}

Tensor gaussian_center_map(std::size_t size, double sigma_b) {
  if (size < 2 || !(sigma_b > 0.0)) throw Error(Errc::invalid_config, "gaussian map needs size >= 2, sigma_b > 0");
  const auto g = gaussian_values(size, sigma_b);
  return Tensor({size, size}, std::vector<float>(g.begin(), g.end()));
}

HypercolumnFeatures build_hypercolumns(const ActivationBundle& bundle, const EngineConfig& config) {
  if (bundle.block_maps.size() != kBlockCount) {
    throw Error(Errc::incomplete_bundle, "expected " + std::to_string(kBlockCount) + " block maps, got " +
                                             std::to_string(bundle.block_maps.size()));
  }
  const std::size_t s = config.map_size;
  const auto g = gaussian_values(s, config.sigma_b);
  double g_sum = 0.0;
  for (double v : g) g_sum += v;
  const double n = static_cast<double>(s * s);

  HypercolumnFeatures out;
  std::vector<float> phi(kPhiDim);
  for (std::size_t b = 0; b < kBlockCount; ++b) {
    const auto& map = bundle.block_maps[b];
    if (map.rank() != 2) throw Error(Errc::incomplete_bundle, "block " + std::to_string(b + 1) + " is not a 2-D map");
    const auto m = resize_to_double(map, s);

    std::vector<float> weighted(s * s);
    double mean = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double v = g[i] * m[i];
      weighted[i] = static_cast<float>(v);
      mean += v;
    }
    mean /= n;

    // Weighted variance on values shifted by m[0]: shift-invariant, and a
    // constant map gives exact zeros.
    const double shift = m[0];
    double wmean = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) wmean += g[i] * (m[i] - shift);
    wmean /= g_sum;
    double var = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double d = (m[i] - shift) - wmean;
      var += g[i] * d * d;
    }
    var /= g_sum;

    phi[2 * b] = static_cast<float>(mean);
    phi[2 * b + 1] = static_cast<float>(std::sqrt(std::max(var, 0.0)));
    out.maps.emplace_back(Tensor::Dims{s, s}, std::move(weighted));
  }
  out.phi = Tensor::vector(std::move(phi));
  return out;
}

std::string phi_file_name(ShotId shot) { return std::to_string(shot) + ".phi.tnsr"; }

PhiTable compute_phi_table(const Dataset& dataset, const EngineConfig& config, unsigned threads,
                           const std::optional<std::filesystem::path>& cache_dir) {
  struct Job {
    const Video* video;
    ShotId shot;
  };
  std::vector<Job> jobs;
  for (const auto& v : dataset.videos) {
    for (const auto& s : v.shots) jobs.push_back({&v, s.shot_id});
  }
  // Cached phi files are only valid for the parameters that produced them.
  bool reuse = false;
  if (cache_dir) {
    std::filesystem::create_directories(*cache_dir);
    const auto stamp_path = *cache_dir / "phi.stamp";
    const std::string stamp = "sigma_b=" + std::to_string(config.sigma_b) +
                              " map_size=" + std::to_string(config.map_size) + "\n";
    if (std::filesystem::exists(stamp_path)) {
      const auto bytes = read_file_bytes(stamp_path);
      reuse = std::string(bytes.begin(), bytes.end()) == stamp;
    }
    write_file_bytes(stamp_path, std::span(reinterpret_cast<const std::uint8_t*>(stamp.data()), stamp.size()));
  }

  std::vector<Tensor> phis(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    const auto& job = jobs[i];
    if (cache_dir && reuse) {
      const auto cached = *cache_dir / phi_file_name(job.shot);
      if (std::filesystem::exists(cached)) {
        Tensor t = load_tensor(cached);
        if (t.dims() == Tensor::Dims{kPhiDim}) {
          phis[i] = std::move(t);
          return;
        }
      }
    }
    const auto bundle = ActivationBundle::load(job.video->entry.keyframe_feature_dir, job.shot);
    phis[i] = build_hypercolumns(bundle, config).phi;
    if (cache_dir) save_tensor(*cache_dir / phi_file_name(job.shot), phis[i]);
  });
  PhiTable table;
  for (std::size_t i = 0; i < jobs.size(); ++i) table.emplace(jobs[i].shot, std::move(phis[i]));
  return table;
}

}  // namespace scenesearch::hypercolumn
