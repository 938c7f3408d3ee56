#include "bike/synthetic.hpp"

#include <algorithm>
#include <string>

#include "bike/rng.hpp"
#include "bike/surrogate.hpp"

namespace bike {

namespace {

Vec random_direction(SplitMix64& rng, std::size_t dim) {
  for (;;) {
    Vec v(dim);
    for (double& x : v) x = rng.uniform_pm1();
    if (norm2(v) > 1e-6) return l2_normalize(v);
  }
}

// Residual of a random draw against the rows of `basis`, renormalized.
Vec random_orthogonal(SplitMix64& rng, const Mat& basis, std::size_t dim) {
  for (;;) {
    Vec v = random_direction(rng, dim);
    for (std::size_t r = 0; r < basis.rows(); ++r) {
      const double proj = dot(basis.row(r), v);
      const auto row = basis.row(r);
      for (std::size_t c = 0; c < dim; ++c) v[c] -= proj * row[c];
    }
    if (norm2(v) > 1e-6) return l2_normalize(v);
  }
}

}  // namespace

DatasetManifest make_synthetic(const SyntheticParams& p) {
  if (p.classes < 2) throw InvalidArgumentError("need at least two classes");
  if (p.dim < p.classes) {
    throw DimTooSmallError("dim must be >= classes to orthonormalize the categories");
  }
  if (p.frames < 1 || p.videos < 1) {
    throw InvalidArgumentError("need at least one frame and one video");
  }
  if (p.noise_frames > p.frames) {
    throw InvalidArgumentError("noise-frames cannot exceed frames");
  }
  if (p.noise_frames > 0 && p.dim <= p.classes) {
    throw DimTooSmallError(
        "dim must exceed classes so noise frames can be orthogonal to every category");
  }

  DatasetManifest ds;
  ds.dim = p.dim;

  // Orthonormal cls embeddings.
  Mat cls(p.classes, p.dim);
  {
    SplitMix64 rng(mix64(p.seed, 0xC1A55ull));
    for (std::size_t k = 0; k < p.classes; ++k) {
      for (;;) {
        Vec v = random_direction(rng, p.dim);
        for (std::size_t prev = 0; prev < k; ++prev) {
          const double proj = dot(cls.row(prev), v);
          const auto row = cls.row(prev);
          for (std::size_t c = 0; c < p.dim; ++c) v[c] -= proj * row[c];
        }
        if (norm2(v) > 1e-6) {
          v = l2_normalize(v);
          std::copy(v.begin(), v.end(), cls.row(k).begin());
          break;
        }
      }
    }
  }

  for (std::size_t k = 0; k < p.classes; ++k) {
    CategoryEntry cat;
    cat.name = "synthetic action " + std::to_string(k);
    cat.label = static_cast<int>(k);
    cat.cls_embedding.assign(cls.row(k).begin(), cls.row(k).end());

    const std::size_t words = tokenize(cat.name).size();
    SplitMix64 rng(mix64(mix64(p.seed, 0x30BDull), k));
    cat.word_embeddings = Mat(words, p.dim);
    for (std::size_t w = 0; w < words; ++w) {
      Vec row(cat.cls_embedding);
      const Vec pert = random_direction(rng, p.dim);
      for (std::size_t c = 0; c < p.dim; ++c) row[c] += 0.05 * pert[c];
      row = l2_normalize(row);
      std::copy(row.begin(), row.end(), cat.word_embeddings.row(w).begin());
    }
    ds.categories.push_back(std::move(cat));
  }

  for (std::size_t v = 0; v < p.videos; ++v) {
    VideoEntry entry;
    entry.label = static_cast<int>(v % p.classes);
    entry.video.video_id = "video_" + std::to_string(v);
    entry.video.frames = Mat(p.frames, p.dim);
    SplitMix64 rng(mix64(mix64(p.seed, 0xF7A3ull), v));
    const std::size_t signal = p.frames - p.noise_frames;
    for (std::size_t t = 0; t < p.frames; ++t) {
      Vec frame;
      if (t < signal) {
        frame = ds.categories[static_cast<std::size_t>(entry.label)].cls_embedding;
      } else {
        frame = random_orthogonal(rng, cls, p.dim);
      }
      std::copy(frame.begin(), frame.end(), entry.video.frames.row(t).begin());
    }
    ds.videos.push_back(std::move(entry));
  }
  return ds;
}

std::filesystem::path write_synthetic(const SyntheticParams& p,
                                      const std::filesystem::path& out_dir) {
  const DatasetManifest ds = make_synthetic(p);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path manifest_path = out_dir / "manifest.json";
  write_dataset_manifest(manifest_path, ds, "embeddings");
  return manifest_path;
}

}  // namespace bike
