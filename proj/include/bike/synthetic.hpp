#pragma once

#include <cstdint>
#include <filesystem>

#include "bike/store.hpp"

namespace bike {

struct SyntheticParams {
  std::size_t classes = 8;
  std::size_t videos = 64;
  std::size_t frames = 8;
  std::size_t dim = 32;
  std::size_t noise_frames = 0;
  std::uint64_t seed = 0;
};

// Orthonormal category cls embeddings (Gram-Schmidt), word rows = cls plus a
// small seeded perturbation re-normalized, videos = per-class frames with the
// configured count of noise frames orthogonalized against every category.
DatasetManifest make_synthetic(const SyntheticParams& params);

// Writes manifest.json plus the BEMB files under out_dir. Byte-identical for
// identical (params, seed).
std::filesystem::path write_synthetic(const SyntheticParams& params,
                                      const std::filesystem::path& out_dir);

}  // namespace bike
