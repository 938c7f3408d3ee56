#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "bike/numerics.hpp"

namespace bike {

// T x d matrix of per-frame embeddings, rows unit-norm after ingestion.
struct FrameEmbeddings {
  std::string video_id;
  Mat frames;
};

// A class name with its sentence-level embedding and per-word embeddings.
struct CategoryEntry {
  std::string name;
  int label = 0;
  Vec cls_embedding;    // d
  Mat word_embeddings;  // N x d
};

struct Lexicon {
  std::vector<std::string> phrases;
  Mat embeddings;  // L x d, row i belongs to phrases[i]
};

struct VideoEntry {
  FrameEmbeddings video;
  int label = 0;
};

struct DatasetManifest {
  std::size_t dim = 0;
  std::vector<CategoryEntry> categories;  // sorted by label, labels are 0..K-1
  std::vector<VideoEntry> videos;
};

DatasetManifest load_dataset_manifest(const std::filesystem::path& path);
Lexicon load_lexicon_manifest(const std::filesystem::path& path);

// Dispatches on the manifest's shape: "categories" vs "phrases".
std::variant<DatasetManifest, Lexicon> load_manifest(const std::filesystem::path& path);

void write_dataset_manifest(const std::filesystem::path& path, const DatasetManifest& ds,
                            const std::filesystem::path& data_dir);
void write_lexicon_manifest(const std::filesystem::path& path, const Lexicon& lex,
                            const std::filesystem::path& data_dir);

}  // namespace bike
