#include "bike/store.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "bike/bemb.hpp"

namespace bike {

namespace {

using nlohmann::json;

json parse_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFileError("cannot open manifest " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ManifestError(path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw ManifestError(path.string() + ": not a JSON object");
  return doc;
}

Mat load_matrix(const std::filesystem::path& base, const std::string& rel,
                std::size_t dim) {
  std::filesystem::path p(rel);
  if (p.is_relative()) p = base / p;
  Mat m = read_bemb(p);
  if (m.cols() != dim) {
    throw DimMismatchError(p.string() + ": expected dimension " + std::to_string(dim) +
                           ", file has " + std::to_string(m.cols()));
  }
  l2_normalize_rows(m);
  return m;
}

template <typename T>
T field(const json& obj, const char* key, const std::filesystem::path& ctx) {
  if (!obj.contains(key)) {
    throw ManifestError(ctx.string() + ": missing field '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ManifestError(ctx.string() + ": field '" + key + "': " + e.what());
  }
}

DatasetManifest load_dataset(const json& doc, const std::filesystem::path& path) {
  DatasetManifest ds;
  ds.dim = field<std::size_t>(doc, "dim", path);
  const auto base = path.parent_path();

  for (const json& c : field<json>(doc, "categories", path)) {
    CategoryEntry cat;
    cat.name = field<std::string>(c, "name", path);
    cat.label = field<int>(c, "label", path);
    if (cat.label < 0) throw UnknownLabelError(path.string() + ": negative label");
    Mat cls = load_matrix(base, field<std::string>(c, "cls_bemb", path), ds.dim);
    if (cls.rows() != 1) {
      throw DimMismatchError(path.string() + ": cls_bemb for '" + cat.name +
                             "' must be a single row");
    }
    cat.cls_embedding.assign(cls.row(0).begin(), cls.row(0).end());
    cat.word_embeddings = load_matrix(base, field<std::string>(c, "words_bemb", path), ds.dim);
    ds.categories.push_back(std::move(cat));
  }
  if (ds.categories.empty()) throw ManifestError(path.string() + ": no categories");

  std::sort(ds.categories.begin(), ds.categories.end(),
            [](const CategoryEntry& a, const CategoryEntry& b) { return a.label < b.label; });
  for (std::size_t i = 0; i < ds.categories.size(); ++i) {
    if (ds.categories[i].label != static_cast<int>(i)) {
      throw UnknownLabelError(path.string() +
                              ": category labels must be exactly 0..K-1 without gaps");
    }
  }

  for (const json& v : field<json>(doc, "videos", path)) {
    VideoEntry entry;
    entry.video.video_id = field<std::string>(v, "id", path);
    entry.video.frames = load_matrix(base, field<std::string>(v, "frames_bemb", path), ds.dim);
    entry.label = field<int>(v, "label", path);
    if (entry.label < 0 || entry.label >= static_cast<int>(ds.categories.size())) {
      throw UnknownLabelError(path.string() + ": video '" + entry.video.video_id +
                              "' references unknown label " + std::to_string(entry.label));
    }
    ds.videos.push_back(std::move(entry));
  }
  return ds;
}

Lexicon load_lexicon(const json& doc, const std::filesystem::path& path) {
  Lexicon lex;
  const std::size_t dim = field<std::size_t>(doc, "dim", path);
  lex.phrases = field<std::vector<std::string>>(doc, "phrases", path);
  if (lex.phrases.empty()) throw ManifestError(path.string() + ": empty phrase list");
  lex.embeddings =
      load_matrix(path.parent_path(), field<std::string>(doc, "embeddings_bemb", path), dim);
  if (lex.embeddings.rows() != lex.phrases.size()) {
    throw DimMismatchError(path.string() + ": phrase count " +
                           std::to_string(lex.phrases.size()) +
                           " does not match embedding rows " +
                           std::to_string(lex.embeddings.rows()));
  }
  return lex;
}

}  // namespace

DatasetManifest load_dataset_manifest(const std::filesystem::path& path) {
  const json doc = parse_json_file(path);
  if (!doc.contains("categories")) {
    throw ManifestError(path.string() + ": not a dataset manifest (no 'categories')");
  }
  return load_dataset(doc, path);
}

Lexicon load_lexicon_manifest(const std::filesystem::path& path) {
  const json doc = parse_json_file(path);
  if (!doc.contains("phrases")) {
    throw ManifestError(path.string() + ": not a lexicon manifest (no 'phrases')");
  }
  return load_lexicon(doc, path);
}

std::variant<DatasetManifest, Lexicon> load_manifest(const std::filesystem::path& path) {
  const json doc = parse_json_file(path);
  if (doc.contains("categories")) return load_dataset(doc, path);
  if (doc.contains("phrases")) return load_lexicon(doc, path);
  throw ManifestError(path.string() + ": neither 'categories' nor 'phrases' present");
}

void write_dataset_manifest(const std::filesystem::path& path, const DatasetManifest& ds,
                            const std::filesystem::path& data_dir) {
  const auto base = path.parent_path();
  std::filesystem::create_directories(base / data_dir);
  json doc;
  doc["dim"] = ds.dim;
  doc["categories"] = json::array();
  for (const CategoryEntry& c : ds.categories) {
    const std::string cls_rel = (data_dir / ("cls_" + std::to_string(c.label) + ".bemb")).string();
    const std::string words_rel =
        (data_dir / ("words_" + std::to_string(c.label) + ".bemb")).string();
    Mat cls(1, c.cls_embedding.size());
    std::copy(c.cls_embedding.begin(), c.cls_embedding.end(), cls.row(0).begin());
    write_bemb(base / cls_rel, cls);
    write_bemb(base / words_rel, c.word_embeddings);
    doc["categories"].push_back(
        {{"name", c.name}, {"label", c.label}, {"cls_bemb", cls_rel}, {"words_bemb", words_rel}});
  }
  doc["videos"] = json::array();
  for (const VideoEntry& v : ds.videos) {
    const std::string frames_rel = (data_dir / (v.video.video_id + ".bemb")).string();
    write_bemb(base / frames_rel, v.video.frames);
    doc["videos"].push_back(
        {{"id", v.video.video_id}, {"frames_bemb", frames_rel}, {"label", v.label}});
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw MissingFileError("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << "\n";
}

void write_lexicon_manifest(const std::filesystem::path& path, const Lexicon& lex,
                            const std::filesystem::path& data_dir) {
  const auto base = path.parent_path();
  std::filesystem::create_directories(base / data_dir);
  const std::string rel = (data_dir / "lexicon.bemb").string();
  write_bemb(base / rel, lex.embeddings);
  json doc;
  doc["dim"] = lex.embeddings.cols();
  doc["phrases"] = lex.phrases;
  doc["embeddings_bemb"] = rel;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw MissingFileError("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << "\n";
}

}  // namespace bike
