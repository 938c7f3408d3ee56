#include "bike/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bike/bemb.hpp"
#include "bike/distributed.hpp"
#include "bike/objective.hpp"
#include "bike/recognition.hpp"
#include "bike/rng.hpp"
#include "bike/surrogate.hpp"
#include "bike/synthetic.hpp"

namespace bike {

namespace {

using nlohmann::json;

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsageError = 2;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t resolve_seed(const CLI::Option* seed_opt, std::uint64_t seed_value) {
  if (seed_opt != nullptr && seed_opt->count() > 0) return seed_value;
  if (const char* env = std::getenv("BIKE_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return v;
  }
  return seed_value;
}

json config_json(const EvalConfig& cfg) {
  return {{"lambda", cfg.lambda},
          {"tau_vcs", cfg.tau_vcs},
          {"aggregation", cfg.aggregation == Aggregation::MeanPool ? "mean" : "vcs"},
          {"attributes", cfg.use_attributes},
          {"k_attributes", cfg.k_attributes},
          {"prompt_prefix", cfg.prompt_prefix},
          {"attribute_encoder",
           cfg.attribute_encoder == AttributeEncoder::Surrogate ? "surrogate" : "pooled"},
          {"surrogate_seed", cfg.surrogate_seed}};
}

Batch make_random_batch(std::size_t b, std::size_t d, std::uint64_t seed, bool with_attrs,
                        double tau) {
  Batch batch;
  batch.tau = tau;
  const auto fill = [&](Mat& m, std::uint64_t stream) {
    m = Mat(b, d);
    SplitMix64 rng(mix64(seed, stream));
    for (std::size_t r = 0; r < b; ++r) {
      Vec row(d);
      for (double& x : row) x = rng.uniform_pm1();
      row = l2_normalize(row);
      std::copy(row.begin(), row.end(), m.row(r).begin());
    }
  };
  fill(batch.video_embs, 11);
  fill(batch.cat_embs, 13);
  if (with_attrs) {
    Mat attrs;
    fill(attrs, 17);
    batch.attr_embs = std::move(attrs);
  }
  SplitMix64 rng(mix64(seed, 19));
  batch.labels.resize(b);
  const std::uint64_t label_range = std::max<std::uint64_t>(1, b / 2);
  for (int& label : batch.labels) {
    label = static_cast<int>(rng.below(label_range));  // duplicates exercise K(i)
  }
  return batch;
}

int cmd_spot(const std::string& manifest_path, const std::string& category, double tau,
             bool as_json, std::ostream& out) {
  const DatasetManifest ds = load_dataset_manifest(manifest_path);
  int fixed_label = -1;
  if (!category.empty()) {
    for (const CategoryEntry& c : ds.categories) {
      if (c.name == category) fixed_label = c.label;
    }
    if (fixed_label < 0) throw UnknownLabelError("no category named '" + category + "'");
  }

  json lines = json::array();
  for (const VideoEntry& v : ds.videos) {
    const CategoryEntry& cat =
        ds.categories[static_cast<std::size_t>(fixed_label >= 0 ? fixed_label : v.label)];
    const SaliencyVector s = temporal_saliency(v.video.frames, cat.word_embeddings, tau);
    if (as_json) {
      lines.push_back({{"video_id", v.video.video_id},
                       {"category", cat.name},
                       {"tau_vcs", tau},
                       {"weights", s.weights}});
    } else {
      out << v.video.video_id << '\t' << cat.name << '\t';
      for (std::size_t t = 0; t < s.weights.size(); ++t) {
        if (t > 0) out << ' ';
        out << fmt17(s.weights[t]);
      }
      out << '\n';
    }
  }
  if (as_json) out << lines.dump(2) << '\n';
  return kOk;
}

int cmd_attrs(const std::string& manifest_path, const std::string& lexicon_path,
              const EvalConfig& cfg, const std::string& emit_ea, bool as_json,
              std::ostream& out) {
  const DatasetManifest ds = load_dataset_manifest(manifest_path);
  Lexicon lex = lexicon_path.empty() ? lexicon_from_categories(ds.categories)
                                     : load_lexicon_manifest(lexicon_path);

  json lines = json::array();
  Mat ea_rows(ds.videos.size(), ds.dim);
  for (std::size_t i = 0; i < ds.videos.size(); ++i) {
    const VideoEntry& v = ds.videos[i];
    const Vec vemb = retrieval_embedding(v.video.frames);
    const std::size_t k = std::min(cfg.k_attributes, lex.embeddings.rows());
    const AttributeSet attrs = retrieve_attributes(vemb, lex, k);
    const std::string sentence = build_attribute_sentence(attrs, cfg.prompt_prefix);
    const std::optional<Vec> e_a = attribute_embedding_for_video(v.video.frames, lex, cfg);
    std::copy(e_a->begin(), e_a->end(), ea_rows.row(i).begin());

    if (as_json) {
      json phrases = json::array();
      for (const ScoredPhrase& p : attrs.phrases) {
        phrases.push_back({{"phrase", p.phrase}, {"score", p.score}, {"index", p.lexicon_index}});
      }
      lines.push_back({{"video_id", v.video.video_id},
                       {"attributes", phrases},
                       {"sentence", sentence}});
    } else {
      out << v.video.video_id << '\n';
      for (const ScoredPhrase& p : attrs.phrases) {
        out << "  " << fmt17(p.score) << "  " << p.phrase << '\n';
      }
      out << "  sentence: " << sentence << '\n';
    }
  }
  if (as_json) out << lines.dump(2) << '\n';
  if (!emit_ea.empty()) write_bemb(emit_ea, ea_rows);
  return kOk;
}

int cmd_eval(const std::string& manifest_path, const std::string& lexicon_path,
             const EvalConfig& cfg, bool half_class, std::size_t repeats, std::uint64_t seed,
             bool as_json, std::ostream& out) {
  const DatasetManifest ds = load_dataset_manifest(manifest_path);
  std::optional<Lexicon> lex;
  if (!lexicon_path.empty()) lex = load_lexicon_manifest(lexicon_path);
  const Lexicon* lex_ptr = lex ? &*lex : nullptr;

  json cfg_json = config_json(cfg);
  cfg_json["manifest"] = manifest_path;
  cfg_json["lexicon"] = lexicon_path.empty() ? json(nullptr) : json(lexicon_path);

  if (half_class) {
    const HalfClassReport rep = half_class_eval(ds, cfg, repeats, seed, lex_ptr);
    cfg_json["repeats"] = repeats;
    cfg_json["seed"] = seed;
    if (as_json) {
      out << json{{"protocol", "half-class"},
                  {"mean_top1", rep.mean},
                  {"std_top1", rep.stddev},
                  {"per_repeat", rep.per_repeat},
                  {"config", cfg_json}}
                 .dump(2)
          << '\n';
    } else {
      out << "half-class protocol: " << repeats << " repeats, seed " << seed << '\n';
      out << "mean top-1: " << fmt17(rep.mean) << '\n';
      out << "std top-1:  " << fmt17(rep.stddev) << '\n';
    }
    return kOk;
  }

  const EvalReport rep = evaluate(ds, cfg, lex_ptr);
  if (as_json) {
    json preds = json::array();
    for (const VideoPrediction& p : rep.predictions) {
      preds.push_back({{"video_id", p.video_id}, {"label", p.true_label}, {"topk", p.topk}});
    }
    out << json{{"top1", rep.top1},
                {"top5", rep.top5},
                {"num_videos", rep.num_videos},
                {"num_classes", rep.num_classes},
                {"config", cfg_json},
                {"predictions", preds}}
               .dump(2)
        << '\n';
  } else {
    out << "videos:  " << rep.num_videos << '\n';
    out << "classes: " << rep.num_classes << '\n';
    out << "top-1:   " << fmt17(rep.top1) << '\n';
    out << "top-5:   " << fmt17(rep.top5) << '\n';
  }
  return kOk;
}

int cmd_loss_check(std::size_t batches, std::size_t batch_size, std::size_t dim, double tau,
                   double eps, std::uint64_t seed, bool with_attrs, double tolerance,
                   bool as_json, std::ostream& out) {
  double max_err = 0.0;
  for (std::size_t i = 0; i < batches; ++i) {
    const Batch batch = make_random_batch(batch_size, dim, mix64(seed, i), with_attrs, tau);
    max_err = std::max(max_err, finite_diff_check(batch, eps));
  }
  const bool ok = max_err < tolerance;
  if (as_json) {
    out << json{{"batches", batches},
                {"batch_size", batch_size},
                {"dim", dim},
                {"tau", tau},
                {"epsilon", eps},
                {"seed", seed},
                {"attributes", with_attrs},
                {"max_relative_error", max_err},
                {"tolerance", tolerance},
                {"pass", ok}}
               .dump(2)
        << '\n';
  } else {
    out << "max relative gradient error over " << batches << " batches: " << fmt17(max_err)
        << " (tolerance " << fmt17(tolerance) << ")\n";
  }
  return ok ? kOk : kCheckFailed;
}

int cmd_dist_check(std::size_t batch_size, std::size_t workers, std::size_t dim,
                   std::uint64_t seed, double tau, PositiveMode mode, bool as_json,
                   std::ostream& out) {
  const Batch batch = make_random_batch(batch_size, dim, seed, false, tau);
  const auto positives = positive_sets(batch.labels);

  double single = 0.0;
  if (mode == PositiveMode::MultiPositive) {
    single = symmetric_infonce(batch.video_embs, batch.cat_embs, batch.labels, tau).sym;
  } else {
    std::vector<int> distinct(batch.labels.size());
    for (std::size_t i = 0; i < distinct.size(); ++i) distinct[i] = static_cast<int>(i);
    single = symmetric_infonce(batch.video_embs, batch.cat_embs, distinct, tau).sym;
  }

  const DistributedResult seq =
      distributed_loss(batch, workers, tau, mode, ExecutionMode::Sequential);
  const DistributedResult conc =
      distributed_loss(batch, workers, tau, mode, ExecutionMode::Concurrent);

  const double diff = std::abs(seq.loss - single);
  const bool bitwise = seq.loss == conc.loss && seq.per_worker == conc.per_worker;
  const bool ok = diff <= 1e-10 && bitwise;

  if (as_json) {
    out << json{{"batch", batch_size},
                {"workers", workers},
                {"dim", dim},
                {"seed", seed},
                {"tau", tau},
                {"mode", mode == PositiveMode::MultiPositive ? "multi" : "diag"},
                {"single_node_loss", single},
                {"distributed_loss", seq.loss},
                {"per_worker", seq.per_worker},
                {"abs_difference", diff},
                {"sequential_concurrent_bitwise_equal", bitwise},
                {"pass", ok}}
               .dump(2)
        << '\n';
  } else {
    out << "single-node loss: " << fmt17(single) << '\n';
    out << "distributed loss: " << fmt17(seq.loss) << " (" << workers << " workers)\n";
    out << "abs difference:   " << fmt17(diff) << '\n';
    out << "sequential/concurrent bitwise equal: " << (bitwise ? "yes" : "no") << '\n';
  }
  return ok ? kOk : kCheckFailed;
}

int cmd_bemb_info(const std::string& path, bool as_json, std::ostream& out) {
  const Mat m = read_bemb(path);
  if (as_json) {
    out << json{{"path", path}, {"rows", m.rows()}, {"cols", m.cols()}}.dump(2) << '\n';
  } else {
    out << path << ": " << m.rows() << " x " << m.cols() << " (binary32 payload)\n";
  }
  return kOk;
}

int cmd_bemb_dump(const std::string& path, std::size_t limit, std::ostream& out) {
  const Mat m = read_bemb(path);
  const std::size_t rows = limit > 0 ? std::min(limit, m.rows()) : m.rows();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ' ';
      out << fmt17(m.at(r, c));
    }
    out << '\n';
  }
  return kOk;
}

int cmd_bemb_pack(const std::string& text_path, const std::string& out_path,
                  std::ostream& out) {
  std::ifstream in(text_path);
  if (!in) throw MissingFileError("cannot open " + text_path);
  std::vector<Vec> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    Vec row;
    double v = 0.0;
    while (ss >> v) row.push_back(v);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw EmptyInputError(text_path + " holds no numeric rows");
  const Mat m = Mat::from_rows(rows);
  write_bemb(out_path, m);
  out << "wrote " << m.rows() << " x " << m.cols() << " to " << out_path << '\n';
  return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"bidirectional cross-modal recognition over precomputed embeddings"};
  app.require_subcommand(1);

  // spot
  auto* spot = app.add_subcommand("spot", "per-video temporal saliency");
  std::string spot_manifest, spot_category;
  double spot_tau = 0.01;
  bool spot_json = false;
  spot->add_option("--manifest", spot_manifest, "dataset manifest")->required();
  spot->add_option("--category", spot_category,
                   "category name (default: each video's ground truth)");
  spot->add_option("--tau", spot_tau, "saliency temperature");
  spot->add_flag("--json", spot_json, "machine-readable output");

  // attrs
  auto* attrs = app.add_subcommand("attrs", "retrieve attributes and build sentences");
  std::string attrs_manifest, attrs_lexicon, attrs_emit;
  EvalConfig attrs_cfg;
  attrs_cfg.use_attributes = true;
  bool attrs_json = false;
  std::string attrs_prompt = "on";
  std::string attrs_encoder = "pooled";
  attrs->add_option("--manifest", attrs_manifest, "dataset manifest")->required();
  attrs->add_option("--lexicon", attrs_lexicon,
                    "lexicon manifest (default: category names)");
  attrs->add_option("--k", attrs_cfg.k_attributes, "attributes per video");
  attrs->add_option("--prompt", attrs_prompt, "on|off")
      ->check(CLI::IsMember({"on", "off"}));
  attrs->add_option("--encoder", attrs_encoder, "pooled|surrogate")
      ->check(CLI::IsMember({"pooled", "surrogate"}));
  auto* attrs_seed_opt =
      attrs->add_option("--seed", attrs_cfg.surrogate_seed, "surrogate encoder seed");
  attrs->add_option("--emit-ea", attrs_emit, "write per-video e_a rows to this BEMB file");
  attrs->add_flag("--json", attrs_json, "machine-readable output");

  // eval
  auto* eval = app.add_subcommand("eval", "classify and report accuracy");
  std::string eval_manifest, eval_lexicon;
  EvalConfig eval_cfg;
  std::string eval_agg = "vcs", eval_attrs = "off", eval_prompt = "on",
              eval_encoder = "pooled";
  bool eval_half = false, eval_json = false;
  std::size_t eval_repeats = 10;
  std::uint64_t eval_seed = 0;
  eval->add_option("--manifest", eval_manifest, "dataset manifest")->required();
  eval->add_option("--lexicon", eval_lexicon, "lexicon manifest");
  eval->add_option("--lambda", eval_cfg.lambda, "fusion weight");
  eval->add_option("--tau", eval_cfg.tau_vcs, "saliency temperature");
  eval->add_option("--agg", eval_agg, "mean|vcs")->check(CLI::IsMember({"mean", "vcs"}));
  eval->add_option("--attrs", eval_attrs, "on|off")->check(CLI::IsMember({"on", "off"}));
  eval->add_option("--k", eval_cfg.k_attributes, "attributes per video");
  eval->add_option("--prompt", eval_prompt, "on|off")->check(CLI::IsMember({"on", "off"}));
  eval->add_option("--encoder", eval_encoder, "pooled|surrogate")
      ->check(CLI::IsMember({"pooled", "surrogate"}));
  eval->add_flag("--half-class", eval_half, "half-class zero-shot protocol");
  eval->add_option("--repeats", eval_repeats, "half-class repeats");
  auto* eval_seed_opt = eval->add_option("--seed", eval_seed, "sampling seed");
  eval->add_flag("--json", eval_json, "machine-readable output");

  // loss-check
  auto* loss = app.add_subcommand("loss-check", "finite-difference gradient check");
  std::size_t lc_batches = 50, lc_b = 8, lc_d = 16;
  double lc_tau = 1.0, lc_eps = 1e-5, lc_tol = 0.0;
  std::uint64_t lc_seed = 0;
  std::string lc_attrs = "on";
  bool lc_json = false;
  loss->add_option("--batches", lc_batches, "number of random batches");
  loss->add_option("--batch-size", lc_b, "rows per batch");
  loss->add_option("--dim", lc_d, "embedding dimension");
  loss->add_option("--tau", lc_tau, "temperature");
  loss->add_option("--eps", lc_eps, "central-difference step");
  auto* lc_seed_opt = loss->add_option("--seed", lc_seed, "seed");
  loss->add_option("--attrs", lc_attrs, "on|off")->check(CLI::IsMember({"on", "off"}));
  loss->add_option("--tolerance", lc_tol, "override the pass threshold");
  loss->add_flag("--json", lc_json, "machine-readable output");

  // dist-check
  auto* dist = app.add_subcommand("dist-check", "distributed-vs-single-node equivalence");
  std::size_t dc_b = 32, dc_m = 4, dc_d = 16;
  double dc_tau = 0.01;
  std::uint64_t dc_seed = 0;
  std::string dc_mode = "multi";
  bool dc_json = false;
  dist->add_option("--batch", dc_b, "global batch size")->required();
  dist->add_option("--workers", dc_m, "worker count")->required();
  dist->add_option("--dim", dc_d, "embedding dimension")->required();
  auto* dc_seed_opt = dist->add_option("--seed", dc_seed, "seed")->required();
  dist->add_option("--tau", dc_tau, "temperature");
  dist->add_option("--mode", dc_mode, "multi|diag")->check(CLI::IsMember({"multi", "diag"}));
  dist->add_flag("--json", dc_json, "machine-readable output");

  // gen-synthetic
  auto* gen = app.add_subcommand("gen-synthetic", "write a synthetic dataset");
  SyntheticParams gp;
  std::string gen_out;
  auto* gen_seed_opt = gen->add_option("--seed", gp.seed, "seed");
  gen->add_option("--classes", gp.classes, "class count")->required();
  gen->add_option("--videos", gp.videos, "video count")->required();
  gen->add_option("--frames", gp.frames, "frames per video")->required();
  gen->add_option("--dim", gp.dim, "embedding dimension")->required();
  gen->add_option("--noise-frames", gp.noise_frames, "orthogonal noise frames per video");
  gen->add_option("--out", gen_out, "output directory")->required();

  // bemb
  auto* bemb = app.add_subcommand("bemb", "inspect or convert BEMB files");
  bemb->require_subcommand(1);
  auto* info = bemb->add_subcommand("info", "print header info");
  std::string info_path;
  bool info_json = false;
  info->add_option("path", info_path, "BEMB file")->required();
  info->add_flag("--json", info_json, "machine-readable output");
  auto* dump = bemb->add_subcommand("dump", "print matrix values");
  std::string dump_path;
  std::size_t dump_limit = 0;
  dump->add_option("path", dump_path, "BEMB file")->required();
  dump->add_option("--limit", dump_limit, "max rows to print (0 = all)");
  auto* pack = bemb->add_subcommand("pack", "convert a whitespace text matrix to BEMB");
  std::string pack_in, pack_out;
  pack->add_option("input", pack_in, "text matrix, one row per line")->required();
  pack->add_option("output", pack_out, "BEMB file to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return kOk;
    }
    err << e.what() << '\n';
    err << app.help();
    return kUsageError;
  }

  try {
    if (spot->parsed()) return cmd_spot(spot_manifest, spot_category, spot_tau, spot_json, out);
    if (attrs->parsed()) {
      attrs_cfg.prompt_prefix =
          attrs_prompt == "on" ? std::string(kDefaultPrompt) : std::string(kNoPrompt);
      attrs_cfg.attribute_encoder = attrs_encoder == "surrogate"
                                        ? AttributeEncoder::Surrogate
                                        : AttributeEncoder::LexiconPooled;
      attrs_cfg.surrogate_seed = resolve_seed(attrs_seed_opt, attrs_cfg.surrogate_seed);
      return cmd_attrs(attrs_manifest, attrs_lexicon, attrs_cfg, attrs_emit, attrs_json, out);
    }
    if (eval->parsed()) {
      eval_cfg.aggregation =
          eval_agg == "mean" ? Aggregation::MeanPool : Aggregation::ConceptSpotting;
      eval_cfg.use_attributes = eval_attrs == "on";
      eval_cfg.prompt_prefix =
          eval_prompt == "on" ? std::string(kDefaultPrompt) : std::string(kNoPrompt);
      eval_cfg.attribute_encoder = eval_encoder == "surrogate"
                                       ? AttributeEncoder::Surrogate
                                       : AttributeEncoder::LexiconPooled;
      eval_seed = resolve_seed(eval_seed_opt, eval_seed);
      eval_cfg.surrogate_seed = eval_seed;
      return cmd_eval(eval_manifest, eval_lexicon, eval_cfg, eval_half, eval_repeats,
                      eval_seed, eval_json, out);
    }
    if (loss->parsed()) {
      lc_seed = resolve_seed(lc_seed_opt, lc_seed);
      const double tol = lc_tol > 0.0 ? lc_tol : (lc_tau >= 0.1 ? 1e-5 : 1e-4);
      return cmd_loss_check(lc_batches, lc_b, lc_d, lc_tau, lc_eps, lc_seed,
                            lc_attrs == "on", tol, lc_json, out);
    }
    if (dist->parsed()) {
      dc_seed = resolve_seed(dc_seed_opt, dc_seed);
      const PositiveMode mode =
          dc_mode == "diag" ? PositiveMode::Diagonal : PositiveMode::MultiPositive;
      return cmd_dist_check(dc_b, dc_m, dc_d, dc_seed, dc_tau, mode, dc_json, out);
    }
    if (gen->parsed()) {
      gp.seed = resolve_seed(gen_seed_opt, gp.seed);
      const auto manifest = write_synthetic(gp, gen_out);
      out << "wrote " << manifest.string() << '\n';
      return kOk;
    }
    if (bemb->parsed()) {
      if (info->parsed()) return cmd_bemb_info(info_path, info_json, out);
      if (dump->parsed()) return cmd_bemb_dump(dump_path, dump_limit, out);
      if (pack->parsed()) return cmd_bemb_pack(pack_in, pack_out, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  err << "no subcommand dispatched\n";
  return kUsageError;
}

}  // namespace bike
