#pragma once

// Experiment harness: JSON run configs, dispatch to the experiment modules,
// canonical report.json / manifest.json emission, and CSV artifacts.
//
// report.json is a pure function of (config, seed): wall-clock data lives in
// manifest.json only, and every compute path reduces in fixed index order, so
// re-running with a different thread count reproduces report.json byte for
// byte.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "wormhole/clustering.hpp"
#include "wormhole/collapse.hpp"
#include "wormhole/dataset.hpp"
#include "wormhole/flip.hpp"
#include "wormhole/maxlik.hpp"
#include "wormhole/model_io.hpp"
#include "wormhole/wormhole.hpp"

namespace wormhole {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr const char* kOutDirEnvVar = "WORMHOLE_LAB_OUT";

struct DatasetSpec {
  std::string type = "synthetic";  // "synthetic" | "mnist"
  std::string images_path;
  std::string labels_path;
  std::uint64_t seed = 1;          // synthetic image jitter seed
  int digit_filter = 0;            // class used by flip; -1 = any digit
  std::int64_t anchor_index = -1;  // flip anchor; -1 = first of the class
  std::size_t digit_count = 5;     // reconcile: number of digit classes

  bool operator==(const DatasetSpec&) const = default;
};

struct RunConfig {
  std::string experiment;  // converge | sweep | cluster | flip | reconcile
  NetConfig net;
  DatasetSpec dataset;
  std::size_t test_count = 200;
  std::uint64_t data_seed = 1;
  double eta = 10000.0;
  std::vector<std::size_t> depths;
  std::vector<std::size_t> widths;
  double tol = 0.02;
  unsigned threads = 1;
  bool fresh_tests_per_layer = true;
  bool export_feature_csv = false;
  std::size_t histogram_bins = 50;
  std::size_t pca_dim = 2;
  std::string out_dir = "out";

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

using json = nlohmann::json;

inline void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                                const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw config_error("unknown field '" + where + key + "'");
    }
  }
}

template <typename T>
T get_or(const json& obj, const std::string& key, const T& fallback,
         const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw config_error("field '" + where + key + "' has the wrong type");
  }
}

inline NetConfig parse_net(const json& obj) {
  reject_unknown_keys(obj, {"input_dim", "width", "depth", "seed", "layer_scale_c"},
                      "net.");
  NetConfig net;
  net.input_dim = get_or<std::size_t>(obj, "input_dim", 16, "net.");
  net.width = get_or<std::size_t>(obj, "width", 256, "net.");
  net.depth = get_or<std::size_t>(obj, "depth", 8, "net.");
  net.seed = get_or<std::uint64_t>(obj, "seed", 1, "net.");
  net.layer_scale_c = get_or<double>(obj, "layer_scale_c", 1.0, "net.");
  return net;
}

inline DatasetSpec parse_dataset(const json& obj) {
  reject_unknown_keys(obj,
                      {"type", "images_path", "labels_path", "seed", "digit_filter",
                       "anchor_index", "digit_count"},
                      "dataset.");
  DatasetSpec ds;
  ds.type = get_or<std::string>(obj, "type", "synthetic", "dataset.");
  ds.images_path = get_or<std::string>(obj, "images_path", "", "dataset.");
  ds.labels_path = get_or<std::string>(obj, "labels_path", "", "dataset.");
  ds.seed = get_or<std::uint64_t>(obj, "seed", 1, "dataset.");
  ds.digit_filter = get_or<int>(obj, "digit_filter", 0, "dataset.");
  ds.anchor_index = get_or<std::int64_t>(obj, "anchor_index", -1, "dataset.");
  ds.digit_count = get_or<std::size_t>(obj, "digit_count", 5, "dataset.");
  return ds;
}

inline void require_ascending(const std::vector<std::size_t>& xs, const char* name) {
  if (xs.empty()) throw config_error(std::string("'") + name + "' must be nonempty");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] < 1) throw config_error(std::string("'") + name + "' entries must be >= 1");
    if (i > 0 && xs[i] <= xs[i - 1]) {
      throw config_error(std::string("'") + name + "' must be strictly ascending");
    }
  }
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j) {
  using detail::get_or;
  if (!j.is_object()) throw config_error("config root must be a JSON object");
  detail::reject_unknown_keys(
      j,
      {"experiment", "net", "dataset", "test_count", "data_seed", "eta", "depths",
       "widths", "tol", "threads", "fresh_tests_per_layer", "export_feature_csv",
       "histogram_bins", "pca_dim", "out_dir"},
      "");
  if (!j.contains("experiment")) throw config_error("missing field 'experiment'");

  RunConfig cfg;
  cfg.experiment = get_or<std::string>(j, "experiment", "", "");
  cfg.net = detail::parse_net(j.contains("net") ? j.at("net") : nlohmann::json::object());
  cfg.dataset = detail::parse_dataset(j.contains("dataset") ? j.at("dataset")
                                                            : nlohmann::json::object());
  cfg.test_count = get_or<std::size_t>(j, "test_count", cfg.test_count, "");
  cfg.data_seed = get_or<std::uint64_t>(j, "data_seed", cfg.data_seed, "");
  cfg.eta = get_or<double>(j, "eta", cfg.eta, "");
  cfg.depths = get_or<std::vector<std::size_t>>(j, "depths", {}, "");
  cfg.widths = get_or<std::vector<std::size_t>>(j, "widths", {}, "");
  cfg.tol = get_or<double>(j, "tol", cfg.tol, "");
  cfg.threads = get_or<unsigned>(j, "threads", cfg.threads, "");
  cfg.fresh_tests_per_layer =
      get_or<bool>(j, "fresh_tests_per_layer", cfg.fresh_tests_per_layer, "");
  cfg.export_feature_csv = get_or<bool>(j, "export_feature_csv", cfg.export_feature_csv, "");
  cfg.histogram_bins = get_or<std::size_t>(j, "histogram_bins", cfg.histogram_bins, "");
  cfg.pca_dim = get_or<std::size_t>(j, "pca_dim", cfg.pca_dim, "");
  cfg.out_dir = get_or<std::string>(j, "out_dir", cfg.out_dir, "");
  return cfg;
}

inline nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["experiment"] = cfg.experiment;
  j["net"] = {{"input_dim", cfg.net.input_dim},
              {"width", cfg.net.width},
              {"depth", cfg.net.depth},
              {"seed", cfg.net.seed},
              {"layer_scale_c", cfg.net.layer_scale_c}};
  j["dataset"] = {{"type", cfg.dataset.type},
                  {"images_path", cfg.dataset.images_path},
                  {"labels_path", cfg.dataset.labels_path},
                  {"seed", cfg.dataset.seed},
                  {"digit_filter", cfg.dataset.digit_filter},
                  {"anchor_index", cfg.dataset.anchor_index},
                  {"digit_count", cfg.dataset.digit_count}};
  j["test_count"] = cfg.test_count;
  j["data_seed"] = cfg.data_seed;
  j["eta"] = cfg.eta;
  j["depths"] = cfg.depths;
  j["widths"] = cfg.widths;
  j["tol"] = cfg.tol;
  j["threads"] = cfg.threads;
  j["fresh_tests_per_layer"] = cfg.fresh_tests_per_layer;
  j["export_feature_csv"] = cfg.export_feature_csv;
  j["histogram_bins"] = cfg.histogram_bins;
  j["pca_dim"] = cfg.pca_dim;
  j["out_dir"] = cfg.out_dir;
  return j;
}

// Schema-level validation; file existence and data/shape mismatches surface
// at run time instead.
inline void validate_run_config(const RunConfig& cfg) {
  const std::vector<std::string> known = {"converge", "sweep", "cluster", "flip",
                                          "reconcile"};
  if (std::find(known.begin(), known.end(), cfg.experiment) == known.end()) {
    throw config_error("field 'experiment' must be one of converge|sweep|cluster|flip|"
                       "reconcile, got '" +
                       cfg.experiment + "'");
  }
  if (cfg.threads < 1) throw config_error("'threads' must be >= 1");
  if (cfg.net.input_dim < 1) throw config_error("'net.input_dim' must be >= 1");
  if (!(cfg.net.layer_scale_c > 0.0)) throw config_error("'net.layer_scale_c' must be > 0");

  if (cfg.experiment == "sweep") {
    detail::require_ascending(cfg.widths, "widths");
    detail::require_ascending(cfg.depths, "depths");
    for (std::size_t w : cfg.widths) {
      if (w < cfg.net.input_dim) throw config_error("'widths' entries must be >= input_dim");
    }
  } else {
    if (cfg.net.width < cfg.net.input_dim) {
      throw config_error("'net.width' must be >= 'net.input_dim'");
    }
  }
  if (cfg.experiment == "converge" || cfg.experiment == "cluster" ||
      cfg.experiment == "sweep") {
    if (cfg.test_count < 1) throw config_error("'test_count' must be >= 1");
  }
  if (cfg.experiment == "converge") {
    if (!(cfg.tol > 0.0 && cfg.tol < 0.5)) throw config_error("'tol' must lie in (0, 0.5)");
  }
  if (cfg.experiment == "cluster") {
    if (cfg.net.depth < 1) throw config_error("'net.depth' must be >= 1");
    if (cfg.pca_dim != 0 && cfg.pca_dim != 2 && cfg.pca_dim != 3) {
      throw config_error("'pca_dim' must be 0, 2, or 3");
    }
  }
  if (cfg.experiment == "flip" || cfg.experiment == "reconcile") {
    detail::require_ascending(cfg.depths, "depths");
    if (cfg.dataset.type != "synthetic" && cfg.dataset.type != "mnist") {
      throw config_error("'dataset.type' must be synthetic|mnist");
    }
    if (cfg.dataset.type == "mnist" && cfg.dataset.images_path.empty()) {
      throw config_error("'dataset.images_path' required for dataset.type=mnist");
    }
  }
  if (cfg.experiment == "flip") {
    if (cfg.test_count < 1) throw config_error("'test_count' must be >= 1");
    if (cfg.dataset.digit_filter < -1 || cfg.dataset.digit_filter > 9) {
      throw config_error("'dataset.digit_filter' must lie in [-1, 9]");
    }
    if (cfg.histogram_bins < 1) throw config_error("'histogram_bins' must be >= 1");
  }
  if (cfg.experiment == "reconcile") {
    if (!(cfg.eta >= 0.0)) throw config_error("'eta' must be >= 0");
    if (cfg.dataset.digit_count < 1) throw config_error("'dataset.digit_count' must be >= 1");
  }
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error("config is not valid JSON: " + std::string(e.what()));
  }
  RunConfig cfg = parse_run_config(j);
  validate_run_config(cfg);
  return cfg;
}

namespace detail {

inline json finite_or_tag(double v) {
  if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
  return json(v);
}

// Flip/reconcile input images, from IDX files or the synthetic generator.
inline ImageSet resolve_images(const DatasetSpec& ds, std::size_t count, int digit) {
  if (ds.type == "mnist") {
    return load_idx_dataset(ds.images_path, ds.labels_path);
  }
  return synthetic_digit_images(count, ds.seed, digit);
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double elapsed_s() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

}  // namespace detail

inline void emit_report(const nlohmann::json& report, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << report.dump(2) << '\n';
  if (!out) throw io_error("write failed: " + path);
}

namespace detail {

inline json run_converge(const RunConfig& cfg, json& manifest) {
  const auto anchor = gaussian_samples(1, cfg.net.input_dim, cfg.net.seed)[0];
  Timer train_timer;
  const LinearModel model = train_maxlikelihood(anchor, cfg.net, cfg.threads);
  manifest["wall_times_s"]["train"] = train_timer.elapsed_s();

  const auto tests = gaussian_samples(cfg.test_count, cfg.net.input_dim, cfg.data_seed);
  Timer eval_timer;
  const CollapseReport rep = collapse_experiment(model, tests, cfg.tol, cfg.threads);
  manifest["wall_times_s"]["evaluate"] = eval_timer.elapsed_s();

  if (cfg.export_feature_csv) {
    export_features(model, tests, 0, cfg.out_dir + "/features.csv");
  }

  json out;
  out["experiment"] = "converge";
  out["bimodality_mass"] = rep.bimodality_mass;
  out["group_sizes"] = {rep.group_sizes[0], rep.group_sizes[1]};
  out["mean_anti_loss"] = rep.mean_anti_loss;
  out["mean_corr_loss"] = rep.mean_corr_loss;
  out["per_sample_loss"] = rep.per_sample_loss;
  out["tol"] = rep.tol;
  return out;
}

inline json run_sweep(const RunConfig& cfg, json& manifest) {
  const auto anchor = gaussian_samples(1, cfg.net.input_dim, cfg.net.seed)[0];
  const SweepGrid grid = nll_sweep(anchor, cfg.widths, cfg.depths, cfg.test_count,
                                   cfg.data_seed, cfg.threads);
  manifest["wall_times_s"]["runtime_per_cell"] = grid.runtime_per_cell;

  json matrix = json::array();
  for (std::size_t wi = 0; wi < grid.widths.size(); ++wi) {
    json row = json::array();
    for (std::size_t di = 0; di < grid.depths.size(); ++di) {
      row.push_back(grid.nll_matrix[wi * grid.depths.size() + di]);
    }
    matrix.push_back(row);
  }
  json out;
  out["experiment"] = "sweep";
  out["widths"] = grid.widths;
  out["depths"] = grid.depths;
  out["nll_matrix"] = matrix;
  return out;
}

inline json run_cluster(const RunConfig& cfg, json& manifest) {
  const auto anchor = gaussian_samples(1, cfg.net.input_dim, cfg.net.seed)[0];
  Timer train_timer;
  const LinearModel model = train_maxlikelihood(anchor, cfg.net, cfg.threads);
  manifest["wall_times_s"]["train"] = train_timer.elapsed_s();

  std::vector<std::vector<RealVector>> layer_sets;
  for (std::size_t l = 1; l <= cfg.net.depth; ++l) {
    const std::uint64_t seed = cfg.fresh_tests_per_layer
                                   ? rng::derive_seed(cfg.data_seed,
                                                      static_cast<std::uint32_t>(l), 0)
                                   : cfg.data_seed;
    layer_sets.push_back(gaussian_samples(cfg.test_count, cfg.net.input_dim, seed));
  }
  Timer assign_timer;
  const ClusterAssignment assignment =
      build_trajectory_clusters(model, layer_sets, cfg.threads);
  manifest["wall_times_s"]["assign"] = assign_timer.elapsed_s();

  json per_layer = json::array();
  for (std::size_t l = 1; l <= cfg.net.depth; ++l) {
    std::vector<RealVector> pts;
    std::vector<int> labels;
    std::size_t sides[2] = {0, 0};
    for (std::size_t i = 0; i < assignment.points.size(); ++i) {
      if (assignment.layer_of_point[i] != l) continue;
      pts.push_back(assignment.points[i]);
      labels.push_back(assignment.labels[i]);
      sides[assignment.labels[i] % 2]++;
    }
    json entry;
    entry["layer"] = l;
    entry["sides"] = {sides[0], sides[1]};
    if (sides[0] > 0 && sides[1] > 0) {
      const ClusterMetrics m = clustering_report(pts, labels);
      entry["silhouette"] = m.silhouette;
      entry["davies_bouldin"] = m.davies_bouldin;
      entry["inter_cluster"] = m.inter_cluster;
      entry["intra_cluster"] = m.intra_cluster;
    } else {
      entry["silhouette"] = nullptr;
      entry["davies_bouldin"] = nullptr;
      entry["inter_cluster"] = nullptr;
      entry["intra_cluster"] = nullptr;
    }
    per_layer.push_back(entry);
  }

  std::vector<int> distinct = assignment.labels;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  // Cluster export, optionally with PCA plot coordinates.
  {
    std::optional<PcaResult> pca;
    if (cfg.pca_dim > 0) pca = pca_project(assignment.points, cfg.pca_dim);
    CsvWriter csv(cfg.out_dir + "/clusters.csv");
    std::vector<std::string> header = {"sample_id", "layer", "side", "label"};
    for (std::size_t c = 0; pca && c < pca->components.size(); ++c) {
      header.push_back("p" + std::to_string(c));
    }
    csv.row(header);
    for (std::size_t i = 0; i < assignment.points.size(); ++i) {
      std::vector<std::string> cells = {std::to_string(i),
                                        std::to_string(assignment.layer_of_point[i]),
                                        std::to_string(assignment.labels[i] % 2),
                                        std::to_string(assignment.labels[i])};
      if (pca) {
        for (double v : pca->coords[i]) cells.push_back(format_real(v));
      }
      csv.row(cells);
    }
  }

  json out;
  out["experiment"] = "cluster";
  out["distinct_labels"] = distinct.size();
  out["skipped"] = assignment.skipped;
  out["per_layer"] = per_layer;
  return out;
}

inline json run_flip(const RunConfig& cfg, json& manifest) {
  const int digit = cfg.dataset.digit_filter;
  const ImageSet set = resolve_images(cfg.dataset, cfg.test_count + 1,
                                      digit < 0 ? 0 : digit);
  if (set.dim() != cfg.net.input_dim) {
    throw std::invalid_argument("flip: dataset dim " + std::to_string(set.dim()) +
                                " != net.input_dim " +
                                std::to_string(cfg.net.input_dim));
  }
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < set.images.size(); ++i) {
    if (digit < 0 || set.labels.empty() || set.labels[i] == digit) pool.push_back(i);
  }
  if (pool.empty()) throw std::invalid_argument("flip: no images of the requested class");
  std::size_t anchor_at = pool.front();
  if (cfg.dataset.anchor_index >= 0) {
    anchor_at = static_cast<std::size_t>(cfg.dataset.anchor_index);
    if (anchor_at >= set.images.size()) {
      throw std::invalid_argument("flip: anchor_index out of range");
    }
  }
  std::vector<RealVector> tests;
  for (std::size_t i : pool) {
    if (i == anchor_at) continue;
    if (tests.size() == cfg.test_count) break;
    tests.push_back(set.images[i]);
  }
  if (tests.empty()) throw std::invalid_argument("flip: not enough test images");

  Timer timer;
  const auto reports = flipped_label_experiment(set.images[anchor_at], tests, cfg.net,
                                                cfg.depths, cfg.threads);
  manifest["wall_times_s"]["experiment"] = timer.elapsed_s();
  manifest["flip"]["anchor_index"] = anchor_at;
  manifest["flip"]["test_count"] = tests.size();

  json out;
  out["experiment"] = "flip";
  json per_depth = json::array();
  for (const auto& r : reports) {
    json entry;
    entry["depth"] = r.depth;
    entry["mu1"] = r.mu1;
    entry["mu2"] = r.mu2;
    entry["sigma1"] = r.sigma1;
    entry["sigma2"] = r.sigma2;
    entry["d_prime"] = finite_or_tag(r.d_prime);
    entry["scores_nonflipped"] = r.scores_nonflipped;
    entry["scores_flipped"] = r.scores_flipped;
    per_depth.push_back(entry);

    const Histogram h1 = histogram(r.scores_nonflipped, 0.0, 1.0, cfg.histogram_bins);
    const Histogram h2b = histogram(r.scores_flipped, 0.0, 1.0, cfg.histogram_bins);
    CsvWriter csv(cfg.out_dir + "/hist_L" + std::to_string(r.depth) + ".csv");
    csv.row({"bin_lo", "bin_hi", "count_nonflipped", "count_flipped"});
    for (std::size_t b = 0; b < cfg.histogram_bins; ++b) {
      csv.row({format_real(h1.edges[b]), format_real(h1.edges[b + 1]),
               std::to_string(h1.counts[b]), std::to_string(h2b.counts[b])});
    }
  }
  out["per_depth"] = per_depth;
  return out;
}

inline json run_reconcile(const RunConfig& cfg, json& manifest) {
  ImageSet digits;
  {
    const ImageSet all = resolve_images(cfg.dataset, cfg.dataset.digit_count, -1);
    // one image per digit class 0 .. digit_count-1
    for (std::size_t cls = 0; cls < cfg.dataset.digit_count; ++cls) {
      bool found = false;
      for (std::size_t i = 0; i < all.images.size(); ++i) {
        const int label =
            all.labels.empty() ? static_cast<int>(i % 10) : all.labels[i];
        if (label == static_cast<int>(cls)) {
          digits.images.push_back(all.images[i]);
          digits.labels.push_back(label);
          found = true;
          break;
        }
      }
      if (!found) {
        throw std::invalid_argument("reconcile: dataset has no image of digit " +
                                    std::to_string(cls));
      }
    }
    digits.rows = all.rows;
    digits.cols = all.cols;
  }
  if (digits.dim() != cfg.net.input_dim) {
    throw std::invalid_argument("reconcile: dataset dim != net.input_dim");
  }

  Timer timer;
  const auto records = reconciliation_experiment(digits, cfg.net, cfg.eta, cfg.depths,
                                                 cfg.threads, cfg.out_dir);
  manifest["wall_times_s"]["experiment"] = timer.elapsed_s();

  json out;
  out["experiment"] = "reconcile";
  json recs = json::array();
  for (const auto& r : records) {
    json entry;
    entry["digit"] = r.digit;
    entry["depth"] = r.depth;
    entry["eta"] = r.eta;
    entry["sign"] = r.sign;
    entry["rel_error"] = r.rel_error;
    entry["wormhole_residual"] = r.wormhole_residual;
    entry["label_norm"] = norm(r.meaningful_label);
    recs.push_back(entry);
  }
  out["records"] = recs;
  return out;
}

}  // namespace detail

// Runs a validated config; artifacts land in cfg.out_dir. Throws on failure.
inline void run_experiment(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw io_error("cannot create output directory: " + cfg.out_dir);

  nlohmann::json manifest;
  detail::Timer total;
  manifest["config"] = to_json(cfg);
  manifest["seeds"] = {{"net_seed", cfg.net.seed},
                       {"data_seed", cfg.data_seed},
                       {"dataset_seed", cfg.dataset.seed}};
  manifest["versions"] = {{"wormhole_lab", kLibraryVersion},
                          {"model_format", kModelVersion}};
  manifest["threads"] = cfg.threads;

  nlohmann::json report;
  if (cfg.experiment == "converge") {
    report = detail::run_converge(cfg, manifest);
  } else if (cfg.experiment == "sweep") {
    report = detail::run_sweep(cfg, manifest);
  } else if (cfg.experiment == "cluster") {
    report = detail::run_cluster(cfg, manifest);
  } else if (cfg.experiment == "flip") {
    report = detail::run_flip(cfg, manifest);
  } else if (cfg.experiment == "reconcile") {
    report = detail::run_reconcile(cfg, manifest);
  } else {
    throw config_error("unknown experiment '" + cfg.experiment + "'");
  }

  emit_report(report, cfg.out_dir + "/report.json");
  manifest["wall_times_s"]["total"] = total.elapsed_s();
  emit_report(manifest, cfg.out_dir + "/manifest.json");
}

// CLI entry: exit 0 on success, 2 on config errors, 3 on runtime errors.
inline int run(const std::string& config_path, std::optional<unsigned> threads_override = {},
               std::optional<std::string> out_override = {}) {
  RunConfig cfg;
  try {
    cfg = load_run_config(config_path);
    if (threads_override) cfg.threads = *threads_override;
    if (!out_override) {
      if (const char* env = std::getenv(kOutDirEnvVar)) out_override = std::string(env);
    }
    if (out_override) cfg.out_dir = *out_override;
    validate_run_config(cfg);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  try {
    run_experiment(cfg);
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

inline int validate(const std::string& config_path) {
  try {
    load_run_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  std::cout << "config ok\n";
  return 0;
}

}  // namespace wormhole
