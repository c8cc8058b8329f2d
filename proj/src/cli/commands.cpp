#include <bezlane/cli.hpp>

#include <bezlane/errors.hpp>
#include <bezlane/losses.hpp>
#include <bezlane/parallel.hpp>

#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <numeric>
#include <optional>
#include <set>

namespace bezlane::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

enum class Format { culane, tusimple, labels };

Format parse_format(const std::string& name, const std::string& flag) {
  if (name == "culane") return Format::culane;
  if (name == "tusimple") return Format::tusimple;
  if (name == "labels") return Format::labels;
  throw ConfigError(fmt::format("{} must be auto, culane, tusimple or labels, got '{}'", flag, name));
}

// JSON lines are TuSimple records or labels depending on their keys; anything
// else is a CULane index.
Format detect_format(const std::vector<std::string>& lines) {
  if (lines.empty() || lines.front().front() != '{') return Format::culane;
  const auto& first = lines.front();
  if (first.find("\"image_key\"") != std::string::npos) return Format::labels;
  if (first.find("\"raw_file\"") != std::string::npos) return Format::tusimple;
  throw SchemaError("JSON input is neither a label file nor TuSimple records");
}

Format resolve_format(const std::string& name, const std::string& flag, const std::vector<std::string>& lines) {
  return name == "auto" ? detect_format(lines) : parse_format(name, flag);
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_text(path, text);
  }
}

Json config_json(const RunConfig& config) {
  Json j = Json::object();
  for (const auto& [k, v] : config.describe()) j[k] = v;
  return j;
}

std::string config_header(const RunConfig& config) {
  std::string s = fmt::format("# bezlane {}\n", config.subcommand);
  for (const auto& [k, v] : config.describe()) s += fmt::format("# {} {}\n", k, v);
  return s;
}

FitOptions fit_options(const RunConfig& config) {
  return {config.param == "uniform" ? Parameterization::uniform : Parameterization::chord_length};
}

std::vector<BezierLabel> read_labels(const std::string& path) {
  const auto lines = read_lines(path);
  std::vector<BezierLabel> labels;
  labels.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      labels.push_back(parse_label(lines[i]));
    } catch (const ParseError& e) {
      throw ParseError(fmt::format("{} record {}: {}", path, i + 1, e.what()), e.location());
    } catch (const SchemaError& e) {
      throw SchemaError(fmt::format("{} record {}: {}", path, i + 1, e.what()));
    }
  }
  return labels;
}

void sort_by_key(std::vector<BezierLabel>& labels) {
  std::stable_sort(labels.begin(), labels.end(),
                   [](const BezierLabel& a, const BezierLabel& b) { return a.image_key < b.image_key; });
}

// One grid per curve order, built on first use.
class GridCache {
 public:
  explicit GridCache(int count) : count_(count) {}

  const SampleGrid& get(int order) {
    auto it = grids_.find(order);
    if (it == grids_.end()) it = grids_.emplace(order, build_sample_grid(order, count_)).first;
    return it->second;
  }

 private:
  int count_;
  std::map<int, SampleGrid> grids_;
};

// ---------------------------------------------------------------- fit

struct FitOutcome {
  std::string key;
  std::optional<BezierLabel> label;
  std::string error;
  std::vector<std::string> lane_errors;
};

}  // namespace

int run_fit(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto lines = read_lines(config.input);
  const Format format = resolve_format(config.input_format, "input-format", lines);
  if (format == Format::labels) throw ConfigError("fit input must be a CULane index or TuSimple records");
  const fs::path root = config.root.empty() ? fs::path(config.input).parent_path() : fs::path(config.root);
  const ImageSize size = config.image_size(format == Format::culane ? kCulaneImageSize : kTusimpleImageSize);
  const FitOptions options = fit_options(config);

  std::vector<FitOutcome> outcomes(lines.size());
  parallel_for(lines.size(), config.parallelism, [&](std::size_t i) {
    FitOutcome& o = outcomes[i];
    try {
      AnnotationRecord record;
      if (format == Format::culane) {
        o.key = lines[i];
        record = read_culane_annotation(root, lines[i], size);
      } else {
        o.key = fmt::format("line {}", i + 1);
        record = parse_tusimple(lines[i], size);
        o.key = record.image_key;
      }
      auto result = generate_labels(record, config.order, options);
      o.label = std::move(result.label);
      o.lane_errors = std::move(result.lane_errors);
    } catch (const IoError& e) {
      o.error = e.what();
    } catch (const ParseError& e) {
      o.error = e.what();
    } catch (const SchemaError& e) {
      o.error = e.what();
    }
  });

  std::vector<BezierLabel> labels;
  std::vector<std::pair<std::string, std::string>> failures;
  std::vector<std::pair<std::string, std::string>> lane_errors;
  std::set<std::string> seen;
  for (auto& o : outcomes) {
    if (!o.label) {
      failures.emplace_back(o.key, o.error);
      continue;
    }
    if (!seen.insert(o.key).second) {
      failures.emplace_back(o.key, "duplicate image key");
      continue;
    }
    for (auto& e : o.lane_errors) lane_errors.emplace_back(o.key, std::move(e));
    labels.push_back(std::move(*o.label));
  }
  sort_by_key(labels);
  std::sort(failures.begin(), failures.end());
  std::sort(lane_errors.begin(), lane_errors.end());

  std::string text;
  std::size_t lanes = 0;
  double residual_sum = 0.0;
  double residual_max = 0.0;
  for (const auto& label : labels) {
    text += format_label(label);
    text += '\n';
    lanes += label.curves.size();
    for (double r : label.fit_residual) {
      residual_sum += r;
      residual_max = std::max(residual_max, r);
    }
  }
  write_text(config.output, text);
  const double residual_mean = lanes > 0 ? residual_sum / static_cast<double>(lanes) : 0.0;

  if (lines.empty()) spdlog::warn("annotation index '{}' is empty; wrote an empty label file", config.input);
  for (const auto& [key, message] : failures) err << fmt::format("failed: {}: {}\n", key, message);
  for (const auto& [key, message] : lane_errors) err << fmt::format("lane skipped: {}: {}\n", key, message);

  out << config_header(config);
  out << fmt::format("images {}\n", lines.size());
  out << fmt::format("failed_images {}\n", failures.size());
  out << fmt::format("lanes {}\n", lanes);
  out << fmt::format("lane_errors {}\n", lane_errors.size());
  out << fmt::format("mean_residual {:.6e}\n", residual_mean);
  out << fmt::format("max_residual {:.6e}\n", residual_max);

  if (!config.report.empty()) {
    Json j;
    j["config"] = config_json(config);
    j["images"] = lines.size();
    j["failed_images"] = failures.size();
    j["lanes"] = lanes;
    j["lane_errors"] = lane_errors.size();
    j["mean_residual"] = residual_mean;
    j["max_residual"] = residual_max;
    Json f = Json::array();
    for (const auto& [key, message] : failures) f.push_back({{"image_key", key}, {"error", message}});
    j["failures"] = std::move(f);
    write_text(config.report, j.dump(2) + '\n');
  }

  // Up to 1% of images may fail before the run counts as failed.
  if (!failures.empty() && static_cast<double>(failures.size()) >= 0.01 * static_cast<double>(lines.size())) {
    err << fmt::format("error: {} of {} images failed (limit is below 1%)\n", failures.size(), lines.size());
    return kExitValidation;
  }
  return kExitOk;
}

namespace {

// ---------------------------------------------------------------- eval

struct ImageLanes {
  std::vector<Lane> lanes;
  ImageSize size;
  std::optional<RowLanes> rows;
};

using LaneSource = std::map<std::string, ImageLanes>;

void insert_unique(LaneSource& source, std::string key, ImageLanes lanes, const std::string& path) {
  if (!source.emplace(key, std::move(lanes)).second)
    throw ValidationError(fmt::format("{}: duplicate image key '{}'", path, key));
}

LaneSource load_source(const std::string& path, const std::string& format_name, const std::string& flag,
                       const RunConfig& config, bool predictions) {
  if (!fs::exists(path)) throw IoError(fmt::format("cannot open '{}'", path));
  const auto lines = read_lines(path);
  const Format format = resolve_format(format_name, flag, lines);
  LaneSource source;
  switch (format) {
    case Format::culane: {
      const fs::path root = config.root.empty() ? fs::path(path).parent_path() : fs::path(config.root);
      const ImageSize size = config.image_size(kCulaneImageSize);
      std::vector<ImageLanes> slots(lines.size());
      parallel_for(lines.size(), config.parallelism, [&](std::size_t i) {
        // A prediction image with no output file has no lanes.
        if (predictions && !fs::exists(culane_annotation_path(root, lines[i]))) {
          slots[i] = {{}, size, std::nullopt};
          return;
        }
        slots[i] = {read_culane_annotation(root, lines[i], size).lanes, size, std::nullopt};
      });
      for (std::size_t i = 0; i < lines.size(); ++i) insert_unique(source, lines[i], std::move(slots[i]), path);
      break;
    }
    case Format::tusimple: {
      const ImageSize size = config.image_size(kTusimpleImageSize);
      for (std::size_t i = 0; i < lines.size(); ++i) {
        TuSimpleRecord record;
        try {
          record = parse_tusimple_record(lines[i]);
        } catch (const ParseError& e) {
          throw ParseError(fmt::format("{} line {}: {}", path, i + 1, e.what()), e.location());
        } catch (const SchemaError& e) {
          throw SchemaError(fmt::format("{} line {}: {}", path, i + 1, e.what()));
        }
        auto lanes = rows_to_lanes(record.rows);
        insert_unique(source, record.raw_file, {std::move(lanes), size, std::move(record.rows)}, path);
      }
      break;
    }
    case Format::labels: {
      const auto labels = read_labels(path);
      std::vector<ImageLanes> slots(labels.size());
      parallel_for(labels.size(), config.parallelism, [&](std::size_t i) {
        GridCache grids(config.sample_count);
        ImageLanes& s = slots[i];
        s.size = labels[i].image_size;
        for (const auto& curve : labels[i].curves)
          s.lanes.push_back(lane_from_curve(curve, grids.get(curve.order()), s.size));
      });
      for (std::size_t i = 0; i < labels.size(); ++i)
        insert_unique(source, labels[i].image_key, std::move(slots[i]), path);
      break;
    }
  }
  return source;
}

// Row grid for sources without one: every 10th pixel row.
std::vector<double> default_rows(ImageSize size) {
  std::vector<double> rows;
  for (int y = 0; y < size.height; y += 10) rows.push_back(y);
  return rows;
}

RowLanes to_rows(const ImageLanes& image, const std::vector<double>& grid) {
  if (image.rows) return *image.rows;
  RowLanes r{grid, {}};
  for (const auto& lane : image.lanes) r.lanes.push_back(lane_to_row(lane, grid));
  return r;
}

void key_mismatch(const LaneSource& preds, const LaneSource& gts, std::vector<std::string>& unknown,
                  std::vector<std::string>& missing) {
  for (const auto& [key, _] : preds)
    if (!gts.count(key)) unknown.push_back(key);
  for (const auto& [key, _] : gts)
    if (!preds.count(key)) missing.push_back(key);
}

}  // namespace

int run_eval(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const LaneSource gts = load_source(config.gt, config.gt_format, "gt-format", config, false);
  const LaneSource preds = load_source(config.pred, config.pred_format, "pred-format", config, true);

  std::vector<std::string> unknown;
  std::vector<std::string> missing;
  key_mismatch(preds, gts, unknown, missing);
  if (!unknown.empty())
    err << fmt::format("warning: {} prediction keys not in ground truth (first: {})\n", unknown.size(), unknown.front());
  if (!missing.empty())
    err << fmt::format("warning: {} ground-truth keys without predictions (first: {})\n", missing.size(),
                       missing.front());

  std::string text = config_header(config);
  Json j;
  j["config"] = config_json(config);

  if (config.metric == "culane") {
    std::map<std::string, LaneSet> g;
    std::map<std::string, LaneSet> p;
    for (const auto& [key, image] : gts) g.emplace(key, LaneSet{image.lanes, image.size});
    for (const auto& [key, image] : preds) p.emplace(key, LaneSet{image.lanes, image.size});
    const EvalReport r = culane_f1(p, g, {config.iou_threshold, config.lane_width_px, config.parallelism});
    text += fmt::format("images {}\n", gts.size());
    text += fmt::format("tp {}\nfp {}\nfn {}\n", r.tp, r.fp, r.fn);
    text += fmt::format("precision {:.6f}\nrecall {:.6f}\nf1 {:.6f}\n", r.precision, r.recall, r.f1);
    text += fmt::format("unknown_prediction_keys {}\nmissing_prediction_keys {}\n", unknown.size(), missing.size());
    j["images"] = gts.size();
    j["tp"] = r.tp;
    j["fp"] = r.fp;
    j["fn"] = r.fn;
    j["precision"] = r.precision;
    j["recall"] = r.recall;
    j["f1"] = r.f1;
    j["unknown_prediction_keys"] = unknown;
    j["missing_prediction_keys"] = missing;
    if (config.per_image) {
      Json rows = Json::array();
      for (const auto& c : r.per_image) rows.push_back({{"image_key", c.key}, {"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}});
      j["per_image"] = std::move(rows);
    }
  } else {
    std::map<std::string, RowLanes> g;
    std::map<std::string, RowLanes> p;
    for (const auto& [key, image] : gts) {
      RowLanes rows = to_rows(image, default_rows(image.size));
      if (auto it = preds.find(key); it != preds.end()) p.emplace(key, to_rows(it->second, rows.h_samples));
      g.emplace(key, std::move(rows));
    }
    const TuSimpleOptions options{config.point_threshold_px, config.match_fraction};
    TuSimpleReport r;
    try {
      r = tusimple_metrics(p, g, options);
    } catch (const std::invalid_argument& e) {
      throw ValidationError(e.what());
    }
    const auto& c = r.counts;
    text += fmt::format("images {}\n", gts.size());
    text += fmt::format("gt_lanes {}\npred_lanes {}\nmatched {}\n", c.gt_lanes, c.pred_lanes, c.matched);
    text += fmt::format("correct_points {}\ngt_points {}\n", c.correct_points, c.gt_points);
    text += fmt::format("accuracy {:.6f}\nfp_rate {:.6f}\nfn_rate {:.6f}\n", r.accuracy, r.fp_rate, r.fn_rate);
    text += fmt::format("unknown_prediction_keys {}\nmissing_prediction_keys {}\n", unknown.size(), missing.size());
    j["images"] = gts.size();
    j["gt_lanes"] = c.gt_lanes;
    j["pred_lanes"] = c.pred_lanes;
    j["matched"] = c.matched;
    j["correct_points"] = c.correct_points;
    j["gt_points"] = c.gt_points;
    j["accuracy"] = r.accuracy;
    j["fp_rate"] = r.fp_rate;
    j["fn_rate"] = r.fn_rate;
    j["unknown_prediction_keys"] = unknown;
    j["missing_prediction_keys"] = missing;
    if (config.per_image) {
      Json rows = Json::array();
      for (const auto& [key, gt] : g) {
        const auto it = p.find(key);
        const auto counts = evaluate_tusimple_image(it == p.end() ? RowLanes{gt.h_samples, {}} : it->second, gt, options);
        rows.push_back({{"image_key", key},
                        {"correct_points", counts.correct_points},
                        {"gt_points", counts.gt_points},
                        {"matched", counts.matched},
                        {"pred_lanes", counts.pred_lanes},
                        {"gt_lanes", counts.gt_lanes}});
      }
      j["per_image"] = std::move(rows);
    }
  }

  out << text;
  if (!config.report.empty()) write_text(config.report, j.dump(2) + '\n');
  return kExitOk;
}

namespace {

// ---------------------------------------------------------------- match

void check_label(const BezierLabel& label, const std::string& what, bool predictions) {
  const std::size_t n = label.curves.size();
  if (predictions) {
    if (label.scores.size() != n)
      throw ValidationError(fmt::format("{} '{}': {} scores for {} curves", what, label.image_key, label.scores.size(), n));
    for (std::size_t i = 0; i < n; ++i) {
      const double s = label.scores[i];
      if (!(s >= 0.0 && s <= 1.0))
        throw ValidationError(fmt::format("{} '{}': score {} of curve {} is outside [0, 1]", what, label.image_key, s, i));
    }
    if (!label.logits.empty() && label.logits.size() != n)
      throw ValidationError(fmt::format("{} '{}': {} logits for {} curves", what, label.image_key, label.logits.size(), n));
  }
}

Json match_image(const BezierLabel& gt, const BezierLabel& pred, const RunConfig& config, GridCache& grids) {
  const std::size_t g = gt.curves.size();
  const std::size_t n = pred.curves.size();
  if (g > n)
    throw ValidationError(fmt::format("image '{}': {} labels but only {} predictions", gt.image_key, g, n));
  std::set<int> orders;
  for (const auto& c : gt.curves) orders.insert(c.order());
  for (const auto& c : pred.curves) orders.insert(c.order());
  if (orders.size() > 1) throw ValidationError(fmt::format("image '{}': curves of different orders", gt.image_key));

  Json j;
  j["image_key"] = gt.image_key;
  Json pairs = Json::array();
  Json fallback = Json::array();
  double reg = 0.0;
  std::vector<int> target(n, 0);
  if (g > 0) {
    const SampleGrid& grid = grids.get(*orders.begin());
    WeightMatrix distances(g, n);
    const QualityMatrix q =
        build_quality_matrix({gt.curves, pred.curves, pred.scores}, grid, config.alpha, &distances);
    MatchAssignment m;
    if (config.local_max) {
      const auto& row = pred.logits.empty() ? pred.scores : pred.logits;
      m = hungarian_match(q, local_max_filter(row));
    } else {
      m = hungarian_match(q);
    }
    for (std::size_t k = 0; k < m.pairs.size(); ++k) {
      const auto [l, p] = m.pairs[k];
      pairs.push_back({{"label", l}, {"prediction", p}, {"quality", m.qualities[k]}, {"distance", distances(l, p)}});
      reg += distances(l, p);
      target[p] = 1;
    }
    reg /= static_cast<double>(g);
    for (auto l : m.fallback_labels) fallback.push_back(l);
  }

  double cls = 0.0;
  if (config.cls_loss) {
    cls = *config.cls_loss;
  } else if (n > 0) {
    for (std::size_t p = 0; p < n; ++p) cls += weighted_bce(pred.scores[p], target[p], config.neg_weight);
    cls /= static_cast<double>(n);
  }
  const LossWeights weights{config.lambdas[0], config.lambdas[1], config.lambdas[2], config.neg_weight};
  j["pairs"] = std::move(pairs);
  j["fallback_labels"] = std::move(fallback);
  j["loss"] = {{"reg", reg},
               {"cls", cls},
               {"seg", config.seg_loss},
               {"total", total_loss(reg, cls, config.seg_loss, weights)}};
  return j;
}

}  // namespace

int run_match(const RunConfig& config, std::ostream& out, std::ostream& err) {
  auto gts = read_labels(config.gt);
  const auto preds = read_labels(config.pred);
  sort_by_key(gts);

  std::map<std::string, const BezierLabel*> by_key;
  for (const auto& p : preds) {
    check_label(p, "prediction", true);
    if (!by_key.emplace(p.image_key, &p).second)
      throw ValidationError(fmt::format("prediction: duplicate image key '{}'", p.image_key));
  }
  std::set<std::string> gt_keys;
  for (const auto& g : gts) {
    if (!gt_keys.insert(g.image_key).second)
      throw ValidationError(fmt::format("label: duplicate image key '{}'", g.image_key));
    if (!by_key.count(g.image_key))
      throw ValidationError(fmt::format("label '{}' has no prediction record", g.image_key));
  }
  for (const auto& [key, _] : by_key)
    if (!gt_keys.count(key)) err << fmt::format("warning: prediction '{}' has no label record; skipped\n", key);

  std::vector<std::string> rows(gts.size());
  parallel_for(gts.size(), config.parallelism, [&](std::size_t i) {
    GridCache grids(config.sample_count);
    rows[i] = match_image(gts[i], *by_key.at(gts[i].image_key), config, grids).dump();
  });

  std::string text = Json{{"config", config_json(config)}}.dump() + '\n';
  for (const auto& r : rows) text += r + '\n';
  emit(config.output, text, out);
  return kExitOk;
}

int run_augment(const RunConfig& config, std::ostream& /*out*/, std::ostream& /*err*/) {
  auto labels = read_labels(config.input);
  sort_by_key(labels);
  std::vector<std::string> rows(labels.size());
  parallel_for(labels.size(), config.parallelism, [&](std::size_t i) {
    // Seeded per key so results do not depend on scheduling or file order.
    std::mt19937_64 rng(key_seed(config.seed, labels[i].image_key));
    const Augmentation aug = sample_augmentation(config.augment, labels[i].image_size, rng);
    rows[i] = format_label(augment_labels(labels[i], aug));
  });
  std::string text;
  for (const auto& r : rows) text += r + '\n';
  write_text(config.output, text);
  return kExitOk;
}

int run_sample(const RunConfig& config, std::ostream& out, std::ostream& /*err*/) {
  auto labels = read_labels(config.input);
  sort_by_key(labels);
  std::vector<std::string> rows(labels.size());
  parallel_for(labels.size(), config.parallelism, [&](std::size_t i) {
    GridCache grids(config.sample_count);
    const auto& label = labels[i];
    Json lanes = Json::array();
    for (const auto& curve : label.curves) {
      const auto points = sample_curve(curve, grids.get(curve.order()));
      Json lane = Json::array();
      for (const auto& p : points) {
        const Point q = config.pixels ? denormalize(p, label.image_size) : p;
        lane.push_back({q.x, q.y});
      }
      lanes.push_back(std::move(lane));
    }
    rows[i] = Json{{"image_key", label.image_key}, {"pixels", config.pixels}, {"lanes", std::move(lanes)}}.dump();
  });
  std::string text;
  for (const auto& r : rows) text += r + '\n';
  emit(config.output, text, out);
  return kExitOk;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
    if (config.subcommand == "fit") return run_fit(config, out, err);
    if (config.subcommand == "eval") return run_eval(config, out, err);
    if (config.subcommand == "match") return run_match(config, out, err);
    if (config.subcommand == "augment") return run_augment(config, out, err);
    if (config.subcommand == "sample") return run_sample(config, out, err);
    throw ConfigError(fmt::format("unknown subcommand '{}'", config.subcommand));
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace bezlane::cli
