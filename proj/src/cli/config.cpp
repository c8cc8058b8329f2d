#include <bezlane/cli.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

namespace bezlane::cli {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

std::string env_name(std::string flag) {
  std::string out = "BEZLANE_";
  for (char c : flag) out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

// Flag name mirrors the RunConfig field in kebab-case; BEZLANE_<FIELD> sets
// it from the environment.
template <typename T>
CLI::Option* add_field(CLI::App& app, const std::string& flag, T& target, const std::string& help) {
  return app.add_option("--" + flag, target, help)->envname(env_name(flag))->capture_default_str();
}

CLI::Option* add_switch(CLI::App& app, const std::string& flag, bool& target, const std::string& help) {
  return app.add_flag("--" + flag, target, help)->envname(env_name(flag));
}

void add_common(CLI::App& app, RunConfig& c, std::string& config_file) {
  app.add_option("--config", config_file, "TOML/INI file with flag values; command-line flags win");
  add_field(app, "order", c.order, "Bezier curve order");
  add_field(app, "sample-count", c.sample_count, "Samples per curve");
  add_field(app, "image-height", c.image_height, "Image height in pixels for formats that do not store it");
  add_field(app, "image-width", c.image_width, "Image width in pixels for formats that do not store it");
  add_field(app, "parallelism", c.parallelism, "Worker threads");
  add_field(app, "seed", c.seed, "Random seed");
}

bool flag_given(const std::vector<std::string>& args, std::size_t from, const std::string& flag) {
  for (std::size_t i = from; i < args.size(); ++i)
    if (args[i] == flag || args[i].rfind(flag + "=", 0) == 0) return true;
  return false;
}

// CLI11 only reads config files attached to the root app, so the file named
// by a subcommand's --config is expanded into flags here. Top-level keys and
// keys under a [<subcommand>] section apply; keys that belong to another
// subcommand are skipped, and unknown keys fail like unknown flags.
std::vector<std::string> expand_config(const CLI::App& app, std::vector<std::string> args) {
  std::size_t sub = 0;
  while (sub < args.size() && !app.get_subcommand_no_throw(args[sub])) ++sub;
  if (sub == args.size()) return args;
  std::string path;
  for (std::size_t i = sub + 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;

  std::set<std::string> known;
  for (const auto* s : app.get_subcommands({}))
    for (const auto* o : s->get_options())
      for (const auto& n : o->get_lnames()) known.insert(n);
  const auto* active = app.get_subcommand_no_throw(args[sub]);

  std::map<std::string, std::string> top;
  std::map<std::string, std::string> section;
  for (const auto& item : CLI::ConfigTOML().from_file(path)) {
    if (item.name == "++" || item.name == "--") continue;
    const bool own = item.parents.size() == 1 && item.parents[0] == args[sub];
    if (!item.parents.empty() && !own) continue;
    std::string value;
    for (const auto& v : item.inputs) value += (value.empty() ? "" : ",") + v;
    (own ? section : top)[item.name] = value;
  }
  section.merge(top);

  std::vector<std::string> injected;
  for (const auto& [name, value] : section) {
    const std::string flag = "--" + name;
    if (!active->get_option_no_throw(flag) && known.count(name)) continue;
    if (flag_given(args, sub + 1, flag)) continue;
    injected.push_back(flag + "=" + value);
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub) + 1, injected.begin(), injected.end());
  return args;
}

}  // namespace

void RunConfig::validate() const {
  require(order >= 1 && order <= 5, fmt::format("order must be in [1, 5], got {}", order));
  require(sample_count >= 2, fmt::format("sample-count must be >= 2, got {}", sample_count));
  require(param == "chord" || param == "uniform", fmt::format("param must be chord or uniform, got '{}'", param));
  require(alpha >= 0.0 && alpha <= 1.0, fmt::format("alpha must be in [0, 1], got {}", alpha));
  require(neg_weight >= 0.0, fmt::format("neg-weight must be >= 0, got {}", neg_weight));
  for (double l : lambdas) require(l >= 0.0 && std::isfinite(l), fmt::format("lambdas must be >= 0, got {}", l));
  require(iou_threshold > 0.0 && iou_threshold <= 1.0,
          fmt::format("iou-threshold must be in (0, 1], got {}", iou_threshold));
  require(lane_width_px >= 1.0, fmt::format("lane-width-px must be >= 1, got {}", lane_width_px));
  require(point_threshold_px > 0.0, fmt::format("point-threshold-px must be > 0, got {}", point_threshold_px));
  require(match_fraction > 0.0 && match_fraction <= 1.0,
          fmt::format("match-fraction must be in (0, 1], got {}", match_fraction));
  require(metric == "culane" || metric == "tusimple", fmt::format("metric must be culane or tusimple, got '{}'", metric));
  require(image_height >= 0 && image_width >= 0 && (image_height > 0) == (image_width > 0),
          "image-height and image-width must be given together and be positive");
  require(parallelism >= 1, fmt::format("parallelism must be >= 1, got {}", parallelism));
  require(!cls_loss || std::isfinite(*cls_loss), "cls-loss must be finite");
  require(std::isfinite(seg_loss), "seg-loss must be finite");
  try {
    augment.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::vector<std::pair<std::string, std::string>> RunConfig::describe() const {
  std::vector<std::pair<std::string, std::string>> d{
      {"order", fmt::format("{}", order)},
      {"sample-count", fmt::format("{}", sample_count)},
      {"param", param},
      {"alpha", fmt::format("{}", alpha)},
      {"neg-weight", fmt::format("{}", neg_weight)},
      {"lambdas", fmt::format("{},{},{}", lambdas[0], lambdas[1], lambdas[2])},
      {"iou-threshold", fmt::format("{}", iou_threshold)},
      {"lane-width-px", fmt::format("{}", lane_width_px)},
      {"point-threshold-px", fmt::format("{}", point_threshold_px)},
      {"match-fraction", fmt::format("{}", match_fraction)},
      {"metric", metric},
      {"image-size", image_height > 0 ? fmt::format("{}x{}", image_height, image_width) : std::string("auto")},
      {"seed", fmt::format("{}", seed)},
  };
  if (subcommand == "match") {
    d.emplace_back("local-max", local_max ? "true" : "false");
    d.emplace_back("cls-loss", cls_loss ? fmt::format("{}", *cls_loss) : "computed");
    d.emplace_back("seg-loss", fmt::format("{}", seg_loss));
  }
  if (subcommand == "augment") {
    d.emplace_back("rotation-deg", fmt::format("{}", augment.max_rotation_deg));
    d.emplace_back("translate-x-px", fmt::format("{}", augment.max_translate_x));
    d.emplace_back("translate-y-px", fmt::format("{}", augment.max_translate_y));
    d.emplace_back("scale", fmt::format("{}", augment.max_scale));
    d.emplace_back("flip-prob", fmt::format("{}", augment.flip_probability));
  }
  return d;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  std::string config_file;
  CLI::App app{"Bezier lane curve fitting, matching, augmentation and evaluation", "bezlane"};
  app.require_subcommand(1);

  auto* fit = app.add_subcommand("fit", "Fit cubic Bezier labels to lane annotations");
  add_common(*fit, c, config_file);
  add_field(*fit, "input", c.input, "Annotation index (CULane list) or TuSimple JSON lines")->required();
  add_field(*fit, "output", c.output, "Label file to write (JSON lines)")->required();
  add_field(*fit, "root", c.root, "Directory holding CULane annotations (default: index directory)");
  add_field(*fit, "input-format", c.input_format, "auto | culane | tusimple");
  add_field(*fit, "param", c.param, "Parameter assignment: chord | uniform");
  add_field(*fit, "report", c.report, "Optional JSON summary");

  auto* eval = app.add_subcommand("eval", "Score predictions against ground truth");
  add_common(*eval, c, config_file);
  add_field(*eval, "gt", c.gt, "Ground truth (CULane list, TuSimple JSON lines, or label file)")->required();
  add_field(*eval, "pred", c.pred, "Predictions (same formats)")->required();
  add_field(*eval, "gt-format", c.gt_format, "auto | culane | tusimple | labels");
  add_field(*eval, "pred-format", c.pred_format, "auto | culane | tusimple | labels");
  add_field(*eval, "root", c.root, "Directory holding CULane annotations (default: each index's directory)");
  add_field(*eval, "metric", c.metric, "culane | tusimple");
  add_field(*eval, "iou-threshold", c.iou_threshold, "Pixel IoU needed for a match");
  add_field(*eval, "lane-width-px", c.lane_width_px, "Stroke width of rasterized lanes");
  add_field(*eval, "point-threshold-px", c.point_threshold_px, "TuSimple per-point x tolerance");
  add_field(*eval, "match-fraction", c.match_fraction, "TuSimple fraction of correct points for a lane match");
  add_field(*eval, "report", c.report, "Optional JSON report");
  add_switch(*eval, "per-image", c.per_image, "Include per-image counts in the JSON report");

  auto* match = app.add_subcommand("match", "Match predicted curves to labels and report losses");
  add_common(*match, c, config_file);
  add_field(*match, "gt", c.gt, "Label file")->required();
  add_field(*match, "pred", c.pred, "Prediction label file with per-curve scores")->required();
  add_field(*match, "output", c.output, "Assignment dump (default: stdout)");
  add_field(*match, "alpha", c.alpha, "Quality mixing exponent");
  add_field(*match, "neg-weight", c.neg_weight, "BCE weight of negative samples");
  app.get_subcommand("match")
      ->add_option("--lambdas", c.lambdas, "Loss weights for regression, classification, segmentation")
      ->envname("BEZLANE_LAMBDAS")
      ->delimiter(',')
      ->capture_default_str();
  add_switch(*match, "local-max", c.local_max, "Only match predictions at local maxima of the logit row");
  add_field(*match, "cls-loss", c.cls_loss, "Classification loss scalar (default: computed from scores)");
  add_field(*match, "seg-loss", c.seg_loss, "Segmentation loss scalar");

  auto* augment = app.add_subcommand("augment", "Randomly transform and clip labels");
  add_common(*augment, c, config_file);
  add_field(*augment, "input", c.input, "Label file")->required();
  add_field(*augment, "output", c.output, "Augmented label file")->required();
  add_field(*augment, "rotation-deg", c.augment.max_rotation_deg, "Maximum rotation in degrees");
  add_field(*augment, "translate-x-px", c.augment.max_translate_x, "Maximum x translation in pixels");
  add_field(*augment, "translate-y-px", c.augment.max_translate_y, "Maximum y translation in pixels");
  add_field(*augment, "scale", c.augment.max_scale, "Maximum relative scale change");
  add_field(*augment, "flip-prob", c.augment.flip_probability, "Horizontal flip probability");

  auto* sample = app.add_subcommand("sample", "Dump sampled curve points of a label file");
  add_common(*sample, c, config_file);
  add_field(*sample, "input", c.input, "Label file")->required();
  add_field(*sample, "output", c.output, "Output file (default: stdout)");
  add_switch(*sample, "pixels", c.pixels, "Emit pixel instead of normalized coordinates");

  try {
    const auto args = expand_config(app, std::vector<std::string>(argv + 1, argv + argc));
    std::vector<const char*> expanded{argv[0]};
    for (const auto& a : args) expanded.push_back(a.c_str());
    app.parse(static_cast<int>(expanded.size()), expanded.data());
  } catch (const CLI::FileError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  c.subcommand = app.get_subcommands().front()->get_name();
  return run(c, out, err);
}

}  // namespace bezlane::cli
