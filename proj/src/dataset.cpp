#include <bezlane/dataset.hpp>
#include <bezlane/errors.hpp>

#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace bezlane {

using ordered_json = nlohmann::ordered_json;

namespace {

double round_decimals(double v) {
  const double r = std::round(v * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;
}

double round_significant(double v) {
  const double r = std::stod(fmt::format("{:.6g}", v));
  return r == 0.0 ? 0.0 : r;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view token, double& out) {
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

template <typename Json>
Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(fmt::format("malformed JSON at byte {}: {}", e.byte, e.what()), e.byte);
  }
}

template <typename T, typename Json>
T field(const Json& j, const char* name, std::string_view record) {
  if (!j.is_object() || !j.contains(name)) {
    throw SchemaError(fmt::format("{} record is missing '{}'", record, name));
  }
  try {
    return j.at(name).template get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(fmt::format("{} record field '{}' has the wrong type: {}", record, name, e.what()));
  }
}

}  // namespace

bool within_guard_band(const Lane& lane, ImageSize size) {
  for (const auto& p : lane) {
    if (p.x < -0.5 * size.width || p.x > 1.5 * size.width || p.y < -0.5 * size.height || p.y > 1.5 * size.height) {
      return false;
    }
  }
  return true;
}

std::vector<Lane> parse_culane(std::string_view text) {
  std::vector<Lane> lanes;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    std::vector<double> values;
    std::string_view rest = trim(line);
    while (!rest.empty()) {
      const auto sp = rest.find_first_of(" \t");
      const std::string_view token = rest.substr(0, sp);
      double v = 0.0;
      if (!parse_double(token, v)) {
        throw ParseError(fmt::format("line {}: '{}' is not a number", line_no, token), line_no);
      }
      values.push_back(v);
      rest = sp == std::string_view::npos ? std::string_view{} : trim(rest.substr(sp));
    }
    if (values.empty()) continue;
    if (values.size() % 2 != 0) {
      throw ParseError(fmt::format("line {}: odd number of coordinates ({})", line_no, values.size()), line_no);
    }
    Lane lane;
    for (std::size_t i = 0; i < values.size(); i += 2) lane.push_back({values[i], values[i + 1]});
    if (lane.size() < 2) {
      spdlog::warn("line {}: dropping lane with a single point", line_no);
      continue;
    }
    lanes.push_back(std::move(lane));
  }
  return lanes;
}

std::string format_culane(const std::vector<Lane>& lanes) {
  std::string out;
  for (const auto& lane : lanes) {
    for (std::size_t i = 0; i < lane.size(); ++i) {
      out += fmt::format("{}{:.4f} {:.4f}", i ? " " : "", lane[i].x, lane[i].y);
    }
    out += '\n';
  }
  return out;
}

std::filesystem::path culane_annotation_path(const std::filesystem::path& root, const std::string& image_key) {
  std::filesystem::path rel(image_key);
  if (rel.is_absolute()) rel = rel.relative_path();
  rel.replace_extension(".lines.txt");
  return root / rel;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("failed reading '{}'", path.string()));
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  std::vector<std::string> lines;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    lines.emplace_back(t);
  }
  return lines;
}

AnnotationRecord read_culane_annotation(const std::filesystem::path& root, const std::string& image_key,
                                        ImageSize size) {
  const auto path = culane_annotation_path(root, image_key);
  try {
    return {image_key, parse_culane(read_text(path)), size};
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()), e.location());
  }
}

TuSimpleRecord parse_tusimple_record(std::string_view json_line) {
  const auto j = parse_json<nlohmann::json>(json_line);
  TuSimpleRecord r;
  r.raw_file = field<std::string>(j, "raw_file", "TuSimple");
  r.rows.h_samples = field<std::vector<double>>(j, "h_samples", "TuSimple");
  r.rows.lanes = field<std::vector<std::vector<double>>>(j, "lanes", "TuSimple");
  for (std::size_t i = 0; i < r.rows.lanes.size(); ++i) {
    if (r.rows.lanes[i].size() != r.rows.h_samples.size()) {
      throw SchemaError(fmt::format("{}: lane {} has {} entries but h_samples has {}", r.raw_file, i,
                                    r.rows.lanes[i].size(), r.rows.h_samples.size()));
    }
  }
  return r;
}

std::string format_tusimple_record(const TuSimpleRecord& record) {
  ordered_json j;
  j["lanes"] = record.rows.lanes;
  j["h_samples"] = record.rows.h_samples;
  j["raw_file"] = record.raw_file;
  return j.dump();
}

std::vector<Lane> rows_to_lanes(const RowLanes& rows) {
  std::vector<Lane> lanes;
  for (const auto& xs : rows.lanes) {
    Lane lane;
    for (std::size_t r = 0; r < xs.size() && r < rows.h_samples.size(); ++r) {
      if (xs[r] >= 0.0) lane.push_back({xs[r], rows.h_samples[r]});
    }
    if (lane.size() >= 2) lanes.push_back(std::move(lane));
  }
  return lanes;
}

std::vector<double> lane_to_row(const Lane& lane, const std::vector<double>& h_samples) {
  std::vector<double> xs(h_samples.size(), kTusimpleAbsent);
  for (std::size_t r = 0; r < h_samples.size(); ++r) {
    const double y = h_samples[r];
    for (std::size_t k = 0; k + 1 < lane.size(); ++k) {
      const Point a = lane[k];
      const Point b = lane[k + 1];
      if (y < std::min(a.y, b.y) || y > std::max(a.y, b.y)) continue;
      const double x = a.y == b.y ? a.x : a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (x >= 0.0) xs[r] = x;
      break;
    }
  }
  return xs;
}

AnnotationRecord parse_tusimple(std::string_view json_line, ImageSize size) {
  auto r = parse_tusimple_record(json_line);
  std::vector<Lane> lanes = rows_to_lanes(r.rows);
  return {std::move(r.raw_file), std::move(lanes), size};
}

std::string format_label(const BezierLabel& label) {
  ordered_json j;
  j["image_key"] = label.image_key;
  j["image_size"] = {label.image_size.height, label.image_size.width};
  auto curves = ordered_json::array();
  for (const auto& c : label.curves) {
    auto flat = ordered_json::array();
    for (const auto& p : c.control_points()) {
      flat.push_back(round_decimals(p.x));
      flat.push_back(round_decimals(p.y));
    }
    curves.push_back(std::move(flat));
  }
  j["curves"] = std::move(curves);
  auto residuals = ordered_json::array();
  for (double r : label.fit_residual) residuals.push_back(round_significant(r));
  j["residuals"] = std::move(residuals);
  if (!label.scores.empty()) j["scores"] = label.scores;
  if (!label.logits.empty()) j["logits"] = label.logits;
  return j.dump();
}

BezierLabel parse_label(std::string_view json_line) {
  const auto j = parse_json<nlohmann::json>(json_line);
  BezierLabel label;
  label.image_key = field<std::string>(j, "image_key", "label");
  if (label.image_key.empty()) throw SchemaError("label record has an empty image_key");
  const auto size = field<std::vector<int>>(j, "image_size", "label");
  if (size.size() != 2 || size[0] <= 0 || size[1] <= 0) {
    throw SchemaError(fmt::format("{}: image_size must be [height, width] with positive entries", label.image_key));
  }
  label.image_size = {size[0], size[1]};
  for (const auto& flat : field<std::vector<std::vector<double>>>(j, "curves", "label")) {
    if (flat.size() < 4 || flat.size() % 2 != 0) {
      throw SchemaError(fmt::format("{}: curve has {} coordinates", label.image_key, flat.size()));
    }
    std::vector<Point> cps;
    for (std::size_t i = 0; i < flat.size(); i += 2) cps.push_back({flat[i], flat[i + 1]});
    label.curves.emplace_back(std::move(cps));
  }
  if (j.contains("residuals")) label.fit_residual = field<std::vector<double>>(j, "residuals", "label");
  if (j.contains("scores")) label.scores = field<std::vector<double>>(j, "scores", "label");
  if (j.contains("logits")) label.logits = field<std::vector<double>>(j, "logits", "label");
  if (!label.fit_residual.empty() && label.fit_residual.size() != label.curves.size()) {
    throw SchemaError(fmt::format("{}: {} residuals for {} curves", label.image_key, label.fit_residual.size(),
                                  label.curves.size()));
  }
  if (!label.scores.empty() && label.scores.size() != label.curves.size()) {
    throw SchemaError(
        fmt::format("{}: {} scores for {} curves", label.image_key, label.scores.size(), label.curves.size()));
  }
  return label;
}

LabelResult generate_labels(const AnnotationRecord& record, int order, const FitOptions& options) {
  LabelResult out;
  out.label.image_key = record.image_key;
  out.label.image_size = record.image_size;
  for (std::size_t i = 0; i < record.lanes.size(); ++i) {
    const auto& lane = record.lanes[i];
    try {
      if (!within_guard_band(lane, record.image_size)) {
        throw std::invalid_argument("points outside the annotation guard band");
      }
      Polyline poly{{}, record.image_size};
      poly.points.reserve(lane.size());
      for (const auto& p : lane) poly.points.push_back(normalize(p, record.image_size));
      auto fit = fit_least_squares(poly, order, options);
      if (fit.rank_deficient) spdlog::warn("{}: lane {} fit is rank deficient", record.image_key, i);
      out.label.curves.push_back(std::move(fit.curve));
      out.label.fit_residual.push_back(fit.rms_residual);
    } catch (const std::exception& e) {
      out.lane_errors.push_back(fmt::format("{}: lane {}: {}", record.image_key, i, e.what()));
    }
  }
  return out;
}

AffineTransform Augmentation::combined() const {
  return flip ? transform.after(AffineTransform::horizontal_flip(0.5)) : transform;
}

BezierLabel augment_labels(const BezierLabel& label, const Augmentation& augmentation, const Box& box) {
  const AffineTransform t = augmentation.combined();
  BezierLabel out;
  out.image_key = label.image_key;
  out.image_size = label.image_size;
  out.logits = label.logits;
  for (std::size_t i = 0; i < label.curves.size(); ++i) {
    auto clipped = clip_to_box(affine_transform(label.curves[i], t), box);
    if (!clipped) continue;
    out.curves.push_back(std::move(*clipped));
    if (i < label.fit_residual.size()) out.fit_residual.push_back(label.fit_residual[i]);
    if (i < label.scores.size()) out.scores.push_back(label.scores[i]);
  }
  return out;
}

AffineTransform pixel_to_normalized(const AffineTransform& pixel, ImageSize size) {
  // diag(1/w, 1/h) * pixel * diag(w, h), written out so identity stays exact.
  const double w = size.width;
  const double h = size.height;
  const auto& m = pixel.m;
  return {{m[0], m[1] * h / w, m[2] / w, m[3] * w / h, m[4], m[5] / h}};
}

void RandomAffineSpec::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(fmt::format("{} must be finite and non-negative, got {}", name, v));
    }
  };
  check(max_rotation_deg, "rotation bound");
  check(max_translate_x, "x translation bound");
  check(max_translate_y, "y translation bound");
  check(max_scale, "scale bound");
  if (max_scale >= 1.0) throw std::invalid_argument(fmt::format("scale bound must be < 1, got {}", max_scale));
  if (!(flip_probability >= 0.0 && flip_probability <= 1.0)) {
    throw std::invalid_argument(fmt::format("flip probability {} outside [0, 1]", flip_probability));
  }
}

Augmentation sample_augmentation(const RandomAffineSpec& spec, ImageSize size, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const double angle = unit(rng) * spec.max_rotation_deg * std::numbers::pi / 180.0;
  const double scale = 1.0 + unit(rng) * spec.max_scale;
  const double tx = unit(rng) * spec.max_translate_x;
  const double ty = unit(rng) * spec.max_translate_y;
  const bool flip = coin(rng) < spec.flip_probability;

  const Point center{0.5 * size.width, 0.5 * size.height};
  const auto about_center = AffineTransform::translation(center.x, center.y)
                                .after(AffineTransform::scaling(scale, scale))
                                .after(AffineTransform::translation(-center.x, -center.y));
  const auto pixel = AffineTransform::translation(tx, ty)
                         .after(AffineTransform::rotation(angle, center))
                         .after(about_center);
  return {pixel_to_normalized(pixel, size), flip};
}

std::uint64_t key_seed(std::uint64_t seed, std::string_view key) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  // splitmix64 finalizer
  std::uint64_t z = seed ^ h;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace bezlane
