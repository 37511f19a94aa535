#include "desctrack/dataset.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "desctrack/errors.hpp"
#include "desctrack/random.hpp"

namespace fs = std::filesystem;

namespace desctrack {

Sequence::Sequence(std::string name, std::vector<GrayImage> frames,
                   std::vector<OrientedBox> ground_truth)
    : name_(std::move(name)), frames_(std::move(frames)), ground_truth_(std::move(ground_truth)) {
  if (frames_.size() < 2) throw DataError("sequence '" + name_ + "' needs at least two frames");
  if (frames_.size() != ground_truth_.size()) {
    throw DataError("sequence '" + name_ + "': " + std::to_string(frames_.size()) +
                    " frames but " + std::to_string(ground_truth_.size()) +
                    " ground-truth rows");
  }
  for (std::size_t i = 1; i < frames_.size(); ++i) {
    if (frames_[i].width() != frames_[0].width() || frames_[i].height() != frames_[0].height()) {
      throw DataError("sequence '" + name_ + "': frame " + std::to_string(i + 1) +
                      " has different dimensions from frame 1");
    }
  }
}

// ---------------------------------------------------------------------------
// Ground-truth rows

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto is_sep = [](char c) { return c == ',' || std::isspace(static_cast<unsigned char>(c)); };
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_sep(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

double parse_real(std::string_view token, std::size_t line) {
  const std::string s(token);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw ParseError(line, "not a number: '" + s + "'");
  return v;
}

template <typename RowFn>
void for_each_row(std::string_view text, RowFn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;

    const auto first = line.find_first_not_of(" \t\r\f\v");
    if (first == std::string_view::npos || line[first] == '#') {
      if (end == text.size()) break;
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 8) {
      throw ParseError(line_no, "expected 8 values, found " + std::to_string(fields.size()));
    }
    std::array<double, 8> values{};
    for (std::size_t i = 0; i < 8; ++i) values[i] = parse_real(fields[i], line_no);
    fn(line_no, values);
    if (end == text.size()) break;
  }
}

OrientedBox make_row_box(const std::array<double, 8>& v, std::size_t line_no) {
  try {
    return OrientedBox({Point2{v[0], v[1]}, Point2{v[2], v[3]}, Point2{v[4], v[5]},
                        Point2{v[6], v[7]}});
  } catch (const DataError& e) {
    throw ParseError(line_no, e.what());
  }
}

}  // namespace

std::vector<OrientedBox> parse_ground_truth(std::string_view text) {
  std::vector<OrientedBox> boxes;
  for_each_row(text, [&](std::size_t line_no, const std::array<double, 8>& v) {
    boxes.push_back(make_row_box(v, line_no));
  });
  return boxes;
}

std::vector<std::optional<OrientedBox>> parse_box_rows(std::string_view text) {
  std::vector<std::optional<OrientedBox>> boxes;
  for_each_row(text, [&](std::size_t line_no, const std::array<double, 8>& v) {
    const auto nans = std::count_if(v.begin(), v.end(), [](double x) { return std::isnan(x); });
    if (nans == 8) {
      boxes.emplace_back(std::nullopt);
    } else {
      boxes.emplace_back(make_row_box(v, line_no));
    }
  });
  return boxes;
}

std::string serialize_boxes(const std::vector<std::optional<OrientedBox>>& boxes) {
  std::string out;
  char buf[32];
  for (const auto& box : boxes) {
    for (std::size_t i = 0; i < 4; ++i) {
      for (int c = 0; c < 2; ++c) {
        if (box) {
          const Point2& p = (*box)[i];
          std::snprintf(buf, sizeof buf, "%.12g", c == 0 ? p.x : p.y);
        } else {
          std::snprintf(buf, sizeof buf, "nan");
        }
        if (i != 0 || c != 0) out += ' ';
        out += buf;
      }
    }
    out += '\n';
  }
  return out;
}

std::string serialize_ground_truth(const std::vector<OrientedBox>& boxes) {
  return serialize_boxes(std::vector<std::optional<OrientedBox>>(boxes.begin(), boxes.end()));
}

// ---------------------------------------------------------------------------
// Image files

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  // Integer form of round(0.299 R + 0.587 G + 0.114 B).
  return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

GrayImage read_pgm(const fs::path& path) {
  const std::string bytes = read_file(path);
  std::size_t pos = 0;
  auto skip_space_and_comments = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&]() -> long {
    skip_space_and_comments();
    long v = 0;
    bool any = false;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      v = v * 10 + (bytes[pos] - '0');
      any = true;
      if (v > 1'000'000) break;
      ++pos;
    }
    if (!any) throw DataError("malformed PGM header in " + path.string());
    return v;
  };

  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw DataError("not a binary PGM (P5): " + path.string());
  }
  pos = 2;
  const long w = read_int();
  const long h = read_int();
  const long maxval = read_int();
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) {
    throw DataError("unsupported PGM (8-bit only): " + path.string());
  }
  ++pos;  // single whitespace after maxval
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() < pos + n) throw DataError("truncated PGM data in " + path.string());
  std::vector<std::uint8_t> data(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                 bytes.begin() + static_cast<std::ptrdiff_t>(pos + n));
  if (maxval != 255) {
    for (auto& v : data) v = saturate_u8(255.0 * v / static_cast<double>(maxval));
  }
  return GrayImage(static_cast<int>(w), static_cast<int>(h), std::move(data));
}

GrayImage read_png(const fs::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    throw DataError("cannot decode PNG " + path.string() + ": " + image.message);
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw DataError("unsupported PNG (8-bit only): " + path.string());
  }
  const bool colour = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = colour ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int w = static_cast<int>(image.width);
  const int h = static_cast<int>(image.height);
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw DataError("cannot decode PNG " + path.string() + ": " + msg);
  }
  if (!colour) return GrayImage(w, h, std::move(buffer));
  GrayImage out(w, h);
  for (std::size_t i = 0; i < out.data().size(); ++i) {
    out.data()[i] = luma(buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]);
  }
  return out;
}

std::string lower_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

}  // namespace

GrayImage read_image(const fs::path& path) {
  const std::string ext = lower_extension(path);
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw IoError("cannot open " + path.string());
  if (ext == ".png") return read_png(path);
  if (ext == ".pgm") return read_pgm(path);
  throw DataError("unsupported image format: " + path.string());
}

void write_pgm(const GrayImage& img, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data().data()),
            static_cast<std::streamsize>(img.data().size()));
  if (!out) throw IoError("write failed: " + path.string());
}

void write_png(const GrayImage& img, const fs::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, img.data().data(), 0, nullptr)) {
    throw IoError("cannot write PNG " + path.string() + ": " + image.message);
  }
}

Sequence load_sequence(const fs::path& directory) {
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) {
    throw DataError("not a sequence directory: " + directory.string());
  }
  const fs::path gt_path = directory / kGroundTruthFile;
  if (!fs::exists(gt_path)) throw DataError("missing ground-truth file: " + gt_path.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = lower_extension(entry.path());
    if (ext == ".png" || ext == ".pgm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });

  std::vector<OrientedBox> boxes;
  try {
    boxes = parse_ground_truth(read_file(gt_path));
  } catch (const ParseError& e) {
    throw DataError(gt_path.string() + ": " + e.what());
  }
  if (boxes.size() != files.size()) {
    throw DataError(directory.string() + ": " + std::to_string(files.size()) +
                    " frames but " + std::to_string(boxes.size()) + " rows in " +
                    gt_path.string());
  }

  std::vector<GrayImage> frames;
  frames.reserve(files.size());
  for (const auto& f : files) frames.push_back(read_image(f));

  std::string name = directory.filename().string();
  if (name.empty()) name = directory.parent_path().filename().string();
  return Sequence(std::move(name), std::move(frames), std::move(boxes));
}

void save_sequence(const Sequence& seq, const fs::path& directory) {
  fs::create_directories(directory);
  char name[32];
  for (std::size_t i = 0; i < seq.size(); ++i) {
    std::snprintf(name, sizeof name, "frame_%04zu.pgm", i + 1);
    write_pgm(seq.frame(i), directory / name);
  }
  std::ofstream gt(directory / kGroundTruthFile);
  if (!gt) throw IoError("cannot write " + (directory / kGroundTruthFile).string());
  gt << serialize_ground_truth(seq.ground_truth());
}

// ---------------------------------------------------------------------------
// Synthetic sequences

namespace {

double lattice_value(std::uint64_t seed, std::int64_t i, std::int64_t j) {
  std::uint64_t h = seed;
  h = splitmix64(h ^ static_cast<std::uint64_t>(i) * 0x9E3779B97F4A7C15ull);
  h = splitmix64(h ^ static_cast<std::uint64_t>(j) * 0xC2B2AE3D27D4EB4Full);
  return static_cast<double>(h >> 11) * 0x1.0p-53 * 255.0;
}

/// Two-layer value noise: a piecewise-constant layer whose cell junctions
/// produce segment-test corners, plus a smooth layer for low-frequency shading.
class ValueNoise {
 public:
  ValueNoise(std::uint64_t seed, double block_cell, double smooth_cell)
      : seed_(seed), block_(block_cell), smooth_(smooth_cell) {}

  double operator()(double u, double v) const {
    const auto bi = static_cast<std::int64_t>(std::floor(u / block_));
    const auto bj = static_cast<std::int64_t>(std::floor(v / block_));
    const double blocky = lattice_value(seed_, bi, bj);

    const double su = u / smooth_;
    const double sv = v / smooth_;
    const auto si = static_cast<std::int64_t>(std::floor(su));
    const auto sj = static_cast<std::int64_t>(std::floor(sv));
    const double fu = smoothstep(su - static_cast<double>(si));
    const double fv = smoothstep(sv - static_cast<double>(sj));
    const std::uint64_t s2 = splitmix64(seed_ + 0x5bd1e995ull);
    const double a = lattice_value(s2, si, sj);
    const double b = lattice_value(s2, si + 1, sj);
    const double c = lattice_value(s2, si, sj + 1);
    const double d = lattice_value(s2, si + 1, sj + 1);
    const double smooth = (1 - fv) * ((1 - fu) * a + fu * b) + fv * ((1 - fu) * c + fu * d);
    return 0.75 * blocky + 0.25 * smooth;
  }

 private:
  static double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }
  std::uint64_t seed_;
  double block_;
  double smooth_;
};

}  // namespace

Sequence generate_synthetic(const SynthesisConfig& cfg) {
  if (cfg.frame_count < 2) throw std::invalid_argument("synthesis needs frame_count >= 2");
  if (cfg.motion.size() != cfg.frame_count) {
    throw std::invalid_argument("synthesis motion schedule must have one pose per frame");
  }
  if (!(cfg.noise_sigma >= 0.0)) throw std::invalid_argument("noise_sigma must be >= 0");
  if (cfg.width < 32 || cfg.height < 32) throw std::invalid_argument("synthetic frame too small");
  if (!(cfg.object_width > 0.0) || !(cfg.object_height > 0.0)) {
    throw std::invalid_argument("object size must be positive");
  }

  const double hw = 0.5 * cfg.object_width;
  const double hh = 0.5 * cfg.object_height;
  const OrientedBox local_box = OrientedBox::axis_aligned(-hw, -hh, hw, hh);

  std::vector<OrientedBox> truth;
  truth.reserve(cfg.frame_count);
  for (std::size_t f = 0; f < cfg.frame_count; ++f) {
    OrientedBox box = apply_transform(cfg.motion[f], local_box);
    for (const auto& p : box.vertices()) {
      if (!(p.x >= 0.0 && p.y >= 0.0 && p.x <= cfg.width - 1 && p.y <= cfg.height - 1)) {
        throw DataError("synthetic frame " + std::to_string(f + 1) +
                        ": object leaves the image");
      }
    }
    truth.push_back(box);
  }

  const ValueNoise object_tex(splitmix64(cfg.texture_seed), cfg.block_cell, cfg.smooth_cell);
  const ValueNoise background_tex(splitmix64(cfg.texture_seed ^ 0xB4C6F00Dull), cfg.block_cell,
                                  cfg.smooth_cell);

  // Object texels cover [-hw, hw] x [-hh, hh] with centres at half-integers.
  const int tw = static_cast<int>(std::ceil(cfg.object_width)) + 1;
  const int th = static_cast<int>(std::ceil(cfg.object_height)) + 1;
  GrayImage object_raster(tw, th);
  for (int j = 0; j < th; ++j) {
    for (int i = 0; i < tw; ++i) {
      object_raster.at(i, j) = saturate_u8(object_tex(i - hw, j - hh));
    }
  }
  GrayImage background(cfg.width, cfg.height);
  for (int y = 0; y < cfg.height; ++y) {
    for (int x = 0; x < cfg.width; ++x) background.at(x, y) = saturate_u8(background_tex(x, y));
  }

  std::vector<GrayImage> frames;
  frames.reserve(cfg.frame_count);
  for (std::size_t f = 0; f < cfg.frame_count; ++f) {
    const bool occluded = cfg.occlusion_frames && cfg.occlusion_frames->contains(f + 1);
    std::vector<double> canvas(static_cast<std::size_t>(cfg.width) * cfg.height);
    const SimilarityTransform to_local = cfg.motion[f].inverse();
    for (int y = 0; y < cfg.height; ++y) {
      for (int x = 0; x < cfg.width; ++x) {
        double value = background.at(x, y);
        if (!occluded) {
          const Point2 local = apply_transform(to_local, Point2{double(x), double(y)});
          if (std::abs(local.x) <= hw && std::abs(local.y) <= hh) {
            value = object_raster.bilinear(local.x + hw, local.y + hh);
          }
        }
        canvas[static_cast<std::size_t>(y) * cfg.width + x] = value;
      }
    }
    GrayImage frame(cfg.width, cfg.height);
    if (cfg.noise_sigma > 0.0) {
      GaussianSource noise(splitmix64(cfg.texture_seed * 0x100000001B3ull + f + 1));
      for (std::size_t i = 0; i < canvas.size(); ++i) {
        frame.data()[i] = saturate_u8(canvas[i] + cfg.noise_sigma * noise());
      }
    } else {
      for (std::size_t i = 0; i < canvas.size(); ++i) frame.data()[i] = saturate_u8(canvas[i]);
    }
    frames.push_back(std::move(frame));
  }
  return Sequence(cfg.name, std::move(frames), std::move(truth));
}

std::vector<std::string> synthesis_preset_names() { return {"translation", "rotscale", "occlusion"}; }

SynthesisConfig synthesis_preset(std::string_view preset, std::uint64_t seed,
                                 double resolution_scale) {
  if (!(resolution_scale > 0.0)) throw std::invalid_argument("resolution scale must be positive");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double s = resolution_scale;

  SynthesisConfig cfg;
  cfg.name = std::string(preset) + "-" + std::to_string(seed);
  cfg.width = static_cast<int>(std::lround(640 * s));
  cfg.height = static_cast<int>(std::lround(480 * s));
  cfg.object_width = 160.0 * s;
  cfg.object_height = 120.0 * s;
  cfg.block_cell = 8.0 * s;
  cfg.smooth_cell = 32.0 * s;
  cfg.texture_seed = seed;
  cfg.noise_sigma = 2.0;
  const Point2 centre{0.5 * (cfg.width - 1), 0.5 * (cfg.height - 1)};

  // Lissajous drift; peak speed 2.64 px/frame at full resolution.
  auto drift = [&](std::size_t f, double ax, double ay) {
    const double t = static_cast<double>(f);
    return Point2{centre.x + s * ax * std::sin(two_pi * t / 400.0),
                  centre.y + s * ay * std::sin(two_pi * t / 300.0)};
  };

  if (preset == "translation" || preset == "occlusion") {
    cfg.frame_count = preset == "translation" ? 200 : 100;
    for (std::size_t f = 0; f < cfg.frame_count; ++f) {
      cfg.motion.push_back(SimilarityTransform::make(1.0, 0.0, drift(f, 140.0, 70.0)));
    }
    if (preset == "occlusion") cfg.occlusion_frames = FrameRange{40, 49};
  } else if (preset == "rotscale") {
    cfg.frame_count = 120;
    for (std::size_t f = 0; f < cfg.frame_count; ++f) {
      const double t = static_cast<double>(f);
      const double rot = 0.4 * std::sin(two_pi * t / 120.0);
      const double scale = 1.0 + 0.2 * std::sin(two_pi * t / 90.0);
      cfg.motion.push_back(SimilarityTransform::make(scale, rot, drift(f, 60.0, 40.0)));
    }
  } else {
    std::string known;
    for (const auto& n : synthesis_preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown preset '" + std::string(preset) + "' (known: " + known +
                                ")");
  }
  return cfg;
}

}  // namespace desctrack
