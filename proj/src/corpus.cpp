#include "wildgan/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "json.hpp"
#include "wildgan/error.hpp"
#include "wildgan/rng.hpp"

namespace wildgan {

namespace fs = std::filesystem;

const std::vector<std::string>& shape_class_names() {
  static const std::vector<std::string> names{"circle", "cross", "square", "triangle"};
  return names;
}

DegradationParams wild_degradation(uint64_t seed) {
  DegradationParams p;
  p.downscale_factor = 2.0;
  p.brightness_scale = 0.35;
  p.noise_sigma = 0.02;
  p.seed = seed;
  return p;
}

namespace {

struct Shape {
  int class_id;
  int x0, y0, x1, y1;  // pixel bbox, [min, max)
  float color[3];
};

void fill_background(ImageTensor& img, Rng& rng) {
  float base[3], gx[3], gy[3];
  for (int c = 0; c < 3; ++c) {
    base[c] = static_cast<float>(rng.uniform(-0.6, -0.2));
    gx[c] = static_cast<float>(rng.uniform(-0.3, 0.3));
    gy[c] = static_cast<float>(rng.uniform(-0.3, 0.3));
  }
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const float fx = static_cast<float>(x) / img.width;
      const float fy = static_cast<float>(y) / img.height;
      for (int c = 0; c < 3; ++c) {
        float v = base[c] + gx[c] * fx + gy[c] * fy +
                  static_cast<float>(0.03 * rng.gaussian());
        img.at(y, x, c) = std::clamp(v, -1.0f, 1.0f);
      }
    }
}

bool inside_shape(const Shape& s, int x, int y) {
  const double cx = 0.5 * (s.x0 + s.x1 - 1), cy = 0.5 * (s.y0 + s.y1 - 1);
  const double rx = 0.5 * (s.x1 - s.x0), ry = 0.5 * (s.y1 - s.y0);
  switch (s.class_id) {
    case 0: {  // circle
      const double dx = (x - cx) / rx, dy = (y - cy) / ry;
      return dx * dx + dy * dy <= 1.0;
    }
    case 1: {  // cross: horizontal + vertical bars through the center
      const bool in_h = std::abs(y - cy) <= ry / 3.0;
      const bool in_v = std::abs(x - cx) <= rx / 3.0;
      return in_h || in_v;
    }
    case 2:  // square
      return true;
    case 3: {  // upward triangle
      const double t = (y - s.y0) / std::max(1.0, static_cast<double>(s.y1 - 1 - s.y0));
      const double half = t * rx;
      return std::abs(x - cx) <= half;
    }
    default:
      return false;
  }
}

void draw_shape(ImageTensor& img, const Shape& s, Rng& rng) {
  for (int y = std::max(0, s.y0); y < std::min(img.height, s.y1); ++y)
    for (int x = std::max(0, s.x0); x < std::min(img.width, s.x1); ++x) {
      if (!inside_shape(s, x, y)) continue;
      for (int c = 0; c < 3; ++c) {
        const float v = s.color[c] + static_cast<float>(0.02 * rng.gaussian());
        img.at(y, x, c) = std::clamp(v, -1.0f, 1.0f);
      }
    }
}

Shape random_shape(int img_size, int class_id, double min_frac, double max_frac,
                   Rng& rng) {
  static const float kHue[4][3] = {{-0.3f, 0.9f, -0.3f},   // circle: green
                                   {0.9f, 0.9f, -0.2f},    // cross: yellow
                                   {0.9f, -0.3f, -0.3f},   // square: red
                                   {-0.2f, 0.2f, 0.9f}};   // triangle: blue
  Shape s;
  s.class_id = class_id;
  const int side = std::max(
      4, static_cast<int>(std::lround(img_size * rng.uniform(min_frac, max_frac))));
  const int max_x0 = std::max(1, img_size - side - 1);
  s.x0 = 1 + static_cast<int>(rng.uniform_int(static_cast<uint64_t>(max_x0)));
  s.y0 = 1 + static_cast<int>(rng.uniform_int(static_cast<uint64_t>(max_x0)));
  s.x1 = s.x0 + side;
  s.y1 = s.y0 + side;
  for (int c = 0; c < 3; ++c)
    s.color[c] = std::clamp(
        kHue[class_id][c] + static_cast<float>(0.1 * rng.gaussian()), -1.0f, 1.0f);
  return s;
}

double box_iou_px(const Shape& a, const Shape& b) {
  const double ix = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  const double iy = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  if (ix <= 0 || iy <= 0) return 0;
  const double inter = ix * iy;
  const double ua = static_cast<double>(a.x1 - a.x0) * (a.y1 - a.y0) +
                    static_cast<double>(b.x1 - b.x0) * (b.y1 - b.y0) - inter;
  return inter / ua;
}

}  // namespace

ImageTensor make_shape_image(int size, int class_id, uint64_t seed) {
  Rng rng(seed);
  ImageTensor img(size, size, 3);
  fill_background(img, rng);
  Shape s = random_shape(size, class_id, 0.4, 0.75, rng);
  draw_shape(img, s, rng);
  return img;
}

ImageTensor make_scene(int size, uint64_t seed, Annotation* annotation,
                       const std::string& image_id) {
  Rng rng(seed);
  ImageTensor img(size, size, 3);
  fill_background(img, rng);
  Annotation ann;
  ann.image_id = image_id;
  ann.width = size;
  ann.height = size;
  const int want = 1 + static_cast<int>(rng.uniform_int(3));
  std::vector<Shape> placed;
  for (int k = 0; k < want; ++k) {
    const int cls = static_cast<int>(rng.uniform_int(4));
    bool ok = false;
    Shape s{};
    for (int attempt = 0; attempt < 20 && !ok; ++attempt) {
      s = random_shape(size, cls, 0.2, 0.45, rng);
      ok = true;
      for (const auto& other : placed)
        if (box_iou_px(s, other) > 0.05) ok = false;
    }
    if (!ok) continue;
    placed.push_back(s);
    draw_shape(img, s, rng);
    ann.objects.push_back({shape_class_names()[static_cast<size_t>(cls)],
                           {static_cast<double>(s.x0), static_cast<double>(s.y0),
                            static_cast<double>(s.x1), static_cast<double>(s.y1)}});
  }
  if (ann.objects.empty()) {
    // keep every scene annotated; a lone centered square is always placeable
    Shape s{2, size / 4, size / 4, size / 4 + size / 2, size / 4 + size / 2, {}};
    for (int c = 0; c < 3; ++c) s.color[c] = c == 0 ? 0.9f : -0.3f;
    draw_shape(img, s, rng);
    ann.objects.push_back({shape_class_names()[2],
                           {static_cast<double>(s.x0), static_cast<double>(s.y0),
                            static_cast<double>(s.x1), static_cast<double>(s.y1)}});
  }
  if (annotation) *annotation = std::move(ann);
  return img;
}

void make_corpus(const std::string& out_dir, const CorpusOptions& opts) {
  const fs::path root(out_dir);
  auto img_name = [](int i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "img_%05d.png", i);
    return std::string(buf);
  };

  if (opts.kind == "gan32") {
    const int count = opts.count > 0 ? opts.count : 1000;
    const int size = opts.size > 0 ? opts.size : 32;
    fs::create_directories(root / "images");
    std::ofstream labels(root / "labels.jsonl");
    if (!labels) throw IoError("cannot write labels.jsonl in " + out_dir);
    for (int i = 0; i < count; ++i) {
      const int cls = i % 4;
      ImageTensor img = make_shape_image(size, cls, mix_seed(opts.seed, 10'000 + i));
      save_png((root / "images" / img_name(i)).string(), img);
      nlohmann::json j{{"image", "images/" + img_name(i)},
                       {"class", shape_class_names()[static_cast<size_t>(cls)]}};
      labels << j.dump() << "\n";
    }
  } else if (opts.kind == "pairs") {
    const int count = opts.count > 0 ? opts.count : 600;
    const int size = opts.size > 0 ? opts.size : 64;
    fs::create_directories(root / "clean");
    fs::create_directories(root / "degraded");
    for (int i = 0; i < count; ++i) {
      ImageTensor clean = make_scene(size, mix_seed(opts.seed, 20'000 + i), nullptr, "");
      ImageTensor low = degrade(clean, wild_degradation(mix_seed(opts.seed, 30'000 + i)));
      save_png((root / "clean" / img_name(i)).string(), clean);
      save_png((root / "degraded" / img_name(i)).string(), low);
    }
  } else if (opts.kind == "scenes") {
    const int count = opts.count > 0 ? opts.count : 150;
    const int size = opts.size > 0 ? opts.size : 64;
    fs::create_directories(root / "images");
    std::vector<Annotation> anns;
    for (int i = 0; i < count; ++i) {
      Annotation ann;
      ImageTensor img = make_scene(size, mix_seed(opts.seed, 40'000 + i), &ann,
                                   "images/" + img_name(i));
      save_png((root / "images" / img_name(i)).string(), img);
      anns.push_back(std::move(ann));
    }
    save_annotations((root / "annotations.jsonl").string(), anns);
  } else if (opts.kind == "benchmark") {
    const int count = opts.count > 0 ? opts.count : 100;
    const int size = opts.size > 0 ? opts.size : 64;
    fs::create_directories(root / "frames");
    fs::create_directories(root / "clean");
    std::vector<Annotation> anns;
    for (int i = 0; i < count; ++i) {
      Annotation clean_ann;
      ImageTensor clean = make_scene(size, mix_seed(opts.seed, 50'000 + i), &clean_ann,
                                     "frames/" + img_name(i));
      const DegradationParams deg = wild_degradation(mix_seed(opts.seed, 60'000 + i));
      ImageTensor low = degrade(clean, deg);
      save_png((root / "clean" / img_name(i)).string(), clean);
      save_png((root / "frames" / img_name(i)).string(), low);
      // annotations follow the degraded frame geometry
      Annotation ann = clean_ann;
      ann.width = low.width;
      ann.height = low.height;
      const double fx = static_cast<double>(low.width) / clean.width;
      const double fy = static_cast<double>(low.height) / clean.height;
      for (auto& o : ann.objects) {
        o.bbox.xmin *= fx;
        o.bbox.xmax *= fx;
        o.bbox.ymin *= fy;
        o.bbox.ymax *= fy;
      }
      anns.push_back(std::move(ann));
    }
    save_annotations((root / "annotations.jsonl").string(), anns);
  } else {
    throw UsageError("make_corpus: unknown kind '" + opts.kind +
                     "' (gan32|pairs|scenes|benchmark)");
  }
}

LabeledCorpus load_labeled_corpus(const std::string& dir) {
  const fs::path root(dir);
  std::ifstream in(root / "labels.jsonl");
  if (!in) throw IoError("cannot open " + (root / "labels.jsonl").string());
  LabeledCorpus corpus;
  std::vector<std::string> raw_labels;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      corpus.images.push_back(load_png((root / j.at("image").get<std::string>()).string()));
      raw_labels.push_back(j.at("class").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("labels.jsonl line " + std::to_string(line_no) + ": " +
                            e.what());
    }
  }
  std::set<std::string> uniq(raw_labels.begin(), raw_labels.end());
  corpus.class_names.assign(uniq.begin(), uniq.end());
  for (const auto& l : raw_labels)
    corpus.labels.push_back(static_cast<int>(
        std::find(corpus.class_names.begin(), corpus.class_names.end(), l) -
        corpus.class_names.begin()));
  return corpus;
}

PairedCorpus load_paired_corpus(const std::string& dir) {
  const fs::path root(dir);
  if (!fs::is_directory(root / "degraded") || !fs::is_directory(root / "clean"))
    throw IoError("paired corpus needs degraded/ and clean/ under " + dir);
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(root / "degraded"))
    if (e.path().extension() == ".png") names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  if (names.empty()) throw ValidationError("paired corpus is empty: " + dir);
  PairedCorpus corpus;
  for (const auto& n : names) {
    corpus.degraded.push_back(load_png((root / "degraded" / n).string()));
    if (!fs::exists(root / "clean" / n))
      throw ValidationError("paired corpus: missing clean/" + n);
    corpus.clean.push_back(load_png((root / "clean" / n).string()));
  }
  return corpus;
}

AnnotatedCorpus load_annotated_corpus(const std::string& dir) {
  const fs::path root(dir);
  AnnotatedCorpus corpus;
  corpus.annotations = load_annotations((root / "annotations.jsonl").string());
  for (const auto& a : corpus.annotations)
    corpus.images.push_back(load_png((root / a.image_id).string()));
  return corpus;
}

}  // namespace wildgan
