#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <map>

#include <opencv2/core.hpp>
#include <opencv2/videoio.hpp>

#include "wildgan/annotations.hpp"
#include "wildgan/batching.hpp"
#include "wildgan/corpus.hpp"
#include "wildgan/error.hpp"
#include "wildgan/image.hpp"
#include "wildgan/rng.hpp"
#include "wildgan/video.hpp"

using namespace wildgan;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("wildgan_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ImageTensor random_image(int h, int w, int c, uint64_t seed) {
  Rng rng(seed);
  ImageTensor img(h, w, c);
  for (auto& v : img.data) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  return img;
}

}  // namespace

TEST_CASE("annotations: round-trip, ordering, validation") {
  const fs::path dir = temp_dir("ann");
  std::vector<Annotation> anns;
  Annotation a;
  a.image_id = "img0.png";
  a.width = 64;
  a.height = 48;
  a.objects.push_back({"car", {1, 2, 10, 12}});
  a.objects.push_back({"person", {20, 5, 30, 40}});
  anns.push_back(a);
  const std::string path = (dir / "ann.jsonl").string();
  save_annotations(path, anns);

  auto loaded = load_annotations(path);
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].image_id == "img0.png");
  REQUIRE(loaded[0].objects.size() == 2);
  CHECK(loaded[0].objects[0].class_label == "car");  // order preserved
  CHECK(loaded[0].objects[1].class_label == "person");
  CHECK(loaded[0].objects[1].bbox.xmax == 30);

  // serialize(load(x)) round-trips to the same parse
  const std::string path2 = (dir / "ann2.jsonl").string();
  save_annotations(path2, loaded);
  auto loaded2 = load_annotations(path2);
  CHECK(loaded2[0].objects[0].bbox.ymin == loaded[0].objects[0].bbox.ymin);

  // empty file -> empty list
  const std::string empty = (dir / "empty.jsonl").string();
  std::ofstream(empty).close();
  CHECK(load_annotations(empty).empty());

  // degenerate box rejected with image id in the message
  std::ofstream bad(dir / "bad.jsonl");
  bad << R"({"image":"x.png","width":10,"height":10,"objects":[{"class":"c","bbox":[3,1,3,5]}]})"
      << "\n";
  bad.close();
  CHECK_THROWS_WITH_AS(load_annotations((dir / "bad.jsonl").string()),
                       doctest::Contains("x.png"), ValidationError);

  // malformed line -> error naming the line number
  std::ofstream mal(dir / "mal.jsonl");
  mal << R"({"image":"a.png","width":10,"height":10,"objects":[]})" << "\n";
  mal << "{not json\n";
  mal.close();
  CHECK_THROWS_WITH_AS(load_annotations((dir / "mal.jsonl").string()),
                       doctest::Contains("line 2"), ValidationError);

  CHECK(class_vocabulary(loaded) == std::vector<std::string>{"car", "person"});
}

TEST_CASE("degrade: identity, dimensions, photometry oracle") {
  ImageTensor img = random_image(32, 32, 3, 11);

  // identity parameters -> bit-identical output
  DegradationParams ident;
  ident.seed = 9;
  ImageTensor out = degrade(img, ident);
  CHECK(out.data == img.data);

  // forced dimension arithmetic
  DegradationParams down;
  down.downscale_factor = 2.0;
  ImageTensor half = degrade(img, down);
  CHECK(half.height == 16);
  CHECK(half.width == 16);

  // hand-applied formula on a constant image: v=0, brightness 0.5 -> -0.5
  ImageTensor zeros(2, 2, 1);
  DegradationParams bright;
  bright.brightness_scale = 0.5;
  ImageTensor dimmed = degrade(zeros, bright);
  for (float v : dimmed.data) CHECK(v == doctest::Approx(-0.5).epsilon(1e-7));

  // zero output dimension
  DegradationParams huge;
  huge.downscale_factor = 100.0;
  CHECK_THROWS_AS(degrade(ImageTensor(8, 8, 1), huge), ValidationError);

  // parameter validation
  DegradationParams bad;
  bad.brightness_scale = 0.0;
  CHECK_THROWS_AS(degrade(img, bad), ValidationError);
}

TEST_CASE("degrade: determinism and range properties") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    ImageTensor img = random_image(5 + static_cast<int>(rng.uniform_int(20)),
                                   5 + static_cast<int>(rng.uniform_int(20)), 3,
                                   1000 + trial);
    DegradationParams p;
    p.downscale_factor = 1.0 + rng.uniform(0.0, 2.5);
    p.brightness_scale = rng.uniform(0.1, 1.0);
    p.noise_sigma = rng.uniform(0.0, 0.3);
    p.seed = rng.next_u64();
    ImageTensor a = degrade(img, p);
    ImageTensor b = degrade(img, p);
    CHECK(a.data == b.data);  // bit-identical
    for (float v : a.data) CHECK((v >= -1.0f && v <= 1.0f));
  }
}

TEST_CASE("area downscale matches hand computation") {
  // 2x2 -> 1x1 with factor 2: plain average
  ImageTensor img(2, 2, 1);
  img.at(0, 0, 0) = 0.1f;
  img.at(0, 1, 0) = 0.2f;
  img.at(1, 0, 0) = 0.3f;
  img.at(1, 1, 0) = 0.4f;
  ImageTensor out = downscale_area(img, 2.0);
  REQUIRE(out.height == 1);
  CHECK(out.at(0, 0, 0) == doctest::Approx(0.25).epsilon(1e-7));

  // fractional factor: 3 -> 2 pixels, boxes [0,1.5) and [1.5,3)
  ImageTensor row(1, 3, 1);
  row.at(0, 0, 0) = 0.0f;
  row.at(0, 1, 0) = 0.6f;
  row.at(0, 2, 0) = -0.6f;
  ImageTensor o2 = downscale_area(row, 1.5);
  REQUIRE(o2.width == 2);
  CHECK(o2.at(0, 0, 0) == doctest::Approx((0.0 + 0.5 * 0.6) / 1.5).epsilon(1e-7));
  CHECK(o2.at(0, 1, 0) == doctest::Approx((0.5 * 0.6 - 0.6) / 1.5).epsilon(1e-7));
}

TEST_CASE("batch iterator: coverage, partition, determinism") {
  // 72 images, batch 72 -> a single batch
  auto b1 = epoch_batches(72, 72, 1, true, 0);
  REQUIRE(b1.size() == 1);
  CHECK(b1[0].size() == 72);

  // forced partition 4,4,2
  auto b2 = epoch_batches(10, 4, 1, true, 0);
  REQUIRE(b2.size() == 3);
  CHECK(b2[0].size() == 4);
  CHECK(b2[2].size() == 2);

  // same (seed, epoch) twice -> identical order
  CHECK(epoch_batches(50, 7, 9, true, 3) == epoch_batches(50, 7, 9, true, 3));
  // different epoch -> different permutation (overwhelmingly)
  CHECK(epoch_batches(50, 7, 9, true, 3) != epoch_batches(50, 7, 9, true, 4));

  // multiset coverage property
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_int(100));
    const int bs = 1 + static_cast<int>(rng.uniform_int(20));
    auto batches = epoch_batches(n, bs, rng.next_u64(), true, trial);
    std::map<int, int> seen;
    for (const auto& b : batches)
      for (int i : b) seen[i]++;
    CHECK(static_cast<int>(seen.size()) == n);
    for (const auto& [k, v] : seen) {
      CHECK(v == 1);
      CHECK(k >= 0);
      CHECK(k < n);
    }
  }

  CHECK_THROWS_AS(epoch_batches(0, 4, 1, true, 0), ValidationError);
  CHECK_THROWS_AS(epoch_batches(10, 0, 1, true, 0), ValidationError);
}

TEST_CASE("png round-trip preserves 8-bit content") {
  const fs::path dir = temp_dir("png");
  ImageTensor img = random_image(20, 17, 3, 33);
  const std::string path = (dir / "a.png").string();
  save_png(path, img);
  ImageTensor back = load_png(path);
  REQUIRE(back.height == 20);
  REQUIRE(back.width == 17);
  // quantization error bounded by half a step
  for (size_t i = 0; i < img.data.size(); ++i)
    CHECK(std::abs(back.data[i] - img.data[i]) <= 0.5f / 127.5f + 1e-6f);
  // saving the loaded image again reproduces identical pixels
  const std::string path2 = (dir / "b.png").string();
  save_png(path2, back);
  CHECK(load_png(path2).data == back.data);
}

TEST_CASE("extract_frames stride arithmetic") {
  const fs::path dir = temp_dir("video");
  const std::string vid = (dir / "clip.avi").string();
  {
    // OpenCV's built-in MJPEG writer keeps the test self-contained
    cv::VideoWriter w(vid, cv::VideoWriter::fourcc('M', 'J', 'P', 'G'), 10.0,
                      cv::Size(32, 24));
    REQUIRE(w.isOpened());
    for (int i = 0; i < 10; ++i) {
      cv::Mat frame(24, 32, CV_8UC3, cv::Scalar(20 * i, 10, 10));
      w.write(frame);
    }
  }
  auto all = extract_frames(vid, 1);
  CHECK(all.size() == 10);
  CHECK(all[0].height == 24);
  CHECK(all[0].width == 32);
  for (float v : all[3].data) CHECK((v >= -1.0f && v <= 1.0f));

  auto strided = extract_frames(vid, 3);
  CHECK(strided.size() == 4);  // frames 0,3,6,9

  CHECK_THROWS_AS(extract_frames(vid, 0), ValidationError);
  CHECK_THROWS_AS(extract_frames((dir / "missing.avi").string(), 1), IoError);
}

TEST_CASE("synthetic corpus generators are deterministic") {
  ImageTensor a = make_shape_image(32, 2, 77);
  ImageTensor b = make_shape_image(32, 2, 77);
  CHECK(a.data == b.data);
  Annotation ann1, ann2;
  ImageTensor s1 = make_scene(64, 5, &ann1, "x");
  ImageTensor s2 = make_scene(64, 5, &ann2, "x");
  CHECK(s1.data == s2.data);
  REQUIRE(!ann1.objects.empty());
  CHECK(ann1.objects.size() == ann2.objects.size());
  // scene annotations are valid by construction
  for (const auto& o : ann1.objects) {
    CHECK(o.bbox.xmin >= 0);
    CHECK(o.bbox.xmax <= 64);
    CHECK(o.bbox.xmin < o.bbox.xmax);
  }
}
