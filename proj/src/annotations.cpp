#include "wildgan/annotations.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "wildgan/error.hpp"

namespace wildgan {

using nlohmann::json;

namespace {

void validate_annotation(const Annotation& a) {
  if (a.width < 1 || a.height < 1)
    throw ValidationError("annotation '" + a.image_id + "': non-positive image size");
  for (const auto& obj : a.objects) {
    const PixelBox& b = obj.bbox;
    if (!(b.xmin >= 0 && b.xmin < b.xmax && b.xmax <= a.width) ||
        !(b.ymin >= 0 && b.ymin < b.ymax && b.ymax <= a.height))
      throw ValidationError("annotation '" + a.image_id + "': box [" +
                            std::to_string(b.xmin) + "," + std::to_string(b.ymin) + "," +
                            std::to_string(b.xmax) + "," + std::to_string(b.ymax) +
                            "] violates 0 <= min < max <= size");
    if (obj.class_label.empty())
      throw ValidationError("annotation '" + a.image_id + "': empty class label");
  }
}

}  // namespace

std::vector<Annotation> load_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open annotation file: " + path);
  std::vector<Annotation> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ValidationError("annotation parse error at line " + std::to_string(line_no) +
                            ": " + e.what());
    }
    Annotation a;
    try {
      a.image_id = j.at("image").get<std::string>();
      a.width = j.at("width").get<int>();
      a.height = j.at("height").get<int>();
      for (const auto& o : j.at("objects")) {
        AnnotatedObject obj;
        obj.class_label = o.at("class").get<std::string>();
        const auto& bb = o.at("bbox");
        if (!bb.is_array() || bb.size() != 4)
          throw ValidationError("bbox must be [xmin,ymin,xmax,ymax]");
        obj.bbox = {bb[0].get<double>(), bb[1].get<double>(), bb[2].get<double>(),
                    bb[3].get<double>()};
        a.objects.push_back(std::move(obj));
      }
    } catch (const json::exception& e) {
      throw ValidationError("annotation field error at line " + std::to_string(line_no) +
                            ": " + e.what());
    }
    validate_annotation(a);
    out.push_back(std::move(a));
  }
  return out;
}

void save_annotations(const std::string& path, const std::vector<Annotation>& anns) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write annotation file: " + path);
  for (const auto& a : anns) {
    validate_annotation(a);
    json objs = json::array();
    for (const auto& o : a.objects)
      objs.push_back({{"class", o.class_label},
                      {"bbox", {o.bbox.xmin, o.bbox.ymin, o.bbox.xmax, o.bbox.ymax}}});
    json j{{"image", a.image_id}, {"width", a.width}, {"height", a.height},
           {"objects", objs}};
    out << j.dump() << "\n";
  }
}

std::vector<std::string> class_vocabulary(const std::vector<Annotation>& anns) {
  std::set<std::string> labels;
  for (const auto& a : anns)
    for (const auto& o : a.objects) labels.insert(o.class_label);
  return {labels.begin(), labels.end()};
}

}  // namespace wildgan
