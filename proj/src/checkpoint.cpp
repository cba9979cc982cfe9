#include "wildgan/checkpoint.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "wildgan/error.hpp"

namespace wildgan {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string blob_name(const std::string& tensor_name) {
  // tensor names are [A-Za-z0-9._-], safe as file names
  return "tensors/" + tensor_name + ".bin";
}

}  // namespace

void save_checkpoint(const std::string& dir, const CheckpointData& data) {
  const fs::path target(dir);
  const fs::path tmp = target.parent_path().empty()
                           ? fs::path(dir + ".tmp")
                           : target.parent_path() / (target.filename().string() + ".tmp");
  std::error_code ec;
  fs::remove_all(tmp, ec);
  fs::create_directories(tmp / "tensors");

  json manifest;
  manifest["format_version"] = data.format_version;
  manifest["kind"] = data.kind;
  manifest["arch"] = data.arch;
  json tensors = json::object();
  for (const auto& [name, t] : data.tensors) {
    const std::string rel = blob_name(name);
    std::ofstream blob(tmp / rel, std::ios::binary);
    if (!blob) throw IoError("cannot write checkpoint blob: " + (tmp / rel).string());
    const size_t bytes = t.data.size() * sizeof(float);
    blob.write(reinterpret_cast<const char*>(t.data.data()),
               static_cast<std::streamsize>(bytes));
    if (!blob) throw IoError("short write on checkpoint blob: " + (tmp / rel).string());
    blob.close();
    tensors[name] = {{"dtype", "f32"},
                     {"shape", t.shape},
                     {"file", rel},
                     {"bytes", bytes}};
  }
  manifest["tensors"] = tensors;
  {
    std::ofstream mf(tmp / "manifest.json");
    if (!mf) throw IoError("cannot write checkpoint manifest in " + tmp.string());
    mf << manifest.dump(2) << "\n";
  }
  fs::remove_all(target, ec);
  fs::rename(tmp, target);
}

CheckpointData load_checkpoint(const std::string& dir) {
  const fs::path root(dir);
  std::ifstream mf(root / "manifest.json");
  if (!mf) throw IoError("cannot open checkpoint manifest: " + (root / "manifest.json").string());
  json manifest;
  try {
    mf >> manifest;
  } catch (const json::exception& e) {
    throw ValidationError("bad checkpoint manifest in " + dir + ": " + e.what());
  }
  CheckpointData data;
  data.format_version = manifest.at("format_version").get<int>();
  if (data.format_version != 1)
    throw ValidationError("unsupported checkpoint format_version in " + dir);
  data.kind = manifest.at("kind").get<std::string>();
  data.arch = manifest.at("arch");
  for (const auto& [name, meta] : manifest.at("tensors").items()) {
    Tensor<float> t(meta.at("shape").get<std::vector<int>>());
    const size_t bytes = meta.at("bytes").get<size_t>();
    if (bytes != t.data.size() * sizeof(float))
      throw ValidationError("checkpoint tensor '" + name + "': manifest shape " +
                            t.shape_str() + " does not match byte length");
    std::ifstream blob(root / meta.at("file").get<std::string>(), std::ios::binary);
    if (!blob) throw IoError("cannot open checkpoint blob for tensor '" + name + "'");
    blob.read(reinterpret_cast<char*>(t.data.data()),
              static_cast<std::streamsize>(bytes));
    if (blob.gcount() != static_cast<std::streamsize>(bytes))
      throw IoError("short read on checkpoint blob for tensor '" + name + "'");
    data.tensors.emplace(name, std::move(t));
  }
  return data;
}

}  // namespace wildgan
