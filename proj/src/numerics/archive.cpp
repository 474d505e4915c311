#include "roto/numerics/archive.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace roto::numerics {

static_assert(std::endian::native == std::endian::little, "archive assumes little-endian host");

void TensorArchive::put(const std::string& name, const Matrix& m) { tensors_[name] = m; }

const Matrix& TensorArchive::get(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw std::runtime_error("archive: missing tensor " + name);
  return it->second;
}

void TensorArchive::put_params(const std::string& prefix, const ParamSet& params) {
  auto names = params.tensor_names(prefix);
  auto ts = params.tensors();
  for (size_t i = 0; i < ts.size(); ++i) put(names[i], *ts[i]);
}

void TensorArchive::get_params(const std::string& prefix, ParamSet& params) const {
  auto names = params.tensor_names(prefix);
  auto ts = params.tensors();
  for (size_t i = 0; i < ts.size(); ++i) {
    const Matrix& src = get(names[i]);
    require_same_shape(*ts[i], src, names[i].c_str());
    *ts[i] = src;
  }
}

void TensorArchive::put_adam(const std::string& prefix, const AdamState& state) {
  meta_["adam"][prefix] = {{"step", state.step}, {"tensors", state.m.size()}};
  for (size_t i = 0; i < state.m.size(); ++i) {
    put(prefix + "m" + std::to_string(i), state.m[i]);
    put(prefix + "v" + std::to_string(i), state.v[i]);
  }
}

void TensorArchive::get_adam(const std::string& prefix, AdamState& state) const {
  const auto& info = meta_.at("adam").at(prefix);
  const size_t n = info.at("tensors").get<size_t>();
  if (n != state.m.size()) throw std::runtime_error("archive: adam state size mismatch " + prefix);
  state.step = info.at("step").get<int64_t>();
  for (size_t i = 0; i < n; ++i) {
    const Matrix& m = get(prefix + "m" + std::to_string(i));
    require_same_shape(state.m[i], m, "adam m");
    state.m[i] = m;
    state.v[i] = get(prefix + "v" + std::to_string(i));
  }
}

void TensorArchive::save(const std::string& path) const {
  nlohmann::ordered_json manifest;
  manifest["format"] = "roto-tensors-v1";
  manifest["meta"] = meta_;
  auto& list = manifest["tensors"];
  list = nlohmann::ordered_json::array();
  std::ofstream bin(path + ".bin", std::ios::binary | std::ios::trunc);
  if (!bin) throw std::runtime_error("archive: cannot write " + path + ".bin");
  size_t offset = 0;
  for (const auto& [name, m] : tensors_) {
    list.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}, {"offset", offset}});
    bin.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(m.size() * sizeof(double)));
    offset += static_cast<size_t>(m.size());
  }
  bin.flush();
  if (!bin) throw std::runtime_error("archive: write failed for " + path + ".bin");
  std::ofstream js(path + ".json", std::ios::trunc);
  if (!js) throw std::runtime_error("archive: cannot write " + path + ".json");
  js << manifest.dump(1) << "\n";
  js.flush();
  if (!js) throw std::runtime_error("archive: write failed for " + path + ".json");
}

TensorArchive TensorArchive::load(const std::string& path) {
  std::ifstream js(path + ".json");
  if (!js) throw std::runtime_error("archive: missing " + path + ".json");
  nlohmann::ordered_json manifest;
  try {
    js >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("archive: corrupt manifest " + path + ".json: " + e.what());
  }
  if (manifest.value("format", "") != "roto-tensors-v1") {
    throw std::runtime_error("archive: unknown format in " + path + ".json");
  }
  std::ifstream bin(path + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("archive: missing " + path + ".bin");
  std::vector<char> payload((std::istreambuf_iterator<char>(bin)), std::istreambuf_iterator<char>());
  TensorArchive ar;
  ar.meta_ = manifest.at("meta");
  for (const auto& t : manifest.at("tensors")) {
    const auto rows = t.at("rows").get<Eigen::Index>();
    const auto cols = t.at("cols").get<Eigen::Index>();
    const auto offset = t.at("offset").get<size_t>();
    const size_t bytes = static_cast<size_t>(rows * cols) * sizeof(double);
    if ((offset * sizeof(double)) + bytes > payload.size()) {
      throw std::runtime_error("archive: truncated payload in " + path + ".bin");
    }
    Matrix m(rows, cols);
    std::memcpy(m.data(), payload.data() + offset * sizeof(double), bytes);
    ar.tensors_[t.at("name").get<std::string>()] = std::move(m);
  }
  return ar;
}

}  // namespace roto::numerics
