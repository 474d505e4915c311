#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "roto/numerics/matrix.hpp"
#include "roto/numerics/mlp.hpp"
#include "roto/numerics/optim.hpp"

namespace roto::numerics {

// Named tensors plus JSON metadata. Saved as <path>.json (manifest) and
// <path>.bin (little-endian float64 payload in manifest order).
class TensorArchive {
 public:
  void put(const std::string& name, const Matrix& m);
  const Matrix& get(const std::string& name) const;
  bool has(const std::string& name) const { return tensors_.count(name) > 0; }
  const std::map<std::string, Matrix>& tensors() const { return tensors_; }

  void put_params(const std::string& prefix, const ParamSet& params);
  void get_params(const std::string& prefix, ParamSet& params) const;
  void put_adam(const std::string& prefix, const AdamState& state);
  void get_adam(const std::string& prefix, AdamState& state) const;

  nlohmann::ordered_json& meta() { return meta_; }
  const nlohmann::ordered_json& meta() const { return meta_; }

  void save(const std::string& path) const;
  static TensorArchive load(const std::string& path);

 private:
  std::map<std::string, Matrix> tensors_;
  nlohmann::ordered_json meta_ = nlohmann::ordered_json::object();
};

}  // namespace roto::numerics
