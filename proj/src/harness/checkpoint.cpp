#include "roto/harness/checkpoint.hpp"

#include <filesystem>

namespace roto::harness {

void save_memory(numerics::TensorArchive& ar, const auxmem::AuxMemory& memory) {
  nlohmann::ordered_json flags = nlohmann::ordered_json::array();
  int i = 0;
  for (const auxmem::StoredRollout& s : memory.ring()) {
    const std::string p = "auxmem." + std::to_string(i++) + ".";
    ar.put(p + "obs", s.obs);
    ar.put(p + "actions", s.actions);
    numerics::Matrix done(static_cast<Eigen::Index>(s.done.size()), 1);
    for (size_t r = 0; r < s.done.size(); ++r) done(static_cast<Eigen::Index>(r), 0) = s.done[r];
    ar.put(p + "done", done);
    ar.put(p + "bootstrap_obs", s.bootstrap_obs);
    flags.push_back(s.continues_previous);
  }
  ar.meta()["auxmem"] = {{"capacity", memory.capacity()}, {"pushes", memory.pushes()}, {"continues", flags}};
}

void load_memory(const numerics::TensorArchive& ar, auxmem::AuxMemory& memory) {
  const auto& m = ar.meta().at("auxmem");
  if (m.at("capacity").get<int>() != memory.capacity()) {
    throw ConfigError("checkpoint memory capacity differs from the run configuration");
  }
  std::deque<auxmem::StoredRollout> ring;
  const auto& flags = m.at("continues");
  for (size_t i = 0; i < flags.size(); ++i) {
    const std::string p = "auxmem." + std::to_string(i) + ".";
    auxmem::StoredRollout s;
    s.obs = ar.get(p + "obs");
    s.actions = ar.get(p + "actions");
    const numerics::Matrix& done = ar.get(p + "done");
    s.done.resize(static_cast<size_t>(done.rows()));
    for (Eigen::Index r = 0; r < done.rows(); ++r) s.done[static_cast<size_t>(r)] = done(r, 0) != 0.0;
    s.bootstrap_obs = ar.get(p + "bootstrap_obs");
    s.continues_previous = flags[i].get<bool>();
    ring.push_back(std::move(s));
  }
  memory.restore(std::move(ring), m.at("pushes").get<int64_t>());
}

void check_checkpoint(const numerics::TensorArchive& ar, const RunConfig& cfg) {
  const auto& meta = ar.meta();
  if (!meta.contains("format") || meta.at("format").get<std::string>() != kCheckpointFormat) {
    throw ConfigError("not a training checkpoint");
  }
  const std::string stored = meta.at("config_hash").get<std::string>();
  const std::string expected = hash_hex(config_hash(cfg));
  if (stored != expected) {
    throw ConfigError("checkpoint config hash " + stored + " does not match run config " + expected);
  }
}

RunConfig checkpoint_config(const numerics::TensorArchive& ar) {
  if (!ar.meta().contains("config")) throw ConfigError("checkpoint has no embedded configuration");
  return parse_config(ar.meta().at("config").get<std::string>(), "<checkpoint>");
}

bool checkpoint_exists(const std::string& path) {
  return std::filesystem::exists(path + ".json") && std::filesystem::exists(path + ".bin");
}

}  // namespace roto::harness
