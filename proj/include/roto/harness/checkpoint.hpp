#pragma once

#include <string>

#include "roto/auxmem/aux_memory.hpp"
#include "roto/harness/config.hpp"
#include "roto/numerics/archive.hpp"

namespace roto::harness {

inline constexpr const char* kCheckpointFormat = "roto-checkpoint-1";

void save_memory(numerics::TensorArchive& ar, const auxmem::AuxMemory& memory);
void load_memory(const numerics::TensorArchive& ar, auxmem::AuxMemory& memory);

// Checks the format tag and that the stored config hash matches `cfg`.
// Throws ConfigError otherwise.
void check_checkpoint(const numerics::TensorArchive& ar, const RunConfig& cfg);

// The run configuration embedded in a checkpoint.
RunConfig checkpoint_config(const numerics::TensorArchive& ar);

bool checkpoint_exists(const std::string& path);

}  // namespace roto::harness
