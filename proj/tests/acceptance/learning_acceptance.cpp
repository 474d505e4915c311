// Learning smoke tests: trains the shipped experiment configs for three seeds
// each and checks the outcome thresholds. Runs live under the directory given
// as argv[1] (or ROTO_LEARNING_DIR) and resume from their latest checkpoint,
// so an interrupted invocation picks up where it stopped.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "roto/harness/config.hpp"
#include "roto/harness/evaluation.hpp"
#include "roto/harness/trainer.hpp"
#include "roto/numerics/rng.hpp"

namespace {

namespace fs = std::filesystem;
namespace harness = roto::harness;

// Pinned thresholds and budgets.
constexpr double kFindReached = 0.5;       // mean eval r_dist per step
constexpr int kFindSeedsNeeded = 2;
constexpr double kFindMinutes = 30.0;
constexpr double kRunMinutes = 60.0;
constexpr double kRotationsNeeded = 1.0;   // mean completed rotations per eval episode
constexpr int kFinalEnvs = 16;
constexpr int kFinalEpisodes = 64;
const std::vector<uint64_t> kSeeds = {0, 1, 2};

// Desk-scale network sizes used for every learning run.
void desk_scale(harness::RunConfig& cfg) {
  cfg.agent.encoder_hidden = {256, 128, 64};
  cfg.agent.policy_hidden = {128, 64};
  cfg.agent.value_hidden = {128, 64};
  cfg.aux.decoder_hidden = {128, 128};
  cfg.aux.forward_hidden = {128, 64};
  cfg.aux.projector_hidden = {64};
}

struct RunResult {
  std::string name;
  uint64_t seed = 0;
  double minutes = 0.0;
  harness::EvalReport eval;
};

RunResult train(const fs::path& root, const std::string& config, uint64_t seed) {
  harness::RunConfig cfg = harness::load_config((fs::path(ROTO_SOURCE_DIR) / "configs" / (config + ".toml")).string());
  desk_scale(cfg);
  cfg.seed = seed;
  cfg.name = config + "_s" + std::to_string(seed);
  cfg.out_dir = (root / cfg.name).string();
  cfg.finalize();
  harness::Trainer trainer(cfg);
  std::printf("  training %s (%lld steps)\n", cfg.name.c_str(), static_cast<long long>(cfg.total_steps));
  std::fflush(stdout);
  trainer.run();
  RunResult r;
  r.name = cfg.name;
  r.seed = seed;
  r.minutes = trainer.wall_time() / 60.0;
  r.eval = harness::evaluate(trainer.agent(), cfg.env, kFinalEnvs, kFinalEpisodes,
                             roto::numerics::mix_seed(seed, 2000003));
  std::printf("  %s: %.1f min, eval %s mean %.3f median %.3f max %.3f, return %.2f\n", r.name.c_str(), r.minutes,
              harness::physical_metric_name(cfg.env.env_id).c_str(), r.eval.physical_mean, r.eval.physical_median,
              r.eval.physical_max, r.eval.return_mean);
  std::fflush(stdout);
  return r;
}

std::vector<RunResult> train_seeds(const fs::path& root, const std::string& config) {
  std::vector<RunResult> out;
  for (uint64_t s : kSeeds) out.push_back(train(root, config, s));
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double slowest(const std::vector<RunResult>& runs) {
  double m = 0.0;
  for (const auto& r : runs) m = std::max(m, r.minutes);
  return m;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

bool report(const char* id, const char* title, bool pass, const std::string& detail) {
  std::printf("%s criterion %s: %s | %s\n", pass ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  return pass;
}

bool criterion_find(const fs::path& root) {
  const auto runs = train_seeds(root, "find2d_rl_prop_tact");
  int reached = 0;
  std::ostringstream os;
  for (const auto& r : runs) {
    reached += r.eval.physical_mean >= kFindReached;
    os << "seed " << r.seed << ' ' << fmt("%.3f", r.eval.physical_mean) << "; ";
  }
  const bool fast = slowest(runs) <= kFindMinutes;
  os << reached << "/3 seeds >= " << kFindReached << ", slowest run " << fmt("%.1f", slowest(runs)) << " min";
  return report("8a", "find2d reaches the object", reached >= kFindSeedsNeeded && fast, os.str());
}

bool criterion_bounce(const fs::path& root) {
  std::map<std::string, double> med;
  double slow = 0.0;
  std::ostringstream os;
  for (const char* name : {"bounce2d_rl_prop", "bounce2d_rl_prop_tact", "bounce2d_fd"}) {
    const auto runs = train_seeds(root, name);
    std::vector<double> per_seed;
    for (const auto& r : runs) per_seed.push_back(r.eval.physical_mean);
    med[name] = median(per_seed);
    slow = std::max(slow, slowest(runs));
    os << name << " median bounces " << fmt("%.2f", med[name]) << "; ";
  }
  const bool tactile_helps = med["bounce2d_rl_prop_tact"] > med["bounce2d_rl_prop"];
  const bool fd_helps = med["bounce2d_fd"] >= med["bounce2d_rl_prop_tact"];
  os << "tactile > prop: " << (tactile_helps ? "yes" : "no") << ", fd >= rl: " << (fd_helps ? "yes" : "no")
     << ", slowest run " << fmt("%.1f", slow) << " min";
  return report("8b", "bounce2d directional ordering", tactile_helps && fd_helps && slow <= kRunMinutes, os.str());
}

bool criterion_orbit(const fs::path& root) {
  std::map<std::string, int> seeds_rotating;
  double slow = 0.0;
  std::ostringstream os;
  for (const char* name : {"orbit2d_rl_prop_tact", "orbit2d_fd_memory"}) {
    const auto runs = train_seeds(root, name);
    int n = 0;
    os << name << " rotations";
    for (const auto& r : runs) {
      n += r.eval.physical_mean >= kRotationsNeeded;
      os << ' ' << fmt("%.2f", r.eval.physical_mean);
    }
    seeds_rotating[name] = n;
    slow = std::max(slow, slowest(runs));
    os << " (" << n << "/3 seeds); ";
  }
  const bool more = seeds_rotating["orbit2d_fd_memory"] > seeds_rotating["orbit2d_rl_prop_tact"];
  os << "slowest run " << fmt("%.1f", slow) << " min";
  return report("8c", "orbit2d rotations with FD and memory", more && slow <= kRunMinutes, os.str());
}

}  // namespace

int main(int argc, char** argv) {
  const char* env_dir = std::getenv("ROTO_LEARNING_DIR");
  const fs::path root = argc > 1 ? fs::path(argv[1]) : env_dir ? fs::path(env_dir) : fs::path("learning_runs");
  fs::create_directories(root);
  std::printf("learning runs under %s\n", fs::absolute(root).string().c_str());
  int failed = 0;
  failed += !criterion_find(root);
  failed += !criterion_bounce(root);
  failed += !criterion_orbit(root);
  return failed == 0 ? 0 : 1;
}
