#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace smsearch {

enum ExitCode : int { kOk = 0, kConfigError = 2, kSoundnessViolation = 3, kHypothesisViolation = 4, kIoError = 5 };

struct RunOptions {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  bool dump_perception = false;
  bool dump_mpc = false;
  long snapshot_every = 0;  // steps; 0 = never
  bool quiet = false;
};

// Writes metrics.csv and manifest.json (plus optional dumps) into out_dir.
// Nothing is written when the config is rejected.
int run_one(const RunOptions& o, std::ostream& log);

// "3..7" or "4"
std::vector<std::uint64_t> parse_seed_range(const std::string& s);

// One sub-directory per seed, then aggregate.csv and manifest.json.
int run_batch(const std::string& config_path, const std::vector<std::uint64_t>& seeds, const std::string& out_dir,
              std::ostream& log);

}  // namespace smsearch
