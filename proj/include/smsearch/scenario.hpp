#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "smsearch/simkit.hpp"

namespace smsearch {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// FNV-1a 64 of the raw config text.
std::uint64_t config_digest(const std::string& text);
std::string hex64(std::uint64_t v);

std::string read_text(const std::string& path);
nlohmann::json parse_config(const std::string& text);

// Builds and validates the world for this seed. Unknown keys and
// validation failures are reported together in one ConfigError.
Scenario load_scenario(const nlohmann::json& cfg, std::uint64_t seed);

// Independent stream for one purpose of one run.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose);

}  // namespace smsearch
