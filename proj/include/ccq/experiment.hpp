#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "ccq/channel.hpp"

namespace ccq::io {

// Channel / distribution JSON documents. Doubles are emitted in shortest
// round-trip form, so read-after-write reproduces the exact values.
nlohmann::json cq_channel_to_json(const CqChannel& d);
CqChannel cq_channel_from_json(const nlohmann::json& doc);
nlohmann::json classical_channel_to_json(const ClassicalChannel& w);
ClassicalChannel classical_channel_from_json(const nlohmann::json& doc);
nlohmann::json distribution_to_json(const InputDistribution& p);
InputDistribution distribution_from_json(const nlohmann::json& doc);

// 17 significant digits: lossless decimal round-trip for doubles.
std::string format_g17(double value);

} // namespace ccq::io

namespace ccq::experiment {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> trials;
    std::optional<unsigned> threads;
};

std::string tool_version();

// FNV-1a of the canonical dump of the effective config (output path
// excluded), recorded in the run manifest.
std::uint64_t config_hash(const nlohmann::json& effective);

// Dispatches a validated config to the matching campaign, writes CSV + JSON
// artifacts and a manifest under the output directory. Returns the process
// exit status: 0 all assertions pass, 1 a theorem-bound assertion failed
// (witness on `log`), 2 configuration or runtime error.
int run(const std::string& kind, nlohmann::json config, const Overrides& overrides,
        std::ostream& log);

int run_file(const std::string& kind, const std::string& config_path, const Overrides& overrides,
             std::ostream& log);

} // namespace ccq::experiment
