#pragma once

#include "hdrvqa/features.hpp"
#include "hdrvqa/svr.hpp"
#include "hdrvqa/video_io.hpp"

#include <map>
#include <string>
#include <vector>

namespace hdrvqa {

struct KnobSpec {
    std::string key;
    std::string default_value;
    std::string description;
};

/// Every tunable knob with its documented default. Paper-chosen values where
/// one exists (delta 4, window 17, chip extent 5).
const std::vector<KnobSpec> &config_schema();

/// Merged key=value configuration. Precedence: defaults < config/sidecar
/// file < HDRVQA_* environment < explicit set() calls (CLI flags).
class RunConfig {
  public:
    RunConfig();

    void apply_file(const std::string &path);
    void apply_env();
    void set(const std::string &key, const std::string &value);

    bool is_set(const std::string &key) const; // differs from "auto"/empty
    const std::string &get(const std::string &key) const;
    double get_double(const std::string &key) const;
    int get_int(const std::string &key) const;

    FeatureConfig feature_config() const;
    OpenParams open_params() const;
    SvrParams svr_params() const; // c resolves to 1.0 when "auto"
    bool svr_c_is_auto() const;
    uint64_t seed() const;
    int jobs() const;

  private:
    std::map<std::string, std::string> values_;
};

/// Parse a comma-separated tap list and normalize it to unit L2 norm.
std::vector<double> parse_taps(const std::string &csv);

} // namespace hdrvqa
