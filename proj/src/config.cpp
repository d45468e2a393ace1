#include "hdrvqa/config.hpp"
#include "hdrvqa/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace hdrvqa {

const std::vector<KnobSpec> &config_schema() {
    static const std::vector<KnobSpec> schema = {
        {"nl.delta", "4", "expansion parameter of the piecewise-exponential nonlinearity"},
        {"nl.window", "17", "odd window size of the local [-1,1] mapping; 0 maps whole frames"},
        {"chips.t", "5", "temporal extent of a space-time chip volume (frames)"},
        {"chips.size", "5", "spatial side of a chip slice (pixels)"},
        {"chips.angles", "6", "candidate sweep directions, uniform over [0,pi)"},
        {"chips.taps", "-1,-2,0,2,1", "temporal decorrelation taps (normalized to unit L2)"},
        {"chips.kurtosis", "abs", "direction criterion: abs (|excess|) or signed minimum"},
        {"svr.c", "auto", "SVR regularization C; 'auto' selects by 5-fold cross-validation"},
        {"svr.eps", "0.1", "epsilon-insensitive tube width on z-scored targets"},
        {"gamut", "bt2020", "color matrix for the R'G'B' conversion: bt2020 or bt709"},
        {"range", "auto", "code range: limited, full, or auto (container default)"},
        {"width", "auto", "frame width for raw input"},
        {"height", "auto", "frame height for raw input"},
        {"bit_depth", "auto", "sample depth for raw input: 8 or 10"},
        {"layout", "auto", "chroma layout for raw input: 420 or 444"},
        {"seed", "7", "master seed for splits and SVR coordinate order"},
        {"jobs", "1", "worker threads for extraction and evaluation"},
        {"splits", "100", "train/test splits for the evaluation protocol"},
    };
    return schema;
}

RunConfig::RunConfig() {
    for (const KnobSpec &k : config_schema())
        values_[k.key] = k.default_value;
}

void RunConfig::apply_file(const std::string &path) {
    std::ifstream f(path);
    if (!f)
        throw DataError("cannot open config file " + path);
    std::string line;
    while (std::getline(f, line)) {
        size_t h = line.find('#');
        if (h != std::string::npos)
            line = line.substr(0, h);
        auto trim = [](std::string s) {
            size_t a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos)
                return std::string();
            size_t b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        std::string s = trim(line);
        if (s.empty())
            continue;
        size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw DataError(path + ": bad config line '" + s + "'");
        std::string key = trim(s.substr(0, eq));
        if (values_.count(key))
            values_[key] = trim(s.substr(eq + 1));
        // keys for other tools pass through silently
    }
}

void RunConfig::apply_env() {
    for (const KnobSpec &k : config_schema()) {
        std::string env = "HDRVQA_" + k.key;
        std::replace(env.begin(), env.end(), '.', '_');
        std::transform(env.begin(), env.end(), env.begin(), ::toupper);
        if (const char *v = std::getenv(env.c_str()))
            values_[k.key] = v;
    }
}

void RunConfig::set(const std::string &key, const std::string &value) {
    if (!values_.count(key))
        throw DataError("unknown config key '" + key + "'");
    values_[key] = value;
}

bool RunConfig::is_set(const std::string &key) const {
    const std::string &v = get(key);
    return !v.empty() && v != "auto";
}

const std::string &RunConfig::get(const std::string &key) const {
    auto it = values_.find(key);
    if (it == values_.end())
        throw DataError("unknown config key '" + key + "'");
    return it->second;
}

double RunConfig::get_double(const std::string &key) const {
    try {
        return std::stod(get(key));
    } catch (const std::exception &) {
        throw DataError("config key " + key + " is not numeric: '" + get(key) + "'");
    }
}

int RunConfig::get_int(const std::string &key) const {
    try {
        return std::stoi(get(key));
    } catch (const std::exception &) {
        throw DataError("config key " + key + " is not an integer: '" + get(key) + "'");
    }
}

std::vector<double> parse_taps(const std::string &csv) {
    std::vector<double> taps;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
        taps.push_back(std::stod(tok));
    if (taps.size() < 2)
        throw DataError("chips.taps needs at least 2 taps");
    double norm = 0.0, sum = 0.0;
    for (double t : taps) {
        norm += t * t;
        sum += t;
    }
    if (std::fabs(sum) > 1e-9)
        throw DataError("chips.taps must sum to zero");
    norm = std::sqrt(norm);
    if (norm <= 0.0)
        throw DataError("chips.taps must not be all zero");
    for (double &t : taps)
        t /= norm;
    return taps;
}

FeatureConfig RunConfig::feature_config() const {
    FeatureConfig cfg;
    cfg.nl.delta = get_double("nl.delta");
    cfg.nl.window = get_int("nl.window");
    if (cfg.nl.delta <= 0.0)
        throw DataError("nl.delta must be positive");
    if (cfg.nl.window != 0 && (cfg.nl.window < 3 || cfg.nl.window % 2 == 0))
        throw DataError("nl.window must be odd and >= 3 (or 0 for global)");
    cfg.chips.temporal_extent = get_int("chips.t");
    cfg.chips.chip_size = get_int("chips.size");
    cfg.chips.num_angles = get_int("chips.angles");
    const std::string &kurt = get("chips.kurtosis");
    if (kurt != "abs" && kurt != "signed")
        throw DataError("chips.kurtosis must be abs or signed");
    cfg.chips.abs_kurtosis = kurt == "abs";
    cfg.temporal_taps = parse_taps(get("chips.taps"));
    cfg.jobs = std::max(1, get_int("jobs"));
    return cfg;
}

OpenParams RunConfig::open_params() const {
    OpenParams p;
    if (is_set("width"))
        p.width = get_int("width");
    if (is_set("height"))
        p.height = get_int("height");
    if (is_set("bit_depth"))
        p.bit_depth = get_int("bit_depth");
    if (is_set("layout")) {
        const std::string &l = get("layout");
        if (l == "420")
            p.layout = PixLayout::Planar420;
        else if (l == "444")
            p.layout = PixLayout::Planar444;
        else
            throw DataError("layout must be 420 or 444");
    }
    if (is_set("range")) {
        const std::string &r = get("range");
        if (r == "limited")
            p.range = SampleRange::Limited;
        else if (r == "full")
            p.range = SampleRange::Full;
        else
            throw DataError("range must be limited, full, or auto");
    }
    const std::string &g = get("gamut");
    if (g == "bt2020")
        p.gamut = Gamut::Bt2020;
    else if (g == "bt709")
        p.gamut = Gamut::Bt709;
    else
        throw DataError("gamut must be bt2020 or bt709");
    return p;
}

SvrParams RunConfig::svr_params() const {
    SvrParams p;
    p.c = svr_c_is_auto() ? 1.0 : get_double("svr.c");
    if (p.c <= 0.0)
        throw DataError("svr.c must be positive");
    p.epsilon = get_double("svr.eps");
    if (p.epsilon < 0.0)
        throw DataError("svr.eps must be non-negative");
    p.seed = seed();
    return p;
}

bool RunConfig::svr_c_is_auto() const { return get("svr.c") == "auto"; }

uint64_t RunConfig::seed() const {
    return static_cast<uint64_t>(std::stoull(get("seed")));
}

int RunConfig::jobs() const { return std::max(1, get_int("jobs")); }

} // namespace hdrvqa
