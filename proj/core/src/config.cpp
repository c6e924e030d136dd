#include "hlsrepair/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hlsrepair {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw std::runtime_error("config: bad boolean for '" + key + "': " + v);
}

}  // namespace

void Config::apply_line(const std::string& key, const std::string& raw_value) {
    std::string value = unquote(trim(raw_value));
    if (key == "mode") {
        mode = value;
    } else if (key == "endpoint_host") {
        live.host = value;
    } else if (key == "endpoint_port") {
        live.port = std::stoi(value);
    } else if (key == "endpoint_path") {
        live.path = value;
    } else if (key == "api_key") {
        live.api_key = value;
    } else if (key == "model") {
        live.model = value;
    } else if (key == "max_retries") {
        live.max_retries = std::stoi(value);
    } else if (key == "cassette") {
        cassette = value;
    } else if (key == "rag") {
        rag = parse_bool(value, key);
    } else if (key == "scripts") {
        scripts = parse_bool(value, key);
    } else if (key == "detect_extra") {
        detect_extra = parse_bool(value, key);
    } else if (key == "query_budget") {
        query_budget = std::stoi(value);
    } else if (key == "context_budget") {
        context_budget = static_cast<size_t>(std::stoull(value));
    } else if (key == "price_input_per_1k") {
        pricing.per_1k_input = llm::Pricing::parse_decimal(value);
    } else if (key == "price_output_per_1k") {
        pricing.per_1k_output = llm::Pricing::parse_decimal(value);
    } else if (key == "library") {
        library_dir = value;
    } else if (key == "strategies") {
        strategy_dir = value;
    } else if (key == "dataset") {
        dataset = value;
    } else if (key == "bottleneck_report") {
        bottleneck_report = value;
    } else if (key == "compile_cmd") {
        compile_cmd = value;
    } else if (key == "skip_pass") {
        std::istringstream in(value);
        std::string item;
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (!item.empty()) skip_passes.insert(item);
        }
    } else if (key == "guard_bit") {
        bitwidth_policy = parse_bool(value, key) ? bitwidth::HeadroomPolicy::GuardBit
                                                 : bitwidth::HeadroomPolicy::None;
    } else if (key == "seed_base") {
        seed_base = static_cast<unsigned>(std::stoul(value));
    } else if (key == "parallelism") {
        parallelism = std::stoi(value);
    } else {
        throw std::runtime_error("config: unknown key '" + key + "'");
    }
}

void Config::validate() const {
    if (mode != "live" && mode != "record" && mode != "replay" && mode != "oracle")
        throw std::runtime_error("config: mode must be live|record|replay|oracle, got '" +
                                 mode + "'");
    if ((mode == "replay" || mode == "record") && cassette.empty())
        throw std::runtime_error("config: mode '" + mode + "' requires a cassette path");
    if (mode == "live" && live.host.empty())
        throw std::runtime_error("config: live mode requires endpoint_host");
    if (query_budget < 0) throw std::runtime_error("config: query_budget must be >= 0");
    if (parallelism < 1) throw std::runtime_error("config: parallelism must be >= 1");
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == '[') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: line " + std::to_string(lineno) +
                                     " is not key = value");
        cfg.apply_line(trim(t.substr(0, eq)), t.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

}  // namespace hlsrepair
