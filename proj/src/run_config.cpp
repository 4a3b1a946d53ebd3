#include "amm/run_config.hpp"

#include "amm/errors.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace amm {

namespace {

constexpr std::array<const char*, 12> kKeys = {"dist",  "d",   "lambda", "c",     "menu_size", "temp",
                                               "lr",    "batch", "steps", "seed", "grid",      "out"};

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_integer(const std::string& key, const std::string& text) {
    T value{};
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) throw ValidationError("config key '" + key + "': not an integer: " + text);
    return value;
}

}  // namespace

double parse_real(const std::string& text) {
    const std::string t = trim(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw ValidationError("not a number: '" + text + "'");
    }
    if (used != t.size()) throw ValidationError("not a number: '" + text + "'");
    return v;
}

std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(item));
    if (out.empty()) throw ValidationError("empty list");
    return out;
}

bool RunConfig::is_known_key(const std::string& key) {
    for (const char* k : kKeys) {
        if (key == k) return true;
    }
    return false;
}

RunConfig RunConfig::parse(std::istream& in) {
    RunConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(line_no) + ": expected key=value");
        }
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file " + path.string());
    return parse(in);
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (!is_known_key(key)) throw ValidationError("unknown config key '" + key + "'");
    values_[key] = value;
}

void RunConfig::merge(const RunConfig& overrides) {
    for (const auto& [k, v] : overrides.values_) values_[k] = v;
}

std::optional<std::string> RunConfig::raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
    return raw(key).value_or(fallback);
}

double RunConfig::get_double(const std::string& key, double fallback) const {
    const auto v = raw(key);
    if (!v) return fallback;
    try {
        return parse_real(*v);
    } catch (const ValidationError&) {
        throw ValidationError("config key '" + key + "': not a number: " + *v);
    }
}

std::size_t RunConfig::get_size(const std::string& key, std::size_t fallback) const {
    const auto v = raw(key);
    return v ? parse_integer<std::size_t>(key, *v) : fallback;
}

std::uint64_t RunConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
    const auto v = raw(key);
    return v ? parse_integer<std::uint64_t>(key, *v) : fallback;
}

std::vector<double> RunConfig::get_vector(const std::string& key, const std::vector<double>& fallback) const {
    const auto v = raw(key);
    if (!v) return fallback;
    try {
        return parse_real_list(*v);
    } catch (const ValidationError&) {
        throw ValidationError("config key '" + key + "': expected comma-separated numbers: " + *v);
    }
}

}  // namespace amm
