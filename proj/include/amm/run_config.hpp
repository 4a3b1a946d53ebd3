#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace amm {

// Flat `key=value` settings, `#` starts a comment. Keys are restricted to
// dist, d, lambda, c, menu_size, temp, lr, batch, steps, seed, grid, out.
class RunConfig {
public:
    static RunConfig parse(std::istream& in);
    static RunConfig from_file(const std::filesystem::path& path);

    static bool is_known_key(const std::string& key);

    void set(const std::string& key, const std::string& value);
    // Entries of `overrides` replace entries here.
    void merge(const RunConfig& overrides);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::optional<std::string> raw(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::size_t get_size(const std::string& key, std::size_t fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    // Comma-separated reals; fallback when absent.
    std::vector<double> get_vector(const std::string& key, const std::vector<double>& fallback) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

std::vector<double> parse_real_list(const std::string& text);
double parse_real(const std::string& text);

}  // namespace amm
