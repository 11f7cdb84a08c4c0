#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace deconv::cli {

// Flat key=value settings. Later sources override earlier ones.
class Config {
 public:
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get_string(const std::string& key, const std::string& def) const;
  double get_double(const std::string& key, double def) const;
  long long get_int(const std::string& key, long long def) const;
  bool get_bool(const std::string& key, bool def) const;
  // Comma-separated numbers, or lo:step:hi (inclusive up to rounding).
  std::vector<double> get_list(const std::string& key, const std::vector<double>& def) const;

  // FNV-1a over the sorted key=value lines, as 16 hex digits.
  std::string hash() const;

 private:
  std::map<std::string, std::string> values_;
};

// Lines `key = value`; '#' starts a comment. Throws ParseError.
Config parse_config(std::istream& in);
Config load_config(const std::string& path);

// Applies `--key value` or `--key=value` pairs. Throws ParseError on a
// dangling key or a token that is not a flag.
void apply_overrides(Config& cfg, const std::vector<std::string>& args);

std::vector<double> parse_list(const std::string& text);

}  // namespace deconv::cli
