#include "config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "deconv/errors.hpp"

namespace deconv::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const std::string t = trim(text);
  const char* first = t.data();
  if (!t.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ParseError("'" + key + "': not a number: '" + text + "'");
  }
  return v;
}

}  // namespace

std::string Config::get_string(const std::string& key, const std::string& def) const {
  const auto it = values_.find(key);
  return it == values_.end() ? def : it->second;
}

double Config::get_double(const std::string& key, double def) const {
  const auto it = values_.find(key);
  return it == values_.end() ? def : to_double(key, it->second);
}

long long Config::get_int(const std::string& key, long long def) const {
  if (!has(key)) return def;
  const double v = get_double(key, 0.0);
  if (v != std::floor(v)) throw ParseError("'" + key + "': expected an integer");
  return static_cast<long long>(v);
}

bool Config::get_bool(const std::string& key, bool def) const {
  if (!has(key)) return def;
  const std::string v = get_string(key, "");
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ParseError("'" + key + "': expected a boolean");
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::stringstream ss(text);
    std::string a, s, b;
    if (!std::getline(ss, a, ':') || !std::getline(ss, s, ':') || !std::getline(ss, b)) {
      throw ParseError("range must be lo:step:hi");
    }
    const double lo = to_double("range", a), step = to_double("range", s), hi = to_double("range", b);
    if (!(step > 0.0) || hi < lo) throw ParseError("range must have step > 0 and hi >= lo");
    const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
    for (long long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
  }
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!trim(cell).empty()) out.push_back(to_double("list", cell));
  }
  if (out.empty()) throw ParseError("empty list");
  return out;
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& def) const {
  if (!has(key)) return def;
  try {
    return parse_list(get_string(key, ""));
  } catch (const ParseError& e) {
    throw ParseError("'" + key + "': " + e.what());
  }
}

std::string Config::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [k, v] : values_) {
    if (k == "out" || k == "out_w") continue;  // output paths do not change results
    for (char c : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Config parse_config(std::istream& in) {
  Config cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError("config line " + std::to_string(lineno) + ": empty key");
    cfg.set(key, trim(line.substr(eq + 1)));
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config " + path);
  return parse_config(in);
}

void apply_overrides(Config& cfg, const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0 || a.size() < 3) throw ParseError("unexpected argument '" + a + "'");
    const std::string body = a.substr(2);
    const auto eq = body.find('=');
    if (eq != std::string::npos) {
      cfg.set(body.substr(0, eq), body.substr(eq + 1));
      continue;
    }
    if (i + 1 >= args.size()) throw ParseError("missing value for --" + body);
    cfg.set(body, args[++i]);
  }
}

}  // namespace deconv::cli
