#include "deconv/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "deconv/errors.hpp"

namespace deconv {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t line) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (s.empty() || res.ec != std::errc() || res.ptr != last) {
    throw ParseError("line " + std::to_string(line) + ": not a number: '" + s + "'");
  }
  return v;
}

int column(const CsvTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    auto cells = split(s);
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw ParseError("line " + std::to_string(lineno) + ": expected " +
                       std::to_string(t.header.size()) + " fields");
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_number(c, lineno));
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw ParseError("missing CSV header");
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_csv(in);
}

AtomicMeasure read_measure(std::istream& in) {
  const CsvTable t = read_csv(in);
  const int loc = column(t, "location"), amp = column(t, "amplitude");
  if (loc < 0 || amp < 0) throw ParseError("measure CSV needs location,amplitude columns");
  std::vector<Spike> spikes;
  for (const auto& r : t.rows) spikes.push_back({r[static_cast<std::size_t>(loc)], r[static_cast<std::size_t>(amp)]});
  try {
    return AtomicMeasure(std::move(spikes));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

AtomicMeasure read_measure_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_measure(in);
}

void write_measure(std::ostream& out, const AtomicMeasure& mu) {
  out << "location,amplitude\n";
  for (const auto& s : mu.spikes()) out << format_double(s.location) << ',' << format_double(s.amplitude) << '\n';
}

SampleSet read_samples(std::istream& in) {
  const CsvTable t = read_csv(in);
  const int loc = column(t, "location"), noise = column(t, "is_noise");
  if (loc < 0) throw ParseError("sample CSV needs a location column");
  std::vector<double> s;
  std::vector<std::size_t> n;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    s.push_back(t.rows[i][static_cast<std::size_t>(loc)]);
    if (noise >= 0 && t.rows[i][static_cast<std::size_t>(noise)] != 0.0) n.push_back(i);
  }
  try {
    return SampleSet(std::move(s), std::move(n));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

SampleSet read_samples_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_samples(in);
}

void write_samples(std::ostream& out, const SampleSet& S) {
  const bool noisy = !S.noise_indices().empty();
  out << (noisy ? "location,is_noise\n" : "location\n");
  for (std::size_t i = 0; i < S.size(); ++i) {
    out << format_double(S[i]);
    if (noisy) out << ',' << (S.is_noise(i) ? 1 : 0);
    out << '\n';
  }
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace deconv
