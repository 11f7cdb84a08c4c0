#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "deconv/signal_model.hpp"

namespace deconv {

// Rows of a CSV file; lines starting with '#' and blank lines are skipped.
// The first remaining line is returned as the header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

AtomicMeasure read_measure(std::istream& in);
AtomicMeasure read_measure_file(const std::string& path);
void write_measure(std::ostream& out, const AtomicMeasure& mu);

SampleSet read_samples(std::istream& in);
SampleSet read_samples_file(const std::string& path);
void write_samples(std::ostream& out, const SampleSet& S);

// Shortest representation that parses back to the same double.
std::string format_double(double x);

}  // namespace deconv
