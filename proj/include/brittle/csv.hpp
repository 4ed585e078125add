#pragma once

// CSV output contract shared by the CLI and the sweep drivers: one header
// row naming every column, floats serialized with 17 significant digits so
// files round-trip bit-exactly.

#include <string>
#include <vector>

namespace brittle {

std::string format_double(double x);  // %.17g

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

}  // namespace brittle
