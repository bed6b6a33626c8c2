#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nfcrb/types.hpp"

namespace nfcrb {

// Shortest round-trip decimal form of a double (locale-independent); parsing
// it back recovers the exact bits.
std::string format_double(double v);

// Minimal CSV writing: comma delimiter, '.' decimal separator, LF line
// endings, '#'-prefixed metadata lines before the header row.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}
  void comment(const std::string& key, const std::string& value);
  void header(const std::vector<std::string>& names);
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& os_;
};

struct CsvTable {
  std::vector<std::pair<std::string, std::string>> metadata;  // '#' key=value lines
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Parses CSV produced by CsvWriter (no quoting; fields never contain commas).
CsvTable parse_csv(std::istream& is);

}  // namespace nfcrb
