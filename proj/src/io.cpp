#include "nfcrb/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace nfcrb {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void CsvWriter::comment(const std::string& key, const std::string& value) {
  os_ << "# " << key << "=" << value << "\n";
}

void CsvWriter::header(const std::vector<std::string>& names) {
  row(names);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) os_ << ",";
    os_ << fields[i];
  }
  os_ << "\n";
}

CsvTable parse_csv(std::istream& is) {
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      if (!body.empty() && body[0] == ' ') body.erase(0, 1);
      const size_t eq = body.find('=');
      if (eq != std::string::npos)
        table.metadata.emplace_back(body.substr(0, eq), body.substr(eq + 1));
      continue;
    }
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.emplace_back();
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  return table;
}

const char* to_string(CrbSource s) {
  switch (s) {
    case CrbSource::lemma1: return "lemma1";
    case CrbSource::lemma4: return "lemma4";
    case CrbSource::lemma5: return "lemma5";
    case CrbSource::lemma6: return "lemma6";
    case CrbSource::oracle_conditional: return "oracle_conditional";
    case CrbSource::oracle_unconditional: return "oracle_unconditional";
    case CrbSource::taylor_lemma2: return "taylor_lemma2";
    case CrbSource::approx_lemma3: return "approx_lemma3";
    case CrbSource::firstorder_sec43: return "firstorder_sec43";
  }
  throw std::logic_error("to_string(CrbSource): unknown tag");
}

}  // namespace nfcrb
