#pragma once

#include <istream>
#include <string>
#include <vector>

namespace cpsmine {

struct CsvRow {
    std::vector<std::string> fields;
    int line = 0;  // 1-based line of the row's first character
};

// RFC-4180 reader: quoted fields, embedded commas/quotes/newlines, CRLF.
// Blank lines are skipped. Throws CpsError("MalformedRow") on an unterminated
// quote or stray quote inside an unquoted field.
std::vector<CsvRow> read_csv(std::istream& in);

// Quotes a field only when it needs quoting.
std::string csv_escape(const std::string& field);

}  // namespace cpsmine
