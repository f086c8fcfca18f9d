#include "cpsmine/csv.hpp"

#include "cpsmine/error.hpp"

namespace cpsmine {

std::vector<CsvRow> read_csv(std::istream& in) {
    std::vector<CsvRow> rows;
    std::string field;
    CsvRow row;
    int line = 1;
    row.line = 1;
    bool in_quotes = false;
    bool row_has_content = false;

    auto end_field = [&] {
        row.fields.push_back(field);
        field.clear();
    };
    auto end_row = [&] {
        if (row_has_content || !row.fields.empty()) {
            end_field();
            rows.push_back(std::move(row));
        }
        row = CsvRow{};
        row.line = line;
        row_has_content = false;
    };

    // tolerate a UTF-8 BOM in front of the header
    if (in.peek() == 0xEF) {
        char bom[3];
        in.read(bom, 3);
        if (in.gcount() != 3 || bom[1] != char(0xBB) || bom[2] != char(0xBF)) {
            for (int i = static_cast<int>(in.gcount()) - 1; i >= 0; --i) in.putback(bom[i]);
            in.clear();
        }
    }

    char c;
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty())
                    throw CpsError("MalformedRow",
                                   "line " + std::to_string(line) + ": quote inside unquoted field");
                in_quotes = true;
                row_has_content = true;
                break;
            case ',':
                end_field();
                row_has_content = true;
                break;
            case '\r':
                break;
            case '\n':
                ++line;
                end_row();
                break;
            default:
                field.push_back(c);
                row_has_content = true;
                break;
        }
    }
    if (in_quotes)
        throw CpsError("MalformedRow", "line " + std::to_string(line) + ": unterminated quoted field");
    end_row();  // final row without trailing newline
    return rows;
}

std::string csv_escape(const std::string& field) {
    bool needs = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace cpsmine
