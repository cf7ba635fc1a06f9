#include "plap/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace plap {

std::string format_double(double v) {
    char buf[40];
    // %.17g round-trips; trim to the shortest representation that still does
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        const std::string& f = fields[i];
        const bool needs_quote = f.find_first_of(",\"\r\n") != std::string::npos;
        if (!needs_quote) {
            out_ << f;
        } else {
            out_ << '"';
            for (char c : f) {
                if (c == '"') out_ << '"';
                out_ << c;
            }
            out_ << '"';
        }
    }
    out_ << "\r\n";
}

void CsvWriter::close() {
    if (out_.is_open()) out_.close();
}

}  // namespace plap
