#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace plap {

/// Shortest-round-trip style formatting used for all CSV output so that
/// re-running an experiment with the same inputs is byte-identical.
std::string format_double(double v);

/// RFC-4180 CSV writer (CRLF line ends, quoting only when needed).
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);

    void row(const std::vector<std::string>& fields);

    template <class... Ts>
    void row_values(Ts... vs) {
        row(std::vector<std::string>{format_double(static_cast<double>(vs))...});
    }

    void close();

private:
    std::ofstream out_;
};

}  // namespace plap
