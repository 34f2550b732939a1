#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace rdbp {

// 17 significant digits, enough to round-trip any double.
std::string format_double(double x);

class CsvWriter {
public:
    CsvWriter(std::ostream& os, const std::vector<std::string>& header);

    CsvWriter& cell(double x);
    CsvWriter& cell(const std::optional<double>& x);
    CsvWriter& cell(std::uint64_t x);
    CsvWriter& cell(int x);
    CsvWriter& cell(const std::string& s);
    CsvWriter& empty();
    void end_row();

private:
    void sep();
    std::ostream& os_;
    std::size_t ncols_;
    std::size_t col_ = 0;
};

}  // namespace rdbp
