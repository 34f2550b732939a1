#include "rdbp/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace rdbp {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os), ncols_(header.size()) {
    for (const auto& h : header) cell(h);
    end_row();
}

void CsvWriter::sep() {
    if (col_ == ncols_) throw std::logic_error("csv row too long");
    if (col_ > 0) os_ << ',';
    ++col_;
}

CsvWriter& CsvWriter::cell(double x) {
    sep();
    os_ << format_double(x);
    return *this;
}

CsvWriter& CsvWriter::cell(const std::optional<double>& x) {
    if (!x) return empty();
    return cell(*x);
}

CsvWriter& CsvWriter::cell(std::uint64_t x) {
    sep();
    os_ << x;
    return *this;
}

CsvWriter& CsvWriter::cell(int x) {
    sep();
    os_ << x;
    return *this;
}

CsvWriter& CsvWriter::cell(const std::string& s) {
    sep();
    os_ << s;
    return *this;
}

CsvWriter& CsvWriter::empty() {
    sep();
    return *this;
}

void CsvWriter::end_row() {
    while (col_ < ncols_) empty();
    os_ << '\n';
    col_ = 0;
}

}  // namespace rdbp
