#include "krigesense_cli/csv.hpp"

#include <fmt/format.h>

#include <stdexcept>

namespace krigesense::cli {

std::string csv_escape(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(text);
  }
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') {
      quoted += '"';
    }
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string format_double(double value) { return fmt::format("{:.17g}", value); }

CsvWriter::CsvWriter(std::initializer_list<std::string_view> header) : columns_(header.size()) {
  for (std::string_view h : header) {
    field(h);
  }
  end_row();
  rows_ = 0;
}

CsvWriter& CsvWriter::field(std::string_view text) {
  if (pending_ == columns_) {
    throw std::logic_error("csv: too many fields in row");
  }
  if (pending_ > 0) {
    text_ += ',';
  }
  text_ += csv_escape(text);
  ++pending_;
  return *this;
}

CsvWriter& CsvWriter::field(double value) { return field(std::string_view(format_double(value))); }

CsvWriter& CsvWriter::field(std::size_t value) { return field(std::string_view(fmt::format("{}", value))); }

CsvWriter& CsvWriter::empty() { return field(std::string_view()); }

void CsvWriter::end_row() {
  if (pending_ != columns_) {
    throw std::logic_error("csv: row has the wrong number of fields");
  }
  text_ += "\r\n";
  pending_ = 0;
  ++rows_;
}

}  // namespace krigesense::cli
