#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace krigesense::cli {

// RFC 4180 writer: CRLF line ends, fields quoted only when needed.
class CsvWriter {
 public:
  explicit CsvWriter(std::initializer_list<std::string_view> header);

  CsvWriter& field(std::string_view text);
  CsvWriter& field(double value);  // %.17g, so values round-trip
  CsvWriter& field(std::size_t value);
  CsvWriter& empty();
  void end_row();

  std::size_t rows() const noexcept { return rows_; }
  const std::string& str() const noexcept { return text_; }

 private:
  std::size_t columns_;
  std::size_t pending_ = 0;
  std::size_t rows_ = 0;
  std::string text_;
};

std::string csv_escape(std::string_view text);
std::string format_double(double value);

}  // namespace krigesense::cli
