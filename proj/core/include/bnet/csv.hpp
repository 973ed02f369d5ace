#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bnet {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double x);

/// Comma-separated table with a header row and LF line endings.
class CsvBuilder {
 public:
  explicit CsvBuilder(std::vector<std::string> header);

  CsvBuilder& cell(double x);
  CsvBuilder& cell(std::uint64_t x);
  CsvBuilder& cell(std::string_view text);
  /// Closes the current row; throws std::logic_error on a column count mismatch.
  void end_row();

  const std::string& str() const { return text_; }
  std::size_t rows() const { return rows_; }
  std::size_t columns() const { return columns_; }

 private:
  void separator();

  std::string text_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
  std::size_t rows_ = 0;
};

/// Writes bytes verbatim; throws IoError on failure.
void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace bnet
