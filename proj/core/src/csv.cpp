#include "bnet/csv.hpp"

#include <fmt/format.h>

#include <fstream>
#include <iterator>

namespace bnet {

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

CsvBuilder::CsvBuilder(std::vector<std::string> header) : columns_(header.size()) {
  if (header.empty()) throw std::invalid_argument("CsvBuilder: empty header");
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k > 0) text_ += ',';
    text_ += header[k];
  }
  text_ += '\n';
}

void CsvBuilder::separator() {
  if (in_row_ == columns_) throw std::logic_error("CsvBuilder: too many cells in row");
  if (in_row_ > 0) text_ += ',';
  ++in_row_;
}

CsvBuilder& CsvBuilder::cell(double x) {
  separator();
  text_ += format_double(x);
  return *this;
}

CsvBuilder& CsvBuilder::cell(std::uint64_t x) {
  separator();
  text_ += fmt::format("{}", x);
  return *this;
}

CsvBuilder& CsvBuilder::cell(std::string_view text) {
  separator();
  if (text.find_first_of(",\"\n") == std::string_view::npos) {
    text_ += text;
    return *this;
  }
  text_ += '"';
  for (const char c : text) {
    if (c == '"') text_ += '"';
    text_ += c;
  }
  text_ += '"';
  return *this;
}

void CsvBuilder::end_row() {
  if (in_row_ != columns_) {
    throw std::logic_error(fmt::format("CsvBuilder: row has {} cells, header has {}", in_row_, columns_));
  }
  text_ += '\n';
  in_row_ = 0;
  ++rows_;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open {} for writing", path.string()));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError(fmt::format("failed writing {}", path.string()));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace bnet
