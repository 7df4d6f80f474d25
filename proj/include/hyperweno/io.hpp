#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hyperweno::io {

// Little-endian encoder for the binary formats.
class ByteWriter {
 public:
  void bytes(std::string_view s) { buf_.append(s); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void str(std::string_view s);  // u32 length + bytes

  const std::string& data() const noexcept { return buf_; }

 private:
  std::string buf_;
};

// Bounds-checked decoder; every failure is a FormatError carrying the byte
// offset at which the read was attempted.
class ByteReader {
 public:
  explicit ByteReader(std::string data) : buf_(std::move(data)) {}

  void expect_magic(std::string_view magic);
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::string str(std::size_t max_len = 1 << 20);

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return buf_.size() - pos_; }
  bool at_end() const noexcept { return pos_ == buf_.size(); }
  // Checked product for element counts read from a header.
  std::size_t checked_count(std::uint64_t a, std::uint64_t b, std::size_t elem_size) const;

 private:
  void need(std::size_t n, const char* what) const;
  std::string buf_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file and renames it over `path`.
void atomic_write(const std::filesystem::path& path, std::string_view contents);

// 17 significant digits: round-trips every double.
std::string format_double(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(const std::vector<double>& values);
  std::string str() const;
  void write(const std::filesystem::path& path) const { atomic_write(path, str()); }
  std::size_t n_rows() const noexcept { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

// Parses a headed numeric CSV written by CsvTable.
struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::size_t column(std::string_view name) const;
};
CsvData read_csv(const std::filesystem::path& path);

}  // namespace hyperweno::io
