#include "hyperweno/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include "hyperweno/error.hpp"

namespace hyperweno::io {

namespace {

template <typename T>
void put_le(std::string& out, T v) {
  static_assert(std::is_unsigned_v<T>);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

template <typename T>
T get_le(const char* p) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

}  // namespace

void ByteWriter::u32(std::uint32_t v) { put_le(buf_, v); }
void ByteWriter::u64(std::uint64_t v) { put_le(buf_, v); }
void ByteWriter::f64(double v) { put_le(buf_, std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::str(std::string_view s) {
  if (s.size() > std::numeric_limits<std::uint32_t>::max()) throw InvalidArgument("string too long to encode");
  u32(static_cast<std::uint32_t>(s.size()));
  buf_.append(s);
}

void ByteReader::need(std::size_t n, const char* what) const {
  if (buf_.size() - pos_ < n) {
    throw FormatError(std::string("truncated input while reading ") + what, pos_);
  }
}

void ByteReader::expect_magic(std::string_view magic) {
  need(magic.size(), "magic");
  if (std::string_view(buf_).substr(pos_, magic.size()) != magic) {
    throw FormatError("bad magic, expected \"" + std::string(magic) + "\"", pos_);
  }
  pos_ += magic.size();
}

std::uint32_t ByteReader::u32() {
  need(4, "u32");
  auto v = get_le<std::uint32_t>(buf_.data() + pos_);
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8, "u64");
  auto v = get_le<std::uint64_t>(buf_.data() + pos_);
  pos_ += 8;
  return v;
}

double ByteReader::f64() {
  need(8, "f64");
  auto v = std::bit_cast<double>(get_le<std::uint64_t>(buf_.data() + pos_));
  pos_ += 8;
  return v;
}

std::string ByteReader::str(std::size_t max_len) {
  const std::size_t at = pos_;
  const std::uint32_t n = u32();
  if (n > max_len) throw FormatError("string length " + std::to_string(n) + " exceeds limit", at);
  need(n, "string body");
  std::string s = buf_.substr(pos_, n);
  pos_ += n;
  return s;
}

std::size_t ByteReader::checked_count(std::uint64_t a, std::uint64_t b, std::size_t elem_size) const {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) throw FormatError("element count overflow", pos_);
  const std::uint64_t n = a * b;
  if (n > remaining() / elem_size) {
    throw FormatError("declared size " + std::to_string(n) + " exceeds remaining " + std::to_string(remaining()) +
                          " bytes",
                      pos_);
  }
  return static_cast<std::size_t>(n);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

void atomic_write(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename into " + path.string());
  }
}

std::string format_double(double v) {
  char buf[40];
  auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

void CsvTable::add_row(const std::vector<double>& values) {
  if (values.size() != header_.size()) {
    throw ShapeError("csv: row has " + std::to_string(values.size()) + " values, header has " +
                     std::to_string(header_.size()));
  }
  rows_.push_back(values);
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::size_t CsvData::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw FormatError("csv: missing column " + std::string(name));
}

CsvData read_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  CsvData d;
  std::istringstream in(text);
  std::string line;
  std::size_t offset = 0;
  bool first = true;
  while (std::getline(in, line)) {
    const std::size_t line_start = offset;
    offset += line.size() + 1;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t p = 0;
    while (true) {
      const std::size_t q = line.find(',', p);
      cells.push_back(line.substr(p, q == std::string::npos ? std::string::npos : q - p));
      if (q == std::string::npos) break;
      p = q + 1;
    }
    if (first) {
      d.header = std::move(cells);
      first = false;
      continue;
    }
    if (cells.size() != d.header.size()) throw FormatError("csv: ragged row", line_start);
    std::vector<double> row;
    for (const auto& c : cells) {
      double v = 0.0;
      auto r = std::from_chars(c.data(), c.data() + c.size(), v);
      if (r.ec != std::errc() || r.ptr != c.data() + c.size()) {
        throw FormatError("csv: not a number: \"" + c + "\"", line_start);
      }
      row.push_back(v);
    }
    d.rows.push_back(std::move(row));
  }
  if (first) throw FormatError("csv: empty file", 0);
  return d;
}

}  // namespace hyperweno::io
