#pragma once

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "colehopf/error.hpp"
#include "colehopf/fields.hpp"

namespace colehopf {

/// Shortest decimal that parses back to the same double; "nan"/"inf" otherwise.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Strict full-string parse; nullopt on anything else.
inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Comma-separated table with a mandatory header and LF line endings.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
      : out_(path, std::ios::binary), columns_(header.size()) {
    if (!out_) throw Error(ErrorKind::Config, "cannot write '" + path.string() + "'");
    write_row(header);
  }

  void write_row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw Error(ErrorKind::ShapeMismatch, "csv row has the wrong number of cells");
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) out_ << ',';
      out_ << cells[c];
    }
    out_ << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
  std::size_t columns_;
};

inline std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Config, "cannot read '" + path.string() + "'");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  return rows;
}

struct Snapshot {
  double t = 0.0;
  std::size_t species = 0;
  std::size_t points = 0;
  std::vector<Complex> values;  // species-major
};

namespace detail {

inline std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int b = 0; b < 8; ++b) r |= ((v >> (8 * b)) & 0xffu) << (8 * (7 - b));
    return r;
  }
  return v;
}

}  // namespace detail

/// `<stem>.bin`: little-endian float64, (re, im) interleaved, species row-major.
/// `<stem>.txt`: shape, time and byte order.
inline void write_snapshot(const std::filesystem::path& dir, const std::string& stem, const ComplexFieldSet& f,
                           double t) {
  std::filesystem::create_directories(dir);
  const auto bin = dir / (stem + ".bin");
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw Error(ErrorKind::Config, "cannot write '" + bin.string() + "'");
  for (std::size_t k = 0; k < f.species(); ++k)
    for (const auto& v : f[k])
      for (double part : {v.real(), v.imag()}) {
        const auto bits = detail::to_little(std::bit_cast<std::uint64_t>(part));
        out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
      }
  std::ofstream txt(dir / (stem + ".txt"), std::ios::binary);
  txt << "file " << stem << ".bin\n"
      << "species " << f.species() << "\n"
      << "points " << f.grid().size() << "\n"
      << "x_min " << format_double(f.grid().x_min()) << "\n"
      << "x_max " << format_double(f.grid().x_max()) << "\n"
      << "time " << format_double(t) << "\n"
      << "dtype float64\n"
      << "byte_order little\n"
      << "layout species-major, interleaved re im\n";
}

inline Snapshot read_snapshot(const std::filesystem::path& dir, const std::string& stem) {
  Snapshot s;
  std::ifstream txt(dir / (stem + ".txt"));
  if (!txt) throw Error(ErrorKind::Config, "missing snapshot sidecar for " + stem);
  std::string key, value;
  while (txt >> key) {
    std::getline(txt, value);
    if (!value.empty() && value.front() == ' ') value.erase(0, 1);
    if (key == "species") s.species = std::stoul(value);
    if (key == "points") s.points = std::stoul(value);
    if (key == "time") s.t = parse_double(value).value_or(std::nan(""));
  }
  std::ifstream bin(dir / (stem + ".bin"), std::ios::binary);
  s.values.resize(s.species * s.points);
  for (auto& v : s.values) {
    std::uint64_t re = 0, im = 0;
    bin.read(reinterpret_cast<char*>(&re), sizeof re);
    bin.read(reinterpret_cast<char*>(&im), sizeof im);
    v = Complex(std::bit_cast<double>(detail::to_little(re)), std::bit_cast<double>(detail::to_little(im)));
  }
  if (!bin) throw Error(ErrorKind::Config, "snapshot " + stem + " is truncated");
  return s;
}

}  // namespace colehopf
