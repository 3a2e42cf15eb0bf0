#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "chl/types.hpp"

namespace chl {

// ---------------------------------------------------------------------------
// Grid container
//
//   offset 0   8 bytes   magic "OCGRID\x00\x01"
//   offset 8   u32 LE    header_len
//   offset 12  header_len bytes of UTF-8 JSON:
//                {"band_names": [...], "fill_value": f, "lat_north": ..,
//                 "lat_south": .., "lon_east": .., "lon_west": ..,
//                 "n_cols": c, "n_rows": r, "time_end": s|null,
//                 "time_start": s|null}
//   then, per entry of band_names, an n_rows*n_cols float32 LE plane,
//   row-major, north-to-south rows, west-to-east columns.
//
// Reflectance planes are labelled by wavelength ("412" ... "670") and
// written in ascending label order; a chl plane is labelled "chl" and
// always comes last.
// ---------------------------------------------------------------------------

inline constexpr std::array<char, 8> kGridMagic = {'O', 'C', 'G', 'R', 'I', 'D', '\x00', '\x01'};

/// Serializes a validated stack. Every plane shares the file's fill value,
/// taken from the first plane; other planes' fill pixels are remapped to it.
std::string write_grid(const GridStack& stack);

/// Inverse of write_grid. Throws FormatError (bad magic, bad header),
/// ParseError (malformed JSON) or LengthError (payload size mismatch).
GridStack read_grid(std::string_view bytes);

// ---------------------------------------------------------------------------
// Sample table CSV: UTF-8, LF line endings, header
//   rrs_412,rrs_443,rrs_490,rrs_510,rrs_555,rrs_670,chl_a
// chl_a may be empty on prediction-only rows. Numbers use the shortest
// decimal (fixed notation) that round-trips the double.
// ---------------------------------------------------------------------------

inline constexpr std::string_view kTableHeader =
    "rrs_412,rrs_443,rrs_490,rrs_510,rrs_555,rrs_670,chl_a";

std::string write_table(const SampleTable& table);

/// Throws SchemaError on a missing or permuted header and ParseError on a
/// malformed cell or row.
SampleTable read_table(std::string_view text);

/// Shortest round-trip fixed-notation decimal of a double.
std::string format_number(double value);

/// Generic numeric CSV with a header row; empty cells read as NaN.
struct NumericCsv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Values of a named column. Throws SchemaError if absent.
  std::vector<double> column(std::string_view name) const;
};

NumericCsv read_numeric_csv(std::string_view text);

// File helpers; failures throw IoError.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace chl
