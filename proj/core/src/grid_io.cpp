#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>

#include "chl/error.hpp"
#include "chl/io.hpp"
#include "json.hpp"

namespace chl {

namespace {

using nlohmann::json;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(std::string_view in, std::size_t offset) {
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  }
  return v;
}

void put_plane(std::string& out, const GeoGrid& g, float file_fill) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    const float f = g.is_fill(g.values[i]) ? file_fill : static_cast<float>(g.values[i]);
    put_u32(out, std::bit_cast<std::uint32_t>(f));
  }
}

json optional_string(const std::optional<std::string>& s) {
  return s ? json(*s) : json(nullptr);
}

std::optional<std::string> read_optional_string(const json& header, const char* key) {
  if (!header.contains(key) || header.at(key).is_null()) return std::nullopt;
  if (!header.at(key).is_string()) throw FormatError(std::string(key) + " must be a string or null");
  return header.at(key).get<std::string>();
}

double require_number(const json& header, const char* key) {
  if (!header.contains(key) || !header.at(key).is_number()) {
    throw FormatError(std::string("grid header lacks numeric ") + key);
  }
  return header.at(key).get<double>();
}

std::size_t require_count(const json& header, const char* key) {
  if (!header.contains(key) || !header.at(key).is_number_unsigned()) {
    throw FormatError(std::string("grid header lacks unsigned ") + key);
  }
  return header.at(key).get<std::size_t>();
}

}  // namespace

std::string write_grid(const GridStack& stack) {
  stack.validate();
  const GeoGrid& ref = stack.reference();
  if (!std::isfinite(ref.fill_value)) throw ArgumentError("grid fill value must be finite");
  const auto file_fill = static_cast<float>(ref.fill_value);

  json names = json::array();
  for (const auto& [label, grid] : stack.bands) {
    if (label.empty() || label == kChlLabel) throw SchemaError("invalid band label '" + label + "'");
    names.push_back(label);
  }
  if (stack.chl) names.push_back(std::string(kChlLabel));

  json header = {
      {"n_rows", ref.n_rows},
      {"n_cols", ref.n_cols},
      {"lat_north", ref.lat_north},
      {"lat_south", ref.lat_south},
      {"lon_west", ref.lon_west},
      {"lon_east", ref.lon_east},
      {"band_names", names},
      {"fill_value", static_cast<double>(file_fill)},
      {"time_start", optional_string(stack.time_start)},
      {"time_end", optional_string(stack.time_end)},
  };
  const std::string text = header.dump();

  std::string out(kGridMagic.begin(), kGridMagic.end());
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  out.reserve(out.size() + names.size() * ref.size() * 4);
  for (const auto& [label, grid] : stack.bands) put_plane(out, grid, file_fill);
  if (stack.chl) put_plane(out, *stack.chl, file_fill);
  return out;
}

GridStack read_grid(std::string_view bytes) {
  if (bytes.size() < kGridMagic.size() + 4) throw LengthError("grid file shorter than its preamble");
  if (std::memcmp(bytes.data(), kGridMagic.data(), kGridMagic.size()) != 0) {
    throw FormatError("bad grid magic");
  }
  const std::uint32_t header_len = get_u32(bytes, 8);
  const std::size_t header_end = 12 + static_cast<std::size_t>(header_len);
  if (bytes.size() < header_end) throw LengthError("grid header truncated");

  json header;
  try {
    header = json::parse(bytes.substr(12, header_len));
  } catch (const json::exception& e) {
    throw ParseError(std::string("grid header JSON: ") + e.what());
  }
  if (!header.is_object()) throw FormatError("grid header must be a JSON object");

  GeoGrid proto;
  proto.n_rows = require_count(header, "n_rows");
  proto.n_cols = require_count(header, "n_cols");
  proto.lat_north = require_number(header, "lat_north");
  proto.lat_south = require_number(header, "lat_south");
  proto.lon_west = require_number(header, "lon_west");
  proto.lon_east = require_number(header, "lon_east");
  proto.fill_value = static_cast<double>(static_cast<float>(require_number(header, "fill_value")));
  if (proto.n_rows == 0 || proto.n_cols == 0) throw FormatError("grid must have positive shape");
  if (!(proto.lat_north > proto.lat_south) || !(proto.lon_east > proto.lon_west)) {
    throw FormatError("grid bounds are inverted");
  }

  if (!header.contains("band_names") || !header.at("band_names").is_array() ||
      header.at("band_names").empty()) {
    throw FormatError("band_names must be a non-empty array");
  }
  std::vector<std::string> names;
  for (const auto& n : header.at("band_names")) {
    if (!n.is_string()) throw FormatError("band_names entries must be strings");
    names.push_back(n.get<std::string>());
  }

  GridStack stack;
  stack.time_start = read_optional_string(header, "time_start");
  stack.time_end = read_optional_string(header, "time_end");

  const std::size_t pixels = proto.n_rows * proto.n_cols;
  if (proto.n_cols != 0 && pixels / proto.n_cols != proto.n_rows) {
    throw FormatError("grid shape overflows");
  }
  const std::size_t payload = bytes.size() - header_end;
  const bool overflow = pixels > SIZE_MAX / 4 / names.size();
  if (overflow || payload != names.size() * pixels * 4) {
    throw LengthError("payload holds " + std::to_string(payload) + " bytes, header declares " +
                      std::to_string(names.size()) + " planes of " + std::to_string(pixels) +
                      " pixels");
  }

  std::size_t offset = header_end;
  for (std::size_t p = 0; p < names.size(); ++p) {
    GeoGrid g = proto;
    g.values.resize(pixels);
    for (std::size_t i = 0; i < pixels; ++i, offset += 4) {
      g.values[i] = static_cast<double>(std::bit_cast<float>(get_u32(bytes, offset)));
    }
    const std::string& label = names[p];
    if (label == kChlLabel) {
      if (p + 1 != names.size()) throw FormatError("the chl plane must be listed last");
      stack.chl = std::move(g);
    } else {
      if (label.empty()) throw FormatError("empty band label");
      if (!stack.bands.emplace(label, std::move(g)).second) {
        throw FormatError("duplicate band label " + label);
      }
    }
  }
  return stack;
}

}  // namespace chl
