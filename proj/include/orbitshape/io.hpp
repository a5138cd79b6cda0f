#pragma once

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "orbitshape/errors.hpp"
#include "orbitshape/image.hpp"

namespace orbitshape::io {

using Json = nlohmann::json;

enum class Format { Csv, Json };

/// An image as read from disk. Labels are carried through untouched.
struct ImageData {
  LabeledImage image;
  std::optional<std::vector<std::string>> labels;
};

/// 17 significant digits, enough to round-trip every finite double. Integral
/// values keep a trailing ".0" so JSON readers see a float (and -0 survives).
inline std::string format_double(double v) {
  if (!std::isfinite(v)) throw InvalidArgument("cannot serialize a non-finite value");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string out = buf;
  if (out.find_first_of(".e") == std::string::npos) out += ".0";
  return out;
}

inline Format format_for_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".csv") return Format::Csv;
  if (ext == ".json") return Format::Json;
  throw ParseError("cannot infer format of '" + path.string() + "' (expected .csv or .json)");
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline double parse_number(std::string_view text, std::size_t line, std::size_t field) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("not a number: '" + std::string(text) + "'", line, field);
  }
  if (!std::isfinite(value)) throw ParseError("non-finite value", line, field);
  return value;
}

}  // namespace detail

/// One point per line, comma separated. Blank lines are ignored; the first
/// nonblank line is skipped when `header` is set.
inline ImageData parse_csv(std::string_view text, bool header = false) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  bool header_pending = header;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (detail::trim(line).empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (header_pending) {
      header_pending = false;
      continue;
    }
    std::vector<double> row;
    std::size_t start = 0;
    for (std::size_t field = 1;; ++field) {
      const auto comma = line.find(',', start);
      row.push_back(detail::parse_number(line.substr(start, comma - start), line_no, field));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("expected " + std::to_string(rows.front().size()) + " fields, found " +
                           std::to_string(row.size()),
                       line_no);
    }
    rows.push_back(std::move(row));
    if (end == text.size()) break;
  }
  if (rows.empty()) throw ParseError("no points in CSV input");

  Matrix points(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) points(Index(i), Index(j)) = rows[i][j];
  }
  return {LabeledImage(std::move(points)), std::nullopt};
}

/// {"points": [[x, y, ...], ...], "labels": ["a", ...]} with labels optional.
inline ImageData parse_json(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("points")) throw ParseError("JSON image must be an object with \"points\"");
  const Json& pts = doc.at("points");
  if (!pts.is_array() || pts.empty()) throw ParseError("\"points\" must be a nonempty array");

  const std::size_t n = pts.size();
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Json& row = pts[i];
    if (!row.is_array() || row.empty()) throw ParseError("point " + std::to_string(i + 1) + " is not a nonempty array", i + 1);
    if (i == 0) k = row.size();
    if (row.size() != k) {
      throw ParseError("point " + std::to_string(i + 1) + " has " + std::to_string(row.size()) +
                           " coordinates, expected " + std::to_string(k),
                       i + 1);
    }
  }
  Matrix points(static_cast<Index>(n), static_cast<Index>(k));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const Json& v = pts[i][j];
      if (!v.is_number()) throw ParseError("coordinate is not a number", i + 1, j + 1);
      points(static_cast<Index>(i), static_cast<Index>(j)) = v.get<double>();
    }
  }

  ImageData out{LabeledImage(std::move(points)), std::nullopt};
  if (doc.contains("labels")) {
    const Json& labels = doc.at("labels");
    if (!labels.is_array() || labels.size() != n) throw ParseError("\"labels\" must be an array of n strings");
    std::vector<std::string> names;
    for (const Json& l : labels) {
      if (!l.is_string()) throw ParseError("\"labels\" must be an array of n strings");
      names.push_back(l.get<std::string>());
    }
    out.labels = std::move(names);
  }
  return out;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ImageData read_image(const std::filesystem::path& path, bool header = false) {
  const std::string text = read_text(path);
  try {
    return format_for_path(path) == Format::Csv ? parse_csv(text, header) : parse_json(text);
  } catch (const ParseError& e) {
    throw e.located_in(path.string());
  }
}

inline std::string to_csv(const LabeledImage& image) {
  std::string out;
  for (Index i = 0; i < image.n(); ++i) {
    for (Index j = 0; j < image.k(); ++j) {
      if (j) out += ',';
      out += format_double(image.points()(i, j));
    }
    out += '\n';
  }
  return out;
}

/// Writes a JSON value with every floating-point number at 17 significant
/// digits. Objects keep their (sorted) key order, so output is deterministic.
inline void dump(const Json& value, std::ostream& out, int indent = 2, int depth = 0) {
  const auto pad = [&](int d) { out << std::string(static_cast<std::size_t>(indent * d), ' '); };
  switch (value.type()) {
    case Json::value_t::number_float:
      out << format_double(value.get<double>());
      return;
    case Json::value_t::object: {
      if (value.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (const auto& [key, item] : value.items()) {
        if (!first) out << ",\n";
        first = false;
        pad(depth + 1);
        out << Json(key).dump() << ": ";
        dump(item, out, indent, depth + 1);
      }
      out << '\n';
      pad(depth);
      out << '}';
      return;
    }
    case Json::value_t::array: {
      if (value.empty()) {
        out << "[]";
        return;
      }
      // Arrays of scalars stay on one line; nested arrays break per element.
      const bool flat = std::none_of(value.begin(), value.end(),
                                     [](const Json& v) { return v.is_array() || v.is_object(); });
      if (flat) {
        out << '[';
        for (std::size_t i = 0; i < value.size(); ++i) {
          if (i) out << ", ";
          dump(value[i], out, indent, depth + 1);
        }
        out << ']';
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (i) out << ",\n";
        pad(depth + 1);
        dump(value[i], out, indent, depth + 1);
      }
      out << '\n';
      pad(depth);
      out << ']';
      return;
    }
    default:
      out << value.dump();
      return;
  }
}

inline std::string dump_string(const Json& value) {
  std::ostringstream ss;
  dump(value, ss);
  ss << '\n';
  return ss.str();
}

inline Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Vector(m.row(i).transpose())));
  return out;
}

inline Json image_to_json(const LabeledImage& image, const std::optional<std::vector<std::string>>& labels = {}) {
  Json out = Json::object();
  out["points"] = to_json(image.points());
  if (labels) out["labels"] = *labels;
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

inline void write_image(const std::filesystem::path& path, const ImageData& data) {
  write_text(path, format_for_path(path) == Format::Csv ? to_csv(data.image)
                                                        : dump_string(image_to_json(data.image, data.labels)));
}

}  // namespace orbitshape::io
