#pragma once

// Deterministic text output: shortest round-trip numbers, CSV, a small SVG
// builder and atomic file replacement.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cloak/annulus.hpp"

namespace cloak::cli {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kSchemaVersion = "1.0";

// Shortest decimal that parses back to the same double ("nan", "inf" and
// "-inf" for non-finite values).
std::string format_real(double v);

// Writes `content` to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  // Lines written before the header as "# key=value".
  void add_comment(const std::string& key, const std::string& value);
  CsvTable& row();
  CsvTable& cell(double v);
  CsvTable& cell(std::string_view text);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> comments_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// {schema_version, config, timestamp, results}
Json make_envelope(const Json& config, const Json& results, bool with_timestamp);

std::string xml_escape(std::string_view text);

// Minimal SVG 1.1 document with user coordinates mapped into panels.
class SvgDocument {
 public:
  SvgDocument(double width, double height);

  struct Panel {
    double x0, y0, width, height;  // pixel box
    double u_min, u_max, v_min, v_max;  // data box
    bool equal_aspect = false;

    Vec2 map(Vec2 p) const;
  };

  void add_metadata(const std::string& json_text);
  void polyline(const Panel& panel, const std::vector<Vec2>& pts, std::string_view stroke,
                double width = 1.5, std::string_view dash = "");
  void line(double x1, double y1, double x2, double y2, std::string_view stroke, double width = 1.0,
            bool arrow = false, std::string_view dash = "");
  void text(double x, double y, std::string_view content, double size = 12.0,
            std::string_view anchor = "middle");
  void axes(const Panel& panel, std::string_view x_label, std::string_view y_label, int ticks = 5);
  std::string str() const;

 private:
  double width_;
  double height_;
  bool uses_arrow_ = false;
  std::string metadata_;
  std::vector<std::string> body_;
};

// Colour on a red to blue ramp, t in [0, 1].
std::string ramp_color(double t);

}  // namespace cloak::cli
