#include "format.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace cloak::cli {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot replace " + path.string() + ": " + ec.message());
  }
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_comment(const std::string& key, const std::string& value) {
  comments_.push_back("# " + key + "=" + value);
}

CsvTable& CsvTable::row() {
  rows_.emplace_back();
  return *this;
}

CsvTable& CsvTable::cell(double v) {
  rows_.back().push_back(format_real(v));
  return *this;
}

CsvTable& CsvTable::cell(std::string_view text) {
  rows_.back().emplace_back(text);
  return *this;
}

std::string CsvTable::str() const {
  std::string out;
  for (const auto& c : comments_) out += c + '\n';
  auto join = [&out](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += ',';
      out += cells[k];
    }
    out += '\n';
  };
  join(header_);
  for (const auto& r : rows_) join(r);
  return out;
}

Json make_envelope(const Json& config, const Json& results, bool with_timestamp) {
  Json env;
  env["schema_version"] = kSchemaVersion;
  env["config"] = config;
  if (with_timestamp) {
    const auto now = std::chrono::system_clock::now();
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch());
    env["timestamp"] = secs.count();
  } else {
    env["timestamp"] = nullptr;
  }
  env["results"] = results;
  return env;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Fixed two-decimal pixel coordinates keep the files small and stable.
std::string px(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), std::round(v * 100.0) / 100.0,
                                 std::chars_format::fixed, 2);
  return std::string(buf, ptr);
}

}  // namespace

Vec2 SvgDocument::Panel::map(Vec2 p) const {
  double sx = width / (u_max - u_min);
  double sy = height / (v_max - v_min);
  double ox = 0.0;
  double oy = 0.0;
  if (equal_aspect) {
    const double s = std::min(sx, sy);
    ox = 0.5 * (width - s * (u_max - u_min));
    oy = 0.5 * (height - s * (v_max - v_min));
    sx = sy = s;
  }
  return {x0 + ox + (p.x - u_min) * sx, y0 + height - oy - (p.y - v_min) * sy};
}

SvgDocument::SvgDocument(double width, double height) : width_(width), height_(height) {}

void SvgDocument::add_metadata(const std::string& json_text) { metadata_ = json_text; }

void SvgDocument::polyline(const Panel& panel, const std::vector<Vec2>& pts, std::string_view stroke,
                           double width, std::string_view dash) {
  std::string s = "<polyline fill=\"none\" stroke=\"" + xml_escape(stroke) + "\" stroke-width=\"" +
                  px(width) + "\"";
  if (!dash.empty()) s += " stroke-dasharray=\"" + xml_escape(dash) + "\"";
  s += " points=\"";
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const Vec2 q = panel.map(pts[k]);
    if (k) s += ' ';
    s += px(q.x) + ',' + px(q.y);
  }
  s += "\"/>";
  body_.push_back(std::move(s));
}

void SvgDocument::line(double x1, double y1, double x2, double y2, std::string_view stroke,
                       double width, bool arrow, std::string_view dash) {
  std::string s = "<line x1=\"" + px(x1) + "\" y1=\"" + px(y1) + "\" x2=\"" + px(x2) + "\" y2=\"" +
                  px(y2) + "\" stroke=\"" + xml_escape(stroke) + "\" stroke-width=\"" + px(width) +
                  "\"";
  if (!dash.empty()) s += " stroke-dasharray=\"" + xml_escape(dash) + "\"";
  if (arrow) {
    s += " marker-end=\"url(#arrow)\"";
    uses_arrow_ = true;
  }
  s += "/>";
  body_.push_back(std::move(s));
}

void SvgDocument::text(double x, double y, std::string_view content, double size,
                       std::string_view anchor) {
  body_.push_back("<text x=\"" + px(x) + "\" y=\"" + px(y) + "\" font-size=\"" + px(size) +
                  "\" font-family=\"sans-serif\" text-anchor=\"" + xml_escape(anchor) + "\">" +
                  xml_escape(content) + "</text>");
}

void SvgDocument::axes(const Panel& panel, std::string_view x_label, std::string_view y_label,
                       int ticks) {
  const Vec2 o = panel.map({panel.u_min, panel.v_min});
  const Vec2 xe = panel.map({panel.u_max, panel.v_min});
  const Vec2 ye = panel.map({panel.u_min, panel.v_max});
  line(o.x, o.y, xe.x, xe.y, "#000000");
  line(o.x, o.y, ye.x, ye.y, "#000000");
  for (int k = 0; k <= ticks; ++k) {
    const double u = panel.u_min + (panel.u_max - panel.u_min) * k / ticks;
    const double v = panel.v_min + (panel.v_max - panel.v_min) * k / ticks;
    const Vec2 tu = panel.map({u, panel.v_min});
    const Vec2 tv = panel.map({panel.u_min, v});
    line(tu.x, tu.y, tu.x, tu.y + 4, "#000000");
    line(tv.x - 4, tv.y, tv.x, tv.y, "#000000");
    char buf[32];
    auto [pu, e1] = std::to_chars(buf, buf + sizeof(buf), u, std::chars_format::fixed, 2);
    text(tu.x, tu.y + 16, std::string(buf, pu), 10);
    auto [pv, e2] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
    text(tv.x - 6, tv.y + 3, std::string(buf, pv), 10, "end");
  }
  text(0.5 * (o.x + xe.x), o.y + 34, x_label, 12);
  text(o.x - 44, 0.5 * (o.y + ye.y), y_label, 12);
}

std::string SvgDocument::str() const {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << px(width_)
     << "\" height=\"" << px(height_) << "\" viewBox=\"0 0 " << px(width_) << ' ' << px(height_)
     << "\">\n";
  if (!metadata_.empty()) os << "<metadata><![CDATA[" << metadata_ << "]]></metadata>\n";
  if (uses_arrow_) {
    os << "<defs><marker id=\"arrow\" markerWidth=\"10\" markerHeight=\"8\" refX=\"9\" refY=\"4\" "
          "orient=\"auto\"><path d=\"M0,0 L10,4 L0,8 z\" fill=\"#000000\"/></marker></defs>\n";
  }
  os << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  for (const auto& b : body_) os << b << '\n';
  os << "</svg>\n";
  return os.str();
}

std::string ramp_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(220 * (1 - t) + 30 * t));
  const int g = static_cast<int>(std::lround(40 * (1 - t) + 60 * t));
  const int b = static_cast<int>(std::lround(40 * (1 - t) + 220 * t));
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace cloak::cli
