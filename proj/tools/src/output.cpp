#include "moranq_cli/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "moranq/errors.hpp"

namespace moranq::cli {

void atomic_write(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

Csv::Csv(const std::vector<std::string>& header) {
  for (const auto& h : header) cell(std::string_view(h));
  end_row();
}

Csv& Csv::cell(std::string_view text) {
  if (row_open_) text_ += ',';
  row_open_ = true;
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) {
    text_ += text;
    return *this;
  }
  text_ += '"';
  for (char c : text) {
    if (c == '"') text_ += '"';
    text_ += c;
  }
  text_ += '"';
  return *this;
}

Csv& Csv::cell(double value) { return cell(std::string_view(format_number(value))); }
Csv& Csv::cell(long long value) { return cell(std::string_view(std::to_string(value))); }
Csv& Csv::cell(std::size_t value) { return cell(std::string_view(std::to_string(value))); }

void Csv::end_row() {
  text_ += '\n';
  row_open_ = false;
}

std::string ratio_svg(const RatioTable& table, std::string_view title) {
  const double width = 640, height = 400, left = 60, right = 20, top = 40, bottom = 50;
  double y_lo = 1.0, y_hi = 1.0;
  std::size_t n_hi = 1;
  for (const auto& row : table.rows) {
    for (double v : {row.low_ratio, row.high_ratio}) {
      if (v > 0.0) {
        y_lo = std::min(y_lo, v);
        y_hi = std::max(y_hi, v);
      }
    }
    n_hi = std::max(n_hi, row.n);
  }
  const double ly0 = std::floor(std::log10(y_lo)), ly1 = std::ceil(std::log10(y_hi));
  const double span = std::max(ly1 - ly0, 1.0);
  auto px = [&](double n) {
    return left + (width - left - right) * (n_hi > 1 ? (n - 1) / double(n_hi - 1) : 0.5);
  };
  auto py = [&](double v) {
    return top + (height - top - bottom) * (1.0 - (std::log10(v) - ly0) / span);
  };
  char buf[256];
  std::string s;
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
                "font-family=\"sans-serif\" font-size=\"12\">\n",
                width, height);
  s += buf;
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + format_number(left) + "\" y=\"20\">" + std::string(title) + "</text>\n";
  for (double e = ly0; e <= ly0 + span; e += 1.0) {
    const double y = py(std::pow(10.0, e));
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%g\" y1=\"%.2f\" x2=\"%g\" y2=\"%.2f\" stroke=\"#ddd\"/>"
                  "<text x=\"%g\" y=\"%.2f\" text-anchor=\"end\">1e%d</text>\n",
                  left, y, width - right, y, left - 6, y + 4, static_cast<int>(e));
    s += buf;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">n (1 .. %zu)</text>\n",
                (left + width - right) / 2, height - 15, n_hi);
  s += buf;
  for (const auto& row : table.rows) {
    const struct {
      double v;
      const char* colour;
    } marks[] = {{row.low_ratio, "#1f77b4"}, {row.high_ratio, "#d62728"}};
    for (const auto& m : marks) {
      if (!(m.v > 0.0)) continue;
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n",
                    px(double(row.n)), py(m.v), m.colour);
      s += buf;
    }
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%g\" y=\"%g\" fill=\"#1f77b4\">n J_low / e</text>"
                "<text x=\"%g\" y=\"%g\" fill=\"#d62728\">n J_high / e</text>\n",
                width - 220, top - 10, width - 110, top - 10);
  s += buf;
  s += "</svg>\n";
  return s;
}

}  // namespace moranq::cli
