#include "ktb/harness/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

namespace ktb::harness {
namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string trace_svg(std::span<const SummaryRow> summary, const std::string& title, const std::string& y_label) {
  constexpr double W = 640, H = 400, left = 70, right = 20, top = 40, bottom = 50;
  std::string svg;
  char buf[1024];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" viewBox=\"0 0 %g %g\">\n", W, H,
                W, H);
  svg += buf;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof(buf), "<text x=\"%g\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">", left);
  svg += buf + escape(title) + "</text>\n";
  if (summary.empty()) return svg + "</svg>\n";

  double x0 = static_cast<double>(summary.front().eval_index);
  double x1 = static_cast<double>(summary.back().eval_index);
  double y0 = std::numeric_limits<double>::infinity(), y1 = -y0;
  for (const auto& r : summary) {
    y0 = std::min(y0, r.lower);
    y1 = std::max(y1, r.upper);
  }
  if (x1 <= x0) x1 = x0 + 1;
  if (!(y1 > y0)) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (W - left - right); };
  auto py = [&](double y) { return H - bottom - (y - y0) / (y1 - y0) * (H - top - bottom); };

  std::string band;
  for (const auto& r : summary) {
    std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(static_cast<double>(r.eval_index)), py(r.upper));
    band += buf;
  }
  for (auto it = summary.rbegin(); it != summary.rend(); ++it) {
    std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(static_cast<double>(it->eval_index)), py(it->lower));
    band += buf;
  }
  svg += "<polygon fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\" points=\"" + band + "\"/>\n";
  std::string line;
  for (const auto& r : summary) {
    std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(static_cast<double>(r.eval_index)), py(r.mean));
    line += buf;
  }
  svg += "<polyline fill=\"none\" stroke=\"#08519c\" stroke-width=\"2\" points=\"" + line + "\"/>\n";

  std::snprintf(buf, sizeof(buf),
                "<path d=\"M%g %g V%g H%g\" stroke=\"black\" fill=\"none\"/>\n"
                "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">%.4g</text>\n"
                "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">%.4g</text>\n",
                left, top, H - bottom, W - right, left - 4, top + 4, y1, left - 4, H - bottom, y0);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"11\">%g</text>\n"
                "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">%g</text>\n"
                "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">evaluation</text>\n",
                left, H - bottom + 16, x0, W - right, H - bottom + 16, x1, (left + W - right) / 2, H - 12);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<text transform=\"translate(16 %g) rotate(-90)\" font-family=\"sans-serif\" font-size=\"12\" "
                "text-anchor=\"middle\">",
                (top + H - bottom) / 2);
  svg += buf + escape(y_label) + "</text>\n</svg>\n";
  return svg;
}

}  // namespace ktb::harness
