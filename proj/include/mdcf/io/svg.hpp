#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "mdcf/core/polygon.hpp"
#include "mdcf/markov/partition.hpp"

namespace mdcf::io {

struct SvgPolygon {
  ConvexPolygon polygon;
  std::string fill;
  std::string label;
  std::string title;
};

/// Polygons in the square [-1/2, 1/2]^2, y axis pointing up.
class SvgCanvas {
 public:
  explicit SvgCanvas(double size = 800, double margin = 20) : size_(size), margin_(margin) {}

  void add(SvgPolygon p) { items_.push_back(std::move(p)); }
  [[nodiscard]] std::size_t size() const { return items_.size(); }

  void write(std::ostream& out) const {
    const double full = size_ + 2 * margin_;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(full) << "\" height=\"" << num(full)
        << "\" viewBox=\"0 0 " << num(full) << ' ' << num(full) << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << num(full) << "\" height=\"" << num(full) << "\" fill=\"white\"/>\n";
    for (const auto& it : items_) {
      out << "<polygon points=\"";
      const auto& v = it.polygon.vertices();
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ' ';
        out << num(px(v[i].x.get_d())) << ',' << num(py(v[i].y.get_d()));
      }
      out << "\" fill=\"" << it.fill << "\" stroke=\"black\" stroke-width=\"0.5\">";
      if (!it.title.empty()) out << "<title>" << it.title << "</title>";
      out << "</polygon>\n";
    }
    for (const auto& it : items_) {
      if (it.label.empty() || it.polygon.vertices().empty()) continue;
      double cx = 0, cy = 0;
      for (const auto& p : it.polygon.vertices()) {
        cx += p.x.get_d();
        cy += p.y.get_d();
      }
      const double n = static_cast<double>(it.polygon.vertices().size());
      out << "<text x=\"" << num(px(cx / n)) << "\" y=\"" << num(py(cy / n))
          << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" dominant-baseline=\"middle\">"
          << it.label << "</text>\n";
    }
    out << "</svg>\n";
  }

 private:
  static std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return buf;
  }
  [[nodiscard]] double px(double x) const { return margin_ + (x + 0.5) * size_; }
  [[nodiscard]] double py(double y) const { return margin_ + (0.5 - y) * size_; }

  double size_;
  double margin_;
  std::vector<SvgPolygon> items_;
};

inline std::string letter_color(markov::Letter l) {
  static const char* colors[] = {"#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3"};
  return colors[static_cast<int>(l)];
}

inline std::string type_color(int type_id) {
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                 "#bcbd22", "#17becf", "#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5"};
  return colors[(type_id - 1) % 15];
}

/// The 20 pieces of the Markov partition, labelled E1..J4.
inline SvgCanvas markov_partition_svg() {
  SvgCanvas c;
  for (const auto& [id, poly] : markov::markov_pieces()) {
    const std::string name = markov::to_string(id);
    c.add({poly, letter_color(id.letter), name, name});
  }
  return c;
}

/// Cylinder-piece cells with |a| <= a_max in all four quadrants, coloured by
/// image type.
inline SvgCanvas typed_cells_svg(long a_max) {
  SvgCanvas c;
  for (const auto& cell : markov::typed_cells(a_max, {1, 2, 3, 4})) {
    const std::string title = "C" + markov::to_string(cell.label) + " " + markov::to_string(cell.piece) + " type " +
                              std::to_string(cell.type_id);
    c.add({cell.polygon, type_color(cell.type_id), "", title});
  }
  return c;
}

/// Cylinder sets with |a| <= a_max, one colour per first digit.
inline SvgCanvas cylinders_svg(long a_max) {
  SvgCanvas c;
  for (long a = -a_max; a <= a_max; ++a) {
    const long bmax = (std::labs(a) + 1) / 2;
    for (long b = -bmax; b <= bmax; ++b) {
      markov::CylinderLabel l{a, b};
      if (!markov::admissible(l)) continue;
      c.add({markov::cylinder_polygon(l), type_color(static_cast<int>((std::labs(a) + b + 20) % 15) + 1), "",
             "C" + markov::to_string(l)});
    }
  }
  return c;
}

}  // namespace mdcf::io
