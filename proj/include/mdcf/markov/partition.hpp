#pragma once

#include <algorithm>
#include <array>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mdcf/core/error.hpp"
#include "mdcf/core/parallel.hpp"
#include "mdcf/core/polygon.hpp"

// Cylinders, Markov pieces and image types of the two-dimensional nearest
// integer Jacobi–Perron map T0(x1, x2) = (x2/x1 - b, 1/x1 - a) on
// C = [-1/2, 1/2]^2.
namespace mdcf::markov {

struct CylinderLabel {
  Integer a;
  Integer b;

  friend bool operator==(const CylinderLabel& l, const CylinderLabel& r) { return l.a == r.a && l.b == r.b; }
  friend bool operator<(const CylinderLabel& l, const CylinderLabel& r) {
    return l.a != r.a ? l.a < r.a : l.b < r.b;
  }
};

inline std::string to_string(const CylinderLabel& l) { return "(" + l.a.get_str() + "," + l.b.get_str() + ")"; }

/// |a| >= 2 and |b| <= ceil(|a|/2).
inline bool admissible(const CylinderLabel& l) {
  const Integer aa = abs(l.a);
  return aa >= 2 && abs(l.b) <= (aa + 1) / 2;
}

enum class Letter { E, F, G, H, J };
inline constexpr std::array<Letter, 5> kLetters{Letter::E, Letter::F, Letter::G, Letter::H, Letter::J};

struct PieceId {
  Letter letter = Letter::E;
  int quadrant = 1;

  friend bool operator==(const PieceId& l, const PieceId& r) {
    return l.letter == r.letter && l.quadrant == r.quadrant;
  }
  friend bool operator<(const PieceId& l, const PieceId& r) {
    return l.quadrant != r.quadrant ? l.quadrant < r.quadrant : l.letter < r.letter;
  }
};

inline std::string to_string(const PieceId& p) {
  return std::string(1, "EFGHJ"[static_cast<int>(p.letter)]) + std::to_string(p.quadrant);
}

inline PieceId parse_piece(const std::string& s) {
  static const std::string letters = "EFGHJ";
  if (s.size() != 2 || letters.find(s[0]) == std::string::npos || s[1] < '1' || s[1] > '4')
    throw DomainError("unknown Markov piece '" + s + "'");
  return {static_cast<Letter>(letters.find(s[0])), s[1] - '0'};
}

/// Signs (sx, sy) of quadrant 1..4.
inline std::pair<int, int> quadrant_signs(int q) {
  switch (q) {
    case 1: return {1, 1};
    case 2: return {-1, 1};
    case 3: return {-1, -1};
    case 4: return {1, -1};
    default: throw DomainError("quadrant must be 1..4");
  }
}

inline int quadrant_of(int sx, int sy) {
  if (sx > 0) return sy > 0 ? 1 : 4;
  return sy > 0 ? 2 : 3;
}

/// Piece P reflected by (x, y) -> (rx x, ry y).
inline PieceId reflect(const PieceId& p, int rx, int ry) {
  auto [sx, sy] = quadrant_signs(p.quadrant);
  return {p.letter, quadrant_of(rx * sx, ry * sy)};
}

inline ConvexPolygon unit_cell() {
  return ConvexPolygon::box(Rational(-1, 2), Rational(-1, 2), Rational(1, 2), Rational(1, 2));
}

namespace detail {

inline Rational qr(long n, long d = 1) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

// Quadrant-1 pieces cut out by x2 = x1, x2 = 2 x1 and x2 = 1 - 2 x1.
inline ConvexPolygon first_quadrant_piece(Letter l) {
  const Point o{0, 0}, e{qr(1, 2), 0}, top{qr(1, 4), qr(1, 2)}, mid{qr(1, 3), qr(1, 3)}, corner{qr(1, 2), qr(1, 2)};
  switch (l) {
    case Letter::E: return ConvexPolygon({o, top, {0, qr(1, 2)}});
    case Letter::F: return ConvexPolygon({o, mid, top});
    case Letter::G: return ConvexPolygon({top, mid, corner});
    case Letter::H: return ConvexPolygon({o, e, mid});
    case Letter::J: return ConvexPolygon({e, corner, mid});
  }
  throw DomainError("unknown letter");
}

}  // namespace detail

inline ConvexPolygon piece_polygon(const PieceId& p) {
  auto [sx, sy] = quadrant_signs(p.quadrant);
  return mdcf::reflect(detail::first_quadrant_piece(p.letter), sx, sy);
}

/// The 20 pieces, quadrant by quadrant in the order E, F, G, H, J.
inline const std::vector<std::pair<PieceId, ConvexPolygon>>& markov_pieces() {
  static const std::vector<std::pair<PieceId, ConvexPolygon>> pieces = [] {
    std::vector<std::pair<PieceId, ConvexPolygon>> v;
    for (int q = 1; q <= 4; ++q)
      for (Letter l : kLetters) v.emplace_back(PieceId{l, q}, piece_polygon({l, q}));
    return v;
  }();
  return pieces;
}

/// C ∩ {a - 1/2 <= 1/x1 <= a + 1/2} ∩ {b - 1/2 <= x2/x1 <= b + 1/2}, written
/// as half-planes after multiplying through by x1 of sign sgn(a). Empty for
/// labels that are not admissible.
inline ConvexPolygon cylinder_polygon(const CylinderLabel& l) {
  if (!admissible(l)) return {};
  const Rational s = sgn(l.a);
  const Rational a(l.a), b(l.b), h(1, 2);
  ConvexPolygon p = unit_cell();
  p = clip(p, {0, s, 0});
  p = clip(p, {s, -s * (a - h), 0});
  p = clip(p, {-s, s * (a + h), 0});
  p = clip(p, {0, -s * (b - h), s});
  p = clip(p, {0, s * (b + h), -s});
  if (p.empty()) throw ConsistencyError("cylinder_polygon: admissible label " + to_string(l) + " gave an empty set");
  return p;
}

struct TypedCell {
  CylinderLabel label;
  PieceId piece;
  ConvexPolygon polygon;
  int type_id = 0;
};

/// The digits of the quadrant-1 cell that the reflection (sx, sy) carries
/// to the given cell: a' = sx a, b' = sx sy b.
inline CylinderLabel to_first_quadrant(const CylinderLabel& l, int quadrant) {
  auto [sx, sy] = quadrant_signs(quadrant);
  return {sx * l.a, sx * sy * l.b};
}

/// Image type 1..15 of the quadrant-1 cell C_{a,b} ∩ P. Throws
/// ConsistencyError when no family matches.
inline int classify_type(const CylinderLabel& l, Letter p) {
  const Integer& a = l.a;
  const Integer& b = l.b;
  auto is = [&](long aa, long bb) { return a == aa && b == bb; };
  switch (p) {
    case Letter::H:
      if (is(2, 0)) return 1;
      if (b == 0 && a >= 3) return 5;
      if (is(3, 1)) return 6;
      if (b == 1 && a >= 4) return 10;
      break;
    case Letter::J:
      if (is(2, 0)) return 2;
      if (is(2, 1)) return 3;
      if (is(3, 1)) return 7;
      break;
    case Letter::F:
      if (is(3, 1)) return 1;
      if (b == 1 && a >= 4) return 5;
      if (is(4, 2)) return 6;
      if (b == 2 && a >= 5) return 10;
      break;
    case Letter::G:
      if (is(2, 1)) return 4;
      if (is(3, 1)) return 8;
      if (is(3, 2)) return 9;
      if (is(4, 2)) return 11;
      break;
    case Letter::E:
      if (is(4, 2)) return 4;
      if (is(5, 2)) return 12;
      if (b == 2 && a >= 6) return 5;
      if (b >= 3 && a == 2 * b - 1) return 9;
      if (b >= 3 && a == 2 * b) return 13;
      if (b >= 3 && a == 2 * b + 1) return 14;
      if (b >= 3 && a >= 2 * b + 2) return 15;
      break;
  }
  throw ConsistencyError("classify_type: cell " + to_string(l) + " in " + to_string(PieceId{p, 1}) +
                         " matches no image type");
}

inline int classify_type(const TypedCell& c) {
  return classify_type(to_first_quadrant(c.label, c.piece.quadrant), c.piece.letter);
}

/// Image of a type in quadrant 1, as a list of pieces.
inline std::vector<PieceId> first_quadrant_image(int type_id) {
  using L = Letter;
  auto all = [](std::initializer_list<int> qs) {
    std::vector<PieceId> v;
    for (int q : qs)
      for (Letter l : kLetters) v.push_back({l, q});
    return v;
  };
  switch (type_id) {
    case 1: return {{L::E, 1}, {L::F, 1}, {L::G, 1}};
    case 2: return {{L::H, 1}, {L::J, 1}};
    case 3: return all({2});
    case 4: return {{L::E, 1}};
    case 5: return all({1, 4});
    case 6: {
      auto v = all({2});
      v.push_back({L::H, 3});
      v.push_back({L::J, 3});
      return v;
    }
    case 7: return {{L::E, 3}, {L::F, 3}, {L::G, 3}};
    case 8: return {{L::H, 1}, {L::J, 1}, {L::E, 4}, {L::F, 4}, {L::H, 4}};
    case 9: return {{L::G, 2}, {L::J, 2}};
    case 10: return all({2, 3});
    case 11: return {{L::F, 3}, {L::G, 3}};
    case 12: {
      auto v = all({1});
      for (L l : {L::E, L::F, L::H}) v.push_back({l, 4});
      return v;
    }
    case 13: {
      std::vector<PieceId> v{{L::E, 1}};
      for (L l : kLetters) v.push_back({l, 2});
      for (L l : {L::F, L::G, L::H, L::J}) v.push_back({l, 3});
      return v;
    }
    case 14: {
      std::vector<PieceId> v;
      for (const auto& [id, poly] : markov_pieces())
        if (!(id == PieceId{L::G, 4} || id == PieceId{L::J, 4})) v.push_back(id);
      return v;
    }
    case 15: return all({1, 2, 3, 4});
    default: throw DomainError("image type must be 1..15");
  }
}

/// Expected image of a cell of the given type lying in `quadrant`: the
/// quadrant-1 image reflected by (sx sy, sx).
inline std::vector<PieceId> expected_image(int type_id, int quadrant) {
  auto [sx, sy] = quadrant_signs(quadrant);
  auto v = first_quadrant_image(type_id);
  for (auto& p : v) p = reflect(p, sx * sy, sx);
  std::sort(v.begin(), v.end());
  return v;
}

/// Every nonempty cell C_{a,b} ∩ P with |a| <= a_max and P in one of the
/// given quadrants, typed. Ordered by quadrant, a, b, piece letter.
inline std::vector<TypedCell> typed_cells(long a_max, const std::vector<int>& quadrants = {1}) {
  if (a_max < 2) throw PreconditionError("typed_cells: a_max must be at least 2");
  std::vector<TypedCell> out;
  for (int q : quadrants) {
    auto [sx, sy] = quadrant_signs(q);
    for (long a1 = 2; a1 <= a_max; ++a1) {
      for (long b1 = 0; b1 <= (a1 + 1) / 2; ++b1) {
        // first-quadrant digits, carried to quadrant q by (sx, sy)
        const CylinderLabel l{sx * a1, sx * sy * b1};
        const ConvexPolygon cyl = cylinder_polygon(l);
        for (Letter letter : kLetters) {
          PieceId id{letter, q};
          ConvexPolygon cell = polygon_clip(cyl, piece_polygon(id));
          if (cell.empty()) continue;
          TypedCell c{l, id, std::move(cell), 0};
          c.type_id = classify_type(c);
          out.push_back(std::move(c));
        }
      }
    }
  }
  return out;
}

struct RowCheck {
  int type_id = 0;
  CylinderLabel label;
  PieceId piece;
  Rational residual;
  bool pass = false;
};

/// Exact image of the cell compared with the expected union of pieces.
inline RowCheck check_cell(const TypedCell& c) {
  RowCheck r{c.type_id, c.label, c.piece, 0, false};
  const ConvexPolygon img = projective_image(c.polygon, c.label.a, c.label.b);
  std::vector<ConvexPolygon> want;
  for (const auto& id : expected_image(c.type_id, c.piece.quadrant)) want.push_back(piece_polygon(id));
  r.residual = union_symm_diff_area({img}, want);
  r.pass = r.residual == 0;
  return r;
}

/// Checks every instance of the type with |a| <= a_max in the given
/// quadrants (quadrant 1 by default).
inline std::vector<RowCheck> verify_markov_row(int type_id, long a_max, const std::vector<int>& quadrants = {1}) {
  if (type_id < 1 || type_id > 15) throw DomainError("image type must be 1..15");
  std::vector<RowCheck> out;
  for (const auto& c : typed_cells(a_max, quadrants))
    if (c.type_id == type_id) out.push_back(check_cell(c));
  return out;
}

struct MarkovReport {
  long a_max = 0;
  std::vector<RowCheck> rows;
  /// Types with no instance in the verified range.
  std::vector<int> uncovered;

  [[nodiscard]] bool passed() const {
    return std::all_of(rows.begin(), rows.end(), [](const RowCheck& r) { return r.pass; });
  }
};

/// All 15 types over |a| <= a_max; cells are checked in parallel and reported
/// in the order of typed_cells, sorted stably by type.
inline MarkovReport verify_markov(long a_max, const std::vector<int>& quadrants = {1}, unsigned threads = 1) {
  MarkovReport rep;
  rep.a_max = a_max;
  const auto cells = typed_cells(a_max, quadrants);
  rep.rows.resize(cells.size());
  parallel_for(cells.size(), threads, [&](std::size_t i) { rep.rows[i] = check_cell(cells[i]); });
  std::stable_sort(rep.rows.begin(), rep.rows.end(),
                   [](const RowCheck& x, const RowCheck& y) { return x.type_id < y.type_id; });
  std::set<int> seen;
  for (const auto& r : rep.rows) seen.insert(r.type_id);
  for (int t = 1; t <= 15; ++t)
    if (!seen.count(t)) rep.uncovered.push_back(t);
  return rep;
}

/// Cells of positive area inside the image of the cell (label, piece),
/// with |a| <= a_max. The image is a union of pieces, so these are the
/// cells lying in one of its pieces.
inline std::vector<std::pair<CylinderLabel, PieceId>> admissible_followers(const CylinderLabel& label,
                                                                           const PieceId& piece, long a_max) {
  const ConvexPolygon cell = polygon_clip(cylinder_polygon(label), piece_polygon(piece));
  if (cell.empty()) throw PreconditionError("admissible_followers: empty cell");
  const TypedCell tc{label, piece, cell, 0};
  const auto image = expected_image(classify_type(tc), piece.quadrant);
  const std::set<PieceId> in(image.begin(), image.end());
  std::vector<std::pair<CylinderLabel, PieceId>> out;
  for (const auto& c : typed_cells(a_max, {1, 2, 3, 4}))
    if (in.count(c.piece)) out.emplace_back(c.label, c.piece);
  std::sort(out.begin(), out.end());
  return out;
}

/// Digits that can follow the digit (a, b) from any of its cells.
inline std::set<CylinderLabel> digit_followers(const CylinderLabel& label, long a_max) {
  std::set<CylinderLabel> out;
  const ConvexPolygon cyl = cylinder_polygon(label);
  for (const auto& [id, poly] : markov_pieces()) {
    if (polygon_clip(cyl, poly).empty()) continue;
    for (const auto& f : admissible_followers(label, id, a_max)) out.insert(f.first);
  }
  return out;
}

/// Strict interior membership for a counterclockwise convex polygon.
inline bool strictly_inside(const ConvexPolygon& p, const Point& x) {
  const auto& v = p.vertices();
  if (v.size() < 3) return false;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (sgn(cross(v[i], v[(i + 1) % v.size()], x)) <= 0) return false;
  return true;
}

/// All cells of |a| <= a_max in the four quadrants, indexed for point
/// location by membership.
class CellAtlas {
 public:
  explicit CellAtlas(long a_max) : a_max_(a_max), cells_(typed_cells(a_max, {1, 2, 3, 4})) {
    for (const auto& c : cells_) {
      Rational lo = c.polygon.vertices()[0].x, hi = lo;
      for (const auto& v : c.polygon.vertices()) {
        lo = std::min(lo, v.x);
        hi = std::max(hi, v.x);
      }
      range_.emplace_back(lo, hi);
    }
  }

  [[nodiscard]] long a_max() const { return a_max_; }
  [[nodiscard]] const std::vector<TypedCell>& cells() const { return cells_; }

  /// The cell whose interior holds x; nullptr on a cell boundary or for
  /// points whose digit a exceeds the range.
  [[nodiscard]] const TypedCell* locate(const Point& x) const {
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      if (x.x <= range_[i].first || x.x >= range_[i].second) continue;
      if (strictly_inside(cells_[i].polygon, x)) return &cells_[i];
    }
    return nullptr;
  }

 private:
  long a_max_;
  std::vector<TypedCell> cells_;
  std::vector<std::pair<Rational, Rational>> range_;
};

}  // namespace mdcf::markov
