#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "parlens/errors.hpp"

namespace parlens {

enum class CellKind : unsigned char {
  Floor,
  Counter,
  OnionPile,
  TomatoPile,
  Pot,
  BowlStack,
  ServeWindow,
};

bool is_workstation(CellKind kind);

/// Grid cell characters: `W` counter, space floor, `O` onion pile,
/// `T` tomato pile, `P` pot, `B` bowl stack, `S` serving window.
std::optional<CellKind> cell_from_char(char c);
char cell_char(CellKind kind);

/// Workstation kind names used by task specs: onion, tomato, pot, bowl, serve.
std::optional<CellKind> station_from_name(const std::string& name);
std::string station_name(CellKind kind);

/// Grid coordinate, x = column, y = row. Ordered row-major so that node and
/// tie-breaking order is reading order.
struct Coord {
  int x = 0;
  int y = 0;

  friend bool operator==(Coord a, Coord b) { return a.x == b.x && a.y == b.y; }
  friend bool operator<(Coord a, Coord b) {
    return std::tie(a.y, a.x) < std::tie(b.y, b.x);
  }
};

std::string coord_str(Coord c);

struct LayoutSpec {
  int width = 0;
  int height = 0;
  std::vector<std::vector<CellKind>> cells;  // [row][col]
  std::map<Coord, int> station_capacity;     // c(v) for every workstation cell

  CellKind at(Coord c) const { return cells[c.y][c.x]; }
  bool in_bounds(Coord c) const {
    return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height;
  }
  int capacity_at(Coord c) const;
  int floor_count() const;
  std::vector<Coord> stations(CellKind kind) const;
};

/// Parse an ASCII grid layout. Lines starting with `#` are directives;
/// `# capacity <char> <int>` overrides c(v) for every cell of that
/// workstation kind (default 1). Leading and trailing blank lines are
/// ignored; interior rows must all have the same length.
LayoutSpec parse_layout(const std::string& text);

LayoutSpec load_layout(const std::string& path);

}  // namespace parlens
