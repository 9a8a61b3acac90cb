#include "parlens/layout.hpp"

#include <array>
#include <fstream>
#include <sstream>

namespace parlens {

bool is_workstation(CellKind kind) {
  return kind != CellKind::Floor && kind != CellKind::Counter;
}

std::optional<CellKind> cell_from_char(char c) {
  switch (c) {
    case 'W': return CellKind::Counter;
    case ' ': return CellKind::Floor;
    case 'O': return CellKind::OnionPile;
    case 'T': return CellKind::TomatoPile;
    case 'P': return CellKind::Pot;
    case 'B': return CellKind::BowlStack;
    case 'S': return CellKind::ServeWindow;
    default: return std::nullopt;
  }
}

char cell_char(CellKind kind) {
  switch (kind) {
    case CellKind::Floor: return ' ';
    case CellKind::Counter: return 'W';
    case CellKind::OnionPile: return 'O';
    case CellKind::TomatoPile: return 'T';
    case CellKind::Pot: return 'P';
    case CellKind::BowlStack: return 'B';
    case CellKind::ServeWindow: return 'S';
  }
  return '?';
}

std::optional<CellKind> station_from_name(const std::string& name) {
  if (name == "onion") return CellKind::OnionPile;
  if (name == "tomato") return CellKind::TomatoPile;
  if (name == "pot") return CellKind::Pot;
  if (name == "bowl") return CellKind::BowlStack;
  if (name == "serve") return CellKind::ServeWindow;
  return std::nullopt;
}

std::string station_name(CellKind kind) {
  switch (kind) {
    case CellKind::OnionPile: return "onion";
    case CellKind::TomatoPile: return "tomato";
    case CellKind::Pot: return "pot";
    case CellKind::BowlStack: return "bowl";
    case CellKind::ServeWindow: return "serve";
    case CellKind::Floor: return "floor";
    case CellKind::Counter: return "counter";
  }
  return "?";
}

std::string coord_str(Coord c) {
  return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}

int LayoutSpec::capacity_at(Coord c) const {
  auto it = station_capacity.find(c);
  return it == station_capacity.end() ? 1 : it->second;
}

int LayoutSpec::floor_count() const {
  int n = 0;
  for (const auto& row : cells)
    for (CellKind k : row)
      if (k == CellKind::Floor) ++n;
  return n;
}

std::vector<Coord> LayoutSpec::stations(CellKind kind) const {
  std::vector<Coord> out;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      if (cells[y][x] == kind) out.push_back({x, y});
  return out;
}

namespace {

constexpr std::array<std::pair<int, int>, 4> kNeighbors4 = {
    {{0, -1}, {-1, 0}, {1, 0}, {0, 1}}};

struct CapacityDirective {
  CellKind kind;
  int value;
};

CapacityDirective parse_capacity_directive(const std::string& line) {
  std::istringstream in(line);
  std::string hash, word, cell;
  long long value = -1;
  in >> hash >> word >> cell >> value;
  if (word != "capacity" || cell.size() != 1 || value < 0 || !in.eof()) {
    throw ValidationError("bad directive: '" + line +
                          "' (expected '# capacity <char> <int>')");
  }
  auto kind = cell_from_char(cell[0]);
  if (!kind || !is_workstation(*kind)) {
    throw ValidationError("capacity directive for non-workstation cell '" +
                          cell + "'");
  }
  return {*kind, static_cast<int>(value)};
}

}  // namespace

LayoutSpec parse_layout(const std::string& text) {
  std::vector<std::string> grid_lines;
  std::vector<CapacityDirective> directives;

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] == '#') {
      directives.push_back(parse_capacity_directive(line));
      continue;
    }
    grid_lines.push_back(line);
  }
  while (!grid_lines.empty() && grid_lines.front().empty()) grid_lines.erase(grid_lines.begin());
  while (!grid_lines.empty() && grid_lines.back().empty()) grid_lines.pop_back();

  if (grid_lines.empty()) throw NoFloor("layout has no grid rows");

  LayoutSpec spec;
  spec.height = static_cast<int>(grid_lines.size());
  spec.width = static_cast<int>(grid_lines.front().size());
  for (int y = 0; y < spec.height; ++y) {
    const std::string& row = grid_lines[y];
    if (static_cast<int>(row.size()) != spec.width) {
      throw RaggedGrid("row " + std::to_string(y) + " has length " +
                       std::to_string(row.size()) + ", expected " +
                       std::to_string(spec.width));
    }
    std::vector<CellKind> cells;
    cells.reserve(row.size());
    for (int x = 0; x < spec.width; ++x) {
      auto kind = cell_from_char(row[x]);
      if (!kind) {
        throw UnknownCell(std::string("unknown cell '") + row[x] + "' at row " +
                          std::to_string(y) + ", col " + std::to_string(x));
      }
      cells.push_back(*kind);
    }
    spec.cells.push_back(std::move(cells));
  }

  if (spec.floor_count() == 0) throw NoFloor("layout has no floor cells");

  std::map<CellKind, int> kind_capacity;
  for (const auto& d : directives) kind_capacity[d.kind] = d.value;

  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      Coord c{x, y};
      CellKind kind = spec.at(c);
      if (!is_workstation(kind)) continue;
      bool has_floor_neighbor = false;
      for (auto [dx, dy] : kNeighbors4) {
        Coord n{x + dx, y + dy};
        if (spec.in_bounds(n) && spec.at(n) == CellKind::Floor) {
          has_floor_neighbor = true;
          break;
        }
      }
      if (!has_floor_neighbor) {
        throw UnreachableWorkstation("workstation at " + coord_str(c) +
                                     " has no adjacent floor cell");
      }
      auto it = kind_capacity.find(kind);
      spec.station_capacity[c] = it == kind_capacity.end() ? 1 : it->second;
    }
  }
  return spec;
}

LayoutSpec load_layout(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open layout '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_layout(buf.str());
}

}  // namespace parlens
