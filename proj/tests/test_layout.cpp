#include <doctest.h>

#include "parlens/layout.hpp"

using namespace parlens;

namespace {

const char* kOpenRoom =
    "WWOWW\n"
    "S   W\n"
    "W   P\n"
    "B   W\n"
    "WWWWW\n";

}  // namespace

TEST_CASE("3x3 all-counter border with one floor cell") {
  auto spec = parse_layout("WWW\nW W\nWWW\n");
  CHECK(spec.width == 3);
  CHECK(spec.height == 3);
  CHECK(spec.floor_count() == 1);
  int counters = 0;
  for (const auto& row : spec.cells)
    for (CellKind k : row)
      if (k == CellKind::Counter) ++counters;
  CHECK(counters == 8);
}

TEST_CASE("open 5x5 room: 9 floor cells, stations on the border") {
  auto spec = parse_layout(kOpenRoom);
  CHECK(spec.floor_count() == 9);
  CHECK(spec.stations(CellKind::OnionPile) == std::vector<Coord>{{2, 0}});
  CHECK(spec.stations(CellKind::Pot) == std::vector<Coord>{{4, 2}});
  CHECK(spec.stations(CellKind::BowlStack) == std::vector<Coord>{{0, 3}});
  CHECK(spec.stations(CellKind::ServeWindow) == std::vector<Coord>{{0, 1}});
  CHECK(spec.capacity_at({4, 2}) == 1);
}

TEST_CASE("ragged rows are rejected") {
  CHECK_THROWS_AS(parse_layout("WWWWW\nWWWW\n"), RaggedGrid);
}

TEST_CASE("unknown cell characters are rejected") {
  CHECK_THROWS_AS(parse_layout("WWW\nWxW\nWWW\n"), UnknownCell);
}

TEST_CASE("a layout without floor is rejected") {
  CHECK_THROWS_AS(parse_layout("WWW\nWWW\n"), NoFloor);
  CHECK_THROWS_AS(parse_layout(""), NoFloor);
}

TEST_CASE("workstations must touch a floor cell") {
  // pot walled off in the corner
  CHECK_THROWS_AS(parse_layout("PWW\nW W\nWWW\n"), UnreachableWorkstation);
}

TEST_CASE("capacity directives override station capacity by kind") {
  auto spec = parse_layout("# capacity P 2\nWPW\nW W\nWWW\n");
  CHECK(spec.capacity_at({1, 0}) == 2);

  CHECK_THROWS_AS(parse_layout("# capacity X 2\nWPW\nW W\nWWW\n"),
                  ValidationError);
  CHECK_THROWS_AS(parse_layout("# capacity P -1\nWPW\nW W\nWWW\n"),
                  ValidationError);
}

TEST_CASE("station names round-trip") {
  for (CellKind kind : {CellKind::OnionPile, CellKind::TomatoPile, CellKind::Pot,
                        CellKind::BowlStack, CellKind::ServeWindow}) {
    CHECK(station_from_name(station_name(kind)) == kind);
    CHECK(is_workstation(kind));
  }
  CHECK_FALSE(is_workstation(CellKind::Floor));
  CHECK_FALSE(station_from_name("tavern").has_value());
}
