#include <sstream>

#include "doctest.h"
#include "support.hpp"

#include "ioncrystal/config.hpp"
#include "ioncrystal/equilibrium.hpp"
#include "ioncrystal/errors.hpp"
#include "ioncrystal/io.hpp"

using namespace ioncrystal;

namespace {

TrapConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

}  // namespace

TEST_CASE("shipped config equals the built-in defaults") {
  const auto c = load_config(IONCRYSTAL_TEST_CONFIG);
  const TrapConfig d;
  CHECK(c.species.mass == doctest::Approx(d.species.mass).epsilon(1e-15));
  CHECK(c.species.charge == d.species.charge);
  CHECK(c.geometry.ring_radius() == doctest::Approx(512e-6).epsilon(1e-15));
  CHECK(c.geometry.cap_axial_length() == doctest::Approx(524e-6).epsilon(1e-15));
  CHECK(c.geometry.top_linear_length() == doctest::Approx(761e-6).epsilon(1e-15));
  CHECK(c.geometry.bottom_linear_length() == doctest::Approx(-761e-6).epsilon(1e-15));
  CHECK(c.geometry.cap_radial_length() == doctest::Approx(704e-6).epsilon(1e-15));
  CHECK(c.geometry.cap_offset() == 0.812);
  CHECK(c.drive.rf_amplitude == 500.0);
  CHECK(c.drive.rf_angular_frequency == doctest::Approx(d.drive.rf_angular_frequency));
  CHECK(c.drive.ring_dc == 46.3);
  CHECK(c.drive.top_dc == 50.0);
  CHECK(c.drive.bottom_dc == 50.0);
}

TEST_CASE("units are converted") {
  const auto c = parse(
      "# comment\n"
      "species.mass = 2.838e-25 kg\n"
      "geometry.r_o = 0.5 mm\n"
      "drive.omega_rf = 35 MHz\n"
      "drive.v_rf = 0.4 kV\n"
      "drive.v_ring = 2500 mV   # trailing comment\n");
  CHECK(c.species.mass == 2.838e-25);
  CHECK(c.geometry.ring_radius() == doctest::Approx(5e-4));
  CHECK(c.drive.rf_angular_frequency == doctest::Approx(2.0 * M_PI * 35e6));
  CHECK(c.drive.rf_amplitude == doctest::Approx(400.0));
  CHECK(c.drive.ring_dc == doctest::Approx(2.5));
}

TEST_CASE("config rejects malformed input") {
  CHECK_THROWS_AS(parse("drive.v_ring = 5\n"), ValidationError);           // no unit
  CHECK_THROWS_AS(parse("drive.v_ring = 5 furlong\n"), ValidationError);   // bad unit
  CHECK_THROWS_AS(parse("drive.v_rung = 5 V\n"), ValidationError);         // unknown key
  CHECK_THROWS_AS(parse("drive.v_ring = x V\n"), ValidationError);         // bad number
  CHECK_THROWS_AS(parse("drive.v_ring 5 V\n"), ValidationError);           // no '='
  CHECK_THROWS_AS(parse("drive.v_top = 1 V\ndrive.v_top = 2 V\n"), ValidationError);
  CHECK_THROWS_AS(parse("drive.omega_rf = -5 MHz\n"), ValidationError);
  CHECK_THROWS_AS(parse("species.mass = 0 u\n"), ValidationError);
  CHECK_THROWS_AS(parse("geometry.b_b = 700 um\n"), ValidationError);
  CHECK_NOTHROW(parse("geometry.b_b = -761 um\n"));
  CHECK_THROWS_AS(load_config("/nonexistent/trap.cfg"), ValidationError);
}

TEST_CASE("render and parse round trip") {
  TrapConfig c;
  c.drive.ring_dc = 12.345678901234567;
  c.drive.top_dc = -3.0;
  const auto back = parse(render_config(c));
  CHECK(back.drive.ring_dc == c.drive.ring_dc);
  CHECK(back.drive.top_dc == c.drive.top_dc);
  CHECK(back.drive.rf_angular_frequency == c.drive.rf_angular_frequency);
  CHECK(back.species.mass == c.species.mass);
  CHECK(back.geometry.ring_radius() == c.geometry.ring_radius());
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 46.3, -1e-300, 6.02214076e23}) {
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(0.5) == "0.5");
}

TEST_CASE("positions csv layout") {
  const auto s = solve_equilibrium(testing::paper_trap(), 1);
  std::ostringstream os;
  write_positions_csv(os, s, shell_decomposition(s));
  const std::string text = os.str();
  CHECK(text.rfind("index,x1,x2,radius,ring\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}
