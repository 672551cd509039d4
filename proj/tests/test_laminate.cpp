#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace fpbh;
using Catch::Approx;

namespace {

// Midpoint-rule integral of Y(z) z^2 b dz about the neutral axis, from raw layer data.
double yi_by_quadrature(const std::vector<MaterialLayer>& layers, double b, std::size_t per_layer = 20000) {
  double ea = 0.0, first = 0.0, z0 = 0.0;
  for (const auto& l : layers) {
    const double h = l.thickness / per_layer;
    for (std::size_t i = 0; i < per_layer; ++i) {
      const double z = z0 + (i + 0.5) * h;
      ea += l.modulus * h;
      first += l.modulus * h * z;
    }
    z0 += l.thickness;
  }
  const double zbar = first / ea;
  double yi = 0.0;
  z0 = 0.0;
  for (const auto& l : layers) {
    const double h = l.thickness / per_layer;
    for (std::size_t i = 0; i < per_layer; ++i) {
      const double z = z0 + (i + 0.5) * h - zbar;
      // Exact for the quadratic integrand when the h^3/12 cell correction is added.
      yi += l.modulus * b * (z * z * h + h * h * h / 12.0);
    }
    z0 += l.thickness;
  }
  return yi;
}

}  // namespace

TEST_CASE("single homogeneous layer gives the rectangle formula") {
  const double h = 1.3e-3, b = 0.02, Y = 70e9;
  Laminate lam({MaterialLayer::elastic("al", h, 2700.0, Y)}, b, Wiring::single);
  CHECK(lam.bending_stiffness() == Approx(Y * b * h * h * h / 12.0).epsilon(1e-14));
  CHECK(lam.neutral_axis() == Approx(h / 2.0).epsilon(1e-15));
  CHECK(lam.mass_per_length() == Approx(b * h * 2700.0).epsilon(1e-15));
  CHECK_FALSE(lam.has_piezo());
  CHECK_THROWS_AS(lam.coupling_factor(), ValidationError);
}

TEST_CASE("symmetric bimorph puts the neutral axis on the substrate mid-plane") {
  for (auto w : {Wiring::series, Wiring::parallel}) {
    const auto lam = test::bimorph(w, 0.3e-3, 0.2e-3);
    CHECK(lam.neutral_axis() == Approx(0.2e-3 + 0.15e-3).epsilon(1e-14));
    const auto ifs = lam.interfaces();
    CHECK(ifs.front() == Approx(-ifs.back()).epsilon(1e-14));
  }
}

TEST_CASE("bending stiffness matches z-quadrature of the section") {
  const std::vector<MaterialLayer> layers{MaterialLayer::elastic("a", 0.17e-3, 8000.0, 200e9),
                                          MaterialLayer::elastic("b", 0.05e-3, 1100.0, 3e9),
                                          MaterialLayer::piezo("p", 0.28e-3, 7800.0, 60e9, -190e-12, 1700.0)};
  Laminate lam(layers, 0.015, Wiring::single);
  CHECK(test::rel(lam.bending_stiffness(), yi_by_quadrature(layers, 0.015)) < 1e-10);
}

TEST_CASE("unimorph closed form for YI and coupling") {
  const double hs = 0.15e-3, hp = 0.3e-3, b = 0.02, Ys = 111.4e9, Yp = 24.8e9, d31 = -170e-12;
  Laminate lam({MaterialLayer::elastic("s", hs, 8960.0, Ys), MaterialLayer::piezo("p", hp, 5540.0, Yp, d31, 1800.0)}, b,
               Wiring::single);
  const double zbar = (Ys * hs * hs / 2 + Yp * hp * (hs + hp / 2)) / (Ys * hs + Yp * hp);
  const double za = -zbar, zb = hs - zbar, zc = hs + hp - zbar;
  const double yi = b / 3.0 * (Ys * (zb * zb * zb - za * za * za) + Yp * (zc * zc * zc - zb * zb * zb));
  CHECK(test::rel(lam.bending_stiffness(), yi) < 1e-13);
  const double e31 = d31 * Yp;
  CHECK(test::rel(lam.coupling_factor(), -e31 * b / (2 * hp) * (zc * zc - zb * zb)) < 1e-13);
  CHECK(lam.coupling_factor() > 0.0);  // d31 < 0 with the piezo above the neutral axis
  CHECK(lam.piezo_outer_surface() == Approx(zc).epsilon(1e-14));
}

TEST_CASE("degenerate unimorph reduces to a single piezo layer") {
  const double hp = 0.3e-3, b = 0.02;
  Laminate lam({MaterialLayer::piezo("p", hp, 5540.0, 24.8e9, -170e-12, 1800.0)}, b, Wiring::single);
  CHECK(lam.bending_stiffness() == Approx(24.8e9 * b * hp * hp * hp / 12.0).epsilon(1e-13));
  // Bracket z_c^2 - z_b^2 vanishes for a layer centred on the neutral axis.
  CHECK(std::abs(lam.coupling_factor()) < 1e-20);
}

TEST_CASE("bimorph with vanishing piezo tends to the bare substrate") {
  const double hs = 0.3e-3, b = 0.01;
  const auto lam = test::bimorph(Wiring::series, hs, 1e-9, b);
  CHECK(lam.bending_stiffness() == Approx(111.4e9 * b * hs * hs * hs / 12.0).epsilon(1e-4));
}

TEST_CASE("parallel coupling is twice the series coupling") {
  const auto s = test::bimorph(Wiring::series);
  const auto p = test::bimorph(Wiring::parallel);
  CHECK(p.coupling_factor() / s.coupling_factor() == Approx(2.0).epsilon(1e-15));
}

TEST_CASE("coupling stays finite as the piezo layer thins at fixed position") {
  // Thin piezo sheet at fixed mid-plane z_m: bracket/h_p -> 2 z_m.
  std::vector<double> values;
  for (double hp : {1e-4, 1e-5, 1e-6, 1e-7}) {
    const double zm = 0.4e-3;
    // Stiff core symmetric about z = 0 keeps the neutral axis fixed; the sheet sits on both faces.
    const auto p = MaterialLayer::piezo("p", hp, 5540.0, 24.8e9, -170e-12, 1800.0);
    const auto gap = MaterialLayer::elastic("gap", zm - hp / 2 - 0.2e-3, 1000.0, 1e3);
    Laminate lam({p, gap, MaterialLayer::elastic("core", 0.4e-3, 8960.0, 111.4e9), gap, p}, 0.01, Wiring::series);
    values.push_back(lam.coupling_factor());
  }
  const double limit = 170e-12 * 24.8e9 * 0.01 * 0.4e-3;
  CHECK(values.back() == Approx(limit).epsilon(1e-6));
  CHECK(std::isfinite(values.front()));
}

TEST_CASE("e31 and the clamped permittivity") {
  const auto p = MaterialLayer::piezo("p", 0.3e-3, 5540.0, 24.8e9, -170e-12, 1800.0);
  CHECK(p.e31() == Approx(-4.216).epsilon(1e-12));
  CHECK(p.eps33_strain() == Approx(1800.0 * 8.8541878128e-12 - 4.216 * 4.216 / 24.8e9).epsilon(1e-12));
  CHECK(p.eps33_strain() > 0.0);
}

TEST_CASE("capacitance is linear in span and vanishes for thick layers") {
  const auto lam = test::unimorph();
  CHECK(lam.capacitance(0.0, 0.04) == Approx(2.0 * lam.capacitance(0.0, 0.02)).epsilon(1e-15));
  CHECK(lam.capacitance(0.01, 0.02) > 0.0);
  CHECK_THROWS_AS(lam.capacitance(0.02, 0.01), ValidationError);
  Laminate thin({MaterialLayer::piezo("p", 1e-4, 5540.0, 24.8e9, -170e-12, 1800.0)}, 0.012, Wiring::single);
  Laminate thick({MaterialLayer::piezo("p", 1.0, 5540.0, 24.8e9, -170e-12, 1800.0)}, 0.012, Wiring::single);
  CHECK(thick.capacitance(0.0, 0.085) == Approx(1e-4 * thin.capacitance(0.0, 0.085)).epsilon(1e-14));
  // 28 mm wide, 85 mm long, 0.3 mm thick MFC-class layer: tens of nF.
  Laminate ref({MaterialLayer::piezo("p", 0.3e-3, 5540.0, 24.8e9, -170e-12, 1800.0)}, 0.028, Wiring::single);
  const double c = ref.capacitance(0.0, 0.085);
  CHECK(c > 1e-9);
  CHECK(c < 1e-6);
}

TEST_CASE("effective circuit as printed and conventional") {
  CHECK(effective_circuit(Wiring::single, 29e3, 1e-7).resistance == 29e3);
  CHECK(effective_circuit(Wiring::parallel, 10e3, 1e-7).resistance == 20e3);
  CHECK(effective_circuit(Wiring::parallel, 10e3, 1e-7).capacitance == 1e-7);
  CHECK(effective_circuit(Wiring::series, 123.0, 1e-7).resistance == 123.0);
  CHECK(effective_circuit(Wiring::series, 123.0, 1e-7).capacitance == 1e-7);
  const auto cs = effective_circuit(Wiring::series, 10e3, 1e-7, CircuitConvention::conventional);
  const auto cp = effective_circuit(Wiring::parallel, 10e3, 1e-7, CircuitConvention::conventional);
  CHECK(cs.capacitance == Approx(0.5e-7));
  CHECK(cp.capacitance == Approx(2e-7));
  CHECK(cp.resistance == 10e3);
  CHECK_THROWS_AS(effective_circuit(Wiring::single, 0.0, 1e-7), ValidationError);
  CHECK_THROWS_AS(effective_circuit(Wiring::single, -5.0, 1e-7), ValidationError);
}

TEST_CASE("construction errors name the offending field") {
  const auto p = MaterialLayer::piezo("p", 0.3e-3, 5540.0, 24.8e9, -170e-12, 1800.0);
  auto path_of = [](auto&& f) {
    try {
      f();
    } catch (const ValidationError& e) {
      return e.path();
    }
    return std::string("no error");
  };
  CHECK(path_of([] { Laminate({}, 0.01, Wiring::single); }) == "laminate.layers");
  CHECK(path_of([&] { Laminate({p}, 0.0, Wiring::single); }) == "laminate.width");
  CHECK(path_of([&] { Laminate({p, MaterialLayer::elastic("s", -1e-3, 1.0, 1.0)}, 0.01, Wiring::single); }) ==
        "laminate.layers[1].thickness");
  CHECK(path_of([&] { Laminate({p, p}, 0.01, Wiring::single); }) == "laminate.wiring");
  CHECK(path_of([&] { Laminate({p}, 0.01, Wiring::parallel); }) == "laminate.wiring");
  auto q = p;
  q.thickness *= 2.0;
  CHECK(path_of([&] { Laminate({p, MaterialLayer::elastic("s", 1e-4, 1.0, 1e9), q}, 0.01, Wiring::series); }) ==
        "laminate.layers");
  CHECK(path_of([&] {
          Laminate({p, MaterialLayer::elastic("s", 1e-4, 1.0, 1e9), p, MaterialLayer::elastic("t", 1e-4, 1.0, 1e9)},
                   0.01, Wiring::series);
        }) == "laminate.layers");
}

TEST_CASE("offset conventions") {
  const auto base = test::unimorph();
  std::vector<MaterialLayer> ls(base.layers().begin(), base.layers().end());
  Laminate mid(ls, base.width(), Wiring::single, OffsetConvention::layer_midplanes);
  const double hs = ls[0].thickness + ls[1].thickness, hp = ls[2].thickness;
  CHECK(mid.piezo_offset() == Approx((hs + hp) / 2.0).epsilon(1e-15));
  const auto [zb, zc] = base.layer_bounds(2);
  CHECK(base.piezo_offset() == Approx((zb + zc) / 2.0).epsilon(1e-15));
  // Geometric offset makes the coupling conservative: P = -e31 b Z_p.
  CHECK(base.coupling_factor() == Approx(-base.e31() * base.width() * base.piezo_offset()).epsilon(1e-13));
}
