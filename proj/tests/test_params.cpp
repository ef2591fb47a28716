#include <doctest.h>

#include <cmath>
#include <random>

#include "optotherm/errors.hpp"
#include "optotherm/kernels.hpp"
#include "optotherm/params.hpp"

using namespace optotherm;

namespace {

SystemParams quasi_static_set() {
    SystemParams p;
    p.nu0 = 1e4;
    p.gm = 0.1;
    p.omega = 1e-3;
    p.temperature = 1000.0;
    return p;
}

}  // namespace

TEST_SUITE("params") {

TEST_CASE("validation accepts the reference set") {
    CHECK_NOTHROW(quasi_static_set().validate());
}

TEST_CASE("validation rejects out-of-domain fields") {
    SystemParams p = quasi_static_set();
    p.nu0 = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = quasi_static_set();
    p.nu0 = -5.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = quasi_static_set();
    p.omega = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = quasi_static_set();
    p.gamma = 2.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = quasi_static_set();
    p.temperature = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = quasi_static_set();
    p.gm = std::nan("");
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("regime checks") {
    SystemParams p = quasi_static_set();
    CHECK(p.dispersive());
    CHECK(p.semiclassical());
    CHECK(p.regime_warnings().empty());

    // Strong coupling keeps the dispersive hierarchy but breaks gamma >> g_m.
    p.nu0 = 5000.0;
    p.gm = 20.0;
    CHECK(p.dispersive());
    CHECK_FALSE(p.semiclassical());
    CHECK(p.regime_warnings().size() == 1);

    p = quasi_static_set();
    p.omega = 1.0;  // omega above g_m
    CHECK_FALSE(p.dispersive());
    CHECK(p.regime_warnings().size() == 1);
}

TEST_CASE("default timestep tracks the fastest rate") {
    SystemParams p = quasi_static_set();
    p.temperature = 0.0;
    // T = 0: rates are gamma = 1, omega = 1e-3, g_m = 0.1.
    CHECK(default_timestep(p) == doctest::Approx(1e-2).epsilon(1e-12));

    p.gm = 20.0;
    CHECK(default_timestep(p) == doctest::Approx(5e-4).epsilon(1e-12));

    // Hot bath: thermalization rate gamma (2 nbar + 1) dominates.
    p = quasi_static_set();
    p.nu0 = 10.0;
    p.temperature = 50.0;
    const double rate = 2.0 * bose_occupation(10.0, 50.0) + 1.0;
    CHECK(default_timestep(p) == doctest::Approx(1e-2 / rate).epsilon(1e-12));
}

TEST_CASE("displaced rest position") {
    CHECK(displaced_rest_position(0.1, 1e-3) == doctest::Approx(-200.0).epsilon(1e-15));
    CHECK(displaced_rest_position(0.1, 1e-3, 0.0) == 0.0);
    CHECK(displaced_rest_position(0.1, 1e-3, 0.5) == doctest::Approx(-100.0));
    CHECK(displaced_rest_position(-0.1, 1e-3) == doctest::Approx(200.0));
    CHECK_THROWS_AS(displaced_rest_position(0.1, 0.0), std::domain_error);
}

TEST_CASE("unit conversion concrete values") {
    const UnitConversion conv{1e9};
    CHECK(conv.seconds(1.0) == doctest::Approx(1e-9).epsilon(1e-15));
    CHECK(conv.joules(1.0) == doctest::Approx(1.054571817e-25).epsilon(1e-12));
    CHECK(conv.watts(1.0) == doctest::Approx(1.054571817e-16).epsilon(1e-12));
    CHECK(conv.kelvin(1.0) ==
          doctest::Approx(kHbarSi * 1e9 / kBoltzmannSi).epsilon(1e-15));
    CHECK(conv.radians_per_second(2.0) == doctest::Approx(2e9));
}

TEST_CASE("unit conversion round trips") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mag(-12.0, 12.0);
    for (int i = 0; i < 50; ++i) {
        const UnitConversion conv{std::pow(10.0, mag(rng) / 2.0 + 6.0)};
        const double v = std::pow(10.0, mag(rng));
        CHECK(conv.from_seconds(conv.seconds(v)) == doctest::Approx(v).epsilon(1e-12));
        CHECK(conv.from_joules(conv.joules(v)) == doctest::Approx(v).epsilon(1e-12));
        CHECK(conv.from_watts(conv.watts(v)) == doctest::Approx(v).epsilon(1e-12));
        CHECK(conv.from_kelvin(conv.kelvin(v)) == doctest::Approx(v).epsilon(1e-12));
        CHECK(conv.from_radians_per_second(conv.radians_per_second(v)) ==
              doctest::Approx(v).epsilon(1e-12));
    }
}

}  // TEST_SUITE
