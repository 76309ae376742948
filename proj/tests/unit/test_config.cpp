#include <doctest.h>

#include <algorithm>
#include <string>

#include "lrlab/config.hpp"
#include "lrlab/errors.hpp"

using namespace lrlab;

namespace {

std::vector<std::string> violations_of(const std::string& text) {
  try {
    parse_config_text(text, "cfg");
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

const char* kChain = R"({
  "schema_version": 1,
  "lattice": {"family": "chain", "n": 8},
  "model": {"d": 1, "potential": {"family": "bump", "radius": 1.5}, "r_cut": 2},
  "lr": {"f": {"kind": "gaussian-levee", "sites": [1]}, "g": {"kind": "gaussian-levee", "sites": [5]}}
})";

}  // namespace

TEST_CASE("minimal config fills defaults") {
  const auto cfg = parse_config_text(R"({"schema_version": 1, "lattice": {"family": "chain", "n": 1}})");
  CHECK(cfg.lattice.n == 1);
  CHECK(cfg.model.d == 1);
  CHECK(cfg.model.masses == std::vector<double>{1.0});
  CHECK(cfg.dynamics.integrator == Integrator::RK4);
  CHECK(cfg.dynamics.h == 1e-3);
  CHECK(cfg.sampler.n == 512);
  CHECK_FALSE(cfg.lr.has_value());
  const auto model = build_model(cfg);
  CHECK(model.lattice().size() == 1);
  CHECK(model.interactions().empty());
}

TEST_CASE("negative force constant names the key") {
  const auto v = violations_of(R"({"schema_version": 1, "lattice": {"family": "chain", "n": 3},
                                   "model": {"force_constants": [1, -1, 1]}})");
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("model.force_constants[1]") != std::string::npos);
  CHECK(v[0].find("must be > 0") != std::string::npos);
}

TEST_CASE("overlapping lr supports cite the disjointness requirement") {
  std::string text = kChain;
  text.replace(text.find("[5]"), 3, "[1]");
  const auto v = violations_of(text);
  CHECK(any_contains(v, "disjoint"));
  CHECK(any_contains(v, "dist(X,Y) > 0"));
}

TEST_CASE("every violation is reported") {
  const auto v = violations_of(R"({"schema_version": 2, "lattice": {"family": "chain", "n": 4},
    "model": {"masses": 0, "d": 0, "colour": "red"},
    "dynamics": {"integrator": "euler", "h": -1},
    "lr": {"f": {"kind": "gaussian-levee", "sites": [9]}, "g": {"kind": "gaussian-levee", "sites": [2], "sigma": 0}}})");
  CHECK(any_contains(v, "schema_version"));
  CHECK(any_contains(v, "model.masses: must be > 0"));
  CHECK(any_contains(v, "model.d"));
  CHECK(any_contains(v, "model.colour: unknown key"));
  CHECK(any_contains(v, "dynamics.integrator"));
  CHECK(any_contains(v, "dynamics.h"));
  CHECK(any_contains(v, "lr.f.sites[0]: site 9 does not exist"));
  CHECK(any_contains(v, "lr.g.sigma"));
  CHECK(v.size() >= 8);
}

TEST_CASE("malformed input and missing files") {
  CHECK(any_contains(violations_of("{not json"), "malformed JSON"));
  CHECK(any_contains(violations_of("{}"), "schema_version: missing"));
  CHECK_THROWS_AS(parse_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("section samplers inherit the global sampler") {
  const auto cfg = parse_config_text(R"({"schema_version": 1, "lattice": {"family": "chain", "n": 4},
    "sampler": {"n": 100, "seed": 9, "radius": 2},
    "envelope": {"sampler": {"n": 7}}})");
  REQUIRE(cfg.envelope->sampler.has_value());
  CHECK(cfg.envelope->sampler->n == 7);
  CHECK(cfg.envelope->sampler->seed == 9);
  CHECK(cfg.envelope->sampler->radius == 2.0);
}

TEST_CASE("builders") {
  const auto cfg = parse_config_text(kChain);
  const auto m = build_model(cfg);
  CHECK(m.lattice().size() == 8);
  CHECK(m.interactions().size() == 13);  // 7 nearest + 6 next-nearest neighbours
  const auto f = build_observable(cfg.lr->f, 1);
  CHECK(f.support() == SiteSet{1});
  CHECK(f.c1_norm() == doctest::Approx(1.0 + std::exp(-0.5)));
  CHECK(build_decay(DecaySpec{}, 1)(1.0) == doctest::Approx(0.25));
}

TEST_CASE("convergence volumes are balls around X") {
  const auto cfg = parse_config_text(R"({"schema_version": 1, "lattice": {"family": "chain", "n": 8},
    "convergence": {"lattice": {"family": "chain", "n": 33, "origin": -16}, "X_points": [[0]],
                    "radii": [2, 4, 8, 16], "f": {"kind": "gaussian-levee"}}})");
  const auto setup = build_convergence(cfg);
  std::vector<std::size_t> sizes;
  for (const auto& v : setup.volumes) sizes.push_back(v.size());
  CHECK(sizes == std::vector<std::size_t>{5, 9, 17, 33});
  CHECK(setup.f.support() == SiteSet{16});
  CHECK(setup.model.lattice().size() == 33);
}

TEST_CASE("shipped presets parse and validate") {
  for (const char* name : {"harmonic-1site", "chain-8", "grid-5x5", "amorphous-32"}) {
    CAPTURE(name);
    const auto cfg = parse_config(std::string(LRLAB_SOURCE_DIR) + "/configs/" + name + ".json");
    const auto m = build_model(cfg);
    CHECK(validate_assumptions(m, m.lattice().all_sites()).all_passed());
  }
}
