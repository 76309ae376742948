#include <doctest.h>

#include <cmath>

#include "lrlab/report_io.hpp"

using namespace lrlab;

namespace {

LRReport small_lr(int workers) {
  const auto m = LatticeModel::with_decay_couplings(Lattice::chain(5), DecayFunction::power_law(2.0), 1, Vec::Ones(5),
                                                    Vec::Ones(5), PairPotential::bump(1.0, 1.5, 1), 1.0, 2.0);
  const auto f = Observable::gaussian_levee(SiteSet{0}, 1, Vec::Zero(1), Vec::Zero(1), 1.0);
  const auto g = Observable::gaussian_levee(SiteSet{3}, 1, Vec::Zero(1), Vec::Zero(1), 1.0);
  SamplerSpec s;
  s.n = 16;
  s.refine = 20;
  s.workers = workers;
  return run_lr_experiment(m, SiteSet::range(0, 4), f, g, linspace(-1.0, 1.0, 5), s, mu_grid(4));
}

}  // namespace

TEST_CASE("dumped constants reproduce the RHS column exactly") {
  const LRReport rep = small_lr(1);
  const std::string text = to_json(rhs_inputs(rep)).dump(2);
  const RhsInputs back = rhs_inputs_from_json(nlohmann::json::parse(text));
  CHECK(back.constants.C0 == rep.constants.C0);
  for (std::size_t n = 0; n < rep.times.size(); ++n) {
    const LRRhs r = lr_rhs(back.constants, back.f_c1, back.g_c1, back.D_XY, rep.times[n]);
    CHECK(r.sinh_form == rep.rhs_sinh[n]);
    CHECK(r.exp_form == rep.rhs_exp[n]);
  }
  const BoundConstants bc = constants_from_json(to_json(rep.constants));
  CHECK(bc.C_V == rep.constants.C_V);
  CHECK(bc.provenance == rep.constants.provenance);
}

TEST_CASE("reports are reproducible across worker counts") {
  const std::string a = to_json(small_lr(1)).dump(2);
  const std::string b = to_json(small_lr(3)).dump(2);
  CHECK(a == b);
  const auto j = nlohmann::json::parse(a);
  CHECK(j.at("schema_version") == kReportSchemaVersion);
  CHECK(j.at("verdict") == "pass");
  CHECK(j.at("lhs_measured").size() == 5);
}

TEST_CASE("CSV layout") {
  const LRReport rep = small_lr(1);
  const std::string csv = lr_csv(rep);
  CHECK(csv.rfind("t,lhs_measured,rhs_sinh,rhs_exp,rhs_corollary_best_mu\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}
