#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lrlab/config.hpp"
#include "lrlab/errors.hpp"
#include "lrlab/report_io.hpp"

namespace py = pybind11;
using namespace lrlab;

namespace {

SiteSet all_sites(const LatticeModel& m) { return SiteSet::range(0, m.lattice().size() - 1); }

PhaseState state_of(const LatticeModel& m, const Vec& p, const Vec& q) {
  const SiteSet vol = all_sites(m);
  const auto n = static_cast<Eigen::Index>(vol.size()) * m.dim();
  if (p.size() != n || q.size() != n) throw DomainError("p and q need |sites| * d entries each");
  PhaseState s = PhaseState::zeros(vol, m.dim());
  s.p = p;
  s.q = q;
  return s;
}

BlockKind kind_of(const std::string& k) {
  if (k == "X") return BlockKind::X;
  if (k == "Y") return BlockKind::Y;
  if (k == "Z") return BlockKind::Z;
  if (k == "W") return BlockKind::W;
  throw DomainError("block kind must be one of X, Y, Z, W");
}

}  // namespace

PYBIND11_MODULE(_lrlab, m) {
  m.doc() = "Lieb-Robinson bounds for classical anharmonic lattice systems";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<AssumptionError>(m, "AssumptionError", PyExc_ValueError);
  py::register_exception<IntegrationError>(m, "IntegrationError", PyExc_RuntimeError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_NotImplementedError);

  py::class_<ExperimentConfig>(m, "Config")
      .def_static("from_file", &parse_config, py::arg("path"))
      .def_static("from_text", &parse_config_text, py::arg("text"), py::arg("source") = "<string>")
      .def_readonly("name", &ExperimentConfig::name)
      .def_readonly("output_dir", &ExperimentConfig::output_dir)
      .def_property_readonly("has_lr", [](const ExperimentConfig& c) { return c.lr.has_value(); });

  py::class_<LatticeModel>(m, "Model")
      .def(py::init([](const ExperimentConfig& c) { return build_model(c); }), py::arg("config"))
      .def_property_readonly("n_sites", [](const LatticeModel& mm) { return mm.lattice().size(); })
      .def_property_readonly("d", &LatticeModel::dim)
      .def_property_readonly("n_interactions", [](const LatticeModel& mm) { return mm.interactions().size(); })
      .def("energy", [](const LatticeModel& mm, const Vec& p, const Vec& q) {
        return hamiltonian(mm, all_sites(mm), state_of(mm, p, q));
      }, py::arg("p"), py::arg("q"))
      .def("constants_json", [](const LatticeModel& mm) { return to_json(compute_C0(mm, all_sites(mm))).dump(); })
      .def("assumptions_json", [](const LatticeModel& mm) {
        return to_json(validate_assumptions(mm, all_sites(mm))).dump();
      })
      .def("flow", [](const LatticeModel& mm, const Vec& p, const Vec& q, double T, double h,
                      const std::string& integrator, int stride) {
        const Trajectory tr =
            integrate_flow(mm, all_sites(mm), state_of(mm, p, q), T, h, integrator_from_string(integrator), stride);
        const auto rows = static_cast<Eigen::Index>(tr.states.size());
        const auto n = tr.states.empty() ? 0 : tr.states.front().p.size();
        Mat P(rows, n), Q(rows, n);
        for (Eigen::Index i = 0; i < rows; ++i) {
          P.row(i) = tr.states[static_cast<std::size_t>(i)].p.transpose();
          Q.row(i) = tr.states[static_cast<std::size_t>(i)].q.transpose();
        }
        return py::make_tuple(tr.times, P, Q, tr.energies);
      }, py::arg("p"), py::arg("q"), py::arg("T"), py::arg("h") = 1e-3, py::arg("integrator") = "rk4",
         py::arg("stride") = 1)
      .def("jacobian", [](const LatticeModel& mm, const Vec& p, const Vec& q, double t, double h) {
        const SiteSet vol = all_sites(mm);
        const VariationalResult v = variational_at_times(mm, vol, state_of(mm, p, q), vol, {t}, StepOptions{Integrator::RK4, h});
        return assembled_jacobian(v.blocks, 0);
      }, py::arg("p"), py::arg("q"), py::arg("t"), py::arg("h") = 1e-3);

  m.def("run_lr_json", [](const ExperimentConfig& c) {
    if (!c.lr) throw DomainError("config has no lr section");
    const LatticeModel model = build_model(c);
    const LRSpec& L = *c.lr;
    const LRReport rep = run_lr_experiment(model, all_sites(model), build_observable(L.f, c.model.d),
                                           build_observable(L.g, c.model.d), L.times.values(), c.sampler,
                                           mu_grid(L.mu_count, L.mu_min, L.mu_max), c.dynamics);
    return to_json(rep).dump();
  }, py::arg("config"), py::call_guard<py::gil_scoped_release>());

  m.def("dyson_partial_sums", [](double C0, double F_value, double t, int N, const std::string& kind) {
    BoundConstants bc;
    bc.C0 = C0;
    return dyson_partial_sums(bc, F_value, t, N, kind_of(kind));
  }, py::arg("C0"), py::arg("F_value"), py::arg("t"), py::arg("N"), py::arg("kind"));

  m.def("jacobian_envelope", [](double C0, double F_value, double t, const std::string& kind) {
    BoundConstants bc;
    bc.C0 = C0;
    return jacobian_envelope(bc, F_value, t, kind_of(kind));
  }, py::arg("C0"), py::arg("F_value"), py::arg("t"), py::arg("kind"));

  m.def("lr_rhs", [](double C0, double f_c1, double g_c1, double D_XY, double t) {
    BoundConstants bc;
    bc.C0 = C0;
    const LRRhs r = lr_rhs(bc, f_c1, g_c1, D_XY, t);
    return py::make_tuple(r.sinh_form, r.exp_form);
  }, py::arg("C0"), py::arg("f_c1"), py::arg("g_c1"), py::arg("D_XY"), py::arg("t"));

  m.def("chain_norm_F", [](int n, double exponent) {
    const Lattice lat = Lattice::chain(n);
    return norm_F(lat, DecayFunction::power_law(exponent), SiteSet::range(0, n - 1));
  }, py::arg("n"), py::arg("exponent") = 2.0);

  m.def("chain_convolution_constant", [](int n, double exponent) {
    const Lattice lat = Lattice::chain(n);
    return convolution_constant(lat, DecayFunction::power_law(exponent), SiteSet::range(0, n - 1));
  }, py::arg("n"), py::arg("exponent") = 2.0);
}
