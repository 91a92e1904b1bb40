#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "zpflab/field.hpp"
#include "zpflab/quantum.hpp"
#include "zpflab/response.hpp"
#include "zpflab/scenario.hpp"
#include "zpflab/spectral.hpp"
#include "zpflab/trajectory.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace zpflab;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

response::ResponseSet make_set(const std::vector<double>& omega_k, const std::vector<double>& gamma_k) {
  if (omega_k.size() != gamma_k.size()) throw ShapeError("omega_k and gamma_k differ in length");
  std::vector<response::LorentzianResponse> terms;
  for (std::size_t i = 0; i < omega_k.size(); ++i) terms.push_back({omega_k[i], gamma_k[i]});
  return response::ResponseSet(std::move(terms));
}

spectral::TransitionData data_for(const sim::Potential& pot, double x_min, double x_max, std::size_t n_points,
                                  std::size_t n_states, double hbar, double m) {
  const auto states = spectral::solve_states(pot, {x_min, x_max, n_points}, n_states, {hbar, m});
  return spectral::transition_data(states);
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "zpflab: zero-point field driven oscillators and quantum-structure checks";

  auto base = py::register_exception<Error>(mod, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(mod, "ConfigError", base.ptr());
  py::register_exception<ResolutionError>(mod, "ResolutionError", base.ptr());
  py::register_exception<DomainError>(mod, "DomainError", base.ptr());
  py::register_exception<DivergenceError>(mod, "DivergenceError", base.ptr());

  py::class_<field::SpectrumConfig>(mod, "SpectrumConfig")
      .def(py::init([](double omega_min, double omega_max, std::size_t n_modes, double hbar, const std::string& grid) {
             field::SpectrumConfig c{omega_min, omega_max, n_modes, hbar, field::grid_from_string(grid)};
             c.validate();
             return c;
           }),
           py::arg("omega_min") = 0.2, py::arg("omega_max") = 5.0, py::arg("n_modes") = 4096, py::arg("hbar") = 1.0,
           py::arg("grid") = "uniform")
      .def_readwrite("omega_min", &field::SpectrumConfig::omega_min)
      .def_readwrite("omega_max", &field::SpectrumConfig::omega_max)
      .def_readwrite("n_modes", &field::SpectrumConfig::n_modes)
      .def_readwrite("hbar", &field::SpectrumConfig::hbar);

  py::class_<response::OscillatorParams>(mod, "OscillatorParams")
      .def(py::init([](double m, double e, double omega0, double tau, double hbar) {
             response::OscillatorParams p{m, e, omega0, tau, hbar};
             p.validate();
             return p;
           }),
           py::arg("m") = 1.0, py::arg("e") = 1.0, py::arg("omega0") = 1.0, py::arg("tau") = 0.0,
           py::arg("hbar") = 1.0)
      .def_static("from_q", &response::OscillatorParams::from_q, py::arg("q"), py::arg("omega0") = 1.0,
                  py::arg("m") = 1.0, py::arg("e") = 1.0, py::arg("hbar") = 1.0)
      .def_readwrite("m", &response::OscillatorParams::m)
      .def_readwrite("e", &response::OscillatorParams::e)
      .def_readwrite("omega0", &response::OscillatorParams::omega0)
      .def_readwrite("tau", &response::OscillatorParams::tau)
      .def_readwrite("hbar", &response::OscillatorParams::hbar)
      .def_property_readonly("gamma", &response::OscillatorParams::gamma);

  py::class_<sim::Potential>(mod, "Potential")
      .def_static("harmonic", &sim::Potential::harmonic, py::arg("omega0") = 1.0, py::arg("mass") = 1.0)
      .def_static("polynomial", &sim::Potential::polynomial, py::arg("coefficients"))
      .def("value", &sim::Potential::value)
      .def("force", &sim::Potential::force)
      .def("__repr__", &sim::Potential::describe);

  mod.def(
      "sample_zpf",
      [](const field::SpectrumConfig& c, std::uint64_t seed) {
        const auto r = field::sample_zpf(c, seed);
        std::vector<double> w, a, ph;
        for (const auto& m : r.modes) {
          w.push_back(m.omega);
          a.push_back(m.amplitude);
          ph.push_back(m.phase);
        }
        return py::make_tuple(to_array(w), to_array(a), to_array(ph));
      },
      py::arg("config"), py::arg("seed"), "Returns (omega, amplitude, phase) arrays.");
  mod.def(
      "evaluate_field",
      [](const field::SpectrumConfig& c, std::uint64_t seed, const std::vector<double>& t) {
        const auto r = field::sample_zpf(c, seed);
        std::vector<double> out;
        for (double ti : t) out.push_back(field::evaluate_field(r, ti));
        return to_array(out);
      },
      py::arg("config"), py::arg("seed"), py::arg("t"));
  mod.def("continuum_correlation", &field::continuum_correlation, py::arg("config"), py::arg("lag"));

  mod.def(
      "chi",
      [](const std::vector<double>& omega_k, const std::vector<double>& gamma_k, const std::vector<double>& omega) {
        const auto set = make_set(omega_k, gamma_k);
        py::array_t<std::complex<double>> out(static_cast<py::ssize_t>(omega.size()));
        for (std::size_t i = 0; i < omega.size(); ++i) out.mutable_data()[i] = response::chi(set, omega[i]);
        return out;
      },
      py::arg("omega_k"), py::arg("gamma_k"), py::arg("omega"));
  mod.def(
      "chi_time",
      [](const std::vector<double>& omega_k, const std::vector<double>& gamma_k, double t0, double dt,
         std::size_t n) { return to_array(response::chi_time(make_set(omega_k, gamma_k), {t0, dt, n}).values); },
      py::arg("omega_k"), py::arg("gamma_k"), py::arg("t0"), py::arg("dt"), py::arg("n"));
  mod.def(
      "kk_scan",
      [](const std::vector<double>& omega_k, const std::vector<double>& gamma_k, double wmin, double wmax,
         std::size_t n) {
        const auto scan = response::kk_scan(make_set(omega_k, gamma_k), wmin, wmax, n);
        std::vector<double> w, re, rec;
        for (const auto& p : scan.points) {
          w.push_back(p.omega);
          re.push_back(p.re_chi);
          rec.push_back(p.re_chi_rec);
        }
        return py::dict("omega"_a = to_array(w), "re_chi"_a = to_array(re), "re_chi_rec"_a = to_array(rec),
                        "relative_residual"_a = scan.relative_residual);
      },
      py::arg("omega_k"), py::arg("gamma_k"), py::arg("omega_min"), py::arg("omega_max"), py::arg("n"));
  mod.def("q_factor", &response::q_factor);
  mod.def(
      "stationary_moments",
      [](const response::OscillatorParams& p, const field::SpectrumConfig& c) {
        const auto m = response::stationary_moments(p, c);
        return py::make_tuple(m.x2, m.p2);
      },
      py::arg("params"), py::arg("config"));

  mod.def(
      "integrate",
      [](const response::OscillatorParams& p, const sim::Potential& pot, const field::SpectrumConfig& c,
         std::uint64_t seed, double dt, double t_total, double t_burn, double x0, double p0, bool driven) {
        sim::SimConfig sc;
        sc.dt = dt;
        sc.t_total = t_total;
        sc.t_burn = t_burn;
        sc.x0 = x0;
        sc.p0 = p0;
        field::FieldRealization f;
        if (driven) f = field::sample_zpf(c, seed);
        sim::Trajectory tr;
        {
          py::gil_scoped_release release;
          tr = sim::integrate(p, pot, f, sc);
        }
        return py::make_tuple(to_array(tr.t), to_array(tr.x), to_array(tr.p));
      },
      py::arg("params"), py::arg("potential"), py::arg("config"), py::arg("seed") = 0, py::arg("dt") = 0.05,
      py::arg("t_total") = 100.0, py::arg("t_burn") = 0.0, py::arg("x0") = 0.0, py::arg("p0") = 0.0,
      py::arg("driven") = true, "Returns (t, x, p); driven=False integrates without the field.");
  mod.def(
      "ensemble_moments",
      [](const response::OscillatorParams& p, const sim::Potential& pot, const field::SpectrumConfig& c,
         std::uint64_t seed, std::size_t n_trajectories, double dt, double t_total, double t_burn) {
        sim::SimConfig sc;
        sc.seed = seed;
        sc.n_trajectories = n_trajectories;
        sc.dt = dt;
        sc.t_total = t_total;
        sc.t_burn = t_burn;
        sim::MomentReport r;
        {
          py::gil_scoped_release release;
          r = sim::ensemble_moments(p, pot, sc, c);
        }
        return py::module_::import("json").attr("loads")(sim::to_json(r).dump());
      },
      py::arg("params"), py::arg("potential"), py::arg("config"), py::arg("seed"), py::arg("n_trajectories"),
      py::arg("dt"), py::arg("t_total"), py::arg("t_burn"));
  mod.def(
      "psd",
      [](const std::vector<double>& x, double dt, std::size_t segment, double reference_omega) {
        sim::PsdOptions o;
        o.segment = segment;
        o.reference_omega = reference_omega;
        const auto s = sim::psd(x, dt, o);
        std::vector<double> w, pw;
        for (const auto& pt : s) {
          w.push_back(pt.omega);
          pw.push_back(pt.power);
        }
        return py::make_tuple(to_array(w), to_array(pw));
      },
      py::arg("x"), py::arg("dt"), py::arg("segment") = 0, py::arg("reference_omega") = 1.0);

  py::class_<spectral::TransitionData>(mod, "TransitionData")
      .def_readonly("hbar", &spectral::TransitionData::hbar)
      .def_readonly("m", &spectral::TransitionData::m)
      .def_readonly("energies", &spectral::TransitionData::energies)
      .def_readonly("omega", &spectral::TransitionData::omega)
      .def_readonly("x", &spectral::TransitionData::x)
      .def_readonly("p", &spectral::TransitionData::p);

  mod.def(
      "solve_states",
      [](const sim::Potential& pot, double x_min, double x_max, std::size_t n_points, std::size_t n_states,
         double hbar, double m) {
        const auto s = spectral::solve_states(pot, {x_min, x_max, n_points}, n_states, {hbar, m});
        return py::make_tuple(Eigen::VectorXd(s.energies), Eigen::MatrixXd(s.wavefunctions));
      },
      py::arg("potential"), py::arg("x_min"), py::arg("x_max"), py::arg("n_points"), py::arg("n_states"),
      py::arg("hbar") = 1.0, py::arg("m") = 1.0, "Returns (energies, wavefunctions as columns).");
  mod.def("transition_data", &data_for, py::arg("potential"), py::arg("x_min"), py::arg("x_max"),
          py::arg("n_points"), py::arg("n_states"), py::arg("hbar") = 1.0, py::arg("m") = 1.0);
  mod.def("trk_sum", &quantum::trk_sum, py::arg("data"), py::arg("n"), py::arg("k_max"));
  mod.def(
      "trk_converged",
      [](const spectral::TransitionData& d, std::size_t n, double tol) {
        const auto r = quantum::trk_converged(d, n, tol);
        return py::make_tuple(r.value, r.k_max, r.converged);
      },
      py::arg("data"), py::arg("n"), py::arg("tol") = 1e-6);
  mod.def(
      "matrices",
      [](const spectral::TransitionData& d, std::size_t n_trunc) {
        const auto m = spectral::matrices(d, n_trunc);
        return py::make_tuple(m.X, m.P, m.H);
      },
      py::arg("data"), py::arg("n_trunc"), "Returns (X, P, H).");
  mod.def(
      "commutator",
      [](const Eigen::MatrixXcd& X, const Eigen::MatrixXcd& P, double hbar) {
        const auto r = quantum::commutator(X, P, hbar);
        return py::dict("value"_a = r.value, "low_block"_a = r.low_block,
                        "low_block_deviation"_a = r.low_block_deviation, "corner_deviation"_a = r.corner_deviation,
                        "trace"_a = r.trace);
      },
      py::arg("X"), py::arg("P"), py::arg("hbar") = 1.0);
  mod.def(
      "heisenberg_check",
      [](const sim::Potential& pot, double x_min, double x_max, std::size_t n_points, std::size_t n_trunc,
         double hbar, double m) {
        const auto s = spectral::solve_states(pot, {x_min, x_max, n_points}, n_trunc, {hbar, m});
        const auto mats = spectral::matrices(spectral::transition_data(s), n_trunc);
        const auto r = quantum::heisenberg_check(mats.X, mats.P, mats.H, spectral::force_matrix(s, pot, n_trunc), m,
                                                 hbar);
        return py::make_tuple(r.r1_max, r.r2_max, r.low_block);
      },
      py::arg("potential"), py::arg("x_min"), py::arg("x_max"), py::arg("n_points"), py::arg("n_trunc"),
      py::arg("hbar") = 1.0, py::arg("m") = 1.0, "Returns (r1_max, r2_max, low_block).");
  mod.def(
      "bohr_check",
      [](const spectral::TransitionData& d) {
        const auto r = quantum::bohr_check(d);
        return py::dict("construction_residual"_a = r.construction_residual, "spacings"_a = r.spacings,
                        "spacing_spread"_a = r.spacing_spread, "spacings_increasing"_a = r.spacings_increasing);
      },
      py::arg("data"));

  mod.def(
      "run_scenario",
      [](const std::string& scenario, const std::string& config_text, const std::string& out_dir) {
        scenario::RunOptions o;
        o.out_dir = out_dir;
        o.quiet = true;
        const auto r = scenario::run(scenario::scenario_from_string(scenario),
                                     scenario::ConfigDocument::parse(config_text), o);
        return py::make_tuple(r.exit_code, py::module_::import("json").attr("loads")(r.manifest.dump()));
      },
      py::arg("scenario"), py::arg("config_text"), py::arg("out_dir"),
      "Runs a scenario; returns (exit_code, manifest dict).");
}
