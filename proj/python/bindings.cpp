#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "optomech/acceptance.hpp"
#include "optomech/backaction.hpp"
#include "optomech/cavity.hpp"
#include "optomech/commands.hpp"
#include "optomech/errors.hpp"
#include "optomech/estimation.hpp"
#include "optomech/langevin.hpp"
#include "optomech/modes.hpp"
#include "optomech/params.hpp"
#include "optomech/spectra.hpp"

namespace py = pybind11;
using namespace optomech;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

std::vector<double> from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  return std::vector<double>(a.data(), a.data() + a.size());
}

Spectrum make_spectrum(const py::array_t<double, py::array::c_style | py::array::forcecast>& f,
                       const py::array_t<double, py::array::c_style | py::array::forcecast>& v) {
  Spectrum s;
  s.frequency_hz = from_array(f);
  s.values = from_array(v);
  s.validate();
  return s;
}

}  // namespace

PYBIND11_MODULE(_optomech, m) {
  m.doc() = "Bindings for the optomech C++ core";
  m.attr("__version__") = kToolVersion;

  py::register_exception<Error>(m, "OptomechError", PyExc_RuntimeError);

  py::enum_<BuildupConvention>(m, "BuildupConvention")
      .value("TWO_F_OVER_PI", BuildupConvention::TwoFOverPi)
      .value("F_OVER_PI", BuildupConvention::FOverPi);

  py::class_<CavityParams>(m, "CavityParams")
      .def(py::init([](double length_m, double finesse, double wavelength_m, double power_w,
                       double coupling_efficiency, BuildupConvention buildup) {
             CavityParams::Fields f;
             f.length_m = length_m;
             f.finesse = finesse;
             f.wavelength_m = wavelength_m;
             f.input_power_w = power_w;
             f.coupling_efficiency = coupling_efficiency;
             f.buildup = buildup;
             return CavityParams(f);
           }),
           py::arg("length_m") = CavityParams::Fields{}.length_m,
           py::arg("finesse") = CavityParams::Fields{}.finesse,
           py::arg("wavelength_m") = CavityParams::Fields{}.wavelength_m,
           py::arg("power_w") = CavityParams::Fields{}.input_power_w,
           py::arg("coupling_efficiency") = 1.0,
           py::arg("buildup") = BuildupConvention::TwoFOverPi)
      .def_property_readonly("length", &CavityParams::length)
      .def_property_readonly("finesse", &CavityParams::finesse)
      .def_property_readonly("wavelength", &CavityParams::wavelength)
      .def_property_readonly("input_power", &CavityParams::input_power)
      .def_property_readonly("kappa", &CavityParams::kappa)
      .def_property_readonly("omega_laser", &CavityParams::omega_laser)
      .def("with_power", &CavityParams::with_power, py::arg("power_w"))
      .def("with_finesse", &CavityParams::with_finesse, py::arg("finesse"));

  py::class_<MechanicalMode>(m, "MechanicalMode")
      .def(py::init(&MechanicalMode::from_frequency_hz), py::arg("frequency_hz"), py::arg("q"),
           py::arg("mass_kg"), py::arg("bath_temperature_k") = 300.0)
      .def_property_readonly("omega_m", &MechanicalMode::omega_m)
      .def_property_readonly("frequency_hz", &MechanicalMode::frequency_hz)
      .def_property_readonly("quality_q", &MechanicalMode::quality_q)
      .def_property_readonly("effective_mass", &MechanicalMode::effective_mass)
      .def_property_readonly("bath_temperature", &MechanicalMode::bath_temperature)
      .def_property_readonly("gamma", &MechanicalMode::gamma)
      .def_property_readonly("natural_fwhm_hz", &MechanicalMode::natural_fwhm_hz);

  py::class_<PhotothermalModel>(m, "PhotothermalModel")
      .def(py::init<double, double, bool>(), py::arg("ratio"), py::arg("tau_s"),
           py::arg("enabled") = true)
      .def_static("disabled", &PhotothermalModel::disabled)
      .def_property_readonly("ratio", &PhotothermalModel::ratio)
      .def_property_readonly("tau", &PhotothermalModel::tau)
      .def_property_readonly("enabled", &PhotothermalModel::enabled);

  py::class_<Layer>(m, "Layer")
      .def_readonly("material", &Layer::material)
      .def_readonly("density_kg_m3", &Layer::density_kg_m3)
      .def_readonly("thickness_m", &Layer::thickness_m)
      .def_readonly("count", &Layer::count)
      .def_readonly("refractive_index", &Layer::refractive_index)
      .def_readonly("diffusivity_m2_s", &Layer::diffusivity_m2_s);

  py::class_<LayerStack>(m, "LayerStack")
      .def_static("bragg_mirror", &LayerStack::bragg_mirror)
      .def_property_readonly("layers", &LayerStack::layers)
      .def_property_readonly("surface_density", &LayerStack::surface_density)
      .def_property_readonly("total_thickness", &LayerStack::total_thickness);

  m.def("circulating_power", &circulating_power, py::arg("delta"), py::arg("cavity"));
  m.def("radiation_force", &radiation_force, py::arg("delta"), py::arg("cavity"));
  m.def("force_gradient_beta", &force_gradient_beta, py::arg("delta"), py::arg("cavity"));

  py::class_<EffectiveDynamics>(m, "EffectiveDynamics")
      .def_readonly("gamma_eff", &EffectiveDynamics::gamma_eff)
      .def_readonly("omega_eff", &EffectiveDynamics::omega_eff)
      .def_readonly("gamma_rp", &EffectiveDynamics::gamma_rp)
      .def_readonly("gamma_pt", &EffectiveDynamics::gamma_pt)
      .def_readonly("stable", &EffectiveDynamics::stable)
      .def_readonly("cooling_ratio_pred", &EffectiveDynamics::cooling_ratio_pred)
      .def_property_readonly("peak_hz", &psd_peak_hz)
      .def_property_readonly("fwhm_hz", &psd_fwhm_hz);

  m.def("effective_damping", &effective_damping, py::arg("delta"), py::arg("cavity"),
        py::arg("mode"), py::arg("pt") = PhotothermalModel::disabled());

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("delta", &SweepRow::delta)
      .def_readonly("delta_over_kappa", &SweepRow::delta_over_kappa)
      .def_readonly("power_w", &SweepRow::power_w)
      .def_readonly("gamma_eff_hz_fwhm", &SweepRow::gamma_eff_hz_fwhm)
      .def_readonly("f_eff_hz", &SweepRow::f_eff_hz)
      .def_readonly("t_eff_k", &SweepRow::t_eff_k)
      .def_readonly("cooling_ratio", &SweepRow::cooling_ratio)
      .def_readonly("stable", &SweepRow::stable)
      .def_property_readonly("error", [](const SweepRow& r) -> py::object {
        if (!r.error) return py::none();
        return py::str(std::string(to_string(*r.error)));
      });

  m.def("detuning_grid", &detuning_grid, py::arg("min_over_kappa"), py::arg("max_over_kappa"),
        py::arg("n"), py::arg("cavity"));
  m.def(
      "sweep_detuning",
      [](const std::vector<double>& deltas, const CavityParams& cav, const MechanicalMode& mode,
         const PhotothermalModel& pt) { return sweep_detuning(deltas, cav, mode, pt); },
      py::arg("deltas"), py::arg("cavity"), py::arg("mode"),
      py::arg("pt") = PhotothermalModel::disabled());

  py::class_<Spectrum>(m, "Spectrum")
      .def(py::init(&make_spectrum), py::arg("frequency_hz"), py::arg("values"))
      .def_property_readonly("frequency_hz", [](const Spectrum& s) { return to_array(s.frequency_hz); })
      .def_property_readonly("values", [](const Spectrum& s) { return to_array(s.values); })
      .def_property_readonly("area", &spectrum_area)
      .def("__len__", &Spectrum::size);

  m.def("psd_grid", &psd_grid, py::arg("dyn"), py::arg("half_span_fwhm") = 300.0,
        py::arg("points_per_fwhm") = 50.0);
  m.def(
      "analytic_psd",
      [](const std::vector<double>& grid, const MechanicalMode& mode, const EffectiveDynamics& dyn) {
        return analytic_psd(grid, mode, dyn);
      },
      py::arg("grid_hz"), py::arg("mode"), py::arg("dyn"));
  m.def("displacement_variance", &displacement_variance, py::arg("mode"), py::arg("dyn"));
  m.def("effective_temperature", &effective_temperature, py::arg("spectrum"), py::arg("mode"));

  py::class_<TimeTrace>(m, "TimeTrace")
      .def_readonly("dt", &TimeTrace::dt)
      .def_readonly("seed", &TimeTrace::seed)
      .def_property_readonly("samples", [](const TimeTrace& t) { return to_array(t.samples); })
      .def_property_readonly("duration", &TimeTrace::duration);

  m.def(
      "simulate",
      [](const CavityParams& cav, const MechanicalMode& mode, double delta, double duration_s,
         double dt_s, std::uint64_t seed, const PhotothermalModel& pt, int record_every,
         double initial_x) {
        SimulationOptions o;
        o.duration_s = duration_s;
        o.dt_s = dt_s > 0.0 ? dt_s : 1.0 / mode.frequency_hz() / 50.0;
        o.record_every = record_every;
        o.initial_x = initial_x;
        py::gil_scoped_release release;
        return simulate(o, cav, mode, pt, delta, seed);
      },
      py::arg("cavity"), py::arg("mode"), py::arg("delta"), py::arg("duration_s"),
      py::arg("dt_s") = 0.0, py::arg("seed") = 1, py::arg("pt") = PhotothermalModel::disabled(),
      py::arg("record_every") = 1, py::arg("initial_x") = 0.0);

  py::enum_<Window>(m, "Window").value("HANN", Window::Hann).value("RECT", Window::Rect);

  m.def(
      "estimate_psd",
      [](const TimeTrace& trace, std::size_t segment_length, double overlap, Window window) {
        return estimate_psd(trace, WelchOptions{segment_length, overlap, window});
      },
      py::arg("trace"), py::arg("segment_length") = 4096, py::arg("overlap") = 0.5,
      py::arg("window") = Window::Hann);

  py::class_<LorentzianFit>(m, "LorentzianFit")
      .def_readonly("center_hz", &LorentzianFit::center_hz)
      .def_readonly("fwhm_hz", &LorentzianFit::fwhm_hz)
      .def_readonly("area", &LorentzianFit::area)
      .def_readonly("offset", &LorentzianFit::offset)
      .def_readonly("err_center", &LorentzianFit::err_center)
      .def_readonly("err_fwhm", &LorentzianFit::err_fwhm)
      .def_readonly("err_area", &LorentzianFit::err_area)
      .def_readonly("err_offset", &LorentzianFit::err_offset)
      .def_readonly("residual_norm", &LorentzianFit::residual_norm)
      .def_readonly("iterations", &LorentzianFit::iterations)
      .def_readonly("converged", &LorentzianFit::converged);

  m.def("fit_peak", &fit_peak, py::arg("spectrum"), py::arg("half_span_fwhm") = 20.0);
  m.def("lorentzian_psd", py::vectorize(&lorentzian_psd), py::arg("f_hz"), py::arg("center_hz"),
        py::arg("fwhm_hz"), py::arg("area"), py::arg("offset") = 0.0);

  py::enum_<LongitudinalFamily>(m, "LongitudinalFamily")
      .value("TENSION_STRING", LongitudinalFamily::TensionString)
      .value("CLAMPED_CLAMPED_BEAM", LongitudinalFamily::ClampedClampedBeam);
  py::enum_<TransverseModel>(m, "TransverseModel")
      .value("UNIFORM", TransverseModel::Uniform)
      .value("ONE_SIDE_CLAMPED", TransverseModel::OneSideClamped);

  py::class_<BeamModeModel>(m, "BeamModeModel")
      .def(py::init([](double length_m, double width_m, double surface_density, int mode_index,
                       LongitudinalFamily family, TransverseModel transverse, double dead_fraction) {
             BeamModeModel b{length_m, width_m, surface_density, mode_index, family, transverse,
                             dead_fraction};
             b.validate();
             return b;
           }),
           py::arg("length_m") = 490e-6, py::arg("width_m") = 110e-6,
           py::arg("surface_density") = LayerStack::bragg_mirror().surface_density(),
           py::arg("mode_index") = 1, py::arg("family") = LongitudinalFamily::TensionString,
           py::arg("transverse") = TransverseModel::Uniform, py::arg("dead_fraction") = 0.0)
      .def_readonly("length_m", &BeamModeModel::length_m)
      .def_readonly("width_m", &BeamModeModel::width_m)
      .def_readonly("mode_index", &BeamModeModel::mode_index)
      .def_readonly("dead_fraction", &BeamModeModel::dead_fraction)
      .def_property_readonly("total_mass", &BeamModeModel::total_mass)
      .def(
          "shape",
          [](const BeamModeModel& b, py::array_t<double> x, py::array_t<double> y) {
            return py::vectorize([&b](double xx, double yy) { return mode_shape(b, xx, yy); })(x, y);
          },
          py::arg("x"), py::arg("y"))
      .def("antinode", [](const BeamModeModel& b) {
        const Point2 p = antinode(b);
        return py::make_tuple(p.x, p.y);
      });

  py::class_<EffectiveMass>(m, "EffectiveMass")
      .def_readonly("mass_kg", &EffectiveMass::mass_kg)
      .def_readonly("error_bound_kg", &EffectiveMass::error_bound_kg)
      .def_readonly("resolution", &EffectiveMass::resolution);

  m.def(
      "effective_mass",
      [](const BeamModeModel& b, double waist_m, py::object x0, py::object y0, int resolution) {
        const Point2 a = antinode(b);
        const ProbeProfile p{waist_m, x0.is_none() ? a.x : x0.cast<double>(),
                             y0.is_none() ? a.y : y0.cast<double>()};
        return effective_mass(b, p, resolution);
      },
      py::arg("beam"), py::arg("waist_m") = 10e-6, py::arg("x0") = py::none(),
      py::arg("y0") = py::none(), py::arg("resolution") = 256);
  m.def("frequency_ratio", &frequency_ratio, py::arg("family"), py::arg("n"));
  m.def("photothermal_tau", &photothermal_tau, py::arg("stack"), py::arg("zeta") = 1.0);
  m.def("zeta_for_tau", &zeta_for_tau, py::arg("stack"), py::arg("tau_s"));

  py::class_<CriterionResult>(m, "CriterionResult")
      .def_readonly("id", &CriterionResult::id)
      .def_readonly("title", &CriterionResult::title)
      .def_readonly("passed", &CriterionResult::passed)
      .def_readonly("measured", &CriterionResult::measured)
      .def_readonly("expected", &CriterionResult::expected)
      .def_readonly("detail", &CriterionResult::detail)
      .def_readonly("seconds", &CriterionResult::seconds)
      .def("__str__", &result_line);

  m.def(
      "run_acceptance",
      [](std::vector<int> only, std::uint64_t seed) {
        AcceptanceOptions o;
        o.only = std::move(only);
        o.seed = seed;
        py::gil_scoped_release release;
        return run_acceptance(o);
      },
      py::arg("only") = std::vector<int>{}, py::arg("seed") = 2024);
}
