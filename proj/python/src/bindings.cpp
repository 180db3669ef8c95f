#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "biphoton/cavity.hpp"
#include "biphoton/cli.hpp"
#include "biphoton/config.hpp"
#include "biphoton/fitting.hpp"
#include "biphoton/tomography.hpp"

namespace py = pybind11;
using namespace biphoton;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) { return {a.data(), a.data() + a.size()}; }

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::dict interferogram_dict(const Interferogram& data) {
  py::dict d;
  d["delays"] = to_array(data.delays);
  d["values"] = to_array(data.values);
  return d;
}

Interferogram make_interferogram(const Array& delays, const Array& values, std::optional<Array> errors,
                                 bool counts) {
  Interferogram data;
  data.delays = to_vector(delays);
  data.values = to_vector(values);
  if (errors) data.errors = to_vector(*errors);
  data.kind = counts ? InterferogramKind::Counts : InterferogramKind::Probability;
  data.validate();
  return data;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Counterpropagating SPDC source: spectra, HOM interferograms, fitting and tomography";

  static py::exception<Error> error(m, "BiphotonError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(error.ptr())(py::str(e.what()));
      inst.attr("kind") = to_string(e.kind());
      PyErr_SetObject(error.ptr(), inst.ptr());
    }
  });

  py::class_<DispersionModel>(m, "DispersionModel")
      .def(py::init<>())
      .def(py::init([](double n0_h, double n0_v, double n_group, double omega_ref) {
             DispersionModel d{n0_h, n0_v, n_group, omega_ref};
             d.validate();
             return d;
           }),
           py::arg("n0_h"), py::arg("n0_v"), py::arg("n_group"), py::arg("omega_ref"))
      .def_readwrite("n0_h", &DispersionModel::n0_h)
      .def_readwrite("n0_v", &DispersionModel::n0_v)
      .def_readwrite("n_group", &DispersionModel::n_group)
      .def_readwrite("omega_ref", &DispersionModel::omega_ref)
      .def("birefringence", &DispersionModel::birefringence)
      .def_static("reference_device", &DispersionModel::reference_device);

  py::class_<PumpConfig>(m, "PumpConfig")
      .def(py::init<>())
      .def(py::init([](double lambda_p, double pulse_fwhm, double waist_wz, double theta) {
             PumpConfig p{lambda_p, pulse_fwhm, waist_wz, theta};
             p.validate();
             return p;
           }),
           py::arg("lambda_p"), py::arg("pulse_fwhm"), py::arg("waist_wz"), py::arg("theta") = 0.0)
      .def_readwrite("lambda_p", &PumpConfig::lambda_p)
      .def_readwrite("pulse_fwhm", &PumpConfig::pulse_fwhm)
      .def_readwrite("waist_wz", &PumpConfig::waist_wz)
      .def_readwrite("theta", &PumpConfig::theta)
      .def_property_readonly("omega_p", &PumpConfig::omega_p)
      .def_static("reference_device", &PumpConfig::reference_device);

  py::class_<WaveguideConfig>(m, "WaveguideConfig")
      .def(py::init<>())
      .def(py::init([](double length_l, double reflectivity_r, double modal_index_n) {
             WaveguideConfig w{length_l, reflectivity_r, modal_index_n};
             w.validate();
             return w;
           }),
           py::arg("length_l"), py::arg("reflectivity_r"), py::arg("modal_index_n"))
      .def_readwrite("length_l", &WaveguideConfig::length_l)
      .def_readwrite("reflectivity_r", &WaveguideConfig::reflectivity_r)
      .def_readwrite("modal_index_n", &WaveguideConfig::modal_index_n)
      .def("free_spectral_range", &WaveguideConfig::free_spectral_range)
      .def_static("reference_device", &WaveguideConfig::reference_device);

  m.def("modal_index", [](const std::string& pol, double omega, const DispersionModel& model) {
    if (pol != "H" && pol != "V") throw Error(ErrorKind::Domain, "polarization must be 'H' or 'V'");
    return modal_index(pol == "H" ? Polarization::H : Polarization::V, omega, model);
  });
  m.def("group_velocity", &group_velocity);

  m.def(
      "solve_central_frequencies",
      [](const PumpConfig& pump, const DispersionModel& model) {
        const auto t = solve_central_frequencies(pump, model);
        py::dict d;
        d["theta"] = t.theta;
        d["omega_s_hv"] = t.omega_s_hv;
        d["omega_i_hv"] = t.omega_i_hv;
        d["omega_s_vh"] = t.omega_s_vh;
        d["omega_i_vh"] = t.omega_i_vh;
        return d;
      },
      "Central signal and idler angular frequencies of both interactions.");
  m.def("spectral_separation_mu", &spectral_separation_mu);
  m.def("intra_mode_width", &intra_mode_width);
  m.def("envelope_width", &envelope_width);

  py::class_<JointSpectrum>(m, "JointSpectrum")
      .def_property_readonly("axis", [](const JointSpectrum& js) { return to_array(js.omega_s_axis()); })
      .def_property_readonly("spacing", &JointSpectrum::spacing)
      .def("amplitudes",
           [](const JointSpectrum& js, const std::string& interaction) {
             if (interaction != "HV" && interaction != "VH") {
               throw Error(ErrorKind::Domain, "interaction must be 'HV' or 'VH'");
             }
             const auto amp = js.amp(interaction == "HV" ? Interaction::HV : Interaction::VH);
             py::array_t<std::complex<double>> out({js.size(), js.size()});
             std::copy(amp.begin(), amp.end(), out.mutable_data());
             return out;
           })
      .def("jsi", [](const JointSpectrum& js) {
        py::array_t<double> out({js.size(), js.size()});
        auto* p = out.mutable_data();
        for (std::size_t i = 0; i < js.size(); ++i)
          for (std::size_t j = 0; j < js.size(); ++j) *p++ = js.jsi(i, j);
        return out;
      });

  m.def(
      "build_joint_spectrum",
      [](const PumpConfig& pump, const DispersionModel& model, std::size_t points, double extent_sigmas) {
        return build_joint_spectrum(pump, model, GridSpec{points, extent_sigmas});
      },
      py::arg("pump"), py::arg("model"), py::arg("points") = 512, py::arg("extent_sigmas") = 5.0);
  m.def(
      "cavity_joint_spectrum",
      [](const PumpConfig& pump, const DispersionModel& model, const WaveguideConfig& wg, double points_per_fsr) {
        return build_joint_spectrum(pump, model, cavity_grid_spec(pump, model, wg, points_per_fsr));
      },
      py::arg("pump"), py::arg("model"), py::arg("waveguide"), py::arg("points_per_fsr") = 12.0);
  m.def("marginal_spectra", [](const JointSpectrum& js) {
    const auto ms = marginal_spectra(js);
    py::dict d;
    d["omega"] = to_array(ms.omega);
    d["signal"] = to_array(ms.signal);
    d["idler"] = to_array(ms.idler);
    return d;
  });
  m.def("population_p", [](const JointSpectrum& js, double omega_split) {
    return extract_population_p(jsi_grid(js), omega_split);
  });

  m.def("coincidence_closed_form", py::vectorize(&coincidence_closed_form), py::arg("tau"), py::arg("mu"),
        py::arg("delta_tau"));
  m.def(
      "coincidence_quadrature",
      [](const JointSpectrum& js, const Array& delays) {
        return to_array(quadrature_interferogram(js, to_vector(delays)).values);
      },
      py::arg("js"), py::arg("delays"));
  m.def(
      "fit_model",
      [](const Array& tau, double visibility, double delta_tau, double mu, double a, double b) {
        const HomFitParams p{visibility, delta_tau, mu, a, b};
        std::vector<double> out;
        for (double t : to_vector(tau)) out.push_back(fit_model(t, p));
        return to_array(out);
      },
      py::arg("tau"), py::arg("visibility"), py::arg("delta_tau"), py::arg("mu"), py::arg("a") = 0.0,
      py::arg("b") = 0.0);

  m.def("facet_amplitudes", [](double omega, const WaveguideConfig& wg) {
    const auto f = facet_amplitudes(omega, wg);
    return py::make_tuple(f.reflected, f.transmitted);
  });
  m.def(
      "cavity_interferogram",
      [](const JointSpectrum& js, const WaveguideConfig& wg, const PumpConfig& pump, const Array& delays,
         bool averaged) {
        const CavityInterferometer cavity(js, wg);
        const auto d = to_vector(delays);
        return interferogram_dict(averaged ? cavity.averaged_scan(d, pump) : cavity.scan(d));
      },
      py::arg("js"), py::arg("waveguide"), py::arg("pump"), py::arg("delays"), py::arg("averaged") = true,
      "Raw or pump-period averaged coincidence probability with facet reflections.");
  m.def(
      "effective_visibility",
      [](const Array& delays, const Array& values) {
        return effective_visibility(make_interferogram(delays, values, std::nullopt, false));
      },
      py::arg("delays"), py::arg("values"));

  m.def(
      "fit_interferogram",
      [](const Array& delays, const Array& values, std::optional<Array> errors, bool counts,
         std::optional<double> count_scale, std::vector<std::string> fixed) {
        const auto data = make_interferogram(delays, values, errors, counts);
        FitOptions opts;
        opts.count_scale = count_scale;
        for (const auto& name : fixed) {
          int k = 0;
          while (k < kFitParamCount && name != fit_param_name(k)) ++k;
          if (k == kFitParamCount) throw Error(ErrorKind::Domain, "unknown parameter '" + name + "'");
          opts.fixed[k] = true;
        }
        const auto guess = initial_guess(data, count_scale);
        auto init = guess.params;
        if (guess.low_frequency) {
          init.mu = 0.0;
          opts.fixed[kFitMu] = true;
        }
        const auto r = fit_hom_interferogram(data, init, opts);
        py::dict params, errs;
        const double values_si[] = {r.params.visibility, r.params.delta_tau, r.params.mu, r.params.a, r.params.b};
        for (int k = 0; k < kFitParamCount; ++k) {
          params[fit_param_name(k)] = values_si[k];
          errs[fit_param_name(k)] = r.standard_error(k);
        }
        py::dict d;
        d["params"] = params;
        d["errors"] = errs;
        d["covariance"] = Eigen::MatrixXd(r.covariance);
        d["reduced_chi2"] = r.reduced_chi2;
        d["iterations"] = r.iterations;
        d["converged"] = r.converged;
        d["degenerate"] = r.degenerate;
        d["unidentified"] = r.unidentified;
        return d;
      },
      py::arg("delays"), py::arg("values"), py::arg("errors") = py::none(), py::arg("counts") = false,
      py::arg("count_scale") = py::none(), py::arg("fixed") = std::vector<std::string>{});

  m.def(
      "density_matrix",
      [](double p, double visibility, double phi) {
        return Eigen::Matrix4cd(build_density_matrix(p, visibility, phi).matrix());
      },
      py::arg("p"), py::arg("visibility"), py::arg("phi") = 0.0);
  m.def(
      "entanglement_metrics",
      [](double p, double visibility, double phi) {
        const auto rho = build_density_matrix(p, visibility, phi);
        py::dict d;
        d["purity"] = purity(rho);
        d["fidelity"] = fidelity_to_ideal(rho);
        d["concurrence"] = concurrence(rho);
        return d;
      },
      py::arg("p"), py::arg("visibility"), py::arg("phi") = 0.0);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      "Run a biphoton subcommand; returns (exit_code, stdout, stderr).");
}
