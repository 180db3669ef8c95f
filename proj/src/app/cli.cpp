#include "biphoton/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "biphoton/biphoton.hpp"
#include "biphoton/cavity.hpp"
#include "biphoton/config.hpp"
#include "biphoton/fitting.hpp"
#include "biphoton/hom.hpp"
#include "biphoton/io.hpp"
#include "biphoton/phasematch.hpp"
#include "biphoton/tomography.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

namespace {

using json = nlohmann::ordered_json;

struct DelayRange {
  double min_ps = -30.0;
  double max_ps = 30.0;
  double step_ps = 0.1;

  std::vector<double> delays() const {
    if (!(step_ps > 0.0) || !(max_ps >= min_ps)) {
      throw ConfigError("delay range needs step-ps > 0 and tau-max-ps >= tau-min-ps");
    }
    const auto count = static_cast<std::size_t>(std::floor((max_ps - min_ps) / step_ps + 1e-9)) + 1;
    std::vector<double> d(count);
    for (std::size_t i = 0; i < count; ++i) d[i] = (min_ps + static_cast<double>(i) * step_ps) * units::ps;
    return d;
  }
};

void add_delay_options(CLI::App* cmd, DelayRange& range) {
  cmd->add_option("--tau-min-ps", range.min_ps, "First delay (ps)")->capture_default_str();
  cmd->add_option("--tau-max-ps", range.max_ps, "Last delay (ps)")->capture_default_str();
  cmd->add_option("--step-ps", range.step_ps, "Delay step (ps)")->capture_default_str();
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Domain:
    case ErrorKind::Physicality:
    case ErrorKind::SingularCavity:
      return kExitConfig;
    case ErrorKind::NonConvergence:
      return kExitNonConvergence;
    default:
      return kExitNumeric;
  }
}

// Destination for the primary artifact: a file when a path is configured.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw ConfigError("cannot write output file '" + path + "'");
      out_ = file_.get();
    }
  }
  std::ostream& stream() { return *out_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_;
};

json matrix_json(const Eigen::Matrix4cd& m, bool imaginary) {
  json rows = json::array();
  for (int i = 0; i < 4; ++i) {
    json row = json::array();
    for (int j = 0; j < 4; ++j) row.push_back(imaginary ? m(i, j).imag() : m(i, j).real());
    rows.push_back(row);
  }
  return rows;
}

json params_json(const HomFitParams& p) {
  return json{{"V", p.visibility}, {"delta_tau", p.delta_tau}, {"mu", p.mu}, {"a", p.a}, {"b", p.b}};
}

json fit_json(const FitResult& r) {
  json errors;
  for (int k = 0; k < kFitParamCount; ++k) errors[fit_param_name(k)] = r.standard_error(k);
  json cov = json::array();
  for (int i = 0; i < kFitParamCount; ++i) {
    json row = json::array();
    for (int j = 0; j < kFitParamCount; ++j) row.push_back(r.covariance(i, j));
    cov.push_back(row);
  }
  json j;
  j["params"] = params_json(r.params);
  j["errors"] = errors;
  j["covariance"] = cov;
  j["reduced_chi2"] = r.reduced_chi2;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["degenerate"] = r.degenerate;
  j["unidentified"] = r.unidentified;
  j["count_scale"] = r.count_scale;
  j["delta_tau_ps"] = r.params.delta_tau / units::ps;
  j["beat_period_ps"] = r.params.mu > 0.0 ? kTwoPi / r.params.mu / units::ps : 0.0;
  return j;
}

// Fit with the heuristic start; a beat slower than the span is fixed at zero.
FitResult fit_with_guess(const Interferogram& data, FitOptions options) {
  const InitialGuess guess = initial_guess(data, options.count_scale);
  HomFitParams init = guess.params;
  if (guess.low_frequency) {
    init.mu = 0.0;
    options.fixed[kFitMu] = true;
  }
  if (options.fixed[kFitA]) init.a = 0.0;
  if (options.fixed[kFitB]) init.b = 0.0;
  return fit_hom_interferogram(data, init, options);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Counterpropagating SPDC source: spectra, HOM interferograms, fitting and tomography", "biphoton"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string output_path;
  app.add_option("-c,--config", config_path, "Configuration file (default: built-in reference-device preset)");
  app.add_option("-o,--output", output_path, "Output file (default: [output] path, else standard output)");

  auto* tunability = app.add_subcommand("tunability", "Central wavelengths versus pump incidence angle");
  double theta_min = -1.0, theta_max = 1.0;
  std::size_t theta_points = 41;
  tunability->add_option("--theta-min-deg", theta_min)->capture_default_str();
  tunability->add_option("--theta-max-deg", theta_max)->capture_default_str();
  tunability->add_option("--points", theta_points)->capture_default_str()->check(CLI::Range(1, 100000));

  auto* jsi = app.add_subcommand("jsi", "Joint spectral intensity grid");
  bool marginals = false;
  std::string ingest_path;
  std::optional<double> split_nm;
  jsi->add_flag("--marginals", marginals, "Write PREFIX_signal.csv and PREFIX_idler.csv (PREFIX from --output)");
  jsi->add_option("--ingest", ingest_path, "Measured JSI grid; reports the population balance p");
  jsi->add_option("--split-nm", split_nm, "Signal wavelength separating the two peaks (default 2 lambda_p)");

  auto* hom = app.add_subcommand("hom", "Ideal HOM interferogram");
  DelayRange hom_range;
  bool closed_form = false;
  std::optional<double> poisson_counts;
  std::uint64_t seed = 1;
  add_delay_options(hom, hom_range);
  hom->add_flag("--closed-form", closed_form, "Use the analytic Gaussian result instead of quadrature");
  hom->add_option("--poisson-counts", poisson_counts, "Emit Poisson counts with this many counts per unit probability");
  hom->add_option("--seed", seed, "Random seed for --poisson-counts")->capture_default_str();

  auto* hom_fp = app.add_subcommand("hom-fp", "HOM interferogram including facet reflections");
  DelayRange fp_range;
  std::optional<double> reflectivity;
  bool raw = false;
  bool fit_visibility = false;
  add_delay_options(hom_fp, fp_range);
  hom_fp->add_option("--reflectivity", reflectivity, "Facet intensity reflectivity (overrides the config)");
  auto* raw_flag = hom_fp->add_flag("--raw", raw, "Unaveraged scan");
  hom_fp->add_flag("--averaged", "Average over one pump period (default)")->excludes(raw_flag);
  hom_fp->add_flag("--fit-visibility", fit_visibility, "Report the fitted effective visibility as JSON");

  auto* fit = app.add_subcommand("fit", "Fit an interferogram CSV with the drift-corrected beating model");
  std::string fit_input;
  std::optional<double> count_scale;
  bool fix_drift = false;
  int max_iterations = FitOptions{}.max_iterations;
  fit->add_option("input", fit_input, "CSV with tau_ps,counts[,sigma] or tau_ps,p_coincidence[,sigma]")->required();
  fit->add_option("--count-scale", count_scale, "Counts per unit probability (default: from the tails)");
  fit->add_flag("--fix-drift", fix_drift, "Fix a = b = 0");
  fit->add_option("--max-iterations", max_iterations, "Iteration limit")->capture_default_str()->check(CLI::PositiveNumber);

  auto* tomo = app.add_subcommand("tomo", "Restricted density matrix and entanglement metrics");
  double p = 0.5, visibility = 1.0, phi = 0.0;
  std::optional<double> sigma_p, sigma_v;
  tomo->add_option("--p", p, "Population balance")->required();
  tomo->add_option("--visibility", visibility, "HOM visibility V")->required();
  tomo->add_option("--phi", phi, "Coherence phase (rad)")->capture_default_str();
  tomo->add_option("--sigma-p", sigma_p, "Standard error of p");
  tomo->add_option("--sigma-visibility", sigma_v, "Standard error of V");

  std::string command = "biphoton";
  auto report = [&](const char* kind, const std::string& message, int code, std::size_t line = 0,
                    std::size_t column = 0) {
    json j{{"error", kind}, {"command", command}, {"message", message}};
    if (line) {
      j["line"] = line;
      j["column"] = column;
    }
    err << j.dump() << '\n';
    return code;
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return report("usage", e.what(), kExitConfig);
  }

  for (auto* sub : app.get_subcommands()) command = sub->get_name();

  try {
    RunConfig cfg = config_path.empty() ? reference_device_config() : load_config(config_path);
    if (!output_path.empty()) cfg.output.path = output_path;

    if (*tunability) {
      if (!(theta_max >= theta_min)) throw ConfigError("theta-max-deg must not be below theta-min-deg");
      std::vector<double> thetas(theta_points);
      for (std::size_t i = 0; i < theta_points; ++i) {
        const double f = theta_points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(theta_points - 1);
        thetas[i] = (theta_min + f * (theta_max - theta_min)) * units::deg;
      }
      const auto curve = tunability_curve(cfg.pump, cfg.dispersion, thetas);
      Table t;
      t.columns = {"theta_deg", "lambda_s_HV_nm", "lambda_i_HV_nm", "lambda_s_VH_nm", "lambda_i_VH_nm"};
      for (const auto& pt : curve) {
        t.rows.push_back({pt.theta / units::deg, wavelength_from_omega(pt.omega_s_hv) / units::nm,
                          wavelength_from_omega(pt.omega_i_hv) / units::nm,
                          wavelength_from_omega(pt.omega_s_vh) / units::nm,
                          wavelength_from_omega(pt.omega_i_vh) / units::nm});
      }
      Sink sink(cfg.output.path, out);
      write_table(sink.stream(), t, cfg.output.format);
      return kExitOk;
    }

    if (*jsi) {
      const double split = split_nm ? omega_from_wavelength(*split_nm * units::nm) : 0.5 * cfg.pump.omega_p();
      if (!ingest_path.empty()) {
        std::ifstream in(ingest_path, std::ios::binary);
        if (!in) throw ConfigError("cannot open JSI file '" + ingest_path + "'");
        const JsiGrid grid = read_jsi_csv(in);
        json j{{"p", extract_population_p(grid, split)},
               {"split_nm", wavelength_from_omega(split) / units::nm},
               {"signal_points", grid.omega_s.size()},
               {"idler_points", grid.omega_i.size()}};
        Sink sink(cfg.output.path, out);
        sink.stream() << j.dump(2) << '\n';
        return kExitOk;
      }
      const JointSpectrum js = build_joint_spectrum(cfg.pump, cfg.dispersion, cfg.grid_spec());
      if (marginals) {
        if (cfg.output.path.empty()) throw ConfigError("--marginals needs --output PREFIX");
        const MarginalSpectra m = marginal_spectra(js);
        for (const auto& [suffix, values] : {std::pair{"_signal.csv", &m.signal}, std::pair{"_idler.csv", &m.idler}}) {
          Table t;
          t.columns = {"lambda_nm", "intensity"};
          for (std::size_t i = m.omega.size(); i-- > 0;) {
            t.rows.push_back({wavelength_from_omega(m.omega[i]) / units::nm, (*values)[i]});
          }
          Sink sink(cfg.output.path + suffix, out);
          write_table(sink.stream(), t, OutputFormat::Csv);
        }
        return kExitOk;
      }
      Sink sink(cfg.output.path, out);
      write_jsi_csv(sink.stream(), jsi_grid(js));
      return kExitOk;
    }

    auto quadrature_scan = [&](const DelayRange& range) {
      const JointSpectrum js = build_joint_spectrum(cfg.pump, cfg.dispersion, cfg.grid_spec());
      const auto delays = range.delays();
      return quadrature_interferogram(js, delays);
    };

    if (*hom) {
      Interferogram result;
      if (closed_form) {
        const auto delays = hom_range.delays();
        result = closed_form_interferogram(delays, spectral_separation_mu(cfg.pump, cfg.dispersion),
                                           envelope_width(cfg.pump, cfg.dispersion));
      } else {
        result = quadrature_scan(hom_range);
      }
      if (poisson_counts) {
        if (!(*poisson_counts > 0.0)) throw ConfigError("--poisson-counts must be positive");
        std::mt19937_64 rng(seed);
        for (double& v : result.values) {
          std::poisson_distribution<long> draw(std::max(v, 0.0) * *poisson_counts);
          v = static_cast<double>(draw(rng));
        }
        result.kind = InterferogramKind::Counts;
      }
      Sink sink(cfg.output.path, out);
      write_table(sink.stream(), interferogram_table(result), cfg.output.format);
      return kExitOk;
    }

    if (*hom_fp) {
      WaveguideConfig wg = cfg.waveguide;
      if (reflectivity) wg.reflectivity_r = *reflectivity;
      wg.validate();
      Interferogram result;
      if (wg.reflectivity_r == 0.0 && !fit_visibility) {
        // No cavity: no pump-frequency modulation to average.
        result = quadrature_scan(fp_range);
      } else {
        GridSpec grid = cavity_grid_spec(cfg.pump, cfg.dispersion, wg, cfg.grid.points_per_fsr);
        grid.points = std::max(grid.points, cfg.grid.points);
        grid.extent_sigmas = cfg.grid.extent_sigmas;
        const JointSpectrum js = build_joint_spectrum(cfg.pump, cfg.dispersion, grid);
        const CavityInterferometer cavity(js, wg);
        const auto delays = fp_range.delays();
        result = raw ? cavity.scan(delays) : cavity.averaged_scan(delays, cfg.pump);
      }
      Sink sink(cfg.output.path, out);
      if (fit_visibility) {
        if (raw) throw ConfigError("--fit-visibility applies to the averaged interferogram");
        json j{{"reflectivity_R", wg.reflectivity_r}, {"visibility", effective_visibility(result)}};
        sink.stream() << j.dump(2) << '\n';
      } else {
        write_table(sink.stream(), interferogram_table(result), cfg.output.format);
      }
      return kExitOk;
    }

    if (*fit) {
      std::ifstream in(fit_input, std::ios::binary);
      if (!in) throw ConfigError("cannot open interferogram file '" + fit_input + "'");
      const Interferogram data = read_interferogram_csv(in);
      FitOptions options;
      options.count_scale = count_scale;
      options.max_iterations = max_iterations;
      if (fix_drift) options.fixed[kFitA] = options.fixed[kFitB] = true;
      const FitResult r = fit_with_guess(data, options);
      Sink sink(cfg.output.path, out);
      sink.stream() << fit_json(r).dump(2) << '\n';
      return kExitOk;
    }

    if (*tomo) {
      const RestrictedDensityMatrix rho = build_density_matrix(p, visibility, phi);
      json j{{"p", rho.p()},
             {"V", rho.visibility()},
             {"phi", rho.phi()},
             {"purity", purity(rho)},
             {"fidelity", fidelity_to_ideal(rho)},
             {"concurrence", concurrence(rho)},
             {"matrix_real", matrix_json(rho.matrix(), false)},
             {"matrix_imag", matrix_json(rho.matrix(), true)}};
      if (sigma_p || sigma_v) {
        const MetricUncertainty u = propagate_uncertainty(rho, sigma_p.value_or(0.0), sigma_v.value_or(0.0));
        j["uncertainty"] = json{{"purity", u.purity}, {"fidelity", u.fidelity}, {"concurrence", u.concurrence}};
      }
      Sink sink(cfg.output.path, out);
      sink.stream() << j.dump(2) << '\n';
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    return report(to_string(e.kind()), e.what(), kExitConfig, e.line(), e.column());
  } catch (const FitNonConvergence& e) {
    return report(to_string(e.kind()), e.what(), kExitNonConvergence);
  } catch (const Error& e) {
    return report(to_string(e.kind()), e.what(), exit_code(e.kind()));
  } catch (const std::exception& e) {
    return report("internal", e.what(), kExitNumeric);
  }
  return report("usage", "no subcommand", kExitConfig);
}

}  // namespace biphoton
