#include "loopgrating/sweep/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <numbers>
#include <sstream>

#include <openssl/evp.h>

#include "loopgrating/asym/analysis.hpp"
#include "loopgrating/error.hpp"
#include "loopgrating/table.hpp"

namespace loopgrating::sweep {

namespace {

namespace fs = std::filesystem;
using atom::AtomFieldParams;
using atom::SymmetryClass;

constexpr double pi = std::numbers::pi;

std::string phase_tag(double Phi) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "phi%gpi", std::round(Phi / pi * 1e6) / 1e6);
  return buf;
}

std::string value_tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

class Emitter {
 public:
  explicit Emitter(fs::path dir) : dir_(std::move(dir)) {}

  template <class F>
  void data(const std::string& name, F&& write) {
    std::ostringstream os;
    write(os);
    put(name, os.str());
  }

  /// Gnuplot script for a data file; `plot` is the body after `plot`.
  void script(const std::string& data_name, const std::string& title, const std::string& xlabel,
              const std::string& ylabel, const std::string& plot, const std::string& extra = "") {
    std::ostringstream os;
    const std::string stem = data_name.substr(0, data_name.rfind('.'));
    os << "# gnuplot script for " << data_name << "\n"
       << "set terminal pngcairo size 900,600\n"
       << "set output '" << stem << ".png'\n"
       << "set title \"" << title << "\"\n"
       << "set xlabel \"" << xlabel << "\"\n"
       << "set ylabel \"" << ylabel << "\"\n"
       << "set key outside right\n"
       << extra << "plot " << plot << "\n";
    put(stem + ".gp", os.str());
  }

  const std::vector<FileDigest>& files() const { return files_; }

 private:
  void put(const std::string& name, const std::string& content) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
    files_.push_back({name, sha256_hex(content)});
  }

  fs::path dir_;
  std::vector<FileDigest> files_;
};

void run_spectrum_vs_detuning(const ScenarioConfig& cfg, Emitter& out, Parallel par) {
  const auto grid = atom::symmetric_grid(cfg.delta_span, cfg.delta_count);
  const auto phases = cfg.phases();
  std::vector<atom::ParityReport> reports(phases.size());
  parallel_for(phases.size(), par, [&](std::size_t k) {
    reports[k] = atom::parity_report(cfg.field, grid, phases[k], 1e-3, cfg.medium);
  });
  for (std::size_t k = 0; k < phases.size(); ++k) {
    const std::string name = "spectrum_vs_detuning_" + phase_tag(phases[k]) + ".dat";
    out.data(name, [&](std::ostream& os) {
      TableWriter t(os, {"delta_p", "Re_chi", "Im_chi"});
      for (std::size_t j = 0; j < grid.size(); ++j)
        t.row({grid[j], reports[k].chi[j].real(), reports[k].chi[j].imag()});
    });
    out.script(name, "chi_p vs probe detuning, " + phase_tag(phases[k]), "delta_p / 2pi MHz", "chi_p",
               "'" + name + "' using 1:2 with lines title 'Re chi', '" + name + "' using 1:3 with lines title 'Im chi'");
  }
  out.data("spectrum_vs_detuning_parity.dat", [&](std::ostream& os) {
    TableWriter t(os, {"Phi", "class", "re_even_residual", "re_odd_residual", "im_even_residual", "im_odd_residual",
                       "re_parity", "im_parity"});
    for (const auto& r : reports) {
      t.row({format_value(r.Phi), std::string(atom::to_string(atom::classify_symmetry(r.Phi))),
             format_value(r.re.r_even), format_value(r.re.r_odd), format_value(r.im.r_even), format_value(r.im.r_odd),
             std::string(atom::to_string(r.re.parity)), std::string(atom::to_string(r.im.parity))});
    }
  });
}

void run_profile_vs_x(const ScenarioConfig& cfg, Emitter& out, Parallel par) {
  const auto axis = asym::parse_axis(cfg.sweep.axis);
  const auto values = cfg.sweep.resolve({2.2, 3.5, 5.0, 7.5, 10.0});
  const auto phases = cfg.phases();
  std::vector<grating::SusceptibilityProfile> profiles(values.size() * phases.size());
  parallel_for(profiles.size(), par, [&](std::size_t idx) {
    AtomFieldParams p = cfg.field.with_loop_phase(phases[idx / values.size()]);
    const double v = values[idx % values.size()];
    switch (axis) {
      case asym::SweepAxis::OmegaC: p.omega_c = v; break;
      case asym::SweepAxis::OmegaD: p.omega_d = v; break;
      case asym::SweepAxis::OmegaM: p.omega_m = v; break;
    }
    profiles[idx] =
        grating::susceptibility_profile(p, cfg.medium, cfg.modulation.x, cfg.geometry, atom::SolverMode::Exact, Parallel{1});
  });
  const std::string ax(asym::to_string(axis));
  for (std::size_t idx = 0; idx < profiles.size(); ++idx) {
    const std::string name = "profile_" + phase_tag(phases[idx / values.size()]) + "_" + ax + "_" +
                             value_tag(values[idx % values.size()]) + ".dat";
    out.data(name, [&](std::ostream& os) { grating::write_profile(os, profiles[idx]); });
    out.script(name, "chi_p(x), " + name, "x / a", "chi_p",
               "'" + name + "' using 1:2 with lines title 'Re chi', '" + name + "' using 1:3 with lines title 'Im chi'");
  }
  out.data("profile_vs_x_parity.dat", [&](std::ostream& os) {
    TableWriter t(os, {"Phi", ax, "phase_class", "spatial_class", "re_even_residual", "re_odd_residual",
                       "im_even_residual", "im_odd_residual"});
    for (std::size_t idx = 0; idx < profiles.size(); ++idx) {
      const auto sp = grating::spatial_parity(profiles[idx]);
      t.row({format_value(profiles[idx].Phi), format_value(values[idx % values.size()]),
             std::string(atom::to_string(profiles[idx].symmetry)), std::string(atom::to_string(sp.inferred)),
             format_value(sp.re.r_even), format_value(sp.re.r_odd), format_value(sp.im.r_even),
             format_value(sp.im.r_odd)});
    }
  });
}

void run_lopsided(const ScenarioConfig& cfg, Emitter& out, Parallel par) {
  const auto phases = cfg.phases();
  std::vector<grating::DiffractionSpectrum> spectra(phases.size());
  for (std::size_t k = 0; k < phases.size(); ++k) {
    const auto profile = grating::susceptibility_profile(cfg.field.with_loop_phase(phases[k]), cfg.medium,
                                                         cfg.modulation.x, cfg.geometry, atom::SolverMode::Exact, par);
    spectra[k] = grating::intensity_spectrum(grating::transmission(profile), cfg.geometry, par);
    const std::string stem = "lopsided_" + phase_tag(phases[k]);
    out.data(stem + "_spectrum.dat", [&](std::ostream& os) { grating::write_spectrum(os, spectra[k]); });
    out.script(stem + "_spectrum.dat", "I_p(theta), " + phase_tag(phases[k]), "sin(theta)", "I_p",
               "'" + stem + "_spectrum.dat' using 1:2 with lines title 'I_p'");
    out.data(stem + "_orders.dat", [&](std::ostream& os) { grating::write_orders(os, spectra[k]); });
    out.script(stem + "_orders.dat", "order intensities, " + phase_tag(phases[k]), "n", "I_n",
               "'" + stem + "_orders.dat' using 1:3 with impulses lw 3 title 'I_n'");
  }
  out.data("lopsided_summary.dat", [&](std::ostream& os) {
    TableWriter t(os, {"Phi", "class", "eta1_exact", "eta2_exact", "eta3_exact", "negative_fraction"});
    for (std::size_t k = 0; k < phases.size(); ++k) {
      double neg = 0.0, all = 0.0;
      for (const auto& o : spectra[k].orders) {
        if (o.n == 0) continue;
        all += o.intensity;
        if (o.n < 0) neg += o.intensity;
      }
      std::vector<std::string> row{format_value(atom::wrap_phase(phases[k])),
                                   std::string(atom::to_string(atom::classify_symmetry(phases[k])))};
      for (int n = 1; n <= 3; ++n) row.push_back(format_value(asym::eta_exact(spectra[k], n)));
      row.push_back(format_value(all > 0.0 ? neg / all : 0.0));
      t.row(row);
    }
  });
}

void run_eta_vs_omega_c(const ScenarioConfig& cfg, Emitter& out, Parallel par) {
  const auto axis = asym::parse_axis(cfg.sweep.axis);
  std::vector<double> fallback(46);
  for (int k = 0; k < 46; ++k) fallback[k] = 1.0 + 0.2 * k;
  const auto values = cfg.sweep.resolve(fallback);
  for (double Phi : cfg.phases()) {
    const auto rows =
        asym::robustness_sweep(cfg.field, cfg.medium, cfg.modulation.x, cfg.geometry, axis, values, {Phi}, par);
    const std::string name = "eta_vs_" + std::string(asym::to_string(axis)) + "_" + phase_tag(Phi) + ".dat";
    out.data(name, [&](std::ostream& os) { asym::write_asymmetry_report(os, rows); });
    out.script(name, "contrast ratios, " + phase_tag(Phi), std::string(asym::to_string(axis)) + " / 2pi MHz", "eta_n",
               "for [n=1:3] '" + name + "' using 1:(column(1+2*n)) with lines title sprintf('eta_%d exact', n), "
               "for [n=1:3] '" + name + "' using 1:(column(2+2*n)) with lines dt 2 title sprintf('eta_%d expansion', n)",
               "set yrange [0:1.05]\n");
  }
}

struct SpecialCase {
  std::string label;
  AtomFieldParams params;
};

void run_special(const ScenarioConfig& cfg, Emitter& out, Parallel par) {
  const double Phi = cfg.single_phase();
  AtomFieldParams single = cfg.field.with_loop_phase(Phi);
  single.omega_c = cfg.special.single_omega_c;
  single.omega_d = cfg.special.single_omega_d;
  single.omega_m = cfg.special.single_omega_m;
  AtomFieldParams dammann = cfg.field.with_loop_phase(Phi);
  dammann.omega_c = cfg.special.dammann_omega_c;
  const SpecialCase cases[] = {{"single_order", single}, {"dammann", dammann}};

  std::ostringstream summary;
  TableWriter t(summary, {"case", "dominant_n", "dominant_I", "dominant_fraction", "second_n", "second_I",
                          "equal_within_tolerance"});
  for (const auto& c : cases) {
    const auto profile = grating::susceptibility_profile(c.params, cfg.medium, cfg.modulation.x, cfg.geometry,
                                                         atom::SolverMode::Exact, par);
    const auto spectrum = grating::intensity_spectrum(grating::transmission(profile), cfg.geometry, par);
    const std::string stem = "special_" + c.label;
    out.data(stem + "_profile.dat", [&](std::ostream& os) { grating::write_profile(os, profile); });
    out.script(stem + "_profile.dat", c.label + " chi_p(x)", "x / a", "chi_p",
               "'" + stem + "_profile.dat' using 1:2 with lines title 'Re chi', '" + stem +
                   "_profile.dat' using 1:3 with lines title 'Im chi'");
    out.data(stem + "_spectrum.dat", [&](std::ostream& os) { grating::write_spectrum(os, spectrum); });
    out.script(stem + "_spectrum.dat", c.label + " I_p(theta)", "sin(theta)", "I_p",
               "'" + stem + "_spectrum.dat' using 1:2 with lines title 'I_p'");
    out.data(stem + "_orders.dat", [&](std::ostream& os) { grating::write_orders(os, spectrum); });
    out.script(stem + "_orders.dat", c.label + " order intensities", "n", "I_n",
               "'" + stem + "_orders.dat' using 1:3 with impulses lw 3 title 'I_n'");

    const grating::DiffractionOrder* first = nullptr;
    const grating::DiffractionOrder* second = nullptr;
    double total = 0.0;
    for (const auto& o : spectrum.orders) {
      if (o.n == 0) continue;
      total += o.intensity;
      if (!first || o.intensity > first->intensity) {
        second = first;
        first = &o;
      } else if (!second || o.intensity > second->intensity) {
        second = &o;
      }
    }
    const bool equal = std::abs(first->intensity - second->intensity) <=
                       cfg.special.equal_tolerance * std::max(first->intensity, second->intensity);
    t.row({c.label, std::to_string(first->n), format_value(first->intensity),
           format_value(total > 0.0 ? first->intensity / total : 0.0), std::to_string(second->n),
           format_value(second->intensity), equal ? "yes" : "no"});
  }
  out.data("special_summary.dat", [&](std::ostream& os) { os << summary.str(); });
}

void run_map_2d(const ScenarioConfig& cfg, Emitter& out, Parallel par) {
  AtomFieldParams p = cfg.field.with_loop_phase(cfg.single_phase());
  p.omega_c = cfg.special.single_omega_c;
  p.omega_d = cfg.special.single_omega_d;
  p.omega_m = cfg.special.single_omega_m;
  grating::Geometry2D geo = cfg.geometry_2d;
  geo.R = cfg.geometry.R;
  geo.M = cfg.geometry.M;
  const auto map = grating::farfield_2d(p, cfg.medium, cfg.modulation, geo, par);
  out.data("map_2d.dat", [&](std::ostream& os) { grating::write_map(os, map); });
  out.script("map_2d.dat", "I_p(theta_x, theta_y)", "sin(theta_x)", "sin(theta_y)",
             "'map_2d.dat' using 1:2:3 with pm3d notitle", "set view map\nset pm3d\n");
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int k = 0; k < len; ++k) {
    out.push_back(hex[md[k] >> 4]);
    out.push_back(hex[md[k] & 0xF]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

RunManifest run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir, Parallel par) {
  config.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create output directory '" + out_dir.string() + "': " + ec.message());

  Emitter out(out_dir);
  const std::string& s = config.scenario;
  try {
    if (s == "spectrum_vs_detuning") run_spectrum_vs_detuning(config, out, par);
    else if (s == "profile_vs_x") run_profile_vs_x(config, out, par);
    else if (s == "lopsided") run_lopsided(config, out, par);
    else if (s == "eta_vs_Omega_c") run_eta_vs_omega_c(config, out, par);
    else if (s == "special_diffraction") run_special(config, out, par);
    else if (s == "map_2d") run_map_2d(config, out, par);
    else throw Error(ErrorCode::OutOfRange, "unknown scenario '" + s + "'");
  } catch (const Error& e) {
    throw Error(e.code(), "scenario " + s + ": " + e.what());
  }

  RunManifest m;
  m.scenario = s;
  m.timestamp = utc_timestamp();
  m.config = config.resolved();
  m.files = out.files();
  write_manifest(out_dir / "manifest.txt", m);
  return m;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << "tool_version = " << m.tool_version << "\n"
      << "timestamp = " << m.timestamp << "\n"
      << "scenario = " << m.scenario << "\n";
  for (const auto& [k, v] : m.config) out << "config." << k << " = " << v << "\n";
  for (const auto& f : m.files) out << "file." << f.name << " = " << f.sha256 << "\n";
}

}  // namespace loopgrating::sweep
