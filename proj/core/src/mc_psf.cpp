#include "jfab/mc_psf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <stdexcept>

#include <json.hpp>

#include "jfab/constants.hpp"
#include "jfab/parallel.hpp"
#include "jfab/rng.hpp"

namespace jfab::mcpsf {

namespace c = jfab::constants;

namespace {

struct LayerPhysics {
  double z_lo_cm = 0.0;
  double z_hi_cm = 0.0;  // +inf for the substrate
  double n_density = 0.0;  // atoms per cm^3
  double z_num = 0.0;
  double a_weight = 0.0;
  double rho = 0.0;
  double j_kev = 0.0;  // mean ionization potential
  bool is_resist = false;
};

// Screened-Rutherford total elastic cross section, cm^2 (E in keV).
inline double elastic_sigma_cm2(double z, double e_kev) {
  const double as = 3.4e-3 * std::pow(z, 0.67) / e_kev;
  const double rel = (e_kev + 511.0) / (e_kev + 1022.0);
  return 5.21e-21 * (z * z) / (e_kev * e_kev) * (4.0 * c::kPi / (as * (1.0 + as))) * rel * rel;
}

// Bethe stopping power with the Joy-Luo low-energy extension, keV/cm.
inline double stopping_kev_cm(const LayerPhysics& m, double e_kev) {
  const double arg = 1.166 * (e_kev + 0.85 * m.j_kev) / m.j_kev;
  const double ln_term = std::log(std::max(arg, 1.0001));
  return 78500.0 * m.rho * m.z_num / (m.a_weight * e_kev) * ln_term;
}

struct ChunkResult {
  std::array<double, kRadialBins> energy{};
  double deposited_resist = 0.0;
  double deposited_other = 0.0;
  double escaped = 0.0;
  double beyond_rmax = 0.0;
};

struct BinMap {
  double log_r0;
  double inv_dlog;
  // Radius in cm; returns bin index or -1 (below first edge -> bin 0).
  int index(double r_cm) const {
    const double r_um = r_cm * 1e4;
    if (r_um <= kRadialMinUm) return 0;
    const int i = static_cast<int>((std::log(r_um) - log_r0) * inv_dlog);
    return i >= kRadialBins ? -1 : i;
  }
};

void trace_electron(const std::vector<LayerPhysics>& layers, double e0_kev, StreamRng rng,
                    const BinMap& bins, ChunkResult& out) {
  double x = 0.0, y = 0.0, z = 1e-9;  // start just inside the top surface
  double u = 0.0, v = 0.0, w = 1.0;
  double e = e0_kev;
  std::size_t li = 0;

  auto deposit = [&](double de, double mx, double my, double mz) {
    // Locate by depth so deposits on a boundary-crossing segment land in the
    // layer of the segment midpoint.
    std::size_t i = li;
    while (i + 1 < layers.size() && mz >= layers[i].z_hi_cm) ++i;
    while (i > 0 && mz < layers[i].z_lo_cm) --i;
    if (layers[i].is_resist) {
      const int bi = bins.index(std::hypot(mx, my));
      if (bi >= 0) {
        out.energy[static_cast<std::size_t>(bi)] += de;
        out.deposited_resist += de;
      } else {
        out.beyond_rmax += de;
        out.deposited_resist += de;
      }
    } else {
      out.deposited_other += de;
    }
  };

  for (int guard = 0; guard < 2000000; ++guard) {
    const LayerPhysics& m = layers[li];
    const double sigma = elastic_sigma_cm2(m.z_num, e);
    const double lambda = 1.0 / (m.n_density * sigma);
    const double s_free = -lambda * std::log(rng.uniform_pos());

    // Distance to the layer boundary along the flight direction.
    double d_boundary = 1e30;
    if (w > 1e-12)
      d_boundary = (m.z_hi_cm - z) / w;
    else if (w < -1e-12)
      d_boundary = (m.z_lo_cm - z) / w;
    const bool crosses = d_boundary < s_free;
    const double step = crosses ? d_boundary + 1e-10 : s_free;

    double de = stopping_kev_cm(m, e) * step;
    const bool dies = de >= e - kTrackingCutoffKev;
    if (dies) de = e;

    deposit(de, x + 0.5 * step * u, y + 0.5 * step * v, z + 0.5 * step * w);
    e -= de;
    x += step * u;
    y += step * v;
    z += step * w;
    if (dies) return;

    if (z < 0.0) {  // escaped through the top surface
      out.escaped += e;
      return;
    }
    if (crosses) {
      while (li + 1 < layers.size() && z >= layers[li].z_hi_cm) ++li;
      while (li > 0 && z < layers[li].z_lo_cm) --li;
      continue;  // resample the free path in the new medium
    }

    // Elastic scattering.
    const double as = 3.4e-3 * std::pow(m.z_num, 0.67) / e;
    const double r1 = rng.uniform();
    double cost = 1.0 - 2.0 * as * r1 / (1.0 + as - r1);
    cost = std::clamp(cost, -1.0, 1.0);
    const double sint = std::sqrt(1.0 - cost * cost);
    const double phi = 2.0 * c::kPi * rng.uniform();
    const double cosp = std::cos(phi), sinp = std::sin(phi);

    if (std::abs(w) > 0.999999) {
      u = sint * cosp;
      v = sint * sinp;
      w = cost * (w > 0 ? 1.0 : -1.0);
    } else {
      const double denom = std::sqrt(1.0 - w * w);
      const double nu = u * cost + sint * (u * w * cosp - v * sinp) / denom;
      const double nv = v * cost + sint * (v * w * cosp + u * sinp) / denom;
      const double nw = w * cost - denom * sint * cosp;
      u = nu;
      v = nv;
      w = nw;
    }
    const double norm = std::sqrt(u * u + v * v + w * w);
    u /= norm;
    v /= norm;
    w /= norm;
  }
  // Guard exhausted (pathological); account for the remainder.
  out.deposited_other += e;
}

}  // namespace

void MaterialLayer::validate() const {
  if (!(atomic_number > 0) || !(atomic_weight_g_mol > 0) || !(density_g_cm3 > 0))
    throw std::invalid_argument("MaterialLayer: Z, A and density must be > 0");
}

void BeamConfig::validate() const {
  if (!(energy_kev > 1.0)) throw std::invalid_argument("BeamConfig: energy must exceed 1 keV");
  if (electron_count < 10000)
    throw std::invalid_argument("BeamConfig: need at least 1e4 electrons");
}

double RadialEnergyHistogram::bin_center_um(std::size_t i) const {
  return std::sqrt(bin_edges_um[i] * bin_edges_um[i + 1]);
}

double RadialEnergyHistogram::density(std::size_t i) const {
  const double r0 = bin_edges_um[i], r1 = bin_edges_um[i + 1];
  const double area = c::kPi * (r1 * r1 - r0 * r0);
  return energy_kev[i] / (area * static_cast<double>(electrons));
}

std::vector<MaterialLayer> silicon_bilayer_stack() {
  // Resist layers approximated as C5H8O2 with per-atom mean Z and A.
  return {
      {"csar62", 3.6, 6.68, 1.20, 100.0, true},
      {"mma-copolymer", 3.6, 6.68, 1.19, 500.0, true},
      {"silicon", 14.0, 28.0855, 2.33, 0.0, false},
  };
}

std::vector<MaterialLayer> germanium_bilayer_stack() {
  return {
      {"csar62", 3.6, 6.68, 1.20, 100.0, true},
      {"mma-copolymer", 3.6, 6.68, 1.19, 500.0, true},
      {"germanium", 32.0, 72.63, 5.323, 0.0, false},
  };
}

RadialEnergyHistogram simulate_psf(const std::vector<MaterialLayer>& stack,
                                   const BeamConfig& beam) {
  if (stack.empty()) throw std::invalid_argument("simulate_psf: empty material stack");
  beam.validate();

  std::vector<LayerPhysics> layers;
  double z = 0.0;
  for (std::size_t i = 0; i < stack.size(); ++i) {
    const MaterialLayer& m = stack[i];
    m.validate();
    const bool substrate = i + 1 == stack.size() && m.thickness_nm <= 0.0;
    if (!substrate && m.thickness_nm <= 0.0)
      throw std::invalid_argument("simulate_psf: only the last layer may be semi-infinite");
    LayerPhysics lp;
    lp.z_lo_cm = z;
    lp.z_hi_cm = substrate ? 1e30 : z + m.thickness_nm * 1e-7;
    lp.n_density = c::kAvogadroPerMol * m.density_g_cm3 / m.atomic_weight_g_mol;
    lp.z_num = m.atomic_number;
    lp.a_weight = m.atomic_weight_g_mol;
    lp.rho = m.density_g_cm3;
    lp.j_kev = (9.76 * m.atomic_number + 58.5 * std::pow(m.atomic_number, -0.19)) * 1e-3;
    lp.is_resist = m.is_resist;
    z = lp.z_hi_cm;
    layers.push_back(lp);
  }

  RadialEnergyHistogram hist;
  hist.electrons = beam.electron_count;
  hist.bin_edges_um.resize(kRadialBins + 1);
  const double log0 = std::log(kRadialMinUm);
  const double dlog = (std::log(kRadialMaxUm) - log0) / kRadialBins;
  for (int i = 0; i <= kRadialBins; ++i) hist.bin_edges_um[i] = std::exp(log0 + i * dlog);
  hist.energy_kev.assign(kRadialBins, 0.0);

  const BinMap bins{log0, 1.0 / dlog};

  constexpr std::int64_t kChunk = 1024;
  const std::int64_t n_chunks = (beam.electron_count + kChunk - 1) / kChunk;
  std::vector<ChunkResult> results(static_cast<std::size_t>(n_chunks));

  parallel_for_chunks(n_chunks, [&](std::int64_t ci) {
    ChunkResult& out = results[static_cast<std::size_t>(ci)];
    const std::int64_t begin = ci * kChunk;
    const std::int64_t end = std::min(begin + kChunk, beam.electron_count);
    for (std::int64_t ei = begin; ei < end; ++ei)
      trace_electron(layers, beam.energy_kev,
                     StreamRng(beam.rng_seed, static_cast<std::uint64_t>(ei)), bins, out);
  });

  // Fixed-order merge keeps the result independent of scheduling.
  for (const auto& r : results) {
    for (int i = 0; i < kRadialBins; ++i) hist.energy_kev[i] += r.energy[i];
    hist.deposited_resist_kev += r.deposited_resist;
    hist.deposited_other_kev += r.deposited_other;
    hist.escaped_kev += r.escaped;
    hist.beyond_rmax_kev += r.beyond_rmax;
  }
  return hist;
}

namespace {

// Nelder-Mead on R^n, deterministic.
std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double> x0, double step, int max_iter) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
  for (std::size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]);

  for (int it = 0; it < max_iter; ++it) {
    std::vector<std::size_t> order(n + 1);
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order[0], worst = order[n], second = order[n - 1];
    if (std::abs(vals[worst] - vals[best]) < 1e-12 * (1.0 + std::abs(vals[best]))) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[i][d] / static_cast<double>(n);
    }
    auto blend = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t d = 0; d < n; ++d) p[d] = centroid[d] + t * (centroid[d] - pts[worst][d]);
      return p;
    };

    auto refl = blend(1.0);
    const double fr = f(refl);
    if (fr < vals[best]) {
      auto exp_p = blend(2.0);
      const double fe = f(exp_p);
      pts[worst] = fe < fr ? exp_p : refl;
      vals[worst] = std::min(fe, fr);
    } else if (fr < vals[second]) {
      pts[worst] = refl;
      vals[worst] = fr;
    } else {
      auto con = blend(0.5);
      const double fc = f(con);
      if (fc < vals[worst]) {
        pts[worst] = con;
        vals[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t d = 0; d < n; ++d)
            pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
          vals[i] = f(pts[i]);
        }
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i <= n; ++i)
    if (vals[i] < vals[best]) best = i;
  return pts[best];
}

}  // namespace

PsfFit fit_double_gaussian(const RadialEnergyHistogram& hist) {
  std::vector<double> rs, ds;
  for (std::size_t i = 0; i < hist.energy_kev.size(); ++i) {
    if (hist.energy_kev[i] <= 0.0) continue;
    rs.push_back(hist.bin_center_um(i));
    ds.push_back(hist.density(i));
  }
  if (rs.size() < 8 || rs.back() / rs.front() < 10.0)
    throw std::runtime_error("fit_double_gaussian: degenerate histogram (too few occupied bins)");

  // Moment-based initialization, split at 0.3 um.
  double e_near = 0, e_far = 0, r2_near = 0, r2_far = 0;
  for (std::size_t i = 0; i < hist.energy_kev.size(); ++i) {
    const double e = hist.energy_kev[i];
    if (e <= 0.0) continue;
    const double r = hist.bin_center_um(i);
    if (r < 0.3) {
      e_near += e;
      r2_near += e * r * r;
    } else {
      e_far += e;
      r2_far += e * r * r;
    }
  }
  const double total = hist.deposited_resist_kev / static_cast<double>(hist.electrons);
  const double alpha0 = e_near > 0 ? std::max(1e-3, std::sqrt(r2_near / e_near)) : 0.05;
  const double beta0 = e_far > 0 ? std::max(1.0, std::sqrt(r2_far / e_far)) : 9.0;
  const double eta0 = std::clamp(e_far / std::max(e_near, 1e-30), 1e-3, 50.0);

  auto model = [](double r, double a, double b, double eta, double s) {
    return s / (1.0 + eta) *
           (std::exp(-r * r / (a * a)) / (c::kPi * a * a) +
            eta * std::exp(-r * r / (b * b)) / (c::kPi * b * b));
  };
  auto objective = [&](const std::vector<double>& p) {
    const double a = std::exp(p[0]), b = std::exp(p[1]);
    const double eta = std::exp(p[2]), s = std::exp(p[3]);
    double acc = 0.0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const double m = std::max(model(rs[i], a, b, eta, s), 1e-300);
      const double d = std::log10(m) - std::log10(ds[i]);
      acc += d * d;
    }
    return acc;
  };

  std::vector<double> p0 = {std::log(alpha0), std::log(beta0), std::log(eta0),
                            std::log(std::max(total, 1e-12))};
  std::vector<double> best = p0;
  double best_val = objective(best);
  for (int restart = 0; restart < 3; ++restart) {
    auto cand = nelder_mead(objective, best, restart == 0 ? 0.5 : 0.15, 1200);
    const double v = objective(cand);
    if (v < best_val) {
      best_val = v;
      best = cand;
    }
  }

  PsfFit fit;
  double a = std::exp(best[0]), b = std::exp(best[1]);
  double eta = std::exp(best[2]);
  fit.scale_kev = std::exp(best[3]);
  if (b < a) {  // the model is symmetric under (a,eta) <-> (b,1/eta)
    std::swap(a, b);
    eta = 1.0 / eta;
  }
  fit.params.alpha_fwd_um = a;
  fit.params.beta_back_um = b;
  fit.params.eta = eta;
  fit.rms_log10_residual = std::sqrt(best_val / static_cast<double>(rs.size()));
  fit.bins_used = static_cast<int>(rs.size());
  fit.params.validate();
  return fit;
}

RadialEnergyHistogram synthetic_histogram(const dose::PsfParams& params, double scale_kev,
                                          std::int64_t electrons) {
  params.validate();
  RadialEnergyHistogram hist;
  hist.electrons = electrons;
  hist.bin_edges_um.resize(kRadialBins + 1);
  const double log0 = std::log(kRadialMinUm);
  const double dlog = (std::log(kRadialMaxUm) - log0) / kRadialBins;
  for (int i = 0; i <= kRadialBins; ++i) hist.bin_edges_um[i] = std::exp(log0 + i * dlog);
  hist.energy_kev.assign(kRadialBins, 0.0);

  auto annulus = [](double r0, double r1, double range) {
    return std::exp(-r0 * r0 / (range * range)) - std::exp(-r1 * r1 / (range * range));
  };
  for (int i = 0; i < kRadialBins; ++i) {
    const double r0 = hist.bin_edges_um[i], r1 = hist.bin_edges_um[i + 1];
    const double frac = (annulus(r0, r1, params.alpha_fwd_um) +
                         params.eta * annulus(r0, r1, params.beta_back_um)) /
                        (1.0 + params.eta);
    hist.energy_kev[i] = scale_kev * static_cast<double>(electrons) * frac;
    hist.deposited_resist_kev += hist.energy_kev[i];
  }
  return hist;
}

void save_histogram_csv(const std::string& path, const RadialEnergyHistogram& hist) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write histogram: " + path);
  out << "r_um,energy_kev,density_kev_um2_per_electron\n";
  char line[128];
  for (std::size_t i = 0; i < hist.energy_kev.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.6e,%.6e,%.6e\n", hist.bin_center_um(i),
                  hist.energy_kev[i], hist.density(i));
    out << line;
  }
}

void save_psf_json(const std::string& path, const PsfFit& fit, const BeamConfig& beam) {
  nlohmann::json j{{"alpha_fwd_um", fit.params.alpha_fwd_um},
                   {"beta_back_um", fit.params.beta_back_um},
                   {"eta", fit.params.eta},
                   {"scale_kev_per_electron", fit.scale_kev},
                   {"rms_log10_residual", fit.rms_log10_residual},
                   {"bins_used", fit.bins_used},
                   {"beam_energy_kev", beam.energy_kev},
                   {"electrons", beam.electron_count},
                   {"seed", beam.rng_seed}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write PSF json: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace jfab::mcpsf
