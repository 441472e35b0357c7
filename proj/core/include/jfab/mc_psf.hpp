#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jfab/dose.hpp"

namespace jfab::mcpsf {

// One homogeneous slab, top-down order. thickness_nm <= 0 marks the
// semi-infinite substrate (must be the last layer). Compounds are modeled
// with per-atom mean Z and A.
struct MaterialLayer {
  std::string name;
  double atomic_number = 14.0;
  double atomic_weight_g_mol = 28.0855;
  double density_g_cm3 = 2.33;
  double thickness_nm = 0.0;
  bool is_resist = false;  // deposits in resist layers feed the radial PSF

  void validate() const;
};

struct BeamConfig {
  double energy_kev = 50.0;
  std::int64_t electron_count = 100000;
  std::uint64_t rng_seed = 0;

  void validate() const;  // energy > 1 keV; electron_count >= 1e4
};

struct RadialEnergyHistogram {
  std::vector<double> bin_edges_um;    // n_bins + 1, log spaced
  std::vector<double> energy_kev;      // deposited in resist per bin, total
  std::int64_t electrons = 0;

  // Bookkeeping for the energy-conservation contract.
  double deposited_resist_kev = 0.0;
  double deposited_other_kev = 0.0;
  double escaped_kev = 0.0;
  double beyond_rmax_kev = 0.0;  // resist deposits outside the last bin

  double bin_center_um(std::size_t i) const;
  // keV / um^2 per electron.
  double density(std::size_t i) const;
};

inline constexpr int kRadialBins = 200;
inline constexpr double kRadialMinUm = 1e-3;   // 1 nm
inline constexpr double kRadialMaxUm = 50.0;
inline constexpr double kTrackingCutoffKev = 0.5;

// MMA/CSAR-type resist bilayer (100 nm + 500 nm) on semi-infinite silicon.
std::vector<MaterialLayer> silicon_bilayer_stack();
// Same resist stack on a Z=32 (germanium) substrate; used to probe the
// substrate dependence of the backscatter ratio.
std::vector<MaterialLayer> germanium_bilayer_stack();

// Pencil beam at normal incidence on the top surface. Trajectories follow
// screened-Rutherford single elastic scattering with Bethe (Joy-Luo)
// continuous slowing down; electrons are tracked until they drop below the
// cutoff or escape through the top surface. Deterministic for a given seed,
// independent of the worker count.
RadialEnergyHistogram simulate_psf(const std::vector<MaterialLayer>& stack,
                                   const BeamConfig& beam);

struct PsfFit {
  dose::PsfParams params;
  double scale_kev = 0.0;       // total PSF weight per electron
  double rms_log10_residual = 0.0;
  int bins_used = 0;
};

// Weighted least squares of the double-Gaussian model against log10 of the
// radial energy density over all non-empty bins. Throws on degenerate
// histograms. beta > alpha is enforced by canonicalization.
PsfFit fit_double_gaussian(const RadialEnergyHistogram& hist);

// Synthetic histogram sampled exactly from the double-Gaussian model;
// used as the fit round-trip oracle.
RadialEnergyHistogram synthetic_histogram(const dose::PsfParams& params, double scale_kev,
                                          std::int64_t electrons = 100000);

// CSV with header r_um,energy_kev,density_kev_um2_per_electron.
void save_histogram_csv(const std::string& path, const RadialEnergyHistogram& hist);
// PsfParams JSON consumable by the dose module presets.
void save_psf_json(const std::string& path, const PsfFit& fit, const BeamConfig& beam);

}  // namespace jfab::mcpsf
