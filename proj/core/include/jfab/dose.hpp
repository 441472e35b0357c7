#pragma once

#include <span>
#include <string>
#include <vector>

namespace jfab::dose {

// Double-Gaussian point-spread surrogate for the exposure process:
//   PSF(r) = [ exp(-r^2/a^2)/(pi a^2) + eta * exp(-r^2/b^2)/(pi b^2) ] / (1 + eta)
// normalized so that a uniformly exposed infinite plane develops dose 1.
struct PsfParams {
  double alpha_fwd_um = 0.05;  // forward-scattering range
  double beta_back_um = 9.0;   // backscattering range
  double eta = 0.7;            // backscatter-to-forward deposited-energy ratio

  void validate() const;  // alpha > 0, beta > alpha, eta >= 0
};

struct LayoutRect {
  double x0_um = 0.0, y0_um = 0.0, x1_um = 0.0, y1_um = 0.0;
  double relative_dose = 1.0;

  void validate() const;
  double width_um() const { return x1_um - x0_um; }
  double height_um() const { return y1_um - y0_um; }
};

struct Region {
  double x0_um = 0.0, y0_um = 0.0, x1_um = 0.0, y1_um = 0.0;
  bool empty() const { return !(x1_um > x0_um) || !(y1_um > y0_um); }
};

// Development model: infinite contrast, resist clears where the relative
// dose reaches threshold_fraction.
struct ResistPreset {
  std::string name;
  PsfParams psf;
  double base_dose_uc_cm2 = 180.0;
  double threshold_fraction = 0.5;

  void validate() const;
};

// Shipped presets. Parameters come from the documented calibration in
// docs/reference_layout.md: beta is the Monte Carlo fit for 50 keV on
// silicon, alpha is fixed at 0.05 um, eta and the threshold are solved so
// the reference layout reproduces the target backscatter increase and
// linewidth bias. calibrate_preset() below re-derives them.
ResistPreset preset_mma_pmma_a4();
ResistPreset preset_mma_csar62();
ResistPreset preset_by_name(const std::string& name);  // throws on unknown
std::vector<std::string> preset_names();

// Relative dose at a point: sum over rectangles of the closed-form integral
// of the PSF (products of erf differences). Empty layout gives 0.
double dose_at_point(std::span<const LayoutRect> layout, const PsfParams& psf,
                     double x_um, double y_um);

// Same split by term: forward (alpha) and backscatter (beta) contributions,
// already weighted by 1/(1+eta) and eta/(1+eta).
struct DoseTerms {
  double forward = 0.0;
  double backscatter = 0.0;
  double total() const { return forward + backscatter; }
};
DoseTerms dose_terms_at_point(std::span<const LayoutRect> layout, const PsfParams& psf,
                              double x_um, double y_um);

// Mean relative dose over a region via fixed-order Gauss-Legendre quadrature
// of the closed-form point dose; deterministic.
double region_mean_dose(std::span<const LayoutRect> layout, const PsfParams& psf,
                        const Region& region);

// Mean backscatter dose received by `feature_region` from every shape that
// does not intersect the region, divided by the mean dose the region gets
// from its own shapes, in percent.
double backscatter_increase_pct(std::span<const LayoutRect> layout, const PsfParams& psf,
                                const Region& feature_region);

// Developed width minus nominal width of layout[feature_index], in nm.
// The cut runs through the feature center, perpendicular to its long axis.
// Root-finding resolves edges to 0.1 nm. Throws if the dose never reaches
// the threshold ("feature not developed").
double linewidth_bias_nm(std::span<const LayoutRect> layout, const ResistPreset& preset,
                         std::size_t feature_index);

// Versioned reference layout (see docs/reference_layout.md): a 150 nm x 1 um
// junction line surrounded by four 25 um^2 wiring pads at 1 um edge
// distance. with_pads=false keeps only the line.
std::vector<LayoutRect> reference_layout(bool with_pads = true);
std::size_t reference_feature_index();
Region reference_feature_region();
inline constexpr const char* kReferenceLayoutVersion = "1";

// Calibration procedure used to pin the shipped presets:
//  1. fix alpha = 0.05 um and beta = beta_back_um (from the MC fit),
//  2. bisect eta so backscatter_increase on the reference layout equals
//     target_increase_pct,
//  3. bisect the threshold so linewidth_bias on the reference layout equals
//     target_bias_nm.
ResistPreset calibrate_preset(const std::string& name, double beta_back_um,
                              double target_increase_pct, double target_bias_nm,
                              double base_dose_uc_cm2);

// Dose map over a regular grid (row-major, iy*nx+ix); rows are evaluated in
// parallel with a deterministic result.
std::vector<double> dose_map(std::span<const LayoutRect> layout, const PsfParams& psf,
                             const Region& window, int nx, int ny);

// Layout files: JSON ({"rects":[{"x0":..,"y0":..,"x1":..,"y1":..,"dose":..}]}
// or a bare array) and CSV (header x0_um,y0_um,x1_um,y1_um,relative_dose).
std::vector<LayoutRect> load_layout(const std::string& path);
void save_layout_json(const std::string& path, std::span<const LayoutRect> layout);

}  // namespace jfab::dose
