#include "jfab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jfab/constants.hpp"

namespace jfab::geom {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void StackGeometry::validate() const {
  require(copolymer_thickness_nm > 0.0, "StackGeometry: copolymer thickness must be > 0");
  require(top_resist_thickness_nm > 0.0, "StackGeometry: top resist thickness must be > 0");
  require(undercut_nm >= 0.0, "StackGeometry: undercut must be >= 0");
}

void DolanMask::validate() const {
  require(bridge_width_nm > 0.0, "DolanMask: bridge width must be > 0");
  require(bottom_window_nm > 0.0, "DolanMask: bottom window must be > 0");
  require(top_window_nm > 0.0, "DolanMask: top window must be > 0");
  require(junction_length_nm > 0.0, "DolanMask: junction length must be > 0");
}

void EvaporationStep::validate() const {
  // Signed angles are allowed: the sign is the tilt direction along the
  // tilt axis (local source-gradient deviations around 0 are negative).
  if (!(angle_deg > -90.0 && angle_deg < 90.0))
    throw std::domain_error("EvaporationStep: angle must be in (-90, 90) degrees");
  require(film_thickness_nm > 0.0, "EvaporationStep: film thickness must be > 0");
}

const char* to_string(OverlapRegime r) {
  switch (r) {
    case OverlapRegime::Full: return "Full";
    case OverlapRegime::Partial: return "Partial";
    case OverlapRegime::None: return "None";
  }
  return "None";
}

OverlapRegime regime_from_string(const std::string& s) {
  if (s == "Full") return OverlapRegime::Full;
  if (s == "Partial") return OverlapRegime::Partial;
  if (s == "None") return OverlapRegime::None;
  throw std::invalid_argument("unknown overlap regime: " + s);
}

double shadow_shift_nm(const StackGeometry& stack, double angle_deg) {
  stack.validate();
  if (!(angle_deg >= 0.0 && angle_deg < 90.0))
    throw std::domain_error("shadow_shift: angle must be in [0, 90) degrees");
  return stack.copolymer_thickness_nm * std::tan(angle_deg * constants::kDegToRad);
}

double effective_opening_nm(double width_nm, const StackGeometry& stack, double angle_deg) {
  if (!(width_nm > 0.0)) throw std::invalid_argument("effective_opening: width must be > 0");
  if (!(angle_deg >= 0.0 && angle_deg < 90.0))
    throw std::domain_error("effective_opening: angle must be in [0, 90) degrees");
  const double shaded = stack.top_resist_thickness_nm * std::tan(angle_deg * constants::kDegToRad);
  return std::max(0.0, width_nm - shaded);
}

double junction_area_um2(double overlap_width_nm, double junction_length_nm) {
  if (overlap_width_nm < 0.0 || junction_length_nm < 0.0)
    throw std::invalid_argument("junction_area: dimensions must be >= 0");
  return overlap_width_nm * junction_length_nm * 1e-6;
}

OverlayResult overlay(const StackGeometry& stack, const DolanMask& mask,
                      const EvaporationStep& evap1, const EvaporationStep& evap2) {
  stack.validate();
  mask.validate();
  evap1.validate();
  evap2.validate();

  auto signed_shift = [&](double angle_deg) {
    return stack.copolymer_thickness_nm * std::tan(angle_deg * constants::kDegToRad);
  };
  const double s1 = signed_shift(evap1.angle_deg);
  const double s2 = signed_shift(evap2.angle_deg);
  const double s = s1 - s2;

  const double b = mask.bottom_window_nm;
  const double w0 = mask.bridge_width_nm;
  const double t = mask.top_window_nm;

  // First-film image of the bottom window vs. second film in the top window.
  const double img_lo = s - b;
  const double img_hi = s;
  const double win_lo = w0;
  const double win_hi = w0 + t;

  OverlayResult res;
  res.shift_nm = s;

  const double lo = std::max(img_lo, win_lo);
  const double hi = std::min(img_hi, win_hi);
  const double ow = hi - lo;

  if (ow <= 0.0) {
    res.regime = OverlapRegime::None;
    res.overlap_width_nm = 0.0;
    res.overlap_shift_slope = 0.0;
  } else {
    res.overlap_width_nm = ow;
    const bool img_inside = img_lo >= win_lo && img_hi <= win_hi;
    const bool win_inside = win_lo >= img_lo && win_hi <= img_hi;
    if (img_inside || win_inside) {
      res.regime = OverlapRegime::Full;
      res.overlap_shift_slope = 0.0;
    } else {
      res.regime = OverlapRegime::Partial;
      // Either the left edge is clamped at the window start (overlap grows
      // with s) or the right edge is clamped at the window end (shrinks).
      res.overlap_shift_slope = (img_lo < win_lo) ? +1.0 : -1.0;
    }
  }

  res.area_um2 = junction_area_um2(res.overlap_width_nm, mask.junction_length_nm);

  // dA/d(alpha1) = L * d(overlap)/ds * ds/d(alpha1), ds/d(alpha1) = h sec^2(a).
  const double a1 = evap1.angle_deg * constants::kDegToRad;
  const double sec = 1.0 / std::cos(a1);
  const double ds_dalpha_nm_per_deg =
      stack.copolymer_thickness_nm * sec * sec * constants::kDegToRad;
  res.area_angle_sensitivity_um2_per_deg =
      mask.junction_length_nm * res.overlap_shift_slope * ds_dalpha_nm_per_deg * 1e-6;

  res.clipping_warning = s1 > stack.undercut_nm + mask.bottom_window_nm;

  res.parasitic_bottom_overlap_nm = std::max(0.0, b - std::abs(s));
  res.parasitic_top_overlap_nm = std::max(0.0, t - std::abs(s));
  return res;
}

}  // namespace jfab::geom
