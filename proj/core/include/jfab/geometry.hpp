#pragma once

#include <string>

namespace jfab::geom {

// Resist bilayer dimensions. The copolymer thickness is the suspension
// height of the bridge underside, which sets the shadow shift.
struct StackGeometry {
  double copolymer_thickness_nm = 500.0;
  double top_resist_thickness_nm = 100.0;
  double undercut_nm = 200.0;

  void validate() const;  // throws std::invalid_argument
};

// Mask openings around a suspended bridge. bottom_window and top_window are
// extents along the tilt axis; junction_length is the transverse dimension.
// Which physical mask dimension maps onto the tilt axis is a layout
// convention of the caller (see WaferConfig::tilt_axis_is_bottom).
struct DolanMask {
  double bridge_width_nm = 150.0;
  double bottom_window_nm = 170.0;
  double top_window_nm = 600.0;
  double junction_length_nm = 170.0;

  void validate() const;
  // Studied range for junction linear dimensions; outside it results are
  // extrapolations.
  bool length_in_studied_range() const {
    return junction_length_nm >= 80.0 && junction_length_nm <= 680.0;
  }
};

struct EvaporationStep {
  double angle_deg = 0.0;      // tilt about the junction_length axis
  double film_thickness_nm = 25.0;

  void validate() const;
};

enum class OverlapRegime { Full, Partial, None };

const char* to_string(OverlapRegime r);
OverlapRegime regime_from_string(const std::string& s);  // throws on unknown

struct OverlayResult {
  double shift_nm = 0.0;          // net image shift s1 - s2 along the tilt axis
  double overlap_width_nm = 0.0;  // tilt-axis extent of the junction
  double area_um2 = 0.0;
  OverlapRegime regime = OverlapRegime::None;

  // d(overlap)/d(shift): +1/-1 in the partial regime, 0 in full/none.
  double overlap_shift_slope = 0.0;
  // First-order dA/d(alpha1) in um^2 per degree; zero exactly in the full
  // regime, which is what makes full overlay insensitive to angle spread.
  double area_angle_sensitivity_um2_per_deg = 0.0;

  // First-film image lands past the undercut pocket; the film is clipped by
  // the resist wall and the geometric model is no longer trustworthy.
  bool clipping_warning = false;

  // Overlaps of same-window film pairs (first/second deposition through the
  // same opening). These form unwanted junctions that are normally shorted
  // by bandages, so they are excluded from `area_um2` and reported only.
  double parasitic_bottom_overlap_nm = 0.0;
  double parasitic_top_overlap_nm = 0.0;
};

// s = h * tan(angle). Throws std::domain_error for angle outside [0, 90).
double shadow_shift_nm(const StackGeometry& stack, double angle_deg);

// Aperture width seen by a beam tilted by `angle_deg`, foreshortened by the
// top resist wall: max(0, width - t_top * tan(angle)).
double effective_opening_nm(double width_nm, const StackGeometry& stack, double angle_deg);

// Interval model of the double-angle deposition on the tilt axis:
//   bottom window [-b, 0], bridge [0, w0], top window [w0, w0 + t].
// The first film's image of the bottom window is shifted by s = s1 - s2 and
// intersected with the second film in the top window.
OverlayResult overlay(const StackGeometry& stack, const DolanMask& mask,
                      const EvaporationStep& evap1, const EvaporationStep& evap2);

// overlap(tilt) x length(transverse), in um^2.
double junction_area_um2(double overlap_width_nm, double junction_length_nm);

}  // namespace jfab::geom
