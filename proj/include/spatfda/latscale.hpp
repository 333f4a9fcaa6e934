#ifndef SPATFDA_LATSCALE_HPP
#define SPATFDA_LATSCALE_HPP

#include <vector>

#include "spatfda/curveset.hpp"
#include "spatfda/numkernel.hpp"

namespace spatfda {

/// Latitudinal amplitude model G(L) = a + b cos^c(L), with b > 0 and c > 0.
struct ScaleModel {
  double a = 0.0;
  double b = 1.0;
  double c = 1.0;
};

ScaleModel make_scale_model(double a, double b, double c);

/// G evaluated at a latitude (radians). Throws NonPositiveScale when the
/// model dips to zero or below there.
double eval_scale(const ScaleModel& model, double lat);

struct RatioPoint {
  double lat = 0.0;    // radians
  double ratio = 0.0;  // G-hat estimate at that latitude
};

struct ScaleFit {
  ScaleModel model;
  bool converged = false;
};

/// NLS fit of the scale model to latitude/ratio pairs. Needs at least four
/// points spanning at least 0.3 rad of latitude. Bounds: a in (-1, 2),
/// b in (0, 5), c in (0.1, 20).
ScaleFit fit_scale(const std::vector<RatioPoint>& ratios);

/// Amplitude ratios relative to a reference station: the time average of
/// curve_k(t_j) / curve_ref(t_j). Reference values below 1e-6 in magnitude
/// are skipped to avoid blowups; an empty average is an error.
std::vector<RatioPoint> scale_ratios(const CurveSet& curves, int ref_index);

/// Index of the station closest to the equator.
int reference_station(const LocationSet& locs);

/// Remove the latitudinal amplitude trend: X(s;t) = F(s;t) / G(L(s)).
CurveSet descale(const CurveSet& curves, const ScaleModel& model);

/// Apply the trend (inverse of descale).
CurveSet apply_scale(const CurveSet& curves, const ScaleModel& model);

}  // namespace spatfda

#endif
