#include "spatfda/latscale.hpp"

#include <algorithm>
#include <cmath>

namespace spatfda {

ScaleModel make_scale_model(double a, double b, double c) {
  if (!(b > 0.0)) throw DomainError("ScaleModel: b must be positive");
  if (!(c > 0.0)) throw DomainError("ScaleModel: c must be positive");
  return ScaleModel{a, b, c};
}

double eval_scale(const ScaleModel& model, double lat) {
  if (std::fabs(lat) > std::asin(1.0) + 1e-12)
    throw DomainError("eval_scale: latitude out of range");
  const double value = model.a + model.b * std::pow(std::cos(lat), model.c);
  if (!(value > 0.0)) throw NonPositiveScale("eval_scale: scale not positive");
  return value;
}

ScaleFit fit_scale(const std::vector<RatioPoint>& ratios) {
  if (ratios.size() < 4) throw DomainError("fit_scale: need at least 4 points");
  double lat_lo = ratios.front().lat, lat_hi = ratios.front().lat;
  for (const RatioPoint& r : ratios) {
    lat_lo = std::min(lat_lo, r.lat);
    lat_hi = std::max(lat_hi, r.lat);
  }
  if (lat_hi - lat_lo < 0.3)
    throw DomainError("fit_scale: latitudes span less than 0.3 rad");

  const auto residual = [&](const Vector& params) {
    Vector out(ratios.size());
    for (std::size_t i = 0; i < ratios.size(); ++i) {
      const double g = params[0] + params[1] * std::pow(std::cos(ratios[i].lat), params[2]);
      out[i] = g - ratios[i].ratio;
    }
    return out;
  };

  const Vector lo{-1.0, 1e-6, 0.1};
  const Vector hi{2.0, 5.0, 20.0};
  const NlsResult fit = nls_fit(residual, {0.5, 0.5, 2.0}, lo, hi);
  ScaleFit out;
  out.model = ScaleModel{fit.params[0], fit.params[1], fit.params[2]};
  out.converged = fit.converged;
  // b or c pinned at a bound means the decay shape is unidentified.
  for (int p : {1, 2}) {
    const double edge = 1e-6 * (hi[p] - lo[p]);
    const double value = p == 1 ? out.model.b : out.model.c;
    if (value <= lo[p] + edge || value >= hi[p] - edge) out.converged = false;
  }
  return out;
}

int reference_station(const LocationSet& locs) {
  int best = 0;
  for (int k = 1; k < locs.size(); ++k)
    if (std::fabs(locs[k].lat) < std::fabs(locs[best].lat)) best = k;
  return best;
}

std::vector<RatioPoint> scale_ratios(const CurveSet& curves, int ref_index) {
  if (ref_index < 0 || ref_index >= curves.size())
    throw DomainError("scale_ratios: reference index out of range");
  const Vector& ref = curves.curve(ref_index).values;
  std::vector<RatioPoint> out;
  out.reserve(curves.size());
  for (int k = 0; k < curves.size(); ++k) {
    const Vector& v = curves.curve(k).values;
    double acc = 0.0;
    int used = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (std::fabs(ref[j]) <= 1e-6) continue;
      acc += v[j] / ref[j];
      ++used;
    }
    if (used == 0) throw DomainError("scale_ratios: reference curve vanishes everywhere");
    out.push_back(RatioPoint{curves.locations()[k].lat, acc / used});
  }
  return out;
}

namespace {

CurveSet rescale(const CurveSet& curves, const ScaleModel& model, bool divide) {
  std::vector<Curve> out;
  out.reserve(curves.size());
  for (int k = 0; k < curves.size(); ++k) {
    const double g = eval_scale(model, curves.locations()[k].lat);
    out.push_back(curve_scale(curves.curve(k), divide ? 1.0 / g : g));
  }
  return CurveSet(std::move(out), curves.locations());
}

}  // namespace

CurveSet descale(const CurveSet& curves, const ScaleModel& model) {
  return rescale(curves, model, true);
}

CurveSet apply_scale(const CurveSet& curves, const ScaleModel& model) {
  return rescale(curves, model, false);
}

}  // namespace spatfda
