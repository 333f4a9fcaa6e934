#ifndef SPATFDA_CURVESET_HPP
#define SPATFDA_CURVESET_HPP

#include <vector>

#include "spatfda/curvegrid.hpp"
#include "spatfda/sphere.hpp"

namespace spatfda {

/// Curves attached to sphere locations: the field X(s_k; t).
class CurveSet {
public:
  CurveSet(std::vector<Curve> curves, LocationSet locations);

  int size() const { return static_cast<int>(curves_.size()); }
  const Grid& grid() const { return curves_.front().grid; }
  const Curve& curve(int k) const { return curves_[k]; }
  const std::vector<Curve>& curves() const { return curves_; }
  const LocationSet& locations() const { return locations_; }

private:
  std::vector<Curve> curves_;
  LocationSet locations_;
};

/// Two curve families observed at the same locations.
struct PairedCurveSets {
  CurveSet x;
  CurveSet y;
};

}  // namespace spatfda

#endif
