#include "spatfda/curveset.hpp"

namespace spatfda {

CurveSet::CurveSet(std::vector<Curve> curves, LocationSet locations)
    : curves_(std::move(curves)), locations_(std::move(locations)) {
  if (curves_.empty()) throw LengthMismatch("CurveSet: no curves");
  if (static_cast<int>(curves_.size()) != locations_.size())
    throw LengthMismatch("CurveSet: curve count differs from location count");
  for (const Curve& c : curves_) {
    if (c.grid != curves_.front().grid) throw GridMismatch("CurveSet: mixed grids");
    if (static_cast<int>(c.values.size()) != c.grid.size())
      throw LengthMismatch("CurveSet: curve length differs from grid");
  }
}

}  // namespace spatfda
