#ifndef SPATFDA_SPHERE_HPP
#define SPATFDA_SPHERE_HPP

#include <string>
#include <vector>

#include "spatfda/errors.hpp"
#include "spatfda/numkernel.hpp"

namespace spatfda {

/// Point on the unit sphere. Latitude in [-pi/2, pi/2], longitude in
/// (-pi, pi], both radians.
struct Location {
  double lat = 0.0;
  double lon = 0.0;
};

Location make_location(double lat, double lon);
Location location_from_degrees(double lat_deg, double lon_deg);

/// Chordal (through-the-sphere) distance in [0, 2].
double chordal_distance(const Location& a, const Location& b);

/// Nonempty set of pairwise-distinct locations. Two points closer than 1e-9
/// in chordal distance are rejected; coincident stations make the kriging
/// covariance matrices singular.
class LocationSet {
public:
  explicit LocationSet(std::vector<Location> points);

  int size() const { return static_cast<int>(points_.size()); }
  const Location& operator[](int k) const { return points_[k]; }
  const std::vector<Location>& points() const { return points_; }

private:
  std::vector<Location> points_;
};

/// Symmetric matrix of chordal distances with zero diagonal.
Matrix distance_matrix(const LocationSet& locs);

enum class Layout { UniformSphere, Clustered };

/// Draw station locations. UniformSphere is area-uniform. Clustered mimics
/// the uneven density of real station networks: half the points in a dense
/// mid-latitude cluster, a fifth in a looser secondary cluster, the rest
/// uniform over the sphere.
LocationSet sample_locations(int n, Layout layout, Rng& rng);
LocationSet sample_locations(int n, Layout layout, RngStream stream);

/// CSV with header "lat_deg,lon_deg"; degrees in the file, radians in memory.
LocationSet read_locations_csv(const std::string& path);
void write_locations_csv(const std::string& path, const LocationSet& locs);

}  // namespace spatfda

#endif
