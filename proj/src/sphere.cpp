#include "spatfda/sphere.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace spatfda {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMinSeparation = 1e-9;

double wrap_longitude(double lon) {
  while (lon > kPi) lon -= 2.0 * kPi;
  while (lon <= -kPi) lon += 2.0 * kPi;
  return lon;
}

}  // namespace

Location make_location(double lat, double lon) {
  if (!(lat >= -kPi / 2.0 && lat <= kPi / 2.0))
    throw DomainError("Location: latitude out of [-pi/2, pi/2]");
  if (!std::isfinite(lon)) throw DomainError("Location: longitude not finite");
  return Location{lat, wrap_longitude(lon)};
}

Location location_from_degrees(double lat_deg, double lon_deg) {
  return make_location(lat_deg * kPi / 180.0, lon_deg * kPi / 180.0);
}

double chordal_distance(const Location& a, const Location& b) {
  const double slat = std::sin(0.5 * (a.lat - b.lat));
  const double slon = std::sin(0.5 * (a.lon - b.lon));
  const double inside = slat * slat + std::cos(a.lat) * std::cos(b.lat) * slon * slon;
  return 2.0 * std::sqrt(std::max(0.0, inside));
}

LocationSet::LocationSet(std::vector<Location> points) : points_(std::move(points)) {
  if (points_.empty()) throw DomainError("LocationSet: need at least one point");
  for (std::size_t k = 0; k < points_.size(); ++k) {
    for (std::size_t l = k + 1; l < points_.size(); ++l) {
      if (chordal_distance(points_[k], points_[l]) < kMinSeparation)
        throw DomainError("LocationSet: duplicate locations");
    }
  }
}

Matrix distance_matrix(const LocationSet& locs) {
  const int n = locs.size();
  Matrix d(n, n, 0.0);
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l) {
      const double dist = chordal_distance(locs[k], locs[l]);
      d(k, l) = dist;
      d(l, k) = dist;
    }
  }
  return d;
}

namespace {

Location draw_uniform(Rng& rng) {
  const double z = 2.0 * rng.uniform() - 1.0;
  const double lon = (2.0 * rng.uniform() - 1.0) * kPi;
  return make_location(std::asin(std::clamp(z, -1.0, 1.0)), lon);
}

// Gaussian scatter around a cluster center in the local tangent plane.
Location draw_clustered(Rng& rng, const Location& center, double sigma_rad) {
  const double lat = std::clamp(center.lat + sigma_rad * rng.normal(),
                                -kPi / 2.0, kPi / 2.0);
  const double lon =
      center.lon + sigma_rad * rng.normal() / std::max(std::cos(center.lat), 0.2);
  return make_location(lat, lon);
}

}  // namespace

LocationSet sample_locations(int n, Layout layout, Rng& rng) {
  if (n < 1) throw DomainError("sample_locations: n must be positive");

  // Stand-in for real station networks: a dense "European" cluster, a looser
  // secondary cluster, and a scattered remainder.
  const Location dense = location_from_degrees(50.0, 10.0);
  const Location secondary = location_from_degrees(35.0, 135.0);
  const double deg = kPi / 180.0;

  std::vector<Location> pts;
  pts.reserve(n);
  int attempts = 0;
  while (static_cast<int>(pts.size()) < n) {
    Location cand;
    if (layout == Layout::UniformSphere) {
      cand = draw_uniform(rng);
    } else {
      const std::size_t idx = pts.size();
      if (idx < static_cast<std::size_t>((n + 1) / 2)) {
        cand = draw_clustered(rng, dense, 10.0 * deg);
      } else if (idx < static_cast<std::size_t>((n + 1) / 2 + n / 5)) {
        cand = draw_clustered(rng, secondary, 14.0 * deg);
      } else {
        cand = draw_uniform(rng);
      }
    }
    bool ok = true;
    for (const Location& p : pts) {
      if (chordal_distance(p, cand) < 1e-6) {
        ok = false;
        break;
      }
    }
    if (ok) pts.push_back(cand);
    if (++attempts > 100 * n + 1000)
      throw DomainError("sample_locations: could not place distinct points");
  }
  return LocationSet(std::move(pts));
}

LocationSet sample_locations(int n, Layout layout, RngStream stream) {
  Rng rng(stream);
  return sample_locations(n, layout, rng);
}

LocationSet read_locations_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileFormat("cannot open locations file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw FileFormat("empty locations file: " + path);
  if (line.find("lat_deg") == std::string::npos || line.find("lon_deg") == std::string::npos)
    throw FileFormat("locations file missing lat_deg,lon_deg header: " + path);

  std::vector<Location> pts;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
      throw FileFormat("bad locations row at line " + std::to_string(lineno));
    try {
      pts.push_back(location_from_degrees(std::stod(a), std::stod(b)));
    } catch (const std::exception&) {
      throw FileFormat("bad locations row at line " + std::to_string(lineno));
    }
  }
  if (pts.empty()) throw FileFormat("locations file has no data rows: " + path);
  return LocationSet(std::move(pts));
}

void write_locations_csv(const std::string& path, const LocationSet& locs) {
  std::ofstream out(path);
  if (!out) throw FileFormat("cannot write locations file: " + path);
  out << "lat_deg,lon_deg\n";
  out.precision(17);
  for (int k = 0; k < locs.size(); ++k)
    out << locs[k].lat * 180.0 / kPi << "," << locs[k].lon * 180.0 / kPi << "\n";
}

}  // namespace spatfda
