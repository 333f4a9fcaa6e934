#ifndef SPATFDA_CURVEGRID_HPP
#define SPATFDA_CURVEGRID_HPP

#include <functional>
#include <vector>

#include "spatfda/errors.hpp"
#include "spatfda/numkernel.hpp"

namespace spatfda {

/// Uniform midpoint grid on (0,1): t_j = (j - 1/2)/m for j = 1..m. Midpoints
/// keep the discrete Fourier system exactly orthonormal under the midpoint
/// quadrature rule used throughout.
class Grid {
public:
  explicit Grid(int m);

  int size() const { return m_; }
  double node(int j) const { return (static_cast<double>(j) + 0.5) / m_; }  // 0-based
  Vector nodes() const;

  bool operator==(const Grid& other) const { return m_ == other.m_; }
  bool operator!=(const Grid& other) const { return m_ != other.m_; }

private:
  int m_;
};

/// A function sampled on a grid.
struct Curve {
  Grid grid;
  Vector values;
};

Curve make_curve(const Grid& grid, const std::function<double(double)>& fn);
Curve zero_curve(const Grid& grid);

/// Midpoint-rule inner product (1/m) * sum f(t_j) g(t_j).
double inner_product(const Curve& f, const Curve& g);

/// Integrated absolute difference (1/m) * sum |f(t_j) - g(t_j)|.
double l1_distance(const Curve& f, const Curve& g);

double l2_norm(const Curve& f);

Curve curve_add(const Curve& f, const Curve& g);
Curve curve_sub(const Curve& f, const Curve& g);
Curve curve_scale(const Curve& f, double factor);

/// Orthonormal basis on a grid. The Gram matrix under midpoint quadrature is
/// the identity to 1e-6.
class BasisSet {
public:
  BasisSet(Grid grid, std::vector<Curve> functions);

  const Grid& grid() const { return grid_; }
  int size() const { return static_cast<int>(functions_.size()); }
  const Curve& function(int j) const { return functions_[j]; }
  const std::vector<Curve>& functions() const { return functions_; }

private:
  Grid grid_;
  std::vector<Curve> functions_;
};

/// Fourier basis {1, sqrt(2) sin(2 pi i t), sqrt(2) cos(2 pi i t)} up to
/// frequency (K-1)/2, in that interleaved order. K must be odd and at most m.
/// On coarse grids (m < 4K) the functions are re-orthonormalized by
/// Gram-Schmidt so the discrete orthonormality invariant still holds.
BasisSet fourier_basis(const Grid& grid, int K);

/// Default basis size rule: K = 1 + 4*floor(sqrt(m)).
int default_basis_size(int m);

/// Coefficients <B_j, x> for j = 1..K.
Vector project_coeffs(const Curve& x, const BasisSet& basis);

/// Linear combination sum_j coeffs[j] * B_j.
Curve synthesize(const BasisSet& basis, const Vector& coeffs);

}  // namespace spatfda

#endif
