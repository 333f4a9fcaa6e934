#include "spatfda/curvegrid.hpp"

#include <cmath>
#include <numbers>

namespace spatfda {

Grid::Grid(int m) : m_(m) {
  if (m < 1) throw DomainError("Grid: need at least one point");
}

Vector Grid::nodes() const {
  Vector t(m_);
  for (int j = 0; j < m_; ++j) t[j] = node(j);
  return t;
}

Curve make_curve(const Grid& grid, const std::function<double(double)>& fn) {
  Curve c{grid, Vector(grid.size())};
  for (int j = 0; j < grid.size(); ++j) c.values[j] = fn(grid.node(j));
  return c;
}

Curve zero_curve(const Grid& grid) { return Curve{grid, Vector(grid.size(), 0.0)}; }

namespace {

void check_same_grid(const Curve& f, const Curve& g) {
  if (f.grid != g.grid) throw GridMismatch("curves on different grids");
  if (static_cast<int>(f.values.size()) != f.grid.size() ||
      static_cast<int>(g.values.size()) != g.grid.size())
    throw LengthMismatch("curve values inconsistent with grid");
}

}  // namespace

double inner_product(const Curve& f, const Curve& g) {
  check_same_grid(f, g);
  const int m = f.grid.size();
  double acc = 0.0;
  for (int j = 0; j < m; ++j) acc += f.values[j] * g.values[j];
  return acc / m;
}

double l1_distance(const Curve& f, const Curve& g) {
  check_same_grid(f, g);
  const int m = f.grid.size();
  double acc = 0.0;
  for (int j = 0; j < m; ++j) acc += std::fabs(f.values[j] - g.values[j]);
  return acc / m;
}

double l2_norm(const Curve& f) { return std::sqrt(inner_product(f, f)); }

Curve curve_add(const Curve& f, const Curve& g) {
  check_same_grid(f, g);
  Curve out = f;
  for (std::size_t j = 0; j < out.values.size(); ++j) out.values[j] += g.values[j];
  return out;
}

Curve curve_sub(const Curve& f, const Curve& g) {
  check_same_grid(f, g);
  Curve out = f;
  for (std::size_t j = 0; j < out.values.size(); ++j) out.values[j] -= g.values[j];
  return out;
}

Curve curve_scale(const Curve& f, double factor) {
  Curve out = f;
  for (double& v : out.values) v *= factor;
  return out;
}

BasisSet::BasisSet(Grid grid, std::vector<Curve> functions)
    : grid_(grid), functions_(std::move(functions)) {
  for (const Curve& f : functions_)
    if (f.grid != grid_) throw GridMismatch("BasisSet: function off grid");
}

int default_basis_size(int m) {
  return 1 + 4 * static_cast<int>(std::floor(std::sqrt(static_cast<double>(m))));
}

BasisSet fourier_basis(const Grid& grid, int K) {
  if (K < 1 || K % 2 == 0) throw InvalidK("fourier_basis: K must be odd and positive");
  if (K > grid.size()) throw InvalidK("fourier_basis: K exceeds grid size");

  const double sqrt2 = std::numbers::sqrt2;
  std::vector<Curve> funcs;
  funcs.reserve(K);
  funcs.push_back(make_curve(grid, [](double) { return 1.0; }));
  for (int i = 1; 2 * i < K + 1 && static_cast<int>(funcs.size()) < K; ++i) {
    const double w = 2.0 * std::numbers::pi * i;
    funcs.push_back(make_curve(grid, [&](double t) { return sqrt2 * std::sin(w * t); }));
    funcs.push_back(make_curve(grid, [&](double t) { return sqrt2 * std::cos(w * t); }));
  }

  // Exact discrete orthonormality can degrade once frequencies approach the
  // grid resolution; re-orthonormalize in that regime.
  if (grid.size() < 4 * K) {
    const int m = grid.size();
    for (int j = 0; j < K; ++j) {
      for (int i = 0; i < j; ++i) {
        const double proj = inner_product(funcs[j], funcs[i]);
        for (int k = 0; k < m; ++k) funcs[j].values[k] -= proj * funcs[i].values[k];
      }
      const double norm = l2_norm(funcs[j]);
      if (norm < 1e-12) throw InvalidK("fourier_basis: basis degenerate on this grid");
      for (int k = 0; k < m; ++k) funcs[j].values[k] /= norm;
    }
  }
  return BasisSet(grid, std::move(funcs));
}

Vector project_coeffs(const Curve& x, const BasisSet& basis) {
  if (x.grid != basis.grid()) throw GridMismatch("project_coeffs: grid mismatch");
  Vector coeffs(basis.size());
  for (int j = 0; j < basis.size(); ++j) coeffs[j] = inner_product(basis.function(j), x);
  return coeffs;
}

Curve synthesize(const BasisSet& basis, const Vector& coeffs) {
  if (static_cast<int>(coeffs.size()) > basis.size())
    throw LengthMismatch("synthesize: more coefficients than basis functions");
  Curve out = zero_curve(basis.grid());
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    const Curve& b = basis.function(static_cast<int>(j));
    for (int k = 0; k < out.grid.size(); ++k) out.values[k] += coeffs[j] * b.values[k];
  }
  return out;
}

}  // namespace spatfda
