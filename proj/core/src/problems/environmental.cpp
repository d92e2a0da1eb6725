#include "ktb/problems/environmental.hpp"

#include <cmath>
#include <numbers>

#include "ktb/errors.hpp"

namespace ktb::problems {
namespace {

struct Range {
  double lo;
  double hi;
};
constexpr Range kMass{7.0, 13.0};
constexpr Range kDiffusion{0.02, 0.12};
constexpr Range kLocation{0.01, 3.0};
constexpr Range kTime{30.01, 30.295};

double from01(double u, Range r) { return r.lo + (r.hi - r.lo) * u; }
double to01(double v, Range r) { return (v - r.lo) / (r.hi - r.lo); }

void check(double v, Range r, const char* name) {
  const double tol = 1e-12 * (r.hi - r.lo);
  if (!std::isfinite(v) || v < r.lo - tol || v > r.hi + tol) {
    throw InvalidInputError(std::string("EnvParams: ") + name + " out of bounds");
  }
}

Matrix matrix_from(const Tensor& t) {
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      t.data().data(), t.dim(0), t.dim(1));
}

Tensor tensor_from(const Matrix& m) {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  return Tensor(Shape{m.rows(), m.cols()}, Eigen::Map<const Vector>(rm.data(), rm.size()));
}

}  // namespace

EnvParams EnvParams::from_unit(const Vector& x) {
  if (x.size() != 4) throw DimensionError("EnvParams: expected 4 coordinates");
  return {from01(x[0], kMass), from01(x[1], kDiffusion), from01(x[2], kLocation), from01(x[3], kTime)};
}

Vector EnvParams::to_unit() const {
  Vector x(4);
  x << to01(mass, kMass), to01(diffusion, kDiffusion), to01(location, kLocation), to01(time, kTime);
  return x;
}

void EnvParams::validate() const {
  check(mass, kMass, "mass");
  check(diffusion, kDiffusion, "diffusion");
  check(location, kLocation, "location");
  check(time, kTime, "time");
}

GridSpec GridSpec::grid_3x4() {
  GridSpec g;
  g.s = Vector(3);
  g.s << 0.0, 1.0, 2.5;
  g.t = Vector(4);
  g.t << 15.0, 30.0, 45.0, 60.0;
  return g;
}

GridSpec GridSpec::grid_5x10() {
  return GridSpec{Vector::LinSpaced(5, 0.0, 2.5), Vector::LinSpaced(10, 15.0, 60.0)};
}

Matrix env_concentration(const EnvParams& p, const GridSpec& grid) {
  p.validate();
  if ((grid.t.array() <= 0.0).any()) throw InvalidInputError("env_concentration: times must be positive");
  const double four_pi = 4.0 * std::numbers::pi;
  Matrix c(grid.s.size(), grid.t.size());
  for (Index i = 0; i < grid.s.size(); ++i) {
    const double s = grid.s[i];
    for (Index j = 0; j < grid.t.size(); ++j) {
      const double t = grid.t[j];
      double v = p.mass / std::sqrt(four_pi * p.diffusion * t) * std::exp(-s * s / (4.0 * p.diffusion * t));
      if (t > p.time) {
        const double dt = t - p.time;
        const double ds = s - p.location;
        v += p.mass / std::sqrt(four_pi * p.diffusion * dt) * std::exp(-ds * ds / (4.0 * p.diffusion * dt));
      }
      c(i, j) = v;
    }
  }
  return c;
}

double env_mse_objective(const Matrix& output, const Matrix& target) {
  if (output.rows() != target.rows() || output.cols() != target.cols()) {
    throw DimensionError("env_mse_objective: shape mismatch");
  }
  return (output - target).squaredNorm() / static_cast<double>(output.size());
}

CompositeProblem make_environmental_problem(const GridSpec& grid, std::string name) {
  const Matrix target = env_concentration(EnvParams::truth(), grid);
  CompositeProblem p;
  p.name = std::move(name);
  p.dim = 4;
  p.output_shape = {grid.s.size(), grid.t.size()};
  p.n_objectives = 1;
  p.simulate = [grid](const Vector& x, Rng&) {
    return tensor_from(env_concentration(EnvParams::from_unit(x.cwiseMax(0.0).cwiseMin(1.0)), grid));
  };
  p.metrics = [target](const Tensor& out) {
    Vector v(1);
    v[0] = env_mse_objective(matrix_from(out), target);
    return v;
  };
  return p;
}

}  // namespace ktb::problems
