#include "movgrid/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "movgrid/errors.hpp"
#include "movgrid/wavefunction.hpp"

namespace movgrid {
namespace {

void check_gradient(const Model::Definition& def, std::size_t dims) {
  std::mt19937_64 rng(0x6d6f76677269ULL);
  std::vector<double> q(dims), g(dims), qp(dims), qm(dims);
  for (int sample = 0; sample < 16; ++sample) {
    for (std::size_t l = 0; l < dims; ++l) {
      std::uniform_real_distribution<double> u(def.sample_lo[l], def.sample_hi[l]);
      q[l] = u(rng);
    }
    def.gradient(q, g);
    double g_max = 0.0;
    for (double v : g) g_max = std::max(g_max, std::abs(v));
    const double tol = 1e-6 * std::max(g_max, 1.0);
    for (std::size_t l = 0; l < dims; ++l) {
      const double h = 1e-5 * std::max(1.0, std::abs(q[l]));
      qp = q;
      qm = q;
      qp[l] += h;
      qm[l] -= h;
      const double fd = (def.potential(qp) - def.potential(qm)) / (qp[l] - qm[l]);
      if (!(std::abs(fd - g[l]) <= tol))
        throw ModelDefinitionError("model '" + def.label + "': gradient component " + std::to_string(l + 1) +
                                   " disagrees with finite differences (" + std::to_string(g[l]) + " vs " +
                                   std::to_string(fd) + ")");
    }
  }
}

void check_line_evaluator(const Model::Definition& def, std::size_t dims) {
  std::mt19937_64 rng(0x6c696e65ULL);
  constexpr std::size_t n = 7;
  std::vector<double> q(dims), axis(n), v(n), grad(n * dims), g(dims), point(dims);
  for (int sample = 0; sample < 16; ++sample) {
    for (std::size_t l = 0; l < dims; ++l) {
      std::uniform_real_distribution<double> u(def.sample_lo[l], def.sample_hi[l]);
      q[l] = u(rng);
      if (l + 1 == dims)
        for (auto& x : axis) x = u(rng);
    }
    def.line_evaluator(q, axis, v, def.gradient ? std::span<double>(grad) : std::span<double>());
    for (std::size_t i = 0; i < n; ++i) {
      point = q;
      point[dims - 1] = axis[i];
      const double ref = def.potential(point);
      bool ok = std::abs(v[i] - ref) <= 1e-12 * std::max(1.0, std::abs(ref));
      if (def.gradient) {
        def.gradient(point, g);
        for (std::size_t l = 0; l < dims; ++l)
          ok = ok && std::abs(grad[i * dims + l] - g[l]) <= 1e-12 * std::max(1.0, std::abs(g[l]));
      }
      if (!ok) throw ModelDefinitionError("model '" + def.label + "': line evaluator disagrees with the pointwise forms");
    }
  }
}

}  // namespace

Model::Model(Definition def) : def_(std::move(def)) {
  const std::size_t d = def_.inv_mass.size();
  if (d == 0) throw ModelDefinitionError("model '" + def_.label + "' has no dimensions");
  if (!def_.potential) throw ModelDefinitionError("model '" + def_.label + "' has no potential");
  if (!def_.inv_mass.is_symmetric(1e-14)) throw ModelDefinitionError("inverse mass matrix is not symmetric");
  if (!cholesky(def_.inv_mass)) throw ModelDefinitionError("inverse mass matrix is not positive definite");
  diagonal_mass_ = def_.inv_mass.is_diagonal();
  if (def_.minimum && def_.minimum->size() != d) throw ModelDefinitionError("minimum has wrong dimension");
  if (def_.hessian_at_minimum && def_.hessian_at_minimum->size() != d)
    throw ModelDefinitionError("Hessian has wrong dimension");
  if (def_.sample_lo.empty()) def_.sample_lo.assign(d, -1.0);
  if (def_.sample_hi.empty()) def_.sample_hi.assign(d, 1.0);
  if (def_.sample_lo.size() != d || def_.sample_hi.size() != d)
    throw ModelDefinitionError("sample box has wrong dimension");
  if (def_.gradient) check_gradient(def_, d);
  if (def_.line_evaluator) check_line_evaluator(def_, d);
}

void Model::gradient(std::span<const double> q, std::span<double> out) const {
  if (!def_.gradient) throw UnsupportedModel("model '" + def_.label + "' has no analytic gradient");
  def_.gradient(q, out);
}

void Model::evaluate_line(std::span<const double> q, std::span<const double> last_axis, std::span<double> v,
                          std::span<double> grad) const {
  if (!grad.empty() && !def_.gradient)
    throw UnsupportedModel("model '" + def_.label + "' has no analytic gradient");
  if (def_.line_evaluator) {
    def_.line_evaluator(q, last_axis, v, grad);
    return;
  }
  const std::size_t d = dims();
  std::vector<double> point(q.begin(), q.end());
  for (std::size_t i = 0; i < last_axis.size(); ++i) {
    point[d - 1] = last_axis[i];
    v[i] = def_.potential(point);
    if (!grad.empty()) def_.gradient(point, grad.subspan(i * d, d));
  }
}

double Model::kinetic(std::span<const double> p) const {
  const std::size_t d = dims();
  double t = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < d; ++j) row += def_.inv_mass(i, j) * p[j];
    t += p[i] * row;
  }
  return 0.5 * t;
}

HarmonicParams HarmonicParams::table_one() {
  HarmonicParams p;
  p.K = Matrix(3, {1.997, -0.04, -0.017,  //
                   -0.04, 1.015, 0.04,    //
                   -0.017, 0.04, 2.48});
  p.q0 = {-7.0, 7.0, 7.0};
  p.omegas = {2.0, 1.0, 2.5};
  return p;
}

Model harmonic_excited(const HarmonicParams& params) {
  const std::size_t d = params.q0.size();
  if (params.K.size() != d || params.omegas.size() != d)
    throw ModelDefinitionError("harmonic parameters have inconsistent dimensions");
  if (!params.K.is_symmetric(1e-14) || !cholesky(params.K))
    throw ModelDefinitionError("force-constant matrix must be symmetric positive definite");
  for (double w : params.omegas)
    if (!(w > 0.0)) throw ModelDefinitionError("oscillator frequencies must be positive");

  Model::Definition def;
  def.label = "harmonic";
  def.inv_mass = Matrix::diagonal(params.omegas);
  const Matrix K = params.K;
  const std::vector<double> q0 = params.q0;
  def.potential = [K, q0](std::span<const double> q) {
    const std::size_t n = q0.size();
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += K(i, j) * (q[j] - q0[j]);
      v += (q[i] - q0[i]) * row;
    }
    return 0.5 * v;
  };
  def.gradient = [K, q0](std::span<const double> q, std::span<double> out) {
    const std::size_t n = q0.size();
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += K(i, j) * (q[j] - q0[j]);
      out[i] = row;
    }
  };
  def.line_evaluator = [K, q0](std::span<const double> q, std::span<const double> axis, std::span<double> v,
                               std::span<double> grad) {
    // Along a line only the last displacement x varies:
    // row_i = base_i + K(i, last) x and V = (sum_{i<last} y_i row_i + x row_last) / 2.
    const std::size_t n = q0.size(), last = n - 1;
    thread_local std::vector<double> y, base, column;
    y.assign(n, 0.0);
    base.assign(n, 0.0);
    for (std::size_t i = 0; i < last; ++i) y[i] = q[i] - q0[i];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < last; ++j) base[i] += K(i, j) * y[j];
    double lead = 0.0, lead_slope = 0.0;
    for (std::size_t i = 0; i < last; ++i) {
      lead += y[i] * base[i];
      lead_slope += y[i] * K(i, last);
    }
    const double k_ll = K(last, last);
    column.resize(n);
    for (std::size_t i = 0; i < n; ++i) column[i] = K(i, last);
    for (std::size_t k = 0; k < axis.size(); ++k) {
      const double x = axis[k] - q0[last];
      const double row_last = base[last] + k_ll * x;
      v[k] = 0.5 * (lead + lead_slope * x + x * row_last);
      if (!grad.empty()) {
        double* g = grad.data() + k * n;
        for (std::size_t i = 0; i < last; ++i) g[i] = base[i] + column[i] * x;
        g[last] = row_last;
      }
    }
  };
  def.minimum = q0;
  def.hessian_at_minimum = K;
  def.sample_lo.resize(d);
  def.sample_hi.resize(d);
  for (std::size_t l = 0; l < d; ++l) {
    def.sample_lo[l] = q0[l] - 10.0;
    def.sample_hi[l] = q0[l] + 10.0;
  }
  return Model(std::move(def));
}

Model secrest_johnson() {
  constexpr double depth = 20.0, beta = 0.158, alpha = 0.3;
  Model::Definition def;
  def.label = "scattering";
  def.inv_mass = Matrix::diagonal(std::vector<double>{1.0, 1.5});
  def.potential = [](std::span<const double> q) {
    const double morse = 1.0 - std::exp(-beta * q[0]);
    return depth * morse * morse + std::exp(-alpha * (q[1] - q[0]));
  };
  def.gradient = [](std::span<const double> q, std::span<double> out) {
    const double e = std::exp(-beta * q[0]);
    const double rep = alpha * std::exp(-alpha * (q[1] - q[0]));
    out[0] = 2.0 * depth * beta * e * (1.0 - e) + rep;
    out[1] = -rep;
  };
  def.sample_lo = {-5.0, 0.0};
  def.sample_hi = {5.0, 30.0};
  return Model(std::move(def));
}

Model henon_heiles(std::size_t dims, double lambda) {
  if (dims < 2) throw InvalidArgument("Henon-Heiles model needs at least 2 dimensions");
  Model::Definition def;
  def.label = "henon_heiles";
  def.inv_mass = Matrix::identity(dims);
  def.potential = [lambda](std::span<const double> q) {
    const std::size_t d = q.size();
    double harmonic = 0.0, coupling = 0.0;
    for (std::size_t l = 0; l < d; ++l) harmonic += q[l] * q[l];
    for (std::size_t l = 0; l + 1 < d; ++l) coupling += q[l] * q[l] * q[l + 1] - q[l + 1] * q[l + 1] * q[l + 1] / 3.0;
    return 0.5 * harmonic + lambda * coupling;
  };
  def.gradient = [lambda](std::span<const double> q, std::span<double> out) {
    const std::size_t d = q.size();
    for (std::size_t l = 0; l < d; ++l) {
      double g = q[l];
      if (l + 1 < d) g += lambda * 2.0 * q[l] * q[l + 1];
      if (l > 0) g += lambda * (q[l - 1] * q[l - 1] - q[l] * q[l]);
      out[l] = g;
    }
  };
  def.minimum = std::vector<double>(dims, 0.0);
  def.sample_lo.assign(dims, -3.0);
  def.sample_hi.assign(dims, 3.0);
  return Model(std::move(def));
}

WaveState initial_state_for(const std::string& label, const GridSpec& grid) {
  const std::size_t d = grid.dims();
  if (label == "harmonic") {
    const std::vector<double> zero(d, 0.0), ones(d, 1.0);
    return gaussian_state(grid, zero, zero, ones);
  }
  if (label == "scattering") {
    if (d != 2) throw InvalidArgument("scattering initial state needs a 2-D grid");
    const double sigma = std::sqrt(8.0);
    return gaussian_state(grid, std::vector<double>{0.0, 24.0}, std::vector<double>{0.0, -3.56},
                          std::vector<double>{1.0, sigma});
  }
  if (label == "henon_heiles") {
    const std::vector<double> q0(d, 2.0), zero(d, 0.0), ones(d, 1.0);
    return gaussian_state(grid, q0, zero, ones);
  }
  throw InvalidArgument("unknown model label '" + label + "' (expected harmonic, scattering or henon_heiles)");
}

}  // namespace movgrid
