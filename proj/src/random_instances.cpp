#include "posctrl/random_instances.hpp"

#include <random>

#include "posctrl/robust.hpp"

namespace posctrl {

namespace {

// mt19937_64 output mapped to doubles directly; std::uniform_real_distribution
// is implementation-defined and would tie the instance stream to one libstdc++.
double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * unit(rng);
}

int dim(std::mt19937_64& rng, int max_value) {
  return 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_value));
}

Matrix uniform_matrix(std::mt19937_64& rng, int rows, int cols, double lo, double hi) {
  Matrix M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = uniform(rng, lo, hi);
  return M;
}

Vector uniform_vector(std::mt19937_64& rng, int size, double lo, double hi) {
  Vector v(size);
  for (int i = 0; i < size; ++i) v(i) = uniform(rng, lo, hi);
  return v;
}

}  // namespace

InstanceParams oracle_suite_params() { return {}; }

InstanceParams fixed_point_suite_params() {
  InstanceParams p;
  p.max_n = 3;
  p.rho_max = 0.7;
  p.constraint_scale = 0.08;
  return p;
}

RandomInstance make_instance(std::uint64_t seed, const InstanceParams& params) {
  std::mt19937_64 rng(seed);
  const int n = dim(rng, params.max_n);
  const int m = dim(rng, params.max_m);
  const int l = dim(rng, params.max_l);

  SystemInputs in;
  in.E = uniform_matrix(rng, m, n, 0.0, params.constraint_scale);
  in.G = uniform_matrix(rng, l, n, 0.0, params.constraint_scale);
  in.B = uniform_matrix(rng, n, m, -0.4, 0.4);
  in.Ba = uniform_matrix(rng, m, l, -1.0, 1.0);
  const Matrix F = in.B * in.Ba;

  Matrix A0 = uniform_matrix(rng, n, n, 0.0, 1.0);
  const double rho = spectral_radius(A0);
  const double target = uniform(rng, params.rho_min, params.rho_max);
  if (rho > 0.0) A0 *= target / rho;
  in.A = A0 + in.B.cwiseAbs() * *in.E + F.cwiseAbs() * *in.G;
  in.C = Matrix::Identity(n, n);

  RandomInstance inst;
  inst.cost.r = uniform_vector(rng, m, -1.0, 1.0);
  inst.cost.alpha = uniform_vector(rng, l, 0.0, 2.0);
  const Vector floor =
      in.E->transpose() * inst.cost.r.cwiseAbs() - in.G->transpose() * inst.cost.alpha.cwiseAbs();
  inst.cost.s = floor.cwiseMax(0.0) + uniform_vector(rng, n, 0.1, 1.0);
  inst.x0 = uniform_vector(rng, n, 0.0, 1.0);
  inst.sys = build_system(in);
  return inst;
}

}  // namespace posctrl
