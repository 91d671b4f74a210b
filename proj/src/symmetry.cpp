// Copyright 2026 The cvqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cvqkd/symmetry.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <string>

#include "cvqkd/errors.hpp"

namespace cvqkd::symmetry {
namespace {

constexpr std::uint64_t kLemma1Stream = 0x4c454d4d41ULL;
constexpr double kUnitaryInputTolerance = 1e-8;

}  // namespace

ComplexMatrix sample_haar_unitary(std::uint64_t m, mc::Rng& rng) {
  if (m == 0) throw DomainError("sample_haar_unitary: m must be positive");
  const auto dim = static_cast<Eigen::Index>(m);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix z(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = {re, im};
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const std::complex<double> d = r(j, j);
    const double mag = std::abs(d);
    q.col(j) *= mag > 0.0 ? d / mag : std::complex<double>(1.0, 0.0);
  }
  return q;
}

RealMatrix sample_haar_orthogonal(std::uint64_t d, mc::Rng& rng) {
  if (d == 0) throw DomainError("sample_haar_orthogonal: d must be positive");
  const auto dim = static_cast<Eigen::Index>(d);
  std::normal_distribution<double> normal(0.0, 1.0);
  RealMatrix z(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) z(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<RealMatrix> qr(z);
  RealMatrix q = qr.householderQ();
  const RealMatrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < dim; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

double max_abs_deviation_from_identity(const RealMatrix& gram) {
  return (gram - RealMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

double unitarity_residual(const ComplexMatrix& u) {
  const ComplexMatrix gram = u.adjoint() * u;
  return (gram - ComplexMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

double orthogonality_residual(const RealMatrix& r) {
  return max_abs_deviation_from_identity(r.transpose() * r);
}

double symplectic_block_residual(const RealMatrix& s) {
  if (s.rows() != s.cols() || s.rows() % 2 != 0) {
    throw DomainError("symplectic_block_residual: matrix must be square of even size");
  }
  double worst = 0.0;
  for (Eigen::Index i = 0; i < s.rows(); i += 2) {
    for (Eigen::Index j = 0; j < s.cols(); j += 2) {
      worst = std::max(worst, std::abs(s(i, j) - s(i + 1, j + 1)));
      worst = std::max(worst, std::abs(s(i, j + 1) + s(i + 1, j)));
    }
  }
  return worst;
}

SymplecticRotation to_symplectic(const ComplexMatrix& u) {
  if (u.rows() != u.cols() || u.rows() == 0) {
    throw DomainError("to_symplectic: expected a nonempty square matrix");
  }
  const double residual = unitarity_residual(u);
  if (!(residual <= kUnitaryInputTolerance)) {
    throw DomainError("to_symplectic: input is not unitary (residual " +
                      std::to_string(residual) + ")");
  }
  const Eigen::Index m = u.rows();
  SymplecticRotation s{RealMatrix(2 * m, 2 * m)};
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double re = u(i, j).real();
      const double im = u(i, j).imag();
      s.matrix(2 * i, 2 * j) = re;
      s.matrix(2 * i, 2 * j + 1) = -im;
      s.matrix(2 * i + 1, 2 * j) = im;
      s.matrix(2 * i + 1, 2 * j + 1) = re;
    }
  }
  return s;
}

namespace {

QuadratureRecord apply_matrix(const QuadratureRecord& rec, const RealMatrix& m) {
  rec.validate();
  const auto len = static_cast<Eigen::Index>(rec.values.size());
  if (m.rows() != len || m.cols() != len) {
    throw DomainError("symmetrize: rotation is " + std::to_string(m.rows()) + "x" +
                      std::to_string(m.cols()) + " but the record holds " +
                      std::to_string(len) + " values");
  }
  QuadratureRecord out = rec;
  out.mode_ids.clear();
  Eigen::Map<const Eigen::VectorXd> x(rec.values.data(), len);
  Eigen::Map<Eigen::VectorXd> y(out.values.data(), len);
  y.noalias() = m * x;
  return out;
}

}  // namespace

QuadratureRecord symmetrize(const QuadratureRecord& rec, const SymplecticRotation& rot) {
  if (rec.detection != Detection::heterodyne) {
    throw DomainError("symmetrize: symplectic rotations act on heterodyne records");
  }
  return apply_matrix(rec, rot.matrix);
}

QuadratureRecord symmetrize(const QuadratureRecord& rec, const OrthogonalRotation& rot) {
  if (rec.detection != Detection::homodyne) {
    throw DomainError("symmetrize: orthogonal rotations of R^m act on homodyne records");
  }
  return apply_matrix(rec, rot.matrix);
}

QuadratureRecord symmetrize_implicit(const QuadratureRecord& rec, mc::Rng& rng) {
  rec.validate();
  QuadratureRecord out = rec;
  out.mode_ids.clear();
  double norm2 = 0.0;
  for (double v : rec.values) norm2 += v * v;
  if (norm2 == 0.0) return out;
  std::normal_distribution<double> normal(0.0, 1.0);
  double g2 = 0.0;
  for (double& v : out.values) {
    v = normal(rng);
    g2 += v * v;
  }
  const double scale = std::sqrt(norm2 / g2);
  for (double& v : out.values) v *= scale;
  return out;
}

std::vector<double> sample_unit_sphere(std::uint64_t d, mc::Rng& rng) {
  if (d == 0) throw DomainError("sample_unit_sphere: d must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(d);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& v : x) {
      v = normal(rng);
      norm2 += v * v;
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : x) v *= inv;
  return x;
}

TestOutcome energy_test(const QuadratureRecord& rec, double y_test) {
  rec.validate();
  const std::uint64_t k = rec.tested_modes;
  const std::uint64_t n = rec.kept_modes();
  double tested = 0.0;
  double kept = 0.0;
  for (std::uint64_t i = 0; i < k; ++i) tested += rec.mode_energy(i);
  for (std::uint64_t i = k; i < k + n; ++i) kept += rec.mode_energy(i);
  TestOutcome t;
  t.y_k = tested / static_cast<double>(k);
  t.z_n = kept / static_cast<double>(n);
  t.threshold = y_test;
  t.passed = t.y_k <= y_test;
  return t;
}

Lemma1Result mc_lemma1(std::uint64_t n, std::uint64_t k, double delta, std::uint64_t trials,
                       tail::SphereVariant variant, std::uint64_t seed, unsigned workers) {
  if (trials == 0) throw DomainError("mc_lemma1: trials must be positive");
  Lemma1Result r;
  r.n = n;
  r.k = k;
  r.delta = delta;
  r.variant = variant;
  r.trials = trials;
  r.g = tail::g_factor({delta, n, k, variant});
  const std::uint64_t per_mode = variant == tail::SphereVariant::real_sphere ? 1 : 2;
  const double g = r.g;
  // The event Z_n >= g Y_k is scale invariant, so unnormalized Gaussian
  // vectors give the same indicator as their projections onto the sphere.
  r.events = mc::count_events(trials, seed, kLemma1Stream, workers,
                              [&](mc::Rng& rng, std::uint64_t) {
                                std::normal_distribution<double> normal(0.0, 1.0);
                                double tested = 0.0;
                                double kept = 0.0;
                                for (std::uint64_t i = 0; i < per_mode * k; ++i) {
                                  const double x = normal(rng);
                                  tested += x * x;
                                }
                                for (std::uint64_t i = 0; i < per_mode * n; ++i) {
                                  const double x = normal(rng);
                                  kept += x * x;
                                }
                                const double y_k = tested / static_cast<double>(k);
                                const double z_n = kept / static_cast<double>(n);
                                return z_n >= g * y_k;
                              });
  r.interval = mc::wilson_interval(r.events, trials);
  r.margin = delta + 3.0 * r.interval.half_width - r.interval.rate;
  r.within_bound = r.margin >= 0.0;
  return r;
}

}  // namespace cvqkd::symmetry
