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

// Haar sampling on U(m) and O(d), the unitary-to-symplectic embedding acting
// on interleaved (q, p) data, classical symmetrization of quadrature records,
// the energy test and the sphere-concentration Monte Carlo.

#ifndef CVQKD_SYMMETRY_HPP_
#define CVQKD_SYMMETRY_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cvqkd/montecarlo.hpp"
#include "cvqkd/record.hpp"
#include "cvqkd/tailbounds.hpp"

namespace cvqkd::symmetry {

using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

// 2m x 2m orthogonal matrix induced by a unitary U on m modes, laid out for
// interleaved coordinates: the 2x2 block (i, j) is [[Re U_ij, -Im U_ij],
// [Im U_ij, Re U_ij]], so that q' + i p' = U (q + i p).
struct SymplecticRotation {
  RealMatrix matrix;
};

// Haar-random orthogonal transformation of the homodyne outcome vector.
struct OrthogonalRotation {
  RealMatrix matrix;
};

// Haar unitary via QR of a complex Ginibre matrix with R's diagonal made real
// positive.
ComplexMatrix sample_haar_unitary(std::uint64_t m, mc::Rng& rng);
// Haar orthogonal via QR of a real Gaussian matrix with sign correction.
RealMatrix sample_haar_orthogonal(std::uint64_t d, mc::Rng& rng);

// Throws DomainError when max |U^dag U - I| exceeds 1e-8.
SymplecticRotation to_symplectic(const ComplexMatrix& u);

double max_abs_deviation_from_identity(const RealMatrix& gram);
double unitarity_residual(const ComplexMatrix& u);
double orthogonality_residual(const RealMatrix& r);
// Largest entry-wise violation of the [[V, -W], [W, V]] block pattern.
double symplectic_block_residual(const RealMatrix& s);

QuadratureRecord symmetrize(const QuadratureRecord& rec, const SymplecticRotation& rot);
QuadratureRecord symmetrize(const QuadratureRecord& rec, const OrthogonalRotation& rot);

// Applies a Haar rotation without materializing it. For a fixed vector x and
// Haar U, U x is uniform on the sphere of radius |x| (complex for heterodyne,
// real for homodyne), so the output law equals that of the explicit route.
QuadratureRecord symmetrize_implicit(const QuadratureRecord& rec, mc::Rng& rng);

// Uniform point on the unit sphere of R^d.
std::vector<double> sample_unit_sphere(std::uint64_t d, mc::Rng& rng);

// Per-mode normalization used for both statistics.
inline constexpr const char* kEnergyNormalization =
    "Y_k = (1/k) sum_{i<=k} e_i, Z_n = (1/n) sum_{i>k} e_i, e_i = q_i^2 + p_i^2 "
    "(heterodyne) or x_i^2 (homodyne)";

struct TestOutcome {
  bool passed = false;
  double y_k = 0.0;
  double z_n = 0.0;
  double threshold = 0.0;
};

// Passes iff Y_k <= Y_test (boundary inclusive).
TestOutcome energy_test(const QuadratureRecord& rec, double y_test);

struct Lemma1Result {
  std::uint64_t n = 0;
  std::uint64_t k = 0;
  double delta = 0.0;
  tail::SphereVariant variant = tail::SphereVariant::real_sphere;
  double g = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t events = 0;
  mc::WilsonInterval interval;
  // events / trials <= delta + 3 Wilson half-widths
  bool within_bound = false;
  double margin = 0.0;  // delta + 3 half-widths - rate
};

// Counts Z_n >= g(delta) Y_k over uniform sphere vectors in dimension n + k
// (real) or C^{n+k} seen as R^{2(n+k)} (complex). Throws DomainError for
// trials == 0 and InfeasibleError when g is undefined.
Lemma1Result mc_lemma1(std::uint64_t n, std::uint64_t k, double delta, std::uint64_t trials,
                       tail::SphereVariant variant, std::uint64_t seed,
                       unsigned workers = mc::default_workers());

}  // namespace cvqkd::symmetry

#endif  // CVQKD_SYMMETRY_HPP_
