// Copyright 2026 The povm-shadows Authors
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

#ifndef POVMSHADOW_FIDELITY_H_
#define POVMSHADOW_FIDELITY_H_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "povmshadow/channel.h"
#include "povmshadow/sampler.h"

namespace povmshadow {

inline constexpr std::size_t kMaxHypothesisQubits = 8;

/// sigma = (1/N) sum_j (x)_i M^{-1}(S_{a_i^{(j)}}): Hermitian, unit trace,
/// possibly not positive.
struct HypothesisState {
  std::size_t num_qubits = 0;
  Eigen::MatrixXcd matrix;
};

/// Dense average of the ensemble's classical shadows. Records are grouped by
/// common prefixes so that each distinct prefix contributes one Kronecker
/// product. Rejects n > 8 (use the factor-table estimator for local
/// observables instead), empty ensembles, and channels whose POVM or noise
/// descriptor differs from the ensemble's.
HypothesisState hypothesis_state(const ShadowEnsemble& ensemble, const MeasurementChannel& channel);

/// Euclidean projection onto the probability simplex
/// {x : x_i >= 0, sum_i x_i = 1}.
std::vector<double> simplex_project(std::span<const double> values);

/// Closest density matrix in Frobenius norm: eigenvectors kept, spectrum
/// projected onto the simplex.
Eigen::MatrixXcd project_to_physical(const Eigen::MatrixXcd& sigma);

/// <psi| sigma |psi> (real part).
double fidelity_pure(const Eigen::MatrixXcd& sigma, const Eigen::VectorXcd& target);

/// Raw matrix layout: row-major, each entry as two little-endian float64
/// (real, imaginary), no header; the dimension follows from the byte count.
void write_matrix_binary(const Eigen::MatrixXcd& m, std::ostream& out);
Eigen::MatrixXcd read_matrix_binary(std::istream& in);

}  // namespace povmshadow

#endif  // POVMSHADOW_FIDELITY_H_
