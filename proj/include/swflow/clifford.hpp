#pragma once

#include <vector>

#include <Eigen/Dense>

namespace swflow::clifford {

using ComplexMatrix = Eigen::MatrixXcd;

/// Hermitian generators of the complex Clifford algebra of R^m with
/// {g_j, g_k} = 2 delta_jk I, acting on C^N with N = 2^floor(m/2).
struct CliffordRep {
  int m = 0;
  int N = 0;
  std::vector<ComplexMatrix> gammas;
};

/// Tensor-product construction:
///   m = 2:     sigma_1, sigma_2
///   m -> m+2:  g_j (x) sigma_3 for the old generators, I (x) sigma_1, I (x) sigma_2
///   odd m:     generators of m-1 plus their normalized volume element.
/// Valid for 2 <= m <= 8.
CliffordRep gamma_matrices(int m);

/// Normalized volume element i^{m(m-1)/2} g_1 ... g_m. Hermitian, squares to I.
ComplexMatrix volume_element(const CliffordRep& rep);

/// Projector (I + Gamma)/2 onto positive chirality. Throws UnsupportedError
/// for odd m, where no half-spinor splitting exists.
ComplexMatrix chirality_projector(const CliffordRep& rep);

/// Default spinor multiplicity: 2^(m/2 - 1) for half spinors in even m,
/// 2^floor(m/2) otherwise. Valid for 4 <= m <= 7.
int fiber_dimension(int m, bool half);

/// Largest entrywise deviation of {g_j, g_k} from 2 delta_jk I over all pairs.
double anticommutator_defect(const CliffordRep& rep);

}  // namespace swflow::clifford
