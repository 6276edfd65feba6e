#include "swflow/clifford.hpp"

#include <complex>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "swflow/error.hpp"

namespace swflow::clifford {

namespace {

using cd = std::complex<double>;

ComplexMatrix pauli(int which) {
  ComplexMatrix s(2, 2);
  switch (which) {
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, cd(0, -1), cd(0, 1), 0; break;
    default: s << 1, 0, 0, -1; break;
  }
  return s;
}

std::vector<ComplexMatrix> even_generators(int m) {
  std::vector<ComplexMatrix> g{pauli(1), pauli(2)};
  for (int d = 4; d <= m; d += 2) {
    const auto n = g.front().rows();
    std::vector<ComplexMatrix> next;
    next.reserve(static_cast<std::size_t>(d));
    for (const auto& gj : g) next.emplace_back(Eigen::kroneckerProduct(gj, pauli(3)).eval());
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    next.emplace_back(Eigen::kroneckerProduct(id, pauli(1)).eval());
    next.emplace_back(Eigen::kroneckerProduct(id, pauli(2)).eval());
    g = std::move(next);
  }
  return g;
}

ComplexMatrix volume_of(const std::vector<ComplexMatrix>& gammas) {
  const int m = static_cast<int>(gammas.size());
  ComplexMatrix prod = ComplexMatrix::Identity(gammas.front().rows(), gammas.front().cols());
  for (const auto& g : gammas) prod = prod * g;
  // i^{m(m-1)/2}
  const int e = (m * (m - 1) / 2) % 4;
  static const cd phases[4] = {cd(1, 0), cd(0, 1), cd(-1, 0), cd(0, -1)};
  return phases[e] * prod;
}

}  // namespace

CliffordRep gamma_matrices(int m) {
  if (m < 2 || m > 8) {
    throw ConfigError("gamma_matrices: dimension m=" + std::to_string(m) +
                      " outside supported range 2..8");
  }
  CliffordRep rep;
  rep.m = m;
  rep.gammas = even_generators(m - (m % 2));
  if (m % 2 == 1) rep.gammas.push_back(volume_of(rep.gammas));
  rep.N = static_cast<int>(rep.gammas.front().rows());
  return rep;
}

ComplexMatrix volume_element(const CliffordRep& rep) { return volume_of(rep.gammas); }

ComplexMatrix chirality_projector(const CliffordRep& rep) {
  if (rep.m % 2 != 0) {
    throw UnsupportedError("chirality_projector: m=" + std::to_string(rep.m) +
                           " is odd, spinors do not split into half spinors");
  }
  const ComplexMatrix id = ComplexMatrix::Identity(rep.N, rep.N);
  return 0.5 * (id + volume_element(rep));
}

int fiber_dimension(int m, bool half) {
  if (m < 4 || m > 7) {
    throw ConfigError("fiber_dimension: m=" + std::to_string(m) + " outside 4..7");
  }
  if (half && m % 2 != 0) {
    throw UnsupportedError("fiber_dimension: half spinors requested for odd m=" +
                           std::to_string(m));
  }
  return half ? 1 << (m / 2 - 1) : 1 << (m / 2);
}

double anticommutator_defect(const CliffordRep& rep) {
  double worst = 0.0;
  const ComplexMatrix id = ComplexMatrix::Identity(rep.N, rep.N);
  for (int j = 0; j < rep.m; ++j) {
    for (int k = 0; k < rep.m; ++k) {
      const auto& gj = rep.gammas[static_cast<std::size_t>(j)];
      const auto& gk = rep.gammas[static_cast<std::size_t>(k)];
      ComplexMatrix r = gj * gk + gk * gj;
      if (j == k) r -= 2.0 * id;
      worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

}  // namespace swflow::clifford
