#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace sbmkit {

using cplx = std::complex<double>;

// y = A x for a real (but possibly non-symmetric) operator, applied to
// complex vectors.
struct LinearOperator {
  std::size_t dim = 0;
  std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)> apply;
};

struct KrylovOptions {
  std::size_t nev = 2;
  std::size_t ncv = 0;  // subspace size; 0 picks max(2 nev + 1, 24)
  double tol = 1e-10;   // on |residual| / max(|theta|, tiny)
  std::size_t max_restarts = 2000;
  std::uint64_t seed = 0;
};

struct KrylovResult {
  std::vector<cplx> values;  // descending modulus
  std::vector<Eigen::VectorXcd> vectors;  // unit norm
  std::vector<double> residuals;  // ||A x - theta x|| / ||x||, recomputed explicitly
  bool converged = false;
  std::size_t restarts = 0;
};

// Krylov-Schur restarted Arnoldi targeting the nev eigenvalues of largest
// modulus. Operators with dim <= ncv are solved densely.
KrylovResult krylov_schur(const LinearOperator& op, const KrylovOptions& options);

// Dense eigenvalues sorted by descending modulus (ties by argument, then real part).
std::vector<cplx> sorted_eigenvalues(const Eigen::MatrixXd& a);

void sort_by_modulus(std::vector<cplx>& values);

}  // namespace sbmkit
