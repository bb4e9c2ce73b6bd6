#include "sbmkit/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "sbmkit/rng.hpp"

namespace sbmkit {

namespace {

bool modulus_before(const cplx& a, const cplx& b) {
  const double ma = std::abs(a);
  const double mb = std::abs(b);
  if (ma != mb) return ma > mb;
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

// Swap diagonal entries j and j+1 of the upper-triangular t with a Givens
// rotation, accumulating it into u.
void swap_schur(Eigen::MatrixXcd& t, Eigen::MatrixXcd& u, Eigen::Index j) {
  const cplx t11 = t(j, j);
  const cplx t12 = t(j, j + 1);
  const cplx t22 = t(j + 1, j + 1);
  cplx x1 = t12;
  cplx x2 = t22 - t11;
  const double nrm = std::hypot(std::abs(x1), std::abs(x2));
  if (nrm == 0.0) return;
  x1 /= nrm;
  x2 /= nrm;
  Eigen::Matrix2cd g;
  g << x1, -std::conj(x2), x2, std::conj(x1);
  t.middleCols(j, 2) = t.middleCols(j, 2) * g;
  t.middleRows(j, 2) = g.adjoint() * t.middleRows(j, 2);
  u.middleCols(j, 2) = u.middleCols(j, 2) * g;
  t(j + 1, j) = 0.0;
}

void sort_schur(Eigen::MatrixXcd& t, Eigen::MatrixXcd& u) {
  const Eigen::Index n = t.rows();
  for (Eigen::Index pass = 0; pass < n; ++pass) {
    bool swapped = false;
    for (Eigen::Index j = 0; j + 1 < n - pass; ++j) {
      if (modulus_before(t(j + 1, j + 1), t(j, j))) {
        swap_schur(t, u, j);
        swapped = true;
      }
    }
    if (!swapped) break;
  }
}

// Eigenvector of upper-triangular t for its i-th diagonal entry.
Eigen::VectorXcd triangular_eigvec(const Eigen::MatrixXcd& t, Eigen::Index i) {
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(t.rows());
  y(i) = 1.0;
  const cplx theta = t(i, i);
  const double floor = 1e-14 * std::max(1.0, std::abs(theta));
  for (Eigen::Index l = i - 1; l >= 0; --l) {
    cplx acc = 0.0;
    for (Eigen::Index k = l + 1; k <= i; ++k) acc += t(l, k) * y(k);
    cplx den = t(l, l) - theta;
    if (std::abs(den) < floor) den = floor;
    y(l) = -acc / den;
  }
  return y;
}

double explicit_residual(const LinearOperator& op, const Eigen::VectorXcd& x, cplx theta) {
  Eigen::VectorXcd y(x.size());
  op.apply(x, y);
  return (y - theta * x).norm() / x.norm();
}

KrylovResult dense_solve(const LinearOperator& op, std::size_t nev) {
  const auto n = static_cast<Eigen::Index>(op.dim);
  Eigen::MatrixXcd a(n, n);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
  Eigen::VectorXcd col(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e.setZero();
    e(j) = 1.0;
    op.apply(e, col);
    a.col(j) = col;
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return modulus_before(es.eigenvalues()(x), es.eigenvalues()(y));
  });
  KrylovResult out;
  const std::size_t k = std::min<std::size_t>(nev, static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < k; ++i) {
    const cplx theta = es.eigenvalues()(order[i]);
    Eigen::VectorXcd v = es.eigenvectors().col(order[i]);
    v.normalize();
    out.residuals.push_back(explicit_residual(op, v, theta));
    out.values.push_back(theta);
    out.vectors.push_back(std::move(v));
  }
  out.converged = true;
  return out;
}

}  // namespace

void sort_by_modulus(std::vector<cplx>& values) {
  std::stable_sort(values.begin(), values.end(), modulus_before);
}

std::vector<cplx> sorted_eigenvalues(const Eigen::MatrixXd& a) {
  std::vector<cplx> out;
  if (a.rows() == 0) return out;
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  out.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  sort_by_modulus(out);
  return out;
}

KrylovResult krylov_schur(const LinearOperator& op, const KrylovOptions& options) {
  const std::size_t dim = op.dim;
  const std::size_t nev = std::min(options.nev, dim);
  std::size_t ncv = options.ncv != 0 ? options.ncv : std::max<std::size_t>(2 * nev + 1, 24);
  if (dim == 0 || nev == 0) return {};
  if (dim <= ncv + 1) return dense_solve(op, nev);
  ncv = std::max(ncv, nev + 2);

  const auto n = static_cast<Eigen::Index>(dim);
  const auto m = static_cast<Eigen::Index>(ncv);
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(n, m + 1);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m + 1, m);
  Rng rng(derive_seed(options.seed, 0x6b7279ULL));

  auto random_unit = [&](Eigen::Index cols_used) {
    Eigen::VectorXcd w(n);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = rng.uniform() - 0.5;
    for (int pass = 0; pass < 2 && cols_used > 0; ++pass) {
      w -= v.leftCols(cols_used) * (v.leftCols(cols_used).adjoint() * w);
    }
    return Eigen::VectorXcd(w / w.norm());
  };

  v.col(0) = random_unit(0);
  Eigen::Index k = 0;
  Eigen::MatrixXcd t;
  Eigen::MatrixXcd u;
  Eigen::RowVectorXcd b;
  Eigen::VectorXcd w(n);
  KrylovResult out;

  for (std::size_t restart = 0;; ++restart) {
    for (Eigen::Index j = k; j < m; ++j) {
      op.apply(v.col(j), w);
      const double wnorm = w.norm();
      // Classical Gram-Schmidt with one reorthogonalization pass.
      Eigen::VectorXcd coef = v.leftCols(j + 1).adjoint() * w;
      w -= v.leftCols(j + 1) * coef;
      Eigen::VectorXcd coef2 = v.leftCols(j + 1).adjoint() * w;
      w -= v.leftCols(j + 1) * coef2;
      coef += coef2;
      h.col(j).head(j + 1) = coef;
      const double beta = w.norm();
      if (beta <= 1e-12 * std::max(wnorm, 1e-300)) {
        h(j + 1, j) = 0.0;
        v.col(j + 1) = random_unit(j + 1);
      } else {
        h(j + 1, j) = beta;
        v.col(j + 1) = w / beta;
      }
    }

    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(h.topRows(m));
    t = schur.matrixT();
    u = schur.matrixU();
    sort_schur(t, u);
    b = h.row(m) * u;

    bool all_converged = true;
    const double scale = std::max(t.diagonal().cwiseAbs().maxCoeff(), 1e-300);
    for (std::size_t i = 0; i < nev; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const Eigen::VectorXcd y = triangular_eigvec(t, ii);
      const double res = std::abs((b * y)(0)) / y.norm();
      if (res > options.tol * std::max(std::abs(t(ii, ii)), 1e-8 * scale)) {
        all_converged = false;
        break;
      }
    }
    out.restarts = restart;
    if (all_converged || restart >= options.max_restarts) {
      out.converged = all_converged;
      break;
    }

    const Eigen::Index p = static_cast<Eigen::Index>(nev) + (m - static_cast<Eigen::Index>(nev)) / 2;
    Eigen::MatrixXcd kept = v.leftCols(m) * u.leftCols(p);
    v.leftCols(p) = kept;
    v.col(p) = v.col(m);
    h.setZero();
    h.topLeftCorner(p, p) = t.topLeftCorner(p, p);
    h.row(p).head(p) = b.head(p);
    k = p;
  }

  for (std::size_t i = 0; i < nev; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    Eigen::VectorXcd x = v.leftCols(m) * (u * triangular_eigvec(t, ii));
    x.normalize();
    out.values.push_back(t(ii, ii));
    out.residuals.push_back(explicit_residual(op, x, t(ii, ii)));
    out.vectors.push_back(std::move(x));
  }
  return out;
}

}  // namespace sbmkit
