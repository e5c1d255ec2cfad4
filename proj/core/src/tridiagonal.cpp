#include "epsrb/error.hpp"
#include "epsrb/linalg.hpp"

#include <cmath>
#include <string>

namespace epsrb {

Tridiagonal::Tridiagonal(Vector diag, Vector off) : diag_(std::move(diag)), off_(std::move(off)) {
  if (diag_.size() < 1) raise(ErrorCode::InvalidArgument, "tridiagonal matrix must be non-empty");
  if (off_.size() != diag_.size() - 1) {
    raise(ErrorCode::DimensionMismatch,
          "off-diagonal length " + std::to_string(off_.size()) + " for size " +
              std::to_string(diag_.size()));
  }
}

Vector Tridiagonal::multiply(const Vector& x) const {
  if (x.size() != size()) raise(ErrorCode::DimensionMismatch, "tridiagonal multiply");
  const Index n = size();
  Vector y = diag_.cwiseProduct(x);
  for (Index i = 0; i + 1 < n; ++i) {
    y(i) += off_(i) * x(i + 1);
    y(i + 1) += off_(i) * x(i);
  }
  return y;
}

Matrix Tridiagonal::multiply(const Matrix& x) const {
  Matrix y(x.rows(), x.cols());
  for (Index j = 0; j < x.cols(); ++j) y.col(j) = multiply(Vector(x.col(j)));
  return y;
}

namespace {

// Forward elimination coefficients for the Thomas algorithm on a symmetric
// tridiagonal matrix; pivots are the diagonal of D in LDL^T.
struct ThomasFactors {
  Vector pivot;
  Vector ratio;
};

ThomasFactors thomas(const Vector& d, const Vector& e) {
  const Index n = d.size();
  ThomasFactors f{Vector(n), Vector(n > 0 ? n - 1 : 0)};
  f.pivot(0) = d(0);
  for (Index i = 1; i < n; ++i) {
    if (!(f.pivot(i - 1) > 0.0)) return f;
    f.ratio(i - 1) = e(i - 1) / f.pivot(i - 1);
    f.pivot(i) = d(i) - f.ratio(i - 1) * e(i - 1);
  }
  return f;
}

}  // namespace

bool Tridiagonal::is_positive_definite() const {
  const ThomasFactors f = thomas(diag_, off_);
  for (Index i = 0; i < size(); ++i) {
    if (!(f.pivot(i) > 0.0)) return false;
  }
  return true;
}

Vector Tridiagonal::solve(const Vector& rhs) const {
  if (rhs.size() != size()) raise(ErrorCode::DimensionMismatch, "tridiagonal solve");
  const Index n = size();
  const ThomasFactors f = thomas(diag_, off_);
  for (Index i = 0; i < n; ++i) {
    if (!(f.pivot(i) > 0.0)) raise(ErrorCode::NotPositiveDefinite, "non-positive Thomas pivot");
  }
  Vector y = rhs;
  for (Index i = 1; i < n; ++i) y(i) -= f.ratio(i - 1) * y(i - 1);
  y(n - 1) /= f.pivot(n - 1);
  for (Index i = n - 2; i >= 0; --i) y(i) = (y(i) - off_(i) * y(i + 1)) / f.pivot(i);
  return y;
}

Matrix Tridiagonal::solve(const Matrix& rhs) const {
  Matrix y(rhs.rows(), rhs.cols());
  for (Index j = 0; j < rhs.cols(); ++j) y.col(j) = solve(Vector(rhs.col(j)));
  return y;
}

Matrix Tridiagonal::to_dense() const {
  const Index n = size();
  Matrix a = Matrix::Zero(n, n);
  a.diagonal() = diag_;
  for (Index i = 0; i + 1 < n; ++i) {
    a(i, i + 1) = off_(i);
    a(i + 1, i) = off_(i);
  }
  return a;
}

bool is_symmetric(const Matrix& a, double rtol) {
  if (a.rows() != a.cols()) return false;
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return true;
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= rtol * scale;
}

bool all_finite(const Matrix& a) { return a.allFinite(); }
bool all_finite(const Vector& v) { return v.allFinite(); }

double relative_frobenius(const Matrix& a, const Matrix& b) {
  const double denom = b.norm();
  const double diff = (a - b).norm();
  return denom > 0.0 ? diff / denom : diff;
}

}  // namespace epsrb
