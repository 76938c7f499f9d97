#include "flad/objective.hpp"

#include <algorithm>
#include <cmath>

namespace flad {

namespace {

void require_compatible(const Dataset& data, const CoefMatrix& B) {
  if (!B.compatible_with(data)) {
    throw DimensionMismatch("coefficient matrix is " + std::to_string(B.B.rows()) +
                            "x" + std::to_string(B.B.cols()) + ", dataset needs " +
                            std::to_string(data.p() + 1) + "x" +
                            std::to_string(data.q()));
  }
}

Vector residual_norms(const Matrix& R) {
  return R.rowwise().norm();
}

}  // namespace

Vector spatial_sign(const Vector& v) {
  const double norm = v.norm();
  if (norm == 0.0) {
    return Vector::Zero(v.size());
  }
  return v / norm;
}

Matrix spatial_sign_rows(const Matrix& M) {
  Matrix U(M.rows(), M.cols());
  for (Index i = 0; i < M.rows(); ++i) {
    const double norm = M.row(i).norm();
    if (norm == 0.0) {
      U.row(i).setZero();
    } else {
      U.row(i) = M.row(i) / norm;
    }
  }
  return U;
}

double kink_threshold(const Matrix& residuals) {
  Vector norms = residual_norms(residuals);
  std::vector<double> v(norms.data(), norms.data() + norms.size());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  return 1e-10 * (1.0 + v[mid]);
}

double lad_objective(const Dataset& data, const CoefMatrix& B) {
  require_compatible(data, B);
  return (data.Y() - data.X() * B.B).rowwise().norm().sum();
}

Matrix lad_gradient(const Dataset& data, const CoefMatrix& B, KinkReport* report) {
  require_compatible(data, B);
  const Matrix R = data.Y() - data.X() * B.B;
  const double eps = kink_threshold(R);
  Matrix U(R.rows(), R.cols());
  for (Index i = 0; i < R.rows(); ++i) {
    const double norm = R.row(i).norm();
    if (norm < eps) {
      U.row(i).setZero();
      if (report != nullptr) {
        report->rows.push_back(i);
      }
    } else {
      U.row(i) = R.row(i) / norm;
    }
  }
  return -data.X().transpose() * U;
}

Matrix lad_hessian(const Dataset& data, const CoefMatrix& B, KinkReport* report) {
  require_compatible(data, B);
  const Matrix R = data.Y() - data.X() * B.B;
  const double eps = kink_threshold(R);
  const Index q = data.q();
  const Index cols = data.X().cols();
  const Index dim = cols * q;
  Matrix H = Matrix::Zero(dim, dim);
  Matrix proj(q, q);
  for (Index i = 0; i < R.rows(); ++i) {
    const double norm = R.row(i).norm();
    if (norm < eps) {
      if (report != nullptr) {
        report->rows.push_back(i);
      }
      continue;
    }
    const Vector u = R.row(i).transpose() / norm;
    proj.noalias() = (Matrix::Identity(q, q) - u * u.transpose()) / norm;
    const auto x = data.X().row(i);
    for (Index j = 0; j < cols; ++j) {
      for (Index m = 0; m <= j; ++m) {
        H.block(j * q, m * q, q, q).noalias() += (x(j) * x(m)) * proj;
      }
    }
  }
  // fill the upper triangle from the computed lower one
  for (Index j = 0; j < cols; ++j) {
    for (Index m = j + 1; m < cols; ++m) {
      H.block(j * q, m * q, q, q) = H.block(m * q, j * q, q, q).transpose();
    }
  }
  return H;
}

double group_penalty(const CoefMatrix& B, const std::vector<int>& gamma) {
  if (static_cast<Index>(gamma.size()) != B.p()) {
    throw DimensionMismatch("gamma must have length p");
  }
  double total = 0.0;
  for (Index j = 1; j <= B.p(); ++j) {
    if (gamma[static_cast<std::size_t>(j - 1)] != 0) {
      total += B.B.row(j).norm();
    }
  }
  return total;
}

double fusion_penalty(const CoefMatrix& B, const std::vector<int>& delta) {
  const Index p = B.p();
  if (p < 2) {
    return 0.0;
  }
  if (static_cast<Index>(delta.size()) != p - 1) {
    throw DimensionMismatch("delta must have length p-1");
  }
  double total = 0.0;
  for (Index k = 1; k <= p - 1; ++k) {
    if (delta[static_cast<std::size_t>(k - 1)] != 0) {
      total += (B.B.row(k + 1) - B.B.row(k)).norm();
    }
  }
  return total;
}

double fused_ladlasso_objective(const Dataset& data, const CoefMatrix& B,
                                const PenaltySpec& pen) {
  return lad_objective(data, B) / static_cast<double>(data.n()) +
         pen.lambda1 * group_penalty(B, pen.gamma) +
         pen.lambda2 * fusion_penalty(B, pen.delta);
}

double fused_lasso_objective_sq(const Dataset& data, const CoefMatrix& B,
                                const PenaltySpec& pen) {
  require_compatible(data, B);
  const double f = (data.Y() - data.X() * B.B).squaredNorm();
  return f / static_cast<double>(data.n()) +
         pen.lambda1 * group_penalty(B, pen.gamma) +
         pen.lambda2 * fusion_penalty(B, pen.delta);
}

Matrix fused_lasso_gradient_sq(const Dataset& data, const CoefMatrix& B,
                               const PenaltySpec& pen, KinkReport* report) {
  require_compatible(data, B);
  const Index p = data.p();
  if (static_cast<Index>(pen.gamma.size()) != p ||
      (p >= 2 && static_cast<Index>(pen.delta.size()) != p - 1)) {
    throw DimensionMismatch("penalty spec does not match dataset dimensions");
  }
  const double n = static_cast<double>(data.n());
  Matrix grad =
      -(2.0 / n) * (data.X().transpose() * data.Y() -
                    data.X().transpose() * data.X() * B.B);

  // group term: diag(gamma) U(B), intercept row unpenalized
  for (Index j = 1; j <= p; ++j) {
    if (pen.gamma[static_cast<std::size_t>(j - 1)] == 0) {
      continue;
    }
    const double norm = B.B.row(j).norm();
    if (norm == 0.0) {
      if (report != nullptr) {
        report->rows.push_back(j);
      }
      continue;
    }
    grad.row(j) += pen.lambda1 * B.B.row(j) / norm;
  }

  // fusion term: A U(W B) with the extended p x (p+1) difference matrix;
  // diag(0, delta) inside A makes the intercept-difference row inert
  if (p >= 2) {
    const Matrix Wext = ext_difference_matrix(p);
    const Matrix diffs = Wext * B.B;  // row j = beta_{j+1} - beta_j
    Matrix U = Matrix::Zero(p, B.q());
    for (Index j = 1; j < p; ++j) {  // row 0 carries delta_0 = 0
      const double norm = diffs.row(j).norm();
      if (norm == 0.0) {
        if (pen.delta[static_cast<std::size_t>(j - 1)] != 0 && report != nullptr) {
          report->rows.push_back(p + j);
        }
        continue;
      }
      U.row(j) = diffs.row(j) / norm;
    }
    Matrix D = Matrix::Zero(p, p);
    for (Index j = 1; j < p; ++j) {
      D(j, j) = static_cast<double>(pen.delta[static_cast<std::size_t>(j - 1)]);
    }
    Matrix A = Matrix::Zero(p + 1, p);
    A.bottomRows(p) += D;
    A.topRows(p) -= D;
    grad += pen.lambda2 * A * U;
  }
  return grad;
}

FusedStructure FusedStructure::build(Index p, const PenaltySpec& pen) {
  if (static_cast<Index>(pen.gamma.size()) != p) {
    throw DimensionMismatch("gamma must have length p");
  }
  FusedStructure fs;
  fs.W = Matrix::Zero(std::max<Index>(p - 1, 0), p + 1);
  for (Index k = 0; k + 1 < p; ++k) {
    fs.W(k, k + 1) = -1.0;
    fs.W(k, k + 2) = 1.0;
  }

  fs.A1 = Matrix::Zero(pen.d1(), p + 1);
  Index r = 0;
  for (Index j = 1; j <= p; ++j) {
    if (pen.gamma[static_cast<std::size_t>(j - 1)] != 0) {
      fs.A1(r++, j) = 1.0;
    }
  }

  fs.A2 = Matrix::Zero(pen.d2(), std::max<Index>(p - 1, 0));
  r = 0;
  for (Index k = 1; k <= p - 1; ++k) {
    if (pen.delta[static_cast<std::size_t>(k - 1)] != 0) {
      fs.A2(r++, k - 1) = 1.0;
    }
  }

  fs.D = Matrix::Zero(p, p);
  for (Index j = 1; j < p; ++j) {
    fs.D(j, j) = static_cast<double>(pen.delta[static_cast<std::size_t>(j - 1)]);
  }
  fs.A = Matrix::Zero(p + 1, p);
  fs.A.bottomRows(p) += fs.D;
  fs.A.topRows(p) -= fs.D;
  return fs;
}

Matrix ext_difference_matrix(Index p) {
  Matrix W = Matrix::Zero(p, p + 1);
  for (Index j = 0; j < p; ++j) {
    W(j, j) = -1.0;
    W(j, j + 1) = 1.0;
  }
  return W;
}

}  // namespace flad
