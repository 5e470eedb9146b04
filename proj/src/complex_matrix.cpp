#include "chainedbell/complex_matrix.hpp"

#include "chainedbell/error.hpp"

#include <string>

namespace chainedbell {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : m_(Eigen::MatrixXcd::Zero(idx(rows), idx(cols))) {
  if (rows == 0 || cols == 0) {
    throw Error(ErrorCode::invalid_argument, "matrix dimensions must be positive");
  }
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols,
                             std::initializer_list<Complex> entries)
    : ComplexMatrix(rows, cols) {
  if (entries.size() != rows * cols) {
    throw Error(ErrorCode::invalid_argument, "entry count does not match rows*cols");
  }
  std::size_t k = 0;
  for (const Complex& v : entries) {
    m_(idx(k / cols), idx(k % cols)) = v;
    ++k;
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  return ComplexMatrix(Eigen::MatrixXcd::Identity(idx(n), idx(n)));
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& rhs) const {
  if (rows() != rhs.rows() || cols() != rhs.cols()) {
    throw Error(ErrorCode::invalid_argument, "shape mismatch in matrix sum");
  }
  return ComplexMatrix(Eigen::MatrixXcd(m_ + rhs.m_));
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& rhs) const {
  if (rows() != rhs.rows() || cols() != rhs.cols()) {
    throw Error(ErrorCode::invalid_argument, "shape mismatch in matrix difference");
  }
  return ComplexMatrix(Eigen::MatrixXcd(m_ - rhs.m_));
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& rhs) const {
  if (cols() != rhs.rows()) {
    throw Error(ErrorCode::invalid_argument, "shape mismatch in matrix product");
  }
  return ComplexMatrix(Eigen::MatrixXcd(m_ * rhs.m_));
}

ComplexMatrix ComplexMatrix::operator*(Complex scalar) const {
  return ComplexMatrix(Eigen::MatrixXcd(m_ * scalar));
}

void ComplexMatrix::require_square(const char* op) const {
  if (!is_square()) {
    throw Error(ErrorCode::precondition, std::string(op) + " requires a square matrix");
  }
}

Complex ComplexMatrix::trace() const {
  require_square("trace");
  return m_.trace();
}

bool ComplexMatrix::is_hermitian(double tol) const {
  require_square("hermiticity check");
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

std::vector<double> ComplexMatrix::hermitian_eigenvalues() const {
  require_square("eigenvalue decomposition");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m_, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double ComplexMatrix::max_abs_diff(const ComplexMatrix& rhs) const {
  if (rows() != rhs.rows() || cols() != rhs.cols()) {
    throw Error(ErrorCode::invalid_argument, "shape mismatch in comparison");
  }
  return (m_ - rhs.m_).cwiseAbs().maxCoeff();
}

ComplexMatrix kron(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  ComplexMatrix out(lhs.rows() * rhs.rows(), lhs.cols() * rhs.cols());
  for (std::size_t i = 0; i < lhs.rows(); ++i) {
    for (std::size_t j = 0; j < lhs.cols(); ++j) {
      for (std::size_t k = 0; k < rhs.rows(); ++k) {
        for (std::size_t l = 0; l < rhs.cols(); ++l) {
          out(i * rhs.rows() + k, j * rhs.cols() + l) = lhs(i, j) * rhs(k, l);
        }
      }
    }
  }
  return out;
}

}  // namespace chainedbell
