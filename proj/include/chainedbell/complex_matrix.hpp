#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace chainedbell {

using Complex = std::complex<double>;

// Dense complex matrix used as the carrier for states, projectors and
// observables. A thin value wrapper over Eigen::MatrixXcd that adds the
// square-only checks the quantum model needs.
class ComplexMatrix {
 public:
  ComplexMatrix(std::size_t rows, std::size_t cols);
  // Row-major entries; entries.size() must equal rows * cols.
  ComplexMatrix(std::size_t rows, std::size_t cols, std::initializer_list<Complex> entries);
  explicit ComplexMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {}

  static ComplexMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(m_.cols()); }
  bool is_square() const noexcept { return m_.rows() == m_.cols(); }

  Complex& operator()(std::size_t r, std::size_t c) { return m_(idx(r), idx(c)); }
  const Complex& operator()(std::size_t r, std::size_t c) const { return m_(idx(r), idx(c)); }

  ComplexMatrix operator+(const ComplexMatrix& rhs) const;
  ComplexMatrix operator-(const ComplexMatrix& rhs) const;
  ComplexMatrix operator*(const ComplexMatrix& rhs) const;
  ComplexMatrix operator*(Complex scalar) const;

  ComplexMatrix adjoint() const { return ComplexMatrix(m_.adjoint()); }

  // trace, is_hermitian and eigenvalues throw Error(precondition) when the
  // matrix is not square.
  Complex trace() const;
  bool is_hermitian(double tol) const;
  // Ascending eigenvalues of a Hermitian matrix.
  std::vector<double> hermitian_eigenvalues() const;

  // Largest entrywise modulus of (*this - rhs); shapes must match.
  double max_abs_diff(const ComplexMatrix& rhs) const;

  const Eigen::MatrixXcd& eigen() const noexcept { return m_; }

 private:
  static Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }
  void require_square(const char* op) const;

  Eigen::MatrixXcd m_;
};

ComplexMatrix kron(const ComplexMatrix& lhs, const ComplexMatrix& rhs);

}  // namespace chainedbell
