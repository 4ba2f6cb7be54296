#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

namespace roa {

struct LinalgError : std::runtime_error {
    explicit LinalgError(const std::string& msg) : std::runtime_error(msg) {}
};

// Small dense real matrix, row-major. The tool targets n <= 64 states.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

    Matrix transpose() const;
    Matrix operator*(const Matrix& o) const;
    Matrix operator+(const Matrix& o) const;
    Matrix operator-(const Matrix& o) const;
    Matrix scaled(double s) const;
    std::vector<double> apply(const std::vector<double>& x) const;

    double frobenius_norm() const;
    bool is_symmetric(double tol = 1e-12) const;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

// Solves PA + A^T P = -Q by the Kronecker vectorization
// (I (x) A^T + A^T (x) I) vec(P) = -vec(Q) with partially pivoted
// elimination, then symmetrizes. Throws LinalgError when the system is
// singular (A has eigenvalues summing to zero in pairs, e.g. not Hurwitz).
Matrix lyapunov_solve(const Matrix& A, const Matrix& Q);

// Lower-triangular L with L L^T = M, or nullopt when M is not positive
// definite.
std::optional<Matrix> cholesky(const Matrix& M);

// Lyapunov criterion: solve with Q = I and Cholesky-check the result.
bool is_hurwitz(const Matrix& A);

// Inverse of a symmetric positive definite matrix via Cholesky solves.
// Throws LinalgError when M is not positive definite.
Matrix spd_inverse(const Matrix& M);

// Smallest eigenvalue of a symmetric matrix by bisection on the shift s:
// M - sI is positive definite iff Cholesky succeeds. Absolute tol 1e-10.
double min_eigenvalue_sym(const Matrix& M);

}  // namespace roa
