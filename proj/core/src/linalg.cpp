#include "roa/linalg.hpp"

#include <cmath>

namespace roa {

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::operator*(const Matrix& o) const {
    if (cols_ != o.rows_) throw LinalgError("matrix product dimension mismatch");
    Matrix r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            double v = (*this)(i, k);
            if (v == 0.0) continue;
            for (int j = 0; j < o.cols_; ++j) r(i, j) += v * o(k, j);
        }
    return r;
}

Matrix Matrix::operator+(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw LinalgError("matrix sum dimension mismatch");
    Matrix r = *this;
    for (std::size_t i = 0; i < r.data_.size(); ++i) r.data_[i] += o.data_[i];
    return r;
}

Matrix Matrix::operator-(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw LinalgError("matrix diff dimension mismatch");
    Matrix r = *this;
    for (std::size_t i = 0; i < r.data_.size(); ++i) r.data_[i] -= o.data_[i];
    return r;
}

Matrix Matrix::scaled(double s) const {
    Matrix r = *this;
    for (double& v : r.data_) v *= s;
    return r;
}

std::vector<double> Matrix::apply(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != cols_) throw LinalgError("matrix-vector dimension mismatch");
    std::vector<double> y(rows_, 0.0);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

bool Matrix::is_symmetric(double tol) const {
    if (rows_ != cols_) return false;
    for (int i = 0; i < rows_; ++i)
        for (int j = i + 1; j < cols_; ++j)
            if (std::fabs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    return true;
}

namespace {

// Partially pivoted Gaussian elimination on an n x n system.
std::vector<double> solve_dense(std::vector<std::vector<double>> M, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(M[r][col]) > std::fabs(M[piv][col])) piv = r;
        if (std::fabs(M[piv][col]) < 1e-13)
            throw LinalgError("singular linear system");
        std::swap(M[piv], M[col]);
        std::swap(b[piv], b[col]);
        for (int r = col + 1; r < n; ++r) {
            double f = M[r][col] / M[col][col];
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) M[r][c] -= f * M[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= M[r][c] * x[c];
        x[r] = s / M[r][r];
    }
    return x;
}

}  // namespace

Matrix lyapunov_solve(const Matrix& A, const Matrix& Q) {
    const int n = A.rows();
    if (A.cols() != n || Q.rows() != n || Q.cols() != n)
        throw LinalgError("lyapunov_solve dimension mismatch");
    // (I (x) A^T + A^T (x) I) vec(P) = -vec(Q), vec by rows: index = i*n + j
    const int N = n * n;
    std::vector<std::vector<double>> M(N, std::vector<double>(N, 0.0));
    std::vector<double> b(N, 0.0);
    // P A + A^T P = -Q, entry (i,j):
    // sum_k P(i,k) A(k,j) + sum_k A(k,i) P(k,j) = -Q(i,j)
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            int row = i * n + j;
            for (int k = 0; k < n; ++k) {
                M[row][i * n + k] += A(k, j);
                M[row][k * n + j] += A(k, i);
            }
            b[row] = -Q(i, j);
        }
    std::vector<double> vecp = solve_dense(std::move(M), std::move(b));
    Matrix P(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) P(i, j) = vecp[i * n + j];
    // symmetrize
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.5 * (P(i, j) + P(j, i));
            P(i, j) = s;
            P(j, i) = s;
        }
    // residual check
    Matrix R = P * A + A.transpose() * P + Q;
    if (R.frobenius_norm() > 1e-10 * Q.frobenius_norm())
        throw LinalgError("lyapunov_solve residual too large");
    return P;
}

std::optional<Matrix> cholesky(const Matrix& M) {
    const int n = M.rows();
    if (M.cols() != n) throw LinalgError("cholesky requires a square matrix");
    Matrix L(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = M(i, j);
            for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            if (i == j) {
                if (s <= 0.0) return std::nullopt;
                L(i, i) = std::sqrt(s);
            } else {
                L(i, j) = s / L(j, j);
            }
        }
    }
    return L;
}

bool is_hurwitz(const Matrix& A) {
    if (A.rows() != A.cols()) throw LinalgError("is_hurwitz requires a square matrix");
    try {
        Matrix P = lyapunov_solve(A, Matrix::identity(A.rows()));
        return cholesky(P).has_value();
    } catch (const LinalgError&) {
        return false;
    }
}

Matrix spd_inverse(const Matrix& M) {
    auto L = cholesky(M);
    if (!L) throw LinalgError("spd_inverse: matrix is not positive definite");
    const int n = M.rows();
    Matrix inv(n, n);
    for (int col = 0; col < n; ++col) {
        // forward solve L y = e_col, back solve L^T z = y
        std::vector<double> y(n);
        for (int i = 0; i < n; ++i) {
            double s = (i == col) ? 1.0 : 0.0;
            for (int k = 0; k < i; ++k) s -= (*L)(i, k) * y[k];
            y[i] = s / (*L)(i, i);
        }
        for (int i = n - 1; i >= 0; --i) {
            double s = y[i];
            for (int k = i + 1; k < n; ++k) s -= (*L)(k, i) * inv(k, col);
            inv(i, col) = s / (*L)(i, i);
        }
    }
    return inv;
}

double min_eigenvalue_sym(const Matrix& M) {
    const int n = M.rows();
    double bound = M.frobenius_norm();
    if (bound == 0.0) return 0.0;
    auto pd_shifted = [&](double s) {
        Matrix shifted = M;
        for (int i = 0; i < n; ++i) shifted(i, i) -= s;
        return cholesky(shifted).has_value();
    };
    // invariant: M - lo*I is PD (lambda_min > lo), M - hi*I is not
    double lo = -bound - 1.0, hi = bound + 1.0;
    while (hi - lo > 1e-10) {
        double mid = 0.5 * (lo + hi);
        if (pd_shifted(mid)) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace roa
