#include "platoon/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "platoon/errors.hpp"

namespace platoon {

namespace {

constexpr double kJacobiTolerance = 1e-12;
constexpr int kJacobiMaxSweeps = 100;

void require_square(const Matrix& a, const char* op) {
    if (!a.is_square()) {
        throw DimensionError(fmt::format("{}: expected a square matrix, got {}x{}", op, a.rows(), a.cols()));
    }
}

void require_finite(const Matrix& a, const char* op) {
    if (!a.all_finite()) {
        throw NumericError(fmt::format("{}: matrix has non-finite entries", op));
    }
}

double off_diagonal_mass(const Matrix& a) {
    double sum = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            if (r != c) sum += a(r, c) * a(r, c);
        }
    }
    return std::sqrt(sum);
}

// Cyclic Jacobi on a symmetric matrix, rotating in place until the
// off-diagonal Frobenius mass drops below tolerance relative to ||A||_F.
std::vector<double> jacobi_eigenvalues(Matrix a) {
    const std::size_t n = a.rows();
    const double scale = a.frobenius_norm();
    const double threshold = kJacobiTolerance * (scale > 0.0 ? scale : 1.0);

    int sweep = 0;
    double off = off_diagonal_mass(a);
    while (off > threshold) {
        if (sweep == kJacobiMaxSweeps) {
            throw NumericError(fmt::format(
                "jacobi: no convergence after {} sweeps on {}x{} matrix (off-diagonal mass {:.3e}, threshold {:.3e})",
                kJacobiMaxSweeps, n, n, off, threshold));
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
            }
        }
        ++sweep;
        off = off_diagonal_mass(a);
    }

    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols) : Matrix(rows, cols, std::vector<double>(rows * cols, 0.0)) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (rows_ == 0 || cols_ == 0) {
        throw DimensionError("Matrix: rows and cols must be at least 1");
    }
    if (data_.size() != rows_ * cols_) {
        throw DimensionError(fmt::format("Matrix: {} entries do not fill {}x{}", data_.size(), rows_, cols_));
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) : rows_(rows.size()), cols_(0) {
    if (rows_ == 0) throw DimensionError("Matrix: empty initializer");
    cols_ = rows.begin()->size();
    if (cols_ == 0) throw DimensionError("Matrix: empty row");
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
        if (row.size() != cols_) throw DimensionError("Matrix: ragged initializer");
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::initializer_list<double> diag) {
    Matrix m(diag.size(), diag.size());
    std::size_t i = 0;
    for (double d : diag) {
        m(i, i) = d;
        ++i;
    }
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    }
    return t;
}

bool Matrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

double Matrix::frobenius_norm() const noexcept {
    double sum = 0.0;
    for (double x : data_) sum += x * x;
    return std::sqrt(sum);
}

Matrix Matrix::block(std::size_t row0, std::size_t col0, std::size_t rows, std::size_t cols) const {
    if (row0 + rows > rows_ || col0 + cols > cols_) {
        throw DimensionError("Matrix::block: block exceeds matrix bounds");
    }
    Matrix b(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) b(r, c) = (*this)(row0 + r, col0 + c);
    }
    return b;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw DimensionError("Matrix: sum of mismatched shapes");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw DimensionError("Matrix: difference of mismatched shapes");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& x : data_) x *= s;
    return *this;
}

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
    if (lhs.cols_ != rhs.rows_) {
        throw DimensionError(
            fmt::format("Matrix: cannot multiply {}x{} by {}x{}", lhs.rows_, lhs.cols_, rhs.rows_, rhs.cols_));
    }
    Matrix out(lhs.rows_, rhs.cols_);
    for (std::size_t r = 0; r < lhs.rows_; ++r) {
        for (std::size_t k = 0; k < lhs.cols_; ++k) {
            const double a = lhs(r, k);
            if (a == 0.0) continue;
            for (std::size_t c = 0; c < rhs.cols_; ++c) out(r, c) += a * rhs(k, c);
        }
    }
    return out;
}

Matrix symmetric_part(const Matrix& a) {
    require_square(a, "symmetric_part");
    const std::size_t n = a.rows();
    Matrix s(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = r; c < n; ++c) {
            const double v = 0.5 * (a(r, c) + a(c, r));
            s(r, c) = v;
            s(c, r) = v;
        }
    }
    return s;
}

std::vector<double> symmetric_eigenvalues(const Matrix& a) {
    require_square(a, "symmetric_eigenvalues");
    require_finite(a, "symmetric_eigenvalues");
    return jacobi_eigenvalues(symmetric_part(a));
}

double matrix_measure_2(const Matrix& a) {
    require_square(a, "matrix_measure_2");
    require_finite(a, "matrix_measure_2");
    return jacobi_eigenvalues(symmetric_part(a)).back();
}

std::vector<double> singular_values(const Matrix& a) {
    require_finite(a, "singular_values");
    // Gram matrix of the smaller side keeps this square for rectangular input.
    const Matrix gram = a.rows() >= a.cols() ? a.transpose() * a : a * a.transpose();
    std::vector<double> eig = jacobi_eigenvalues(symmetric_part(gram));
    for (double& e : eig) e = std::sqrt(std::max(e, 0.0));
    return eig;
}

double spectral_norm_2(const Matrix& a) { return singular_values(a).back(); }

SingularValueExtremes singular_value_extremes(const Matrix& a) {
    require_square(a, "singular_value_extremes");
    const std::vector<double> sv = singular_values(a);
    return {sv.front(), sv.back()};
}

}  // namespace platoon
