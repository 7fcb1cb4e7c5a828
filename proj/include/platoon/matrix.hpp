#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace platoon {

/**
 * Small dense row-major matrix of doubles.
 *
 * Only what the stability conditions need: products, sums, transpose and the
 * symmetric eigen/singular value routines below. Sizes here are 2x2 or 3x3,
 * so everything is value-semantic and heap-backed without further tuning.
 */
class Matrix {
public:
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::initializer_list<double> diag);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }
    [[nodiscard]] std::span<const double> entries() const noexcept { return data_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    [[nodiscard]] Matrix transpose() const;
    [[nodiscard]] bool all_finite() const noexcept;
    [[nodiscard]] double frobenius_norm() const noexcept;
    [[nodiscard]] Matrix block(std::size_t row0, std::size_t col0, std::size_t rows, std::size_t cols) const;

    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator-=(const Matrix& rhs);
    Matrix& operator*=(double s);

    friend Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
    friend Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
    friend Matrix operator*(Matrix lhs, double s) { return lhs *= s; }
    friend Matrix operator*(double s, Matrix rhs) { return rhs *= s; }
    friend Matrix operator*(const Matrix& lhs, const Matrix& rhs);

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

// (A + A^T) / 2. Exactly symmetric.
Matrix symmetric_part(const Matrix& a);

// Eigenvalues of a symmetric matrix in ascending order (cyclic Jacobi).
std::vector<double> symmetric_eigenvalues(const Matrix& a);

// mu_2(A): largest eigenvalue of the symmetric part.
double matrix_measure_2(const Matrix& a);

// Induced 2-norm, i.e. the largest singular value.
double spectral_norm_2(const Matrix& a);

struct SingularValueExtremes {
    double sigma_min;
    double sigma_max;
};

// Square matrices only.
SingularValueExtremes singular_value_extremes(const Matrix& a);

// All singular values in ascending order.
std::vector<double> singular_values(const Matrix& a);

}  // namespace platoon
