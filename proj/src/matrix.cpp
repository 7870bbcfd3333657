#include "lexforge/matrix.hpp"

#include <cmath>
#include <string>

#include "lexforge/common.hpp"

namespace lexforge {

Matrix Matrix::from_rows(const std::vector<std::vector<float>>& rows) {
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols()) throw DataError("from_rows: ragged row lengths");
        for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
    }
    return m;
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0f;
    return m;
}

bool Matrix::all_finite() const {
    for (float v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void require_finite(const Matrix& m, const char* what) {
    if (!m.all_finite()) throw DataError(std::string(what) + ": non-finite values");
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DataError("matmul: inner dimensions differ");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k)
                acc += static_cast<double>(a(i, k)) * static_cast<double>(b(k, j));
            c(i, j) = static_cast<float>(acc);
        }
    }
    return c;
}

Matrix matmul_transposed_b(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw DataError("matmul_transposed_b: inner dimensions differ");
    Matrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j)
            c(i, j) = static_cast<float>(dot(a.row(i), b.row(j)));
    return c;
}

Matrix matmul_transposed_a(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw DataError("matmul_transposed_a: inner dimensions differ");
    Matrix c(a.cols(), b.cols());
    for (std::size_t i = 0; i < a.cols(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.rows(); ++k)
                acc += static_cast<double>(a(k, i)) * static_cast<double>(b(k, j));
            c(i, j) = static_cast<float>(acc);
        }
    }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Matrix add(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw DataError("add: shape mismatch");
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] + b.data()[i];
    return c;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw DataError("subtract: shape mismatch");
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] - b.data()[i];
    return c;
}

double frobenius_norm(const Matrix& a) {
    double acc = 0.0;
    for (float v : a.data()) acc += static_cast<double>(v) * static_cast<double>(v);
    return std::sqrt(acc);
}

double frobenius_distance(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw DataError("frobenius_distance: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = static_cast<double>(a.data()[i]) - static_cast<double>(b.data()[i]);
        acc += d * d;
    }
    return std::sqrt(acc);
}

double dot(std::span<const float> x, std::span<const float> y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        acc += static_cast<double>(x[i]) * static_cast<double>(y[i]);
    return acc;
}

double squared_distance(std::span<const float> x, std::span<const float> y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double d = static_cast<double>(x[i]) - static_cast<double>(y[i]);
        acc += d * d;
    }
    return acc;
}

} // namespace lexforge
