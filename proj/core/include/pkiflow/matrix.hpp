#ifndef PKIFLOW_MATRIX_HPP
#define PKIFLOW_MATRIX_HPP

#include <cstddef>
#include <vector>

#include "pkiflow/errors.hpp"

namespace pkiflow {

// Dense row-major matrix of doubles. Rows are samples, columns are features.
struct Matrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(size_t r, size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(size_t r, size_t c) { return data[r * cols + c]; }
    double operator()(size_t r, size_t c) const { return data[r * cols + c]; }

    const double* row_ptr(size_t r) const { return data.data() + r * cols; }
    double* row_ptr(size_t r) { return data.data() + r * cols; }

    bool operator==(const Matrix& other) const = default;

    // New matrix keeping only the given columns, in the given order.
    Matrix select_columns(const std::vector<size_t>& indices) const {
        for (size_t j : indices) {
            if (j >= cols) throw DimensionMismatch("column index out of range");
        }
        Matrix out(rows, indices.size());
        for (size_t i = 0; i < rows; ++i) {
            const double* src = row_ptr(i);
            double* dst = out.row_ptr(i);
            for (size_t j = 0; j < indices.size(); ++j) dst[j] = src[indices[j]];
        }
        return out;
    }

    // New matrix keeping only the given rows, in the given order.
    Matrix select_rows(const std::vector<size_t>& indices) const {
        Matrix out(indices.size(), cols);
        for (size_t i = 0; i < indices.size(); ++i) {
            const double* src = row_ptr(indices[i]);
            std::copy(src, src + cols, out.row_ptr(i));
        }
        return out;
    }
};

inline double squared_distance(const double* a, const double* b, size_t d) {
    double s = 0.0;
    for (size_t j = 0; j < d; ++j) {
        double diff = a[j] - b[j];
        s += diff * diff;
    }
    return s;
}

} // namespace pkiflow

#endif
