#pragma once

#include <cstddef>
#include <vector>

namespace msd {

/// Dense row-major matrix of doubles.
struct DenseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
};

/// Max absolute entry difference between two same-shape matrices.
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

/// Jacobi eigenvalue iteration for a symmetric dense matrix (row-major,
/// n x n). Returns eigenvalues ascending with matching eigenvector columns.
/// Throws ConvergenceError if the off-diagonal mass does not vanish within
/// max_sweeps sweeps.
struct SymmetricEigen {
    std::vector<double> values;      // ascending
    DenseMatrix vectors;             // column j pairs with values[j]
};
SymmetricEigen jacobi_eigen(const std::vector<double>& a, int n, int max_sweeps);

} // namespace msd
