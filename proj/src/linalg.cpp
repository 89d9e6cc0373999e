#include "msd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "msd/errors.hpp"

namespace msd {

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

// Cyclic Jacobi rotations. Robust for the modest dense systems this
// project needs (modularity matrices of infected subnetworks).
SymmetricEigen jacobi_eigen(const std::vector<double>& a_in, int n, int max_sweeps) {
    std::vector<double> a(a_in);
    DenseMatrix v(n, n);
    for (int i = 0; i < n; ++i) v(i, i) = 1.0;

    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };

    double norm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) norm += at(i, j) * at(i, j);
    norm = std::sqrt(norm);
    const double tol = std::max(1e-300, 1e-14 * norm);

    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += 2.0 * at(i, j) * at(i, j);
        if (std::sqrt(off) < tol) break;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (int k = 0; k < n; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (sweep >= max_sweeps)
        throw ConvergenceError("eigen-iteration failed to converge within " +
                               std::to_string(max_sweeps) + " sweeps");

    SymmetricEigen result;
    result.values.resize(n);
    for (int i = 0; i < n; ++i) result.values[i] = at(i, i);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return result.values[i] < result.values[j]; });

    SymmetricEigen sorted;
    sorted.values.resize(n);
    sorted.vectors = DenseMatrix(n, n);
    for (int j = 0; j < n; ++j) {
        sorted.values[j] = result.values[order[j]];
        for (int i = 0; i < n; ++i) sorted.vectors(i, j) = v(i, order[j]);
    }
    return sorted;
}

} // namespace msd
