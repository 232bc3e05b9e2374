#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>

namespace sdgf {

using complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Scalar field of the signal space: real signals are kept real by the
/// solvers, complex signals are unconstrained.
enum class Field { Real, Complex };

/// Linear map C^cols -> C^rows together with its adjoint.
struct LinearOperator {
    Index rows = 0;
    Index cols = 0;
    std::function<CVector(const CVector&)> apply;
    std::function<CVector(const CVector&)> adjoint;
};

inline LinearOperator dense_operator(CMatrix m) {
    auto shared = std::make_shared<const CMatrix>(std::move(m));
    return LinearOperator{
        shared->rows(), shared->cols(),
        [shared](const CVector& x) -> CVector { return (*shared) * x; },
        [shared](const CVector& y) -> CVector { return shared->adjoint() * y; },
    };
}

/// Scales both directions of a map by c.
inline LinearOperator scaled(const LinearOperator& op, double c) {
    return LinearOperator{
        op.rows, op.cols,
        [f = op.apply, c](const CVector& x) -> CVector { return c * f(x); },
        [f = op.adjoint, c](const CVector& y) -> CVector { return c * f(y); },
    };
}

inline CVector random_complex_vector(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    CVector v(n);
    for (Index i = 0; i < n; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        v(i) = complex(re, im);
    }
    return v;
}

inline CVector random_real_vector(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    CVector v(n);
    for (Index i = 0; i < n; ++i)
        v(i) = complex(normal(rng), 0.0);
    return v;
}

} // namespace sdgf
