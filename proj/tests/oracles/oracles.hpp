#pragma once

// Independent reference implementations used by the tests. Nothing here calls
// into the library's numerical code; inputs are plain Eigen objects.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline long pmod(long i, long L) { return ((i % L) + L) % L; }

/// Triple loop: c(m, n) = sum_l x_l conj(g(l - n a)) exp(-2 pi i m b l / L).
inline CMat naive_dgt(const CVec& x, const CVec& g, long a, long b) {
    const long L = x.size(), N = L / a, M = L / b;
    CMat c = CMat::Zero(M, N);
    for (long n = 0; n < N; ++n)
        for (long m = 0; m < M; ++m) {
            cd acc = 0.0;
            for (long l = 0; l < L; ++l) {
                const long double ang = -2.0L * std::numbers::pi_v<long double> * (long double)(m * b * l) / L;
                acc += x(l) * std::conj(g(pmod(l - n * a, L))) * cd((double)std::cos(ang), (double)std::sin(ang));
            }
            c(m, n) = acc;
        }
    return c;
}

/// Dense analysis matrix; row m + M*n holds conj(g_{n,m}), matching the flat
/// coefficient layout.
inline CMat analysis_matrix(const CVec& g, long a, long b) {
    const long L = g.size(), N = L / a, M = L / b;
    CMat F(M * N, L);
    for (long n = 0; n < N; ++n)
        for (long m = 0; m < M; ++m)
            for (long l = 0; l < L; ++l) {
                const long double ang = 2.0L * std::numbers::pi_v<long double> * (long double)(m * b * l) / L;
                const cd atom = cd((double)std::cos(ang), (double)std::sin(ang)) * g(pmod(l - n * a, L));
                F(m + M * n, l) = std::conj(atom);
            }
    return F;
}

/// Zauner matrix entry straight from the closed form, in long double.
/// E = beta_inv (beta u^2 - 2 u v), beta = L - 1, tau = -exp(i pi / L).
inline cd zauner_entry(long L, double theta, long u, long v) {
    const long beta = L - 1;
    long beta_inv = 1;
    while ((beta * beta_inv) % L != 1 % L)
        ++beta_inv;
    const long E = pmod(beta_inv * (beta * u * u - 2 * u * v), 2 * L);
    // tau^E = exp(i pi E (L + 1) / L)
    const long double ang = std::numbers::pi_v<long double> * (long double)((E * (L + 1)) % (2 * L)) / L + theta;
    return cd((double)std::cos(ang), (double)std::sin(ang)) / std::sqrt((double)L);
}

inline CMat zauner_matrix(long L, double theta) {
    CMat U(L, L);
    for (long u = 0; u < L; ++u)
        for (long v = 0; v < L; ++v)
            U(u, v) = zauner_entry(L, theta, u, v);
    return U;
}

inline CVec soft(const CVec& z, double t) {
    CVec out(z.size());
    for (long i = 0; i < z.size(); ++i) {
        const double r = std::abs(z(i));
        out(i) = r <= t ? cd(0.0) : z(i) * (1.0 - t / r);
    }
    return out;
}

inline CVec ball(const CVec& w, double eta) {
    const double r = w.norm();
    return r <= eta ? w : CVec(w * (eta / r));
}

struct AdmmResult {
    CVec x;
    double objective;
    double residual;
};

/// ADMM for min ||F x||_1 s.t. ||A x - y|| <= eta with splittings z = F x,
/// w = A x - y. Starts from a seeded random point.
inline AdmmResult admm_cs(const CMat& F, const CMat& A, const CVec& y, double eta, bool real_field,
                          std::uint64_t seed, int iters = 20000, double rho = 1.0) {
    const long L = F.cols(), P = F.rows(), K = A.rows();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    auto rnd = [&](long n) {
        CVec v(n);
        for (long i = 0; i < n; ++i)
            v(i) = cd(nd(rng), nd(rng));
        return v;
    };
    CVec z = rnd(P), u = rnd(P) * 0.1, w = rnd(K), v = rnd(K) * 0.1;
    const CMat M = F.adjoint() * F + A.adjoint() * A;
    Eigen::PartialPivLU<CMat> lu_c(M);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_r(M.real());
    CVec x;
    for (int k = 0; k < iters; ++k) {
        const CVec rhs = F.adjoint() * (z - u) + A.adjoint() * (y + w - v);
        if (real_field)
            x = lu_r.solve(Eigen::VectorXd(rhs.real())).cast<cd>();
        else
            x = lu_c.solve(rhs);
        const CVec Fx = F * x;
        const CVec r = A * x - y;
        z = soft(Fx + u, 1.0 / rho);
        w = ball(r + v, eta);
        u += Fx - z;
        v += r - w;
    }
    return {x, (F * x).cwiseAbs().sum(), (A * x - y).norm()};
}

/// Spearman rank correlation (average ranks for ties).
inline double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]])
                ++j;
            for (std::size_t k = i; k <= j; ++k)
                r[idx[k]] = 0.5 * double(i + j) + 1.0;
            i = j + 1;
        }
        return r;
    };
    const auto rx = ranks(xs), ry = ranks(ys);
    const double n = double(xs.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

/// Smallest singular value over every size-k row subset, by brute force.
inline bool every_subset_full_rank(const CMat& rows, long k, double tol) {
    const long P = rows.rows();
    std::vector<long> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        CMat sub(k, rows.cols());
        for (long i = 0; i < k; ++i)
            sub.row(i) = rows.row(idx[i]);
        Eigen::JacobiSVD<CMat> svd(sub);
        const auto s = svd.singularValues();
        if (s(s.size() - 1) <= tol * s(0))
            return false;
        long i = k - 1;
        while (i >= 0 && idx[i] == P - k + i)
            --i;
        if (i < 0)
            return true;
        ++idx[i];
        for (long j = i + 1; j < k; ++j)
            idx[j] = idx[j - 1] + 1;
    }
}

} // namespace oracle
