#pragma once

// Primal-dual solvers for analysis-l1 problems
//   CS:        min ||Phi x||_1  s.t. ||A x - y||_2 <= eta
//   denoising: min ||Phi x||_1  s.t. ||x - y||_2   <= eta
// over real or complex signals.

#include "sdgf/error.hpp"
#include "sdgf/gabor.hpp"
#include "sdgf/types.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace sdgf::solvers {

inline constexpr std::string_view kModule = "solvers";

struct SolverConfig {
    int max_iters = 5000;
    double rel_tol = 1e-6;
    /// Primal/dual step balance s: tau = s / ||K||, sigma = 1 / (s ||K||).
    double step_ratio = 0.01;
    /// Nonzero seeds add a small seeded perturbation to the initial iterate.
    std::uint64_t seed = 0;
    double over_relaxation = 1.0;
    int norm_iters = 100;
    int checkpoint_every = 100;
};

struct SolveResult {
    CVector x_hat;
    double objective = 0.0;
    /// ||A x_hat - y|| (or ||x_hat - y||); compare against eta.
    double constraint_slack = 0.0;
    int iterations = 0;
    bool converged = false;
    /// Best feasible objective seen at each checkpoint.
    std::vector<double> objective_trace;
};

/// Entrywise complex soft threshold z * max(1 - t/|z|, 0).
inline CVector prox_l1_complex(const CVector& z, double t) {
    if (!(t > 0.0))
        throw Error(ErrorCode::InvalidArgument, kModule, "threshold must be positive");
    CVector p(z.size());
    for (Index i = 0; i < z.size(); ++i) {
        const double mag = std::abs(z(i));
        p(i) = mag > t ? z(i) * (1.0 - t / mag) : complex(0.0, 0.0);
    }
    return p;
}

/// Entrywise projection onto {|z_i| <= radius}; the dual prox of radius*||.||_1.
inline CVector clip_modulus(const CVector& z, double radius) {
    CVector p = z;
    for (Index i = 0; i < p.size(); ++i) {
        const double mag = std::abs(p(i));
        if (mag > radius)
            p(i) *= radius / mag;
    }
    return p;
}

inline CVector project_l2_ball(const CVector& v, const CVector& center, double radius) {
    if (v.size() != center.size())
        throw Error(ErrorCode::DimensionMismatch, kModule, "vector and center differ in length");
    const CVector d = v - center;
    const double n = d.norm();
    if (n <= radius)
        return v;
    if (radius <= 0.0)
        return center;
    return center + (radius / n) * d;
}

inline void enforce_field(CVector& x, Field field) {
    if (field == Field::Real)
        x = x.real().cast<complex>();
}

inline double l1_norm(const CVector& z) { return z.cwiseAbs().sum(); }

/// Euclidean projection onto {z : ||A z - y|| <= eta} through a thin SVD of A.
class ConstraintProjector {
public:
    ConstraintProjector(const CMatrix& A, const CVector& y, double eta) : A_(A), y_(y), eta_(eta) {
        Eigen::BDCSVD<CMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const RVector& s = svd.singularValues();
        const double smax = s.size() > 0 ? s(0) : 0.0;
        Index r = 0;
        while (r < s.size() && s(r) > 1e-12 * smax)
            ++r;
        s_ = s.head(r);
        U_ = svd.matrixU().leftCols(r);
        V_ = svd.matrixV().leftCols(r);
        c_ = U_.adjoint() * y_;
        r_perp_ = (y_ - U_ * c_).norm();
        smax_ = smax;
    }

    double spectral_norm() const { return smax_; }
    /// Distance from y to range(A): the smallest attainable residual.
    double min_residual() const { return r_perp_; }

    CVector project(const CVector& x) const {
        if ((A_ * x - y_).norm() <= eta_)
            return x;
        const CVector xh = V_.adjoint() * x;
        const CVector d = s_.cast<complex>().asDiagonal() * xh - c_;
        auto residual = [&](double mu) {
            double acc = r_perp_ * r_perp_;
            for (Index i = 0; i < d.size(); ++i) {
                const double w = 1.0 + mu * s_(i) * s_(i);
                acc += std::norm(d(i)) / (w * w);
            }
            return std::sqrt(acc);
        };
        CVector zh(xh.size());
        if (eta_ <= r_perp_ || residual(1e300) >= eta_) {
            // Limit mu -> infinity: least-squares fit of the range component.
            for (Index i = 0; i < xh.size(); ++i)
                zh(i) = c_(i) / s_(i);
        } else {
            double lo = -40.0, hi = 40.0; // log10(mu)
            while (residual(std::pow(10.0, hi)) > eta_)
                hi += 20.0;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                (residual(std::pow(10.0, mid)) > eta_ ? lo : hi) = mid;
            }
            const double mu = std::pow(10.0, hi);
            for (Index i = 0; i < xh.size(); ++i)
                zh(i) = (xh(i) + mu * s_(i) * c_(i)) / (1.0 + mu * s_(i) * s_(i));
        }
        return x + V_ * (zh - xh);
    }

private:
    CMatrix A_;
    CVector y_;
    double eta_;
    RVector s_;
    CMatrix U_, V_;
    CVector c_;
    double r_perp_ = 0.0;
    double smax_ = 0.0;
};

namespace detail {

/// Tracks the relative-change window and the best feasible checkpoint.
struct Progress {
    int quiet_iters = 0;
    double best_objective = std::numeric_limits<double>::infinity();
    CVector best;
    std::vector<double> trace;

    void offer(const CVector& candidate, double objective) {
        if (objective < best_objective) {
            best_objective = objective;
            best = candidate;
        }
    }
};

inline CVector perturbed(const CVector& x0, std::uint64_t seed, Field field) {
    if (seed == 0)
        return x0;
    CVector noise = field == Field::Real ? random_real_vector(x0.size(), seed)
                                         : random_complex_vector(x0.size(), seed);
    const double scale = 1e-3 * std::max(x0.norm(), 1.0) / std::max(noise.norm(), 1e-300);
    return x0 + scale * noise;
}

} // namespace detail

/// Chambolle-Pock iteration on the stacked operator [Phi; A], with each block
/// rescaled to unit norm. The primal function is zero; the dual proxes are an
/// entrywise modulus clip (l1 term) and a shifted ball projection (data term).
/// Checkpoints project the iterate onto the constraint set and keep the best.
inline SolveResult solve_analysis_cs(const CMatrix& A, const CVector& y, const LinearOperator& analysis,
                                     double eta, const SolverConfig& cfg = {}, Field field = Field::Complex) {
    const Index K = A.rows(), L = A.cols();
    if (y.size() != K || analysis.cols != L)
        throw Error(ErrorCode::DimensionMismatch, kModule, "A, y and the analysis operator disagree in size");
    if (eta < 0.0)
        throw Error(ErrorCode::InvalidArgument, kModule, "eta must be nonnegative");

    SolveResult result;
    if (y.norm() <= eta) {
        // x = 0 is feasible with objective 0.
        result.x_hat = CVector::Zero(L);
        result.constraint_slack = y.norm();
        result.converged = true;
        return result;
    }

    // The problem is homogeneous in (y, eta); iterate on unit-norm data.
    const double scale = y.norm();
    const CVector yn = y / scale;
    const double en = eta / scale;

    const ConstraintProjector projector(A, yn, en);
    if (projector.min_residual() > en + 1e-6)
        throw Error(ErrorCode::Infeasible, kModule,
                    "y lies at distance " + std::to_string(scale * projector.min_residual()) +
                        " from range(A), more than eta=" + std::to_string(eta));

    const double norm_phi = gabor::operator_norm(analysis, cfg.norm_iters, 7);
    const double norm_a = projector.spectral_norm();
    const double knorm = std::sqrt(2.0);
    const double tau = cfg.step_ratio / knorm;
    const double sigma = 1.0 / (cfg.step_ratio * knorm);
    const double rho = cfg.over_relaxation;

    const CVector y_scaled = yn / norm_a;
    const double eta_scaled = en / norm_a;
    auto phi_s = [&](const CVector& x) -> CVector { return analysis.apply(x) / norm_phi; };
    auto phi_s_adj = [&](const CVector& p) -> CVector { return analysis.adjoint(p) / norm_phi; };
    const CMatrix A_s = A / norm_a;

    CVector x = A.adjoint() * yn;
    enforce_field(x, field);
    x = detail::perturbed(x, cfg.seed, field);
    CVector p1 = CVector::Zero(analysis.rows);
    CVector p2 = CVector::Zero(K);

    detail::Progress progress;
    auto checkpoint = [&](const CVector& iterate) {
        CVector feasible = projector.project(iterate);
        enforce_field(feasible, field);
        progress.offer(feasible, l1_norm(analysis.apply(feasible)));
        progress.trace.push_back(progress.best_objective);
    };

    int it = 0;
    for (; it < cfg.max_iters; ++it) {
        CVector x_new = x - tau * (phi_s_adj(p1) + A_s.adjoint() * p2);
        enforce_field(x_new, field);
        const CVector x_bar = 2.0 * x_new - x;

        const CVector p1_new = clip_modulus(p1 + sigma * phi_s(x_bar), norm_phi);
        const CVector v2 = p2 + sigma * (A_s * x_bar);
        const CVector p2_new = v2 - sigma * project_l2_ball(v2 / sigma, y_scaled, eta_scaled);

        const double change = (x_new - x).norm() / std::max(x_new.norm(), 1e-300);
        x += rho * (x_new - x);
        p1 += rho * (p1_new - p1);
        p2 += rho * (p2_new - p2);

        if ((it + 1) % cfg.checkpoint_every == 0)
            checkpoint(x);
        progress.quiet_iters = change < cfg.rel_tol ? progress.quiet_iters + 1 : 0;
        if (progress.quiet_iters >= 10) {
            ++it;
            break;
        }
    }
    checkpoint(x);

    result.iterations = it;
    result.x_hat = scale * progress.best;
    result.objective = scale * progress.best_objective;
    for (double& v : progress.trace)
        v *= scale;
    result.constraint_slack = (A * result.x_hat - y).norm();
    result.converged = progress.quiet_iters >= 10 && result.constraint_slack <= eta + 1e-6;
    result.objective_trace = std::move(progress.trace);
    return result;
}

/// Denoising variant: the constraint is handled as the primal prox (ball projection).
inline SolveResult solve_analysis_denoise(const CVector& y, const LinearOperator& analysis, double eta,
                                          const SolverConfig& cfg = {}, Field field = Field::Complex) {
    const Index L = y.size();
    if (analysis.cols != L)
        throw Error(ErrorCode::DimensionMismatch, kModule, "signal length and analysis operator disagree");
    if (eta < 0.0)
        throw Error(ErrorCode::InvalidArgument, kModule, "eta must be nonnegative");

    SolveResult result;
    if (eta == 0.0 || y.norm() <= eta) {
        result.x_hat = eta == 0.0 ? y : CVector::Zero(L);
        result.objective = l1_norm(analysis.apply(result.x_hat));
        result.constraint_slack = (result.x_hat - y).norm();
        result.converged = true;
        return result;
    }

    // The problem is homogeneous in (y, eta); iterate on unit-norm data.
    const double scale = y.norm();
    const CVector yn = y / scale;
    const double en = eta / scale;

    const double norm_phi = gabor::operator_norm(analysis, cfg.norm_iters, 7);
    const double tau = cfg.step_ratio;
    const double sigma = 1.0 / cfg.step_ratio;
    const double rho = cfg.over_relaxation;

    CVector x = detail::perturbed(yn, cfg.seed, field);
    x = project_l2_ball(x, yn, en);
    CVector p = CVector::Zero(analysis.rows);

    detail::Progress progress;
    auto checkpoint = [&](const CVector& iterate) {
        progress.offer(iterate, l1_norm(analysis.apply(iterate)));
        progress.trace.push_back(progress.best_objective);
    };

    int it = 0;
    for (; it < cfg.max_iters; ++it) {
        CVector x_new = project_l2_ball(x - (tau / norm_phi) * analysis.adjoint(p), yn, en);
        enforce_field(x_new, field);
        const CVector x_bar = 2.0 * x_new - x;
        const CVector p_new = clip_modulus(p + (sigma / norm_phi) * analysis.apply(x_bar), norm_phi);

        const double change = (x_new - x).norm() / std::max(x_new.norm(), 1e-300);
        x += rho * (x_new - x);
        p += rho * (p_new - p);
        if (rho != 1.0)
            x = project_l2_ball(x, yn, en);

        if ((it + 1) % cfg.checkpoint_every == 0)
            checkpoint(x);
        progress.quiet_iters = change < cfg.rel_tol ? progress.quiet_iters + 1 : 0;
        if (progress.quiet_iters >= 10) {
            ++it;
            break;
        }
    }
    checkpoint(x);

    result.iterations = it;
    result.x_hat = scale * progress.best;
    result.objective = scale * progress.best_objective;
    for (double& v : progress.trace)
        v *= scale;
    result.constraint_slack = (result.x_hat - y).norm();
    result.converged = progress.quiet_iters >= 10 && result.constraint_slack <= eta + 1e-6;
    result.objective_trace = std::move(progress.trace);
    return result;
}

} // namespace sdgf::solvers
