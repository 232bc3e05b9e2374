#pragma once

// The Zauner unitary attached to the symplectic matrix (0, L-1; 1, L-1) and
// the extraction of one of its eigenvectors (the "star" window).

#include "sdgf/error.hpp"
#include "sdgf/gabor.hpp"
#include "sdgf/types.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>

namespace sdgf::zauner {

inline constexpr std::string_view kModule = "zauner";
inline constexpr Index kDefaultDenseCap = 4096;

/// True iff L is odd, divisible by 3 and square-free.
inline bool validate_dimension(Index L) {
    if (L < 1 || L % 2 == 0 || L % 3 != 0)
        return false;
    Index rest = L;
    for (Index p = 3; p * p <= rest; p += 2) {
        if (rest % p != 0)
            continue;
        rest /= p;
        if (rest % p == 0)
            return false;
    }
    return true;
}

/// Representative in [1, modulus) of the inverse of beta mod modulus.
inline std::int64_t mod_inverse(std::int64_t beta, std::int64_t modulus) {
    if (modulus < 1)
        throw Error(ErrorCode::InvalidArgument, kModule, "modulus must be positive");
    std::int64_t r0 = modulus, r1 = ((beta % modulus) + modulus) % modulus;
    std::int64_t s0 = 0, s1 = 1;
    while (r1 != 0) {
        const std::int64_t q = r0 / r1;
        std::tie(r0, r1) = std::pair{r1, r0 - q * r1};
        std::tie(s0, s1) = std::pair{s1, s0 - q * s1};
    }
    if (r0 != 1)
        throw Error(ErrorCode::NotInvertible, kModule,
                    std::to_string(beta) + " is not invertible modulo " + std::to_string(modulus));
    std::int64_t inv = s0 % modulus;
    if (inv <= 0)
        inv += modulus;
    if (modulus == 1)
        inv = 0;
    return inv;
}

/// Which lift of the mod-L inverse enters the mod-2L exponent.
enum class ExponentConvention { Canonical, Lifted };

inline std::string_view to_string(ExponentConvention c) {
    return c == ExponentConvention::Canonical ? "canonical (beta_inv in [1,L), exponent mod 2L)"
                                              : "lifted (beta_inv + L, exponent mod 2L)";
}

struct ZaunerParams {
    Index L = 0;
    std::int64_t beta = 0;
    std::int64_t beta_inv = 0;
    double theta = 0.0;
    complex tau;
    ExponentConvention convention = ExponentConvention::Canonical;
};

inline ZaunerParams make_params(Index L, double theta = 0.0,
                                ExponentConvention convention = ExponentConvention::Canonical) {
    if (L < 2)
        throw Error(ErrorCode::InvalidArgument, kModule, "L must be at least 2");
    ZaunerParams p;
    p.L = L;
    p.beta = L - 1;
    p.beta_inv = mod_inverse(p.beta, L);
    if (convention == ExponentConvention::Lifted)
        p.beta_inv += L;
    p.theta = theta;
    p.tau = -std::polar(1.0, std::numbers::pi / static_cast<double>(L));
    p.convention = convention;
    return p;
}

/// tau^k for k in [0, 2L). tau = exp(i pi (L+1)/L), so the angle is reduced exactly.
inline complex tau_power(Index L, std::int64_t k) {
    const std::int64_t twoL = 2 * L;
    const std::int64_t e = ((k % twoL) * ((L + 1) % twoL)) % twoL;
    return std::polar(1.0, std::numbers::pi * static_cast<double>(e) / static_cast<double>(L));
}

/// Exponent beta_inv * (beta u^2 - 2 u v) reduced mod 2L (u, v zero-based).
inline std::int64_t exponent(const ZaunerParams& p, std::int64_t u, std::int64_t v) {
    const std::int64_t m = 2 * p.L;
    const std::int64_t bi = p.beta_inv % m;
    const std::int64_t quad = (p.beta % m) * ((u * u) % m) % m;
    const std::int64_t cross = (2 * ((u * v) % m)) % m;
    const std::int64_t inner = ((quad - cross) % m + m) % m;
    return (bi * inner) % m;
}

inline CMatrix zauner_unitary(const ZaunerParams& p, Index dense_cap = kDefaultDenseCap) {
    if (p.L > dense_cap)
        throw Error(ErrorCode::DimensionTooLargeForDense, kModule,
                    "L=" + std::to_string(p.L) + " exceeds dense cap " + std::to_string(dense_cap));
    const Index L = p.L;
    const complex prefactor = std::polar(1.0 / std::sqrt(static_cast<double>(L)), p.theta);
    std::vector<complex> powers(static_cast<std::size_t>(2 * L));
    for (Index k = 0; k < 2 * L; ++k)
        powers[static_cast<std::size_t>(k)] = tau_power(L, k);
    CMatrix U(L, L);
    for (Index u = 0; u < L; ++u)
        for (Index v = 0; v < L; ++v)
            U(u, v) = prefactor * powers[static_cast<std::size_t>(exponent(p, u, v))];
    return U;
}

/// Matrix-free U x. Because tau^2 = exp(2 pi i / L), the cross term of the
/// exponent is a DFT kernel: (U x)_u = c e^{i theta} tau^{beta_inv beta u^2} X[beta_inv u mod L],
/// with X the forward DFT of x. O(L log L).
inline CVector apply_zauner(const ZaunerParams& p, const CVector& x) {
    const Index L = p.L;
    if (x.size() != L)
        throw Error(ErrorCode::DimensionMismatch, kModule,
                    "vector length " + std::to_string(x.size()) + " != L=" + std::to_string(L));
    Eigen::FFT<double> fft;
    std::vector<complex> in(x.data(), x.data() + L);
    std::vector<complex> spectrum(static_cast<std::size_t>(L));
    fft.fwd(spectrum, in);
    const complex prefactor = std::polar(1.0 / std::sqrt(static_cast<double>(L)), p.theta);
    const std::int64_t bi_mod_L = p.beta_inv % L;
    CVector y(L);
    for (Index u = 0; u < L; ++u) {
        const complex chirp = tau_power(L, exponent(p, u, 0));
        const auto k = static_cast<std::size_t>((bi_mod_L * u) % L);
        y(u) = prefactor * chirp * spectrum[k];
    }
    return y;
}

/// Unitarity defect ||U U^H - I||_F at L = 3 decides the exponent convention.
inline ExponentConvention frozen_convention() {
    for (auto c : {ExponentConvention::Canonical, ExponentConvention::Lifted}) {
        const CMatrix U = zauner_unitary(make_params(3, 0.0, c));
        if ((U * U.adjoint() - CMatrix::Identity(3, 3)).norm() <= 1e-12)
            return c;
    }
    throw Error(ErrorCode::EigenvectorNotFound, kModule, "no exponent convention yields a unitary");
}

enum class ExtractionMethod { Projector, Dense };

inline std::string_view to_string(ExtractionMethod m) {
    return m == ExtractionMethod::Projector ? "projector" : "dense";
}

struct StarWindow {
    CVector values;
    complex eigenvalue;
    double residual = 0.0;
    double phi = 0.0; ///< arg((U^3)_{00}), including theta.
    int eigen_index = 0;
    ExponentConvention convention = ExponentConvention::Canonical;
    ExtractionMethod method = ExtractionMethod::Projector;

    gabor::Window window() const { return gabor::Window(values, gabor::WindowKind::Star); }
};

struct StarWindowOptions {
    Index dense_cap = kDefaultDenseCap;
    bool force_dense = false;
};

inline CVector apply_power(const ZaunerParams& p, CVector x, int power) {
    for (int j = 0; j < power; ++j)
        x = apply_zauner(p, x);
    return x;
}

/// P_k r = (1/3) sum_j omega^{-kj} (e^{-i phi0/3} U0)^j r with U0 the theta = 0 unitary.
inline CVector spectral_projection(const ZaunerParams& p0, double phi0, int k, const CVector& r) {
    const complex scale = std::polar(1.0, -phi0 / 3.0);
    const complex omega_k = std::polar(1.0, -2.0 * std::numbers::pi * k / 3.0);
    const CVector b1 = scale * apply_zauner(p0, r);
    const CVector b2 = scale * apply_zauner(p0, b1);
    return (r + omega_k * b1 + omega_k * omega_k * b2) / 3.0;
}

/// Eigenvector of the Zauner unitary for the eigenvalue closest to
/// e^{i theta} e^{i phi0/3} omega^k, where phi0 = arg((U0^3)_{00}) for theta = 0.
/// The labelling of k does not depend on theta.
inline StarWindow star_window(Index L, double theta = 0.0, int eigen_index = 0, std::uint64_t seed = 0,
                              const StarWindowOptions& opts = {}) {
    if (!validate_dimension(L))
        throw Error(ErrorCode::DimensionNotCompliant, kModule,
                    "L=" + std::to_string(L) +
                        " violates the star-window hypotheses (L must be odd, divisible by 3 and square-free)");
    if (eigen_index < 0 || eigen_index > 2)
        throw Error(ErrorCode::InvalidArgument, kModule, "eigenvalue index must be 0, 1 or 2");

    const ExponentConvention convention = frozen_convention();
    const ZaunerParams p0 = make_params(L, 0.0, convention);
    const ZaunerParams p = make_params(L, theta, convention);

    CVector e0 = CVector::Zero(L);
    e0(0) = 1.0;
    const double phi0 = std::arg(apply_power(p0, e0, 3)(0));

    StarWindow out;
    out.convention = convention;
    out.phi = std::arg(apply_power(p, e0, 3)(0));
    out.eigen_index = eigen_index;

    const CVector r = random_complex_vector(L, seed);
    const double order3_defect = (apply_power(p0, r, 3) - std::polar(1.0, phi0) * r).norm() / r.norm();
    const bool order3_ok = order3_defect <= 1e-8;

    CVector v;
    if (order3_ok && !opts.force_dense) {
        v = spectral_projection(p0, phi0, eigen_index, r);
        if (v.norm() < 1e-6 * r.norm())
            v.resize(0);
    }
    if (v.size() == 0 && (L <= opts.dense_cap)) {
        const CMatrix U0 = zauner_unitary(p0, opts.dense_cap);
        Eigen::ComplexEigenSolver<CMatrix> solver(U0);
        if (solver.info() == Eigen::Success) {
            const complex target = std::polar(1.0, phi0 / 3.0 + 2.0 * std::numbers::pi * eigen_index / 3.0);
            Index best = 0;
            for (Index i = 1; i < L; ++i)
                if (std::abs(solver.eigenvalues()(i) - target) < std::abs(solver.eigenvalues()(best) - target))
                    best = i;
            v = solver.eigenvectors().col(best);
            out.method = ExtractionMethod::Dense;
        }
    }
    if (v.size() == 0 && order3_ok) {
        // Requested eigenspace empty and no dense fallback: take the next nonempty one.
        for (int shift = 1; shift < 3 && v.size() == 0; ++shift) {
            const int k = (eigen_index + shift) % 3;
            CVector w = spectral_projection(p0, phi0, k, r);
            if (w.norm() >= 1e-6 * r.norm()) {
                v = std::move(w);
                out.eigen_index = k;
            }
        }
    }
    if (v.size() == 0)
        throw Error(ErrorCode::EigenvectorNotFound, kModule,
                    "no eigenvector found for L=" + std::to_string(L));

    v.normalize();
    const CVector Uv = apply_zauner(p, v);
    out.eigenvalue = v.dot(Uv); // v^H U v
    out.residual = (Uv - out.eigenvalue * v).norm();
    out.values = std::move(v);
    return out;
}

} // namespace sdgf::zauner
