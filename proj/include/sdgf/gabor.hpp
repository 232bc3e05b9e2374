#pragma once

// Finite discrete Gabor systems on Z_L: lattice bookkeeping, classical
// windows, time-frequency atoms, and the analysis operator with its adjoint.

#include "sdgf/error.hpp"
#include "sdgf/types.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>
#include <string_view>

namespace sdgf::gabor {

inline constexpr std::string_view kModule = "gabor";

/// Separable lattice a Z_L x b Z_L. N = L/a time shifts, M = L/b frequency
/// shifts, P = M*N atoms. Construct through make_lattice.
struct Lattice {
    Index L = 0;
    Index a = 0;
    Index b = 0;
    Index N = 0;
    Index M = 0;
    Index P = 0;

    bool operator==(const Lattice&) const = default;
};

inline Lattice make_lattice(Index L, Index a, Index b) {
    if (L < 1 || a < 1 || b < 1)
        throw Error(ErrorCode::InvalidArgument, kModule, "L, a, b must be positive");
    if (L % a != 0)
        throw Error(ErrorCode::NonDivisor, kModule,
                    "time step a=" + std::to_string(a) + " does not divide L=" + std::to_string(L));
    if (L % b != 0)
        throw Error(ErrorCode::NonDivisor, kModule,
                    "frequency step b=" + std::to_string(b) + " does not divide L=" + std::to_string(L));
    if (a * b >= L)
        throw Error(ErrorCode::NotAFrame, kModule,
                    "a*b=" + std::to_string(a * b) + " must be smaller than L=" + std::to_string(L));
    Lattice lat{L, a, b, L / a, L / b, 0};
    lat.P = lat.M * lat.N;
    return lat;
}

enum class WindowKind { Star, Gauss, Hann, Hamming, Itersine, Custom };

inline std::string_view to_string(WindowKind kind) {
    switch (kind) {
    case WindowKind::Star: return "star";
    case WindowKind::Gauss: return "gauss";
    case WindowKind::Hann: return "hann";
    case WindowKind::Hamming: return "hamming";
    case WindowKind::Itersine: return "itersine";
    case WindowKind::Custom: return "custom";
    }
    return "custom";
}

inline WindowKind parse_window_kind(std::string_view name) {
    for (auto k : {WindowKind::Star, WindowKind::Gauss, WindowKind::Hann, WindowKind::Hamming,
                   WindowKind::Itersine, WindowKind::Custom})
        if (to_string(k) == name)
            return k;
    throw Error(ErrorCode::UnknownKind, kModule, "unknown window kind '" + std::string(name) + "'");
}

/// Unit-norm window vector of length L. The constructor normalizes.
class Window {
public:
    Window(CVector values, WindowKind kind) : values_(std::move(values)), kind_(kind) {
        const double n = values_.norm();
        if (!(n > 0.0) || !std::isfinite(n))
            throw Error(ErrorCode::InvalidArgument, kModule, "window must have finite nonzero norm");
        values_ /= n;
    }

    const CVector& values() const noexcept { return values_; }
    WindowKind kind() const noexcept { return kind_; }
    Index size() const noexcept { return values_.size(); }
    double norm() const { return values_.norm(); }
    complex operator()(Index l) const { return values_(l); }

private:
    CVector values_;
    WindowKind kind_;
};

/// Unnormalized classical window sample, t = l/L.
inline double classical_window_sample(WindowKind kind, Index l, Index L) {
    using std::numbers::pi;
    const double ld = static_cast<double>(l);
    const double Ld = static_cast<double>(L);
    switch (kind) {
    case WindowKind::Gauss: {
        const double d = ld - Ld / 2.0;
        return std::exp(-pi * d * d / Ld);
    }
    case WindowKind::Hann: {
        const double s = std::sin(pi * ld / Ld);
        return s * s;
    }
    case WindowKind::Hamming:
        return 0.54 - 0.46 * std::cos(2.0 * pi * ld / Ld);
    case WindowKind::Itersine: {
        const double c = std::cos(pi * (ld / Ld - 0.5));
        return std::sin(pi / 2.0 * c * c);
    }
    default:
        throw Error(ErrorCode::UnknownKind, kModule,
                    "'" + std::string(to_string(kind)) + "' is not a classical window");
    }
}

inline Window make_window(WindowKind kind, Index L) {
    if (L < 2)
        throw Error(ErrorCode::InvalidArgument, kModule, "window length must be at least 2");
    CVector v(L);
    for (Index l = 0; l < L; ++l)
        v(l) = classical_window_sample(kind, l, L);
    return Window(std::move(v), kind);
}

/// Coefficient array indexed (m, n), m in [M], n in [N].
class GaborCoefficients {
public:
    explicit GaborCoefficients(const Lattice& lat) : data_(CMatrix::Zero(lat.M, lat.N)) {}
    GaborCoefficients(const Lattice& lat, CMatrix data) : data_(std::move(data)) {
        if (data_.rows() != lat.M || data_.cols() != lat.N)
            throw Error(ErrorCode::DimensionMismatch, kModule, "coefficient array must be M x N");
    }

    Index M() const noexcept { return data_.rows(); }
    Index N() const noexcept { return data_.cols(); }
    complex& operator()(Index m, Index n) { return data_(m, n); }
    complex operator()(Index m, Index n) const { return data_(m, n); }
    const CMatrix& matrix() const noexcept { return data_; }
    CMatrix& matrix() noexcept { return data_; }

    /// Flat view used by the solvers; element (m, n) sits at m + M*n.
    Eigen::Map<const CVector> flat() const { return {data_.data(), data_.size()}; }

private:
    CMatrix data_;
};

inline Index wrap(Index i, Index L) {
    const Index r = i % L;
    return r < 0 ? r + L : r;
}

inline void check_window(const Window& g, const Lattice& lat) {
    if (g.size() != lat.L)
        throw Error(ErrorCode::DimensionMismatch, kModule,
                    "window length " + std::to_string(g.size()) + " != L=" + std::to_string(lat.L));
}

/// g_{n,m}(l) = exp(2 pi i m b l / L) g(l - n a), indices mod L.
inline CVector gabor_atom(const Window& g, const Lattice& lat, Index n, Index m) {
    check_window(g, lat);
    if (n < 0 || n >= lat.N || m < 0 || m >= lat.M)
        throw Error(ErrorCode::IndexOutOfRange, kModule,
                    "atom index (n=" + std::to_string(n) + ", m=" + std::to_string(m) + ") out of range");
    const Index L = lat.L;
    CVector atom(L);
    for (Index l = 0; l < L; ++l) {
        // m*b*l mod L keeps the phase argument small and exact.
        const Index k = (m * lat.b % L) * l % L;
        const double phase = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(L);
        atom(l) = std::polar(1.0, phase) * g(wrap(l - n * lat.a, L));
    }
    return atom;
}

/// Analysis operator c(m, n) = sum_l x_l conj(g(l - n a)) exp(-2 pi i m b l / L).
///
/// Since b/L = 1/M, the exponential only depends on l mod M: for every n the
/// windowed signal is folded onto Z_M and transformed with one M-point FFT.
inline GaborCoefficients dgt(const CVector& x, const Window& g, const Lattice& lat) {
    check_window(g, lat);
    if (x.size() != lat.L)
        throw Error(ErrorCode::DimensionMismatch, kModule,
                    "signal length " + std::to_string(x.size()) + " != L=" + std::to_string(lat.L));
    const Index L = lat.L, M = lat.M;
    GaborCoefficients c(lat);
    Eigen::FFT<double> fft;
    std::vector<complex> folded(static_cast<std::size_t>(M));
    std::vector<complex> spectrum(static_cast<std::size_t>(M));
    const CVector& gv = g.values();
    for (Index n = 0; n < lat.N; ++n) {
        std::fill(folded.begin(), folded.end(), complex(0.0, 0.0));
        const Index shift = n * lat.a;
        Index r = 0;
        for (Index l = 0; l < L; ++l) {
            Index idx = l - shift;
            if (idx < 0)
                idx += L;
            folded[static_cast<std::size_t>(r)] += x(l) * std::conj(gv(idx));
            if (++r == M)
                r = 0;
        }
        fft.fwd(spectrum, folded);
        for (Index m = 0; m < M; ++m)
            c(m, n) = spectrum[static_cast<std::size_t>(m)];
    }
    return c;
}

/// Exact adjoint of dgt: x = sum_{m,n} c(m, n) g_{n,m}.
inline CVector dgt_adjoint(const GaborCoefficients& c, const Window& g, const Lattice& lat) {
    check_window(g, lat);
    if (c.M() != lat.M || c.N() != lat.N)
        throw Error(ErrorCode::DimensionMismatch, kModule, "coefficient array must be M x N");
    const Index L = lat.L, M = lat.M;
    CVector x = CVector::Zero(L);
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    std::vector<complex> column(static_cast<std::size_t>(M));
    std::vector<complex> periodic(static_cast<std::size_t>(M));
    const CVector& gv = g.values();
    for (Index n = 0; n < lat.N; ++n) {
        for (Index m = 0; m < M; ++m)
            column[static_cast<std::size_t>(m)] = c(m, n);
        // Unscaled inverse: h(r) = sum_m c(m, n) exp(2 pi i m r / M).
        fft.inv(periodic, column);
        const Index shift = n * lat.a;
        Index r = 0;
        for (Index l = 0; l < L; ++l) {
            Index idx = l - shift;
            if (idx < 0)
                idx += L;
            x(l) += gv(idx) * periodic[static_cast<std::size_t>(r)];
            if (++r == M)
                r = 0;
        }
    }
    return x;
}

/// Analysis operator as a linear map C^L -> C^P (flat layout of GaborCoefficients).
inline LinearOperator analysis_operator(const Window& g, const Lattice& lat) {
    check_window(g, lat);
    auto window = std::make_shared<const Window>(g);
    return LinearOperator{
        lat.P, lat.L,
        [window, lat](const CVector& x) -> CVector { return dgt(x, *window, lat).flat(); },
        [window, lat](const CVector& y) -> CVector {
            if (y.size() != lat.P)
                throw Error(ErrorCode::DimensionMismatch, kModule, "coefficient vector must have length P");
            GaborCoefficients c(lat, Eigen::Map<const CMatrix>(y.data(), lat.M, lat.N));
            return dgt_adjoint(c, *window, lat);
        },
    };
}

/// Power iteration on A^H A; returns an estimate of the largest singular value.
inline double operator_norm(const LinearOperator& op, int iters = 100, std::uint64_t seed = 0) {
    if (op.cols == 0)
        return 0.0;
    CVector v = random_complex_vector(op.cols, seed);
    v.normalize();
    double estimate = 0.0;
    for (int k = 0; k < iters; ++k) {
        CVector w = op.adjoint(op.apply(v));
        const double n = w.norm();
        if (n == 0.0)
            return 0.0;
        estimate = std::sqrt(n);
        v = w / n;
    }
    // Final Rayleigh quotient ||A v||.
    return std::max(estimate, op.apply(v).norm());
}

/// CSV dump `m,n,re,im`, rows ordered by m, then n.
inline void write_coefficients_csv(std::ostream& os, const GaborCoefficients& c) {
    os << "m,n,re,im\n";
    char buf[96];
    for (Index m = 0; m < c.M(); ++m)
        for (Index n = 0; n < c.N(); ++n) {
            std::snprintf(buf, sizeof buf, "%td,%td,%.17g,%.17g\n", static_cast<std::ptrdiff_t>(m),
                          static_cast<std::ptrdiff_t>(n), c(m, n).real(), c(m, n).imag());
            os << buf;
        }
}

} // namespace sdgf::gabor
