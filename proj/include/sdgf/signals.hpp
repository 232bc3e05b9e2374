#pragma once

// Test signals, 16-bit PCM WAV ingestion, Gaussian measurement ensembles and noise.

#include "sdgf/error.hpp"
#include "sdgf/gabor.hpp"
#include "sdgf/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace sdgf::signals {

inline constexpr std::string_view kModule = "signals";

enum class SignalKind { TwoChirp, Bumps, Cusp };
enum class Source { Synthetic, WavFile };

inline std::string_view to_string(SignalKind k) {
    switch (k) {
    case SignalKind::TwoChirp: return "two_chirp";
    case SignalKind::Bumps: return "bumps";
    case SignalKind::Cusp: return "cusp";
    }
    return "?";
}

inline SignalKind parse_signal_kind(std::string_view name) {
    for (auto k : {SignalKind::TwoChirp, SignalKind::Bumps, SignalKind::Cusp})
        if (to_string(k) == name)
            return k;
    throw Error(ErrorCode::UnknownKind, kModule, "unknown signal kind '" + std::string(name) + "'");
}

struct SignalRecord {
    CVector samples;
    std::string label;
    Field field = Field::Real;
    Source source = Source::Synthetic;
};

namespace detail {
// Donoho-Johnstone bump positions, heights and widths.
inline constexpr std::array<double, 11> kBumpPos{.1, .13, .15, .23, .25, .40, .44, .65, .76, .78, .81};
inline constexpr std::array<double, 11> kBumpHeight{4, 5, 3, 4, 5, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2};
inline constexpr std::array<double, 11> kBumpWidth{.005, .005, .006, .01, .01, .03, .01, .01, .005, .008, .005};
} // namespace detail

/// Unnormalized sample at t = l / L.
inline double raw_signal_sample(SignalKind kind, Index l, Index L) {
    const double t = static_cast<double>(l) / static_cast<double>(L);
    const double Ld = static_cast<double>(L);
    switch (kind) {
    case SignalKind::TwoChirp:
        return std::cos(std::numbers::pi * Ld * t * t) + std::cos(std::numbers::pi * Ld * t * t / 3.0);
    case SignalKind::Bumps: {
        double s = 0.0;
        for (std::size_t j = 0; j < detail::kBumpPos.size(); ++j) {
            const double u = std::abs((t - detail::kBumpPos[j]) / detail::kBumpWidth[j]);
            s += detail::kBumpHeight[j] / std::pow(1.0 + u, 4);
        }
        return s;
    }
    case SignalKind::Cusp:
        return std::sqrt(std::abs(t - 0.37));
    }
    return 0.0;
}

inline SignalRecord make_signal(SignalKind kind, Index L) {
    if (L < 8)
        throw Error(ErrorCode::InvalidArgument, kModule, "signal length must be at least 8");
    CVector x(L);
    for (Index l = 0; l < L; ++l)
        x(l) = raw_signal_sample(kind, l, L);
    x.normalize();
    return SignalRecord{std::move(x), std::string(to_string(kind)), Field::Real, Source::Synthetic};
}

/// x = Phi^* c with c holding `sparsity` random complex nonzeros, unit norm.
inline SignalRecord make_sparse_complex_signal(const gabor::Window& g, const gabor::Lattice& lat, Index sparsity,
                                               std::uint64_t seed) {
    if (sparsity < 1 || sparsity > lat.P)
        throw Error(ErrorCode::InvalidArgument, kModule, "sparsity must lie in [1, P]");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Index> positions(static_cast<std::size_t>(lat.P));
    for (Index i = 0; i < lat.P; ++i)
        positions[static_cast<std::size_t>(i)] = i;
    for (Index i = 0; i < sparsity; ++i) {
        std::uniform_int_distribution<Index> pick(i, lat.P - 1);
        std::swap(positions[static_cast<std::size_t>(i)], positions[static_cast<std::size_t>(pick(rng))]);
    }
    gabor::GaborCoefficients c(lat);
    for (Index i = 0; i < sparsity; ++i) {
        const Index p = positions[static_cast<std::size_t>(i)];
        const double re = normal(rng);
        const double im = normal(rng);
        c(p % lat.M, p / lat.M) = complex(re, im);
    }
    CVector x = gabor::dgt_adjoint(c, g, lat);
    x.normalize();
    return SignalRecord{std::move(x), "complex_sparse", Field::Complex, Source::Synthetic};
}

// ---------------------------------------------------------------------------
// WAV (RIFF, PCM, 16-bit, mono)

struct WavData {
    std::uint32_t sample_rate = 0;
    std::vector<std::int16_t> samples;
};

namespace detail {
inline std::uint32_t le32(const unsigned char* p) {
    return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
           (std::uint32_t(p[3]) << 24);
}
inline std::uint16_t le16(const unsigned char* p) { return std::uint16_t(p[0] | (p[1] << 8)); }
inline void put32(std::ostream& os, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}
inline void put16(std::ostream& os, std::uint16_t v) {
    const unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
    os.write(reinterpret_cast<const char*>(b), 2);
}
} // namespace detail

inline WavData read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, kModule, "cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw Error(ErrorCode::UnsupportedFormat, kModule, path.string() + " is not a RIFF/WAVE file");

    bool have_fmt = false;
    WavData wav;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* hdr = bytes.data() + pos;
        const std::uint32_t size = detail::le32(hdr + 4);
        const std::size_t body = pos + 8;
        if (body + size > bytes.size())
            throw Error(ErrorCode::UnsupportedFormat, kModule, "truncated chunk in " + path.string());
        if (std::memcmp(hdr, "fmt ", 4) == 0) {
            if (size < 16)
                throw Error(ErrorCode::UnsupportedFormat, kModule, "short fmt chunk");
            const unsigned char* f = bytes.data() + body;
            const std::uint16_t format = detail::le16(f);
            const std::uint16_t channels = detail::le16(f + 2);
            const std::uint16_t bits = detail::le16(f + 14);
            if (format != 1)
                throw Error(ErrorCode::UnsupportedFormat, kModule, "only PCM (format 1) is supported");
            if (channels != 1)
                throw Error(ErrorCode::UnsupportedFormat, kModule,
                            "only mono is supported, file has " + std::to_string(channels) + " channels");
            if (bits != 16)
                throw Error(ErrorCode::UnsupportedFormat, kModule,
                            "only 16-bit samples are supported, file has " + std::to_string(bits));
            wav.sample_rate = detail::le32(f + 4);
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            if (!have_fmt)
                throw Error(ErrorCode::UnsupportedFormat, kModule, "data chunk precedes fmt chunk");
            wav.samples.resize(size / 2);
            for (std::size_t i = 0; i < wav.samples.size(); ++i)
                wav.samples[i] = static_cast<std::int16_t>(detail::le16(bytes.data() + body + 2 * i));
            return wav;
        }
        pos = body + size + (size & 1u);
    }
    throw Error(ErrorCode::UnsupportedFormat, kModule, "no data chunk in " + path.string());
}

inline void write_wav(const std::filesystem::path& path, const std::vector<std::int16_t>& samples,
                      std::uint32_t sample_rate = 16000) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::IoError, kModule, "cannot write " + path.string());
    const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
    out.write("RIFF", 4);
    detail::put32(out, 36 + data_bytes);
    out.write("WAVEfmt ", 8);
    detail::put32(out, 16);
    detail::put16(out, 1);
    detail::put16(out, 1);
    detail::put32(out, sample_rate);
    detail::put32(out, sample_rate * 2);
    detail::put16(out, 2);
    detail::put16(out, 16);
    out.write("data", 4);
    detail::put32(out, data_bytes);
    for (auto s : samples)
        detail::put16(out, static_cast<std::uint16_t>(s));
}

inline double pcm16_to_real(std::int16_t s) { return static_cast<double>(s) / 32768.0; }

inline std::int16_t real_to_pcm16(double v) {
    const double scaled = std::round(v * 32768.0);
    return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

/// Exactly L samples starting at `offset`, mapped to [-1, 1).
inline SignalRecord load_wav_segment(const std::filesystem::path& path, Index offset, Index L) {
    const WavData wav = read_wav(path);
    if (offset < 0 || L < 1)
        throw Error(ErrorCode::InvalidArgument, kModule, "offset must be >= 0 and L >= 1");
    if (static_cast<std::size_t>(offset + L) > wav.samples.size())
        throw Error(ErrorCode::TooShort, kModule,
                    path.string() + " has " + std::to_string(wav.samples.size()) + " samples, need " +
                        std::to_string(offset + L));
    CVector x(L);
    for (Index l = 0; l < L; ++l)
        x(l) = pcm16_to_real(wav.samples[static_cast<std::size_t>(offset + l)]);
    return SignalRecord{std::move(x), path.stem().string(), Field::Real, Source::WavFile};
}

// ---------------------------------------------------------------------------
// Randomness

struct MeasurementEnsemble {
    CMatrix A;
    Index K = 0;
    Field field = Field::Real;
    std::uint64_t seed = 0;
};

/// Real: N(0, 1/K) entries. Complex: re and im each N(0, 1/(2K)).
inline MeasurementEnsemble gaussian_matrix(Index K, Index L, Field field, std::uint64_t seed) {
    if (K < 1 || L < 1)
        throw Error(ErrorCode::InvalidArgument, kModule, "K and L must be positive");
    std::mt19937_64 rng(seed);
    const double sd = field == Field::Real ? 1.0 / std::sqrt(static_cast<double>(K))
                                           : 1.0 / std::sqrt(2.0 * static_cast<double>(K));
    std::normal_distribution<double> normal(0.0, sd);
    CMatrix A(K, L);
    for (Index i = 0; i < K; ++i)
        for (Index j = 0; j < L; ++j) {
            const double re = normal(rng);
            const double im = field == Field::Complex ? normal(rng) : 0.0;
            A(i, j) = complex(re, im);
        }
    return MeasurementEnsemble{std::move(A), K, field, seed};
}

struct NoisySignal {
    CVector noisy;
    double noise_norm = 0.0;
};

/// Real: e_i ~ N(0, sigma^2). Complex: re and im each N(0, sigma^2/2).
inline NoisySignal add_gaussian_noise(const CVector& x, double sigma, std::uint64_t seed,
                                      Field field = Field::Real) {
    if (sigma < 0.0)
        throw Error(ErrorCode::InvalidArgument, kModule, "sigma must be nonnegative");
    if (sigma == 0.0)
        return {x, 0.0};
    std::mt19937_64 rng(seed);
    const double sd = field == Field::Real ? sigma : sigma / std::sqrt(2.0);
    std::normal_distribution<double> normal(0.0, sd);
    CVector e(x.size());
    for (Index i = 0; i < x.size(); ++i) {
        const double re = normal(rng);
        const double im = field == Field::Complex ? normal(rng) : 0.0;
        e(i) = complex(re, im);
    }
    return {x + e, e.norm()};
}

/// `l,value` for real signals, `l,re,im` otherwise.
inline void write_signal_csv(std::ostream& os, const SignalRecord& s) {
    char buf[96];
    if (s.field == Field::Real) {
        os << "l,value\n";
        for (Index l = 0; l < s.samples.size(); ++l) {
            std::snprintf(buf, sizeof buf, "%td,%.17g\n", static_cast<std::ptrdiff_t>(l), s.samples(l).real());
            os << buf;
        }
    } else {
        os << "l,re,im\n";
        for (Index l = 0; l < s.samples.size(); ++l) {
            std::snprintf(buf, sizeof buf, "%td,%.17g,%.17g\n", static_cast<std::ptrdiff_t>(l),
                          s.samples(l).real(), s.samples(l).imag());
            os << buf;
        }
    }
}

} // namespace sdgf::signals
