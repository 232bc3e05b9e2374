#pragma once

// Flat `key = value` run configuration for the sweep subcommands.

#include "sdgf/error.hpp"
#include "sdgf/experiments.hpp"
#include "sdgf/gabor.hpp"
#include "sdgf/signals.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace sdgf::config {

inline constexpr std::string_view kModule = "config";

struct RunConfig {
    experiments::Mode mode = experiments::Mode::CompressedSensing;
    std::string signal;               ///< two_chirp | bumps | cusp | complex_sparse | wav
    std::int64_t L = 0, a = 0, b = 0;
    std::string audio_path;
    std::int64_t offset = 0;
    std::int64_t sparsity = 0;        ///< complex_sparse; 0 resolves to max(1, L/20)
    std::uint64_t signal_seed = 0;
    std::vector<gabor::WindowKind> windows;
    std::vector<std::int64_t> Ks;     ///< empty resolves to the default grid
    std::vector<double> sigmas;       ///< empty resolves to the default grid
    double cs_sigma = 0.001;
    int trials = 20;
    std::uint64_t base_seed = 0;
    int max_iters = 5000;
    double rel_tol = 1e-6;
    double step_ratio = 0.01;
    double over_relaxation = 1.0;
    std::uint64_t solver_seed = 0;
    double theta = 0.0;
    int eigen_index = 0;
    std::uint64_t star_seed = 0;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        if (auto t = trim(item); !t.empty())
            out.push_back(t);
    return out;
}

[[noreturn]] inline void schema_error(const std::string& key, const std::string& why) {
    throw Error(ErrorCode::SchemaError, kModule, "key '" + key + "': " + why);
}

template <class Int>
Int parse_int(const std::string& key, const std::string& v) {
    Int out{};
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        schema_error(key, "expected an integer, got '" + v + "'");
    return out;
}

inline double parse_real(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size())
            throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        schema_error(key, "expected a number, got '" + v + "'");
    }
}

inline const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys{
        "mode",      "signal",    "L",          "a",          "b",         "audio_path",  "offset",
        "sparsity",  "signal_seed", "windows",  "Ks",         "sigmas",    "cs_sigma",    "trials",
        "base_seed", "max_iters", "rel_tol",    "step_ratio", "over_relaxation", "solver_seed", "theta",
        "eigen_index", "star_seed",
    };
    return keys;
}

} // namespace detail

inline std::string join_windows(const std::vector<gabor::WindowKind>& w) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i)
        s += (i ? "," : "") + std::string(gabor::to_string(w[i]));
    return s;
}

/// Fully materialized configuration, one `key = value` per line in schema order.
inline std::string to_text(const RunConfig& c) {
    using experiments::format_double;
    std::ostringstream os;
    auto line = [&](const std::string& k, const std::string& v) { os << k << " = " << v << '\n'; };
    line("mode", std::string(experiments::to_string(c.mode)));
    line("signal", c.signal);
    line("L", std::to_string(c.L));
    line("a", std::to_string(c.a));
    line("b", std::to_string(c.b));
    if (c.signal == "wav") {
        line("audio_path", c.audio_path);
        line("offset", std::to_string(c.offset));
    }
    if (c.signal == "complex_sparse") {
        line("sparsity", std::to_string(c.sparsity));
        line("signal_seed", std::to_string(c.signal_seed));
    }
    line("windows", join_windows(c.windows));
    if (c.mode == experiments::Mode::CompressedSensing) {
        std::string ks;
        for (std::size_t i = 0; i < c.Ks.size(); ++i)
            ks += (i ? "," : "") + std::to_string(c.Ks[i]);
        line("Ks", ks);
        line("cs_sigma", format_double(c.cs_sigma));
    } else {
        std::string ss;
        for (std::size_t i = 0; i < c.sigmas.size(); ++i)
            ss += (i ? "," : "") + format_double(c.sigmas[i]);
        line("sigmas", ss);
    }
    line("trials", std::to_string(c.trials));
    line("base_seed", std::to_string(c.base_seed));
    line("max_iters", std::to_string(c.max_iters));
    line("rel_tol", format_double(c.rel_tol));
    line("step_ratio", format_double(c.step_ratio));
    line("over_relaxation", format_double(c.over_relaxation));
    line("solver_seed", std::to_string(c.solver_seed));
    line("theta", format_double(c.theta));
    line("eigen_index", std::to_string(c.eigen_index));
    line("star_seed", std::to_string(c.star_seed));
    return os.str();
}

/// Parses and validates a config document; all defaults are materialized.
inline RunConfig parse_config(std::string_view text) {
    std::map<std::string, std::string> kv;
    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        const std::string body = detail::trim(line);
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::ParseError, kModule,
                        "line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = detail::trim(std::string_view(body).substr(0, eq));
        const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
        if (key.empty())
            throw Error(ErrorCode::ParseError, kModule, "line " + std::to_string(lineno) + ": empty key");
        const auto& keys = detail::known_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            detail::schema_error(key, "unknown key (line " + std::to_string(lineno) + ")");
        if (kv.contains(key))
            throw Error(ErrorCode::ParseError, kModule,
                        "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv[key] = value;
    }

    auto require = [&](const std::string& k) -> const std::string& {
        auto it = kv.find(k);
        if (it == kv.end() || it->second.empty())
            detail::schema_error(k, "required key is missing");
        return it->second;
    };
    auto get = [&](const std::string& k) -> std::optional<std::string> {
        auto it = kv.find(k);
        return it == kv.end() ? std::nullopt : std::optional<std::string>(it->second);
    };

    RunConfig c;
    const std::string& mode = require("mode");
    if (mode == "cs")
        c.mode = experiments::Mode::CompressedSensing;
    else if (mode == "denoise")
        c.mode = experiments::Mode::Denoise;
    else
        detail::schema_error("mode", "must be 'cs' or 'denoise', got '" + mode + "'");

    c.signal = require("signal");
    static const std::vector<std::string> signal_kinds{"two_chirp", "bumps", "cusp", "complex_sparse", "wav"};
    if (std::find(signal_kinds.begin(), signal_kinds.end(), c.signal) == signal_kinds.end())
        detail::schema_error("signal", "unknown signal '" + c.signal + "'");

    c.L = detail::parse_int<std::int64_t>("L", require("L"));
    c.a = detail::parse_int<std::int64_t>("a", require("a"));
    c.b = detail::parse_int<std::int64_t>("b", require("b"));
    if (c.L < 8 || c.a < 1 || c.b < 1)
        detail::schema_error("L", "need L >= 8 and a, b >= 1");

    if (c.signal == "wav") {
        c.audio_path = require("audio_path");
        if (auto v = get("offset"))
            c.offset = detail::parse_int<std::int64_t>("offset", *v);
    }
    c.sparsity = std::max<std::int64_t>(1, c.L / 20);
    if (auto v = get("sparsity"))
        c.sparsity = detail::parse_int<std::int64_t>("sparsity", *v);
    if (auto v = get("signal_seed"))
        c.signal_seed = detail::parse_int<std::uint64_t>("signal_seed", *v);

    c.windows = {gabor::WindowKind::Star, gabor::WindowKind::Gauss, gabor::WindowKind::Hann,
                 gabor::WindowKind::Hamming, gabor::WindowKind::Itersine};
    if (auto v = get("windows")) {
        c.windows.clear();
        for (const auto& name : detail::split_list(*v)) {
            try {
                c.windows.push_back(gabor::parse_window_kind(name));
            } catch (const Error&) {
                detail::schema_error("windows", "unknown window '" + name + "'");
            }
            if (c.windows.back() == gabor::WindowKind::Custom)
                detail::schema_error("windows", "custom windows cannot be named in a config");
        }
        if (std::find(c.windows.begin(), c.windows.end(), gabor::WindowKind::Star) == c.windows.end())
            detail::schema_error("windows", "the window list must include star");
    }

    if (c.mode == experiments::Mode::CompressedSensing) {
        if (get("sigmas"))
            detail::schema_error("sigmas", "only valid in denoise mode");
        const auto ks = get("Ks");
        if (!ks || *ks == "auto") {
            for (Index k : experiments::default_k_grid(c.L))
                c.Ks.push_back(k);
        } else {
            for (const auto& s : detail::split_list(*ks)) {
                const auto k = detail::parse_int<std::int64_t>("Ks", s);
                if (k < 1 || k > c.L)
                    detail::schema_error("Ks", "measurement counts must lie in [1, L]");
                c.Ks.push_back(k);
            }
        }
        if (auto v = get("cs_sigma"))
            c.cs_sigma = detail::parse_real("cs_sigma", *v);
        if (c.cs_sigma < 0.0)
            detail::schema_error("cs_sigma", "must be nonnegative");
    } else {
        if (get("Ks"))
            detail::schema_error("Ks", "only valid in cs mode");
        if (get("cs_sigma"))
            detail::schema_error("cs_sigma", "only valid in cs mode");
        const auto ss = get("sigmas");
        if (!ss || *ss == "auto") {
            c.sigmas = experiments::default_sigma_grid();
        } else {
            for (const auto& s : detail::split_list(*ss)) {
                const double v = detail::parse_real("sigmas", s);
                if (!(v >= 0.0))
                    detail::schema_error("sigmas", "noise levels must be nonnegative");
                c.sigmas.push_back(v);
            }
        }
    }

    if (auto v = get("trials"))
        c.trials = detail::parse_int<int>("trials", *v);
    if (c.trials < 1)
        detail::schema_error("trials", "must be positive");
    if (auto v = get("base_seed"))
        c.base_seed = detail::parse_int<std::uint64_t>("base_seed", *v);
    if (auto v = get("max_iters"))
        c.max_iters = detail::parse_int<int>("max_iters", *v);
    if (c.max_iters < 1)
        detail::schema_error("max_iters", "must be positive");
    if (auto v = get("rel_tol"))
        c.rel_tol = detail::parse_real("rel_tol", *v);
    if (auto v = get("step_ratio"))
        c.step_ratio = detail::parse_real("step_ratio", *v);
    if (!(c.step_ratio > 0.0))
        detail::schema_error("step_ratio", "must be positive");
    if (auto v = get("over_relaxation"))
        c.over_relaxation = detail::parse_real("over_relaxation", *v);
    if (c.over_relaxation < 1.0 || c.over_relaxation >= 2.0)
        detail::schema_error("over_relaxation", "must lie in [1, 2)");
    if (auto v = get("solver_seed"))
        c.solver_seed = detail::parse_int<std::uint64_t>("solver_seed", *v);
    if (auto v = get("theta"))
        c.theta = detail::parse_real("theta", *v);
    if (auto v = get("eigen_index"))
        c.eigen_index = detail::parse_int<int>("eigen_index", *v);
    if (c.eigen_index < 0 || c.eigen_index > 2)
        detail::schema_error("eigen_index", "must be 0, 1 or 2");
    if (auto v = get("star_seed"))
        c.star_seed = detail::parse_int<std::uint64_t>("star_seed", *v);
    return c;
}

/// Loads the signal and assembles the sweep description.
inline experiments::ExperimentSpec to_experiment(const RunConfig& c, unsigned threads = 0) {
    experiments::ExperimentSpec spec;
    spec.mode = c.mode;
    spec.L = c.L;
    spec.a = c.a;
    spec.b = c.b;
    const gabor::Lattice lat = gabor::make_lattice(c.L, c.a, c.b);
    if (c.signal == "wav") {
        spec.signal = signals::load_wav_segment(c.audio_path, c.offset, c.L);
    } else if (c.signal == "complex_sparse") {
        // Synthesized in the frame of a seeded random window so that no tested window is favoured.
        const gabor::Window synth(random_complex_vector(c.L, c.signal_seed ^ 0x5eedULL), gabor::WindowKind::Custom);
        spec.signal = signals::make_sparse_complex_signal(synth, lat, c.sparsity, c.signal_seed);
    } else {
        spec.signal = signals::make_signal(signals::parse_signal_kind(c.signal), c.L);
    }
    spec.windows = c.windows;
    for (auto k : c.Ks)
        spec.Ks.push_back(k);
    spec.sigmas = c.sigmas;
    spec.cs_sigma = c.cs_sigma;
    spec.trials = c.trials;
    spec.base_seed = c.base_seed;
    spec.solver.max_iters = c.max_iters;
    spec.solver.rel_tol = c.rel_tol;
    spec.solver.step_ratio = c.step_ratio;
    spec.solver.over_relaxation = c.over_relaxation;
    spec.solver.seed = c.solver_seed;
    spec.theta = c.theta;
    spec.eigen_index = c.eigen_index;
    spec.star_seed = c.star_seed;
    spec.threads = threads;
    return spec;
}

} // namespace sdgf::config
