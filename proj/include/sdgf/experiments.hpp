#pragma once

// Declarative compressed-sensing and denoising sweeps over a set of windows,
// with seeded per-task randomness and CSV / plot-script output.

#include "sdgf/error.hpp"
#include "sdgf/gabor.hpp"
#include "sdgf/signals.hpp"
#include "sdgf/solvers.hpp"
#include "sdgf/types.hpp"
#include "sdgf/zauner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace sdgf::experiments {

inline constexpr std::string_view kModule = "experiments";

enum class Mode { CompressedSensing, Denoise };

inline std::string_view to_string(Mode m) { return m == Mode::CompressedSensing ? "cs" : "denoise"; }

struct ExperimentSpec {
    Mode mode = Mode::CompressedSensing;
    signals::SignalRecord signal;
    Index L = 0;
    Index a = 0;
    Index b = 0;
    std::vector<gabor::WindowKind> windows;
    std::vector<Index> Ks;        ///< cs mode
    std::vector<double> sigmas;   ///< denoise mode
    double cs_sigma = 0.001;      ///< measurement noise level in cs mode
    int trials = 20;
    std::uint64_t base_seed = 0;
    solvers::SolverConfig solver;
    double theta = 0.0;
    int eigen_index = 0;
    std::uint64_t star_seed = 0;
    /// Worker threads; 0 means SDGF_THREADS or the machine's parallelism.
    unsigned threads = 0;
};

struct SweepRow {
    std::string window;
    double grid = 0.0;
    int trial = 0;
    double metric = 0.0;
    double eta = 0.0;
    int iterations = 0;
    bool converged = false;
    std::optional<std::string> error;
};

struct AggregateRow {
    std::string window;
    double grid = 0.0;
    double median = 0.0;
    double mean = 0.0;
    int count = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<AggregateRow> aggregate;
};

inline double relative_error(const CVector& x_hat, const CVector& x) {
    if (x_hat.size() != x.size())
        throw Error(ErrorCode::DimensionMismatch, kModule, "vectors differ in length");
    const double n = x.norm();
    if (n == 0.0)
        throw Error(ErrorCode::ZeroReference, kModule, "reference signal has zero norm");
    return (x_hat - x).norm() / n;
}

inline double mse(const CVector& x_hat, const CVector& x) {
    if (x_hat.size() != x.size() || x.size() == 0)
        throw Error(ErrorCode::DimensionMismatch, kModule, "vectors differ in length");
    return (x_hat - x).squaredNorm() / static_cast<double>(x.size());
}

/// Shortest round-trip decimal form of a double.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// 64-bit FNV-1a over "base_seed|tag|grid|trial", grid in shortest round-trip form.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view tag, double grid, int trial) {
    const std::string text =
        std::to_string(base_seed) + "|" + std::string(tag) + "|" + format_double(grid) + "|" + std::to_string(trial);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// 10 roughly uniform measurement counts from L/6 to L.
inline std::vector<Index> default_k_grid(Index L) {
    std::vector<Index> ks;
    const double lo = static_cast<double>(L) / 6.0, hi = static_cast<double>(L);
    for (int i = 0; i < 10; ++i) {
        const auto k = static_cast<Index>(std::lround(lo + (hi - lo) * i / 9.0));
        if (ks.empty() || ks.back() != k)
            ks.push_back(std::max<Index>(k, 1));
    }
    return ks;
}

/// 10 uniform points in [0.001, 0.01].
inline std::vector<double> default_sigma_grid() {
    std::vector<double> s;
    for (int i = 0; i < 10; ++i)
        s.push_back(0.001 + 0.001 * i);
    return s;
}

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("SDGF_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0)
            return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

inline gabor::Window build_window(gabor::WindowKind kind, const ExperimentSpec& spec) {
    if (kind == gabor::WindowKind::Star)
        return zauner::star_window(spec.L, spec.theta, spec.eigen_index, spec.star_seed).window();
    return gabor::make_window(kind, spec.L);
}

inline double median(std::vector<double> v) {
    if (v.empty())
        return std::nan("");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Per-(window, grid) median and mean over successful rows, in row order.
inline std::vector<AggregateRow> aggregate(const std::vector<SweepRow>& rows) {
    std::vector<AggregateRow> out;
    std::map<std::pair<std::string, double>, std::vector<double>> groups;
    for (const auto& r : rows) {
        auto key = std::make_pair(r.window, r.grid);
        if (!groups.contains(key))
            out.push_back(AggregateRow{r.window, r.grid, 0.0, 0.0, 0});
        if (!r.error)
            groups[key].push_back(r.metric);
        else
            groups[key];
    }
    for (auto& a : out) {
        const auto& v = groups[{a.window, a.grid}];
        a.count = static_cast<int>(v.size());
        a.median = median(v);
        double s = 0.0;
        for (double m : v)
            s += m;
        a.mean = v.empty() ? std::nan("") : s / static_cast<double>(v.size());
    }
    return out;
}

namespace detail {

struct Task {
    std::size_t window;
    double grid;
    int trial;
};

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++)
                fn(i);
        });
    for (auto& th : pool)
        th.join();
}

inline void check_common(const ExperimentSpec& spec) {
    if (spec.signal.samples.size() != spec.L)
        throw Error(ErrorCode::InvalidArgument, kModule, "signal length must equal L");
    if (spec.windows.empty())
        throw Error(ErrorCode::InvalidArgument, kModule, "at least one window is required");
    if (spec.trials < 1)
        throw Error(ErrorCode::InvalidArgument, kModule, "trials must be positive");
}

template <class Solve>
SweepResult run_sweep(const ExperimentSpec& spec, const std::vector<double>& grid, Solve&& solve_one) {
    check_common(spec);
    const gabor::Lattice lat = gabor::make_lattice(spec.L, spec.a, spec.b);
    std::vector<std::optional<LinearOperator>> ops(spec.windows.size());
    std::vector<std::string> build_errors(spec.windows.size());
    for (std::size_t w = 0; w < spec.windows.size(); ++w) {
        try {
            ops[w] = gabor::analysis_operator(build_window(spec.windows[w], spec), lat);
        } catch (const Error& e) {
            build_errors[w] = e.what();
        }
    }

    std::vector<Task> tasks;
    for (std::size_t w = 0; w < spec.windows.size(); ++w)
        for (double g : grid)
            for (int t = 0; t < spec.trials; ++t)
                tasks.push_back({w, g, t});

    SweepResult result;
    result.rows.resize(tasks.size());
    parallel_for(tasks.size(), resolve_threads(spec.threads), [&](std::size_t i) {
        const Task& task = tasks[i];
        SweepRow& row = result.rows[i];
        row.window = std::string(gabor::to_string(spec.windows[task.window]));
        row.grid = task.grid;
        row.trial = task.trial;
        if (!ops[task.window]) {
            row.metric = std::nan("");
            row.error = build_errors[task.window];
            return;
        }
        try {
            solve_one(*ops[task.window], task, row);
        } catch (const Error& e) {
            row.metric = std::nan("");
            row.error = e.what();
        }
    });
    result.aggregate = aggregate(result.rows);
    return result;
}

} // namespace detail

/// For each (window, K, trial): A and noise depend only on (K, trial), so all
/// windows see identical data. eta is the realized noise norm.
inline SweepResult run_cs_sweep(const ExperimentSpec& spec) {
    if (spec.mode != Mode::CompressedSensing)
        throw Error(ErrorCode::InvalidArgument, kModule, "spec mode must be cs");
    if (!zauner::validate_dimension(spec.L) &&
        std::find(spec.windows.begin(), spec.windows.end(), gabor::WindowKind::Star) != spec.windows.end())
        throw Error(ErrorCode::DimensionNotCompliant, kModule,
                    "L=" + std::to_string(spec.L) + " does not admit a star window");
    std::vector<double> grid;
    for (Index k : spec.Ks) {
        if (k < 1 || k > spec.L)
            throw Error(ErrorCode::InvalidArgument, kModule, "measurement counts must lie in [1, L]");
        grid.push_back(static_cast<double>(k));
    }
    const Field field = spec.signal.field;
    const CVector& x = spec.signal.samples;
    return detail::run_sweep(spec, grid, [&](const LinearOperator& op, const detail::Task& task, SweepRow& row) {
        const auto K = static_cast<Index>(task.grid);
        const auto A = signals::gaussian_matrix(K, spec.L, field,
                                                derive_seed(spec.base_seed, "matrix", task.grid, task.trial));
        const auto noisy = signals::add_gaussian_noise(
            A.A * x, spec.cs_sigma, derive_seed(spec.base_seed, "noise", task.grid, task.trial), field);
        solvers::SolverConfig cfg = spec.solver;
        const auto r = solvers::solve_analysis_cs(A.A, noisy.noisy, op, noisy.noise_norm, cfg, field);
        row.metric = relative_error(r.x_hat, x);
        row.eta = noisy.noise_norm;
        row.iterations = r.iterations;
        row.converged = r.converged;
    });
}

/// For each (window, sigma, trial): y = x + e, eta = ||e||, metric = mse(x_hat, x).
inline SweepResult run_denoise_sweep(const ExperimentSpec& spec) {
    if (spec.mode != Mode::Denoise)
        throw Error(ErrorCode::InvalidArgument, kModule, "spec mode must be denoise");
    for (double s : spec.sigmas)
        if (!(s >= 0.0))
            throw Error(ErrorCode::InvalidArgument, kModule, "noise levels must be nonnegative");
    const Field field = spec.signal.field;
    const CVector& x = spec.signal.samples;
    return detail::run_sweep(spec, spec.sigmas, [&](const LinearOperator& op, const detail::Task& task, SweepRow& row) {
        const auto noisy = signals::add_gaussian_noise(
            x, task.grid, derive_seed(spec.base_seed, "noise", task.grid, task.trial), field);
        const auto r = solvers::solve_analysis_denoise(noisy.noisy, op, noisy.noise_norm, spec.solver, field);
        row.metric = mse(r.x_hat, x);
        row.eta = noisy.noise_norm;
        row.iterations = r.iterations;
        row.converged = r.converged;
    });
}

inline SweepResult run_sweep(const ExperimentSpec& spec) {
    return spec.mode == Mode::CompressedSensing ? run_cs_sweep(spec) : run_denoise_sweep(spec);
}

inline void write_rows_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "window,grid,trial,metric,eta,iterations,converged\n";
    for (const auto& r : rows)
        os << r.window << ',' << format_double(r.grid) << ',' << r.trial << ','
           << (r.error ? std::string("nan") : format_double(r.metric)) << ',' << format_double(r.eta) << ','
           << r.iterations << ',' << (r.error ? "failed" : (r.converged ? "true" : "false")) << '\n';
}

inline void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows) {
    os << "window,grid,median,mean,count\n";
    for (const auto& a : rows)
        os << a.window << ',' << format_double(a.grid) << ',' << format_double(a.median) << ','
           << format_double(a.mean) << ',' << a.count << '\n';
}

/// Matplotlib script: median metric against the grid, one line per window.
inline std::string plot_script(Mode mode) {
    const bool cs = mode == Mode::CompressedSensing;
    std::string s;
    s += "#!/usr/bin/env python3\n";
    s += "# Plots aggregate.csv next to this script: median metric vs grid, one line per window.\n";
    s += "import csv, os, sys\n";
    s += "import matplotlib\nmatplotlib.use('Agg')\nimport matplotlib.pyplot as plt\n\n";
    s += "here = os.path.dirname(os.path.abspath(__file__))\n";
    s += "series = {}\n";
    s += "with open(os.path.join(here, 'aggregate.csv')) as f:\n";
    s += "    for row in csv.DictReader(f):\n";
    s += "        series.setdefault(row['window'], []).append((float(row['grid']), float(row['median'])))\n";
    s += "style = {'star': dict(color='tab:blue', lw=2.5, marker='*')}\n";
    s += "fig, ax = plt.subplots(figsize=(6, 4))\n";
    s += "for name, pts in series.items():\n";
    s += "    pts.sort()\n";
    s += "    ax.plot([p[0] for p in pts], [p[1] for p in pts], label=name, **style.get(name, dict(marker='o')))\n";
    s += std::string("ax.set_xlabel('") + (cs ? "measurements K" : "noise standard deviation") + "')\n";
    s += std::string("ax.set_ylabel('") + (cs ? "median relative error" : "median MSE") + "')\n";
    if (!cs)
        s += "ax.set_yscale('log')\n";
    s += "ax.grid(True, alpha=0.3)\nax.legend()\nfig.tight_layout()\n";
    s += std::string("out = os.path.join(here, '") + (cs ? "cs" : "denoise") + ".png')\n";
    s += "fig.savefig(out, dpi=150)\nprint(out)\n";
    return s;
}

/// Writes rows.csv, aggregate.csv and plot.py into out_dir.
inline std::vector<std::filesystem::path> emit_results(const SweepResult& result, Mode mode,
                                                       const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw Error(ErrorCode::IoError, kModule, "cannot create " + out_dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> files{out_dir / "rows.csv", out_dir / "aggregate.csv", out_dir / "plot.py"};
    auto open = [](const std::filesystem::path& p) {
        std::ofstream f(p, std::ios::binary);
        if (!f)
            throw Error(ErrorCode::IoError, kModule, "cannot write " + p.string());
        return f;
    };
    {
        auto f = open(files[0]);
        write_rows_csv(f, result.rows);
    }
    {
        auto f = open(files[1]);
        write_aggregate_csv(f, result.aggregate);
    }
    {
        auto f = open(files[2]);
        f << plot_script(mode);
    }
    return files;
}

} // namespace sdgf::experiments
