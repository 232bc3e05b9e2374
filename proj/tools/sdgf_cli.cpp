// sdgf: star-window construction, frame diagnostics and analysis-sparsity sweeps.

#include "sdgf/sdgf.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#ifndef SDGF_VERSION
#define SDGF_VERSION "dev"
#endif

namespace fs = std::filesystem;
using namespace sdgf;

namespace {

std::ofstream open_out(const fs::path& p) {
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
    }
    std::ofstream f(p, std::ios::binary);
    if (!f)
        throw Error(ErrorCode::IoError, "cli", "cannot write " + p.string());
    return f;
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f)
        throw Error(ErrorCode::IoError, "cli", "cannot read " + p.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

gabor::Window window_for(const std::string& name, Index L, double theta, int index, std::uint64_t seed) {
    const auto kind = gabor::parse_window_kind(name);
    if (kind == gabor::WindowKind::Star)
        return zauner::star_window(L, theta, index, seed).window();
    return gabor::make_window(kind, L);
}

signals::SignalRecord signal_for(const std::string& kind, Index L, const std::string& path, Index offset) {
    if (kind == "wav")
        return signals::load_wav_segment(path, offset, L);
    return signals::make_signal(signals::parse_signal_kind(kind), L);
}

// ---------------------------------------------------------------------------

struct ZaunerArgs {
    Index L = 0;
    double theta = 0.0;
    int index = 0;
    std::uint64_t seed = 0;
    std::string out;
};

void run_zauner(const ZaunerArgs& args) {
    const auto sw = zauner::star_window(args.L, args.theta, args.index, args.seed);
    const fs::path csv = args.out;
    {
        auto f = open_out(csv);
        f << "l,re,im\n";
        char buf[96];
        for (Index l = 0; l < sw.values.size(); ++l) {
            std::snprintf(buf, sizeof buf, "%td,%.17g,%.17g\n", static_cast<std::ptrdiff_t>(l), sw.values(l).real(),
                          sw.values(l).imag());
            f << buf;
        }
    }
    fs::path meta = csv;
    meta.replace_extension(".meta.txt");
    auto f = open_out(meta);
    char buf[256];
    f << "L = " << args.L << '\n';
    f << "theta = " << experiments::format_double(args.theta) << '\n';
    f << "eigen_index = " << sw.eigen_index << '\n';
    std::snprintf(buf, sizeof buf, "eigenvalue = %.17g%+.17gi\n", sw.eigenvalue.real(), sw.eigenvalue.imag());
    f << buf;
    f << "residual = " << experiments::format_double(sw.residual) << '\n';
    f << "phi = " << experiments::format_double(sw.phi) << '\n';
    f << "exponent_convention = " << zauner::to_string(sw.convention) << '\n';
    f << "method = " << zauner::to_string(sw.method) << '\n';
    f << "seed = " << args.seed << '\n';
    std::cout << "star window L=" << args.L << " residual=" << sw.residual << " -> " << csv.string() << '\n';
}

struct SparkArgs {
    std::string window;
    Index L = 0, a = 0, b = 0;
    bool exhaustive = false;
    bool randomized = false;
    std::uint64_t trials = 1000;
    Index size = 0;
    double tol = frame::kDefaultRankTol;
    std::uint64_t seed = 0;
    double theta = 0.0;
    int index = 0;
    std::string out;
};

void run_spark(const SparkArgs& args) {
    const auto lat = gabor::make_lattice(args.L, args.a, args.b);
    const auto g = window_for(args.window, args.L, args.theta, args.index, args.seed);
    const auto f = frame::build_frame_matrix(g, lat);

    std::ostringstream report;
    std::optional<std::vector<Index>> witness;
    report << "window = " << args.window << "\nL = " << lat.L << "\na = " << lat.a << "\nb = " << lat.b
           << "\nP = " << lat.P << '\n';

    bool exhaustive = args.exhaustive || !args.randomized;
    if (exhaustive && !args.exhaustive) {
        // default: exhaustive when it fits the budget
        double total = 0.0;
        for (Index k = 1; k <= std::min(lat.P, lat.L); ++k)
            total += frame::binomial(lat.P, k);
        exhaustive = total <= 5e6;
    }
    if (exhaustive) {
        const auto r = frame::spark_exhaustive(f, args.tol);
        report << "method = exhaustive\nspark = " << (r.lower_bound ? ">= " : "") << r.spark
               << "\nfull_spark = " << (r.spark == lat.L + 1 ? "true" : "false")
               << "\nsubsets_checked = " << r.subsets_checked << '\n';
        witness = r.witness;
    } else {
        const Index size = args.size > 0 ? args.size : lat.L;
        auto cert = frame::find_dependent_subset(f, size, args.trials, args.tol, args.seed);
        std::string search = "uniform";
        if (!cert && size == lat.L) {
            cert = frame::find_dependent_subset_cosets(g, lat, args.trials, args.tol, args.seed);
            search = "coset-reduced";
        }
        report << "method = randomized\n";
        if (cert) {
            report << "search = " << search << "\nspark = <= " << cert->indices.size()
                   << "\nspark_deficient = " << (static_cast<Index>(cert->indices.size()) <= lat.L ? "true" : "false")
                   << "\ncertificate_rank = " << cert->rank << "\ntrials_to_hit = " << cert->trials_to_hit << '\n';
            witness = cert->indices;
        } else {
            report << "spark = unknown (no dependent subset of size " << size << " in " << args.trials
                   << " trials)\n";
        }
    }
    std::cout << report.str();
    if (!args.out.empty()) {
        const fs::path dir = args.out;
        auto r = open_out(dir / "spark.txt");
        r << report.str();
        if (witness) {
            auto w = open_out(dir / "witness.csv");
            w << "index,n,m\n";
            for (Index i : *witness)
                w << i << ',' << i % lat.N << ',' << i / lat.N << '\n';
        }
    }
}

struct DgtArgs {
    std::string signal = "two_chirp";
    std::string window = "star";
    std::string path;
    Index offset = 0;
    Index L = 0, a = 0, b = 0;
    std::string out;
};

void run_dgt(const DgtArgs& args) {
    const auto lat = gabor::make_lattice(args.L, args.a, args.b);
    const auto x = signal_for(args.signal, args.L, args.path, args.offset);
    const auto g = window_for(args.window, args.L, 0.0, 0, 0);
    auto f = open_out(args.out);
    gabor::write_coefficients_csv(f, gabor::dgt(x.samples, g, lat));
}

struct SignalArgs {
    std::string kind;
    Index L = 0;
    std::string path;
    Index offset = 0;
    std::string out;
};

void run_signal(const SignalArgs& args) {
    const auto s = signal_for(args.kind, args.L, args.path, args.offset);
    auto f = open_out(args.out);
    signals::write_signal_csv(f, s);
}

struct SweepArgs {
    std::string config;
    std::string out;
    unsigned threads = 0;
};

void run_sweep(const SweepArgs& args, experiments::Mode expected) {
    const auto cfg = config::parse_config(read_file(args.config));
    if (cfg.mode != expected)
        throw Error(ErrorCode::SchemaError, "config",
                    "key 'mode': this subcommand needs mode = " + std::string(experiments::to_string(expected)));
    const std::string resolved = config::to_text(cfg);
    std::cerr << "# resolved configuration\n" << resolved;

    const fs::path out = args.out;
    {
        auto m = open_out(out / "manifest.txt");
        m << "# sdgf run manifest; rerun with: sdgf " << (expected == experiments::Mode::CompressedSensing ? "cs-run" : "denoise-run")
          << " --config manifest.txt --out <dir>\n";
        m << "# version = " << SDGF_VERSION << '\n';
        m << "# exponent_convention = " << zauner::to_string(zauner::frozen_convention()) << '\n';
        m << resolved;
    }
    const auto spec = config::to_experiment(cfg, args.threads);
    const auto result = experiments::run_sweep(spec);
    experiments::emit_results(result, spec.mode, out);

    std::size_t failed = 0;
    for (const auto& r : result.rows)
        if (r.error) {
            if (failed++ == 0)
                std::cerr << "first failure: " << *r.error << '\n';
        }
    std::cout << result.rows.size() << " rows (" << failed << " failed) -> " << out.string() << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spark-deficient Gabor frames: star windows, frame diagnostics and sweeps"};
    app.require_subcommand(1);
    app.set_version_flag("--version", SDGF_VERSION);

    ZaunerArgs za;
    auto* zcmd = app.add_subcommand("zauner", "Construct a star window (eigenvector of the Zauner unitary)");
    zcmd->add_option("--L", za.L, "Ambient dimension (odd, divisible by 3, square-free)")->required();
    zcmd->add_option("--theta", za.theta, "Global phase of the unitary");
    zcmd->add_option("--index", za.index, "Eigenvalue index")->check(CLI::Range(0, 2));
    zcmd->add_option("--seed", za.seed, "Seed of the projected start vector");
    zcmd->add_option("--out", za.out, "Output CSV (l,re,im); a .meta.txt sidecar is written next to it")->required();

    auto* fcmd = app.add_subcommand("frame", "Gabor frame diagnostics");
    fcmd->require_subcommand(1);
    SparkArgs sa;
    auto* scmd = fcmd->add_subcommand("spark", "Spark of a Gabor frame (exact or randomized certificate)");
    scmd->add_option("--window", sa.window, "star|gauss|hann|hamming|itersine")->required();
    scmd->add_option("--L", sa.L)->required();
    scmd->add_option("--a", sa.a)->required();
    scmd->add_option("--b", sa.b)->required();
    auto* ex = scmd->add_flag("--exhaustive", sa.exhaustive, "Exact spark by exhaustive search");
    auto* rnd = scmd->add_flag("--randomized", sa.randomized, "Randomized dependency certificate");
    ex->excludes(rnd);
    scmd->add_option("--trials", sa.trials, "Randomized trials");
    scmd->add_option("--size", sa.size, "Subset size for the randomized search (default L)");
    scmd->add_option("--tol", sa.tol, "Relative rank tolerance");
    scmd->add_option("--seed", sa.seed);
    scmd->add_option("--theta", sa.theta);
    scmd->add_option("--index", sa.index)->check(CLI::Range(0, 2));
    scmd->add_option("--out", sa.out, "Directory for spark.txt and witness.csv");

    DgtArgs da;
    auto* dcmd = fcmd->add_subcommand("dgt", "Dump Gabor coefficients of a signal as CSV (m,n,re,im)");
    dcmd->add_option("--signal", da.signal, "two_chirp|bumps|cusp|wav");
    dcmd->add_option("--path", da.path, "WAV file for --signal wav");
    dcmd->add_option("--offset", da.offset);
    dcmd->add_option("--window", da.window, "star|gauss|hann|hamming|itersine");
    dcmd->add_option("--L", da.L)->required();
    dcmd->add_option("--a", da.a)->required();
    dcmd->add_option("--b", da.b)->required();
    dcmd->add_option("--out", da.out)->required();

    SweepArgs cs_args, dn_args;
    auto* cscmd = app.add_subcommand("cs-run", "Compressed-sensing sweep over measurement counts");
    cscmd->add_option("--config", cs_args.config, "Flat key = value config")->required();
    cscmd->add_option("--out", cs_args.out, "Output directory")->required();
    cscmd->add_option("--threads", cs_args.threads, "Worker threads (default SDGF_THREADS or all cores)");
    auto* dncmd = app.add_subcommand("denoise-run", "Denoising sweep over noise levels");
    dncmd->add_option("--config", dn_args.config, "Flat key = value config")->required();
    dncmd->add_option("--out", dn_args.out, "Output directory")->required();
    dncmd->add_option("--threads", dn_args.threads, "Worker threads (default SDGF_THREADS or all cores)");

    SignalArgs ga;
    auto* gcmd = app.add_subcommand("signal", "Write a test signal or WAV segment as CSV");
    gcmd->add_option("--kind", ga.kind, "two_chirp|bumps|cusp|wav")->required();
    gcmd->add_option("--L", ga.L)->required();
    gcmd->add_option("--path", ga.path, "WAV file for --kind wav");
    gcmd->add_option("--offset", ga.offset);
    gcmd->add_option("--out", ga.out)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (zcmd->parsed())
            run_zauner(za);
        else if (scmd->parsed())
            run_spark(sa);
        else if (dcmd->parsed())
            run_dgt(da);
        else if (cscmd->parsed())
            run_sweep(cs_args, experiments::Mode::CompressedSensing);
        else if (dncmd->parsed())
            run_sweep(dn_args, experiments::Mode::Denoise);
        else if (gcmd->parsed())
            run_signal(ga);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
