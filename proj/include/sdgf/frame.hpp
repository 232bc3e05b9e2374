#pragma once

// Spark computation and linear-dependency certificates for finite frames.

#include "sdgf/error.hpp"
#include "sdgf/gabor.hpp"
#include "sdgf/types.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace sdgf::frame {

inline constexpr std::string_view kModule = "frame";
inline constexpr double kDefaultRankTol = 1e-10;

/// Rows are frame elements.
struct FrameMatrix {
    CMatrix vectors;
    std::string source;

    Index count() const noexcept { return vectors.rows(); }
    Index dimension() const noexcept { return vectors.cols(); }
};

/// Row m*N + n holds the atom g_{n,m}.
inline FrameMatrix build_frame_matrix(const gabor::Window& g, const gabor::Lattice& lat) {
    FrameMatrix f{CMatrix(lat.P, lat.L), std::string(gabor::to_string(g.kind()))};
    for (Index m = 0; m < lat.M; ++m)
        for (Index n = 0; n < lat.N; ++n)
            f.vectors.row(m * lat.N + n) = gabor::gabor_atom(g, lat, n, m).transpose();
    return f;
}

inline RVector singular_values(const CMatrix& rows) {
    if (rows.size() == 0)
        return RVector();
    Eigen::BDCSVD<CMatrix> svd(rows);
    return svd.singularValues();
}

/// Number of singular values above tol times the largest one.
inline Index numerical_rank(const CMatrix& rows, double tol = kDefaultRankTol) {
    const RVector s = singular_values(rows);
    if (s.size() == 0 || s(0) == 0.0)
        return 0;
    return static_cast<Index>((s.array() > tol * s(0)).count());
}

inline CMatrix select_rows(const CMatrix& m, const std::vector<Index>& idx) {
    CMatrix out(static_cast<Index>(idx.size()), m.cols());
    for (std::size_t i = 0; i < idx.size(); ++i)
        out.row(static_cast<Index>(i)) = m.row(idx[i]);
    return out;
}

enum class SparkMethod { Exhaustive, Randomized };

struct SparkReport {
    Index spark = 0;
    /// True when spark is only known to be at least `spark`.
    bool lower_bound = false;
    std::optional<std::vector<Index>> witness;
    SparkMethod method = SparkMethod::Exhaustive;
    std::uint64_t subsets_checked = 0;
};

inline double binomial(Index n, Index k) {
    if (k < 0 || k > n)
        return 0.0;
    double r = 1.0;
    for (Index i = 1; i <= k; ++i)
        r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

/// Exact spark by ascending scan over subset sizes k = 1..L.
inline SparkReport spark_exhaustive(const FrameMatrix& f, double tol = kDefaultRankTol,
                                    std::uint64_t max_subsets = 5'000'000) {
    const Index P = f.count(), L = f.dimension();
    const Index kmax = std::min(P, L);
    double total = 0.0;
    for (Index k = 1; k <= kmax; ++k)
        total += binomial(P, k);
    if (total > static_cast<double>(max_subsets))
        throw Error(ErrorCode::BudgetExceeded, kModule,
                    "exhaustive spark needs " + std::to_string(total) + " subsets, budget " +
                        std::to_string(max_subsets) + "; use the randomized search");

    SparkReport report;
    report.method = SparkMethod::Exhaustive;
    std::vector<Index> idx;
    for (Index k = 1; k <= kmax; ++k) {
        idx.resize(static_cast<std::size_t>(k));
        std::iota(idx.begin(), idx.end(), Index{0});
        while (true) {
            ++report.subsets_checked;
            if (numerical_rank(select_rows(f.vectors, idx), tol) < k) {
                report.spark = k;
                report.witness = idx;
                return report;
            }
            // next combination in lexicographic order
            Index i = k - 1;
            while (i >= 0 && idx[static_cast<std::size_t>(i)] == P - k + i)
                --i;
            if (i < 0)
                break;
            ++idx[static_cast<std::size_t>(i)];
            for (Index j = i + 1; j < k; ++j)
                idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    if (P > L) {
        report.spark = L + 1; // any L+1 vectors in C^L are dependent
    } else {
        report.spark = P + 1; // linearly independent family
        report.lower_bound = true;
    }
    return report;
}

struct DependencyCertificate {
    std::vector<Index> indices; ///< sorted row indices
    std::uint64_t trials_to_hit = 0;
    Index rank = 0;
};

inline std::vector<Index> sample_without_replacement(Index population, Index count, std::mt19937_64& rng) {
    std::vector<Index> all(static_cast<std::size_t>(population));
    std::iota(all.begin(), all.end(), Index{0});
    for (Index i = 0; i < count; ++i) {
        std::uniform_int_distribution<Index> pick(i, population - 1);
        std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(pick(rng))]);
    }
    all.resize(static_cast<std::size_t>(count));
    std::sort(all.begin(), all.end());
    return all;
}

/// Uniform random search for a dependent subset of the given size. A
/// returned certificate re-verifies with numerical_rank; absence proves nothing.
inline std::optional<DependencyCertificate> find_dependent_subset(const FrameMatrix& f, Index size,
                                                                  std::uint64_t trials,
                                                                  double tol = kDefaultRankTol,
                                                                  std::uint64_t seed = 0) {
    if (size < 1 || size > f.dimension() || size > f.count())
        throw Error(ErrorCode::InvalidArgument, kModule, "subset size must lie in [1, min(P, L)]");
    std::mt19937_64 rng(seed);
    for (std::uint64_t t = 1; t <= trials; ++t) {
        auto idx = sample_without_replacement(f.count(), size, rng);
        const Index r = numerical_rank(select_rows(f.vectors, idx), tol);
        if (r < size)
            return DependencyCertificate{std::move(idx), t, r};
    }
    return std::nullopt;
}

/// Symmetry-reduced search for Gabor frames with 3 | L.
///
/// The time-frequency shift by p = (L/3, -L/3) has order three and commutes
/// with the Zauner unitary. For x in an eigenspace V_j of D_p, <x, g_q> only
/// depends on the coset q + <p> up to a phase, so x orthogonal to the
/// projections onto V_j of L/3 coset representatives annihilates all
/// L atoms of those cosets. Each trial draws L/3 - 1 random cosets, takes the
/// one-dimensional complement in V_j, and scans every remaining coset for a
/// further orthogonal projection. Hits are returned as L row indices of the
/// full frame matrix and verified there.
///
/// Requires a | L/3 and b | L/3 so the subgroup lies on the lattice.
inline std::optional<DependencyCertificate> find_dependent_subset_cosets(const gabor::Window& g,
                                                                         const gabor::Lattice& lat,
                                                                         std::uint64_t trials,
                                                                         double tol = kDefaultRankTol,
                                                                         std::uint64_t seed = 0) {
    const Index L = lat.L;
    if (L % 3 != 0 || (L / 3) % lat.a != 0 || (L / 3) % lat.b != 0)
        return std::nullopt;
    const Index third = L / 3;
    const Index step_n = third / lat.a;              // time component of p
    const Index step_m = (2 * third) / lat.b % lat.M; // -L/3 == 2L/3 mod L

    // Coset representatives and their member rows (row = m*N + n).
    std::vector<std::vector<Index>> cosets;
    std::vector<char> seen(static_cast<std::size_t>(lat.P), 0);
    for (Index m = 0; m < lat.M; ++m)
        for (Index n = 0; n < lat.N; ++n) {
            if (seen[static_cast<std::size_t>(m * lat.N + n)])
                continue;
            std::vector<Index> members;
            for (Index t = 0; t < 3; ++t) {
                const Index nn = (n + t * step_n) % lat.N;
                const Index mm = (m + t * step_m) % lat.M;
                const Index row = mm * lat.N + nn;
                seen[static_cast<std::size_t>(row)] = 1;
                members.push_back(row);
            }
            cosets.push_back(std::move(members));
        }
    const Index C = static_cast<Index>(cosets.size());

    // D_p x (l) = exp(2 pi i (2L/3) l / L) x(l - L/3); eigenspaces by a dense solve.
    CMatrix Dp = CMatrix::Zero(L, L);
    for (Index l = 0; l < L; ++l)
        Dp(l, gabor::wrap(l - third, L)) =
            std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>((2 * third * l) % L) / L);
    Eigen::ComplexEigenSolver<CMatrix> es(Dp);
    std::vector<CMatrix> bases;
    {
        std::vector<complex> centers;
        std::vector<std::vector<Index>> groups;
        for (Index i = 0; i < L; ++i) {
            const complex lam = es.eigenvalues()(i);
            std::size_t c = 0;
            while (c < centers.size() && std::abs(centers[c] - lam) > 1e-6)
                ++c;
            if (c == centers.size()) {
                centers.push_back(lam);
                groups.emplace_back();
            }
            groups[c].push_back(i);
        }
        for (const auto& grp : groups) {
            CMatrix vecs(L, static_cast<Index>(grp.size()));
            for (std::size_t i = 0; i < grp.size(); ++i)
                vecs.col(static_cast<Index>(i)) = es.eigenvectors().col(grp[i]);
            Eigen::HouseholderQR<CMatrix> qr(vecs);
            bases.push_back(qr.householderQ() * CMatrix::Identity(L, vecs.cols()));
        }
    }

    // pool[j].row(c) = coordinates in V_j of the projection of the representative atom.
    const FrameMatrix full = build_frame_matrix(g, lat);
    std::vector<CMatrix> pools;
    for (const auto& Q : bases) {
        CMatrix rep(C, L);
        for (Index c = 0; c < C; ++c)
            rep.row(c) = full.vectors.row(cosets[static_cast<std::size_t>(c)][0]);
        pools.push_back(rep * Q.conjugate()); // row c = (Q^H atom_c)^T
    }

    std::mt19937_64 rng(seed);
    for (std::uint64_t t = 1; t <= trials; ++t) {
        const std::size_t j = static_cast<std::size_t>((t - 1) % bases.size());
        const CMatrix& pool = pools[j];
        const Index dim = pool.cols();
        if (dim < 2 || C < dim)
            continue;
        auto chosen = sample_without_replacement(C, dim - 1, rng);
        const CMatrix sub = select_rows(pool, chosen);
        // Null vector of the (dim-1) x dim block; its conjugate is the x above.
        Eigen::JacobiSVD<CMatrix> svd(sub, Eigen::ComputeFullV);
        const CVector y = svd.matrixV().col(dim - 1);
        const RVector overlaps = (pool * y).cwiseAbs();
        const double scale = pool.rowwise().norm().maxCoeff();
        for (Index c = 0; c < C; ++c) {
            if (std::binary_search(chosen.begin(), chosen.end(), c) || overlaps(c) > 1e-9 * scale)
                continue;
            std::vector<Index> rows;
            for (Index cc : chosen)
                for (Index r : cosets[static_cast<std::size_t>(cc)])
                    rows.push_back(r);
            for (Index r : cosets[static_cast<std::size_t>(c)])
                rows.push_back(r);
            std::sort(rows.begin(), rows.end());
            const Index rank = numerical_rank(select_rows(full.vectors, rows), tol);
            if (rank < static_cast<Index>(rows.size()))
                return DependencyCertificate{std::move(rows), t, rank};
        }
    }
    return std::nullopt;
}

} // namespace sdgf::frame
