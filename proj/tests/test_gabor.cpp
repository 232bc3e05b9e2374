#include <catch_amalgamated.hpp>

#include "oracles/oracles.hpp"
#include "sdgf/gabor.hpp"

#include <sstream>

using namespace sdgf;
using namespace sdgf::gabor;

namespace {

std::vector<Lattice> lattices_up_to(Index Lmax) {
    std::vector<Lattice> out;
    for (Index L = 2; L <= Lmax; ++L)
        for (Index a = 1; a <= L; ++a)
            for (Index b = 1; b <= L; ++b)
                if (L % a == 0 && L % b == 0 && a * b < L)
                    out.push_back(make_lattice(L, a, b));
    return out;
}

Window random_window(Index L, std::uint64_t seed) { return Window(random_complex_vector(L, seed), WindowKind::Custom); }

} // namespace

TEST_CASE("make_lattice validates divisibility and redundancy", "[gabor]") {
    const auto lat = make_lattice(57, 1, 19);
    CHECK(lat.N == 57);
    CHECK(lat.M == 3);
    CHECK(lat.P == 171);
    CHECK_THROWS_AS(make_lattice(15, 4, 3), Error);
    CHECK_THROWS_AS(make_lattice(15, 3, 5), Error); // a*b == L
    try {
        make_lattice(15, 4, 3);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonDivisor);
    }
    try {
        make_lattice(15, 3, 5);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotAFrame);
    }
}

TEST_CASE("classical windows are unit norm and symmetric", "[gabor]") {
    for (auto kind : {WindowKind::Gauss, WindowKind::Hann, WindowKind::Hamming, WindowKind::Itersine}) {
        const auto w = make_window(kind, 57);
        CHECK(w.norm() == Catch::Approx(1.0).epsilon(1e-14));
        for (Index l = 1; l < 57; ++l)
            CHECK(std::abs(w(l) - w(57 - l)) < 1e-14);
    }
    CHECK(std::abs(make_window(WindowKind::Hann, 16)(0)) < 1e-15);
    CHECK_THROWS_AS(classical_window_sample(WindowKind::Star, 0, 8), Error);
    CHECK(parse_window_kind("itersine") == WindowKind::Itersine);
    CHECK_THROWS_AS(parse_window_kind("kaiser"), Error);
}

TEST_CASE("atoms are isometric copies of the window", "[gabor]") {
    const auto lat = make_lattice(21, 3, 3);
    const auto g = random_window(21, 4);
    for (Index n = 0; n < lat.N; ++n)
        for (Index m = 0; m < lat.M; ++m)
            CHECK(gabor_atom(g, lat, n, m).norm() == Catch::Approx(1.0).epsilon(1e-13));
    CHECK_THROWS_AS(gabor_atom(g, lat, lat.N, 0), Error);
}

TEST_CASE("fast DGT matches the naive triple loop on every lattice up to L = 57", "[gabor][oracle]") {
    std::uint64_t seed = 1;
    for (const auto& lat : lattices_up_to(57)) {
        const auto g = random_window(lat.L, seed++);
        const CVector x = random_complex_vector(lat.L, seed++);
        const CMatrix fast = dgt(x, g, lat).matrix();
        const CMatrix slow = oracle::naive_dgt(x, g.values(), lat.a, lat.b);
        INFO("L=" << lat.L << " a=" << lat.a << " b=" << lat.b);
        REQUIRE((fast - slow).norm() <= 1e-10 * std::max(1.0, slow.norm()));
    }
}

TEST_CASE("dgt_adjoint satisfies <Phi x, c> = <x, Phi^H c>", "[gabor][property]") {
    for (Index L : {15, 21}) {
        for (int t = 0; t < 100; ++t) {
            const std::uint64_t s = 1000 * L + t;
            const Index b = t % 3 == 0 ? 1 : (t % 3 == 1 ? 3 : L / 3);
            const Index a = (b == L / 3 || t % 2 == 0) ? 1 : 3;
            const auto lat = make_lattice(L, a, b);
            const auto g = random_window(L, s);
            const CVector x = random_complex_vector(L, s + 1);
            const CVector cv = random_complex_vector(lat.P, s + 2);
            const GaborCoefficients c(lat, Eigen::Map<const CMatrix>(cv.data(), lat.M, lat.N));
            const complex lhs = cv.dot(dgt(x, g, lat).flat());
            const complex rhs = dgt_adjoint(c, g, lat).dot(x);
            REQUIRE(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
        }
    }
}

TEST_CASE("full lattice frame is tight with bound L", "[gabor][property]") {
    for (Index L : {9, 15, 21}) {
        const auto lat = make_lattice(L, 1, 1);
        const auto g = random_window(L, L);
        for (int t = 0; t < 5; ++t) {
            const CVector x = random_complex_vector(L, 77 + t);
            const double energy = dgt(x, g, lat).flat().squaredNorm();
            CHECK(energy == Catch::Approx(L * x.squaredNorm()).epsilon(1e-8));
        }
    }
}

TEST_CASE("analysis operator wraps dgt and its adjoint", "[gabor]") {
    const auto lat = make_lattice(15, 1, 5);
    const auto g = make_window(WindowKind::Gauss, 15);
    const auto op = analysis_operator(g, lat);
    CHECK(op.rows == 45);
    CHECK(op.cols == 15);
    const CMatrix F = oracle::analysis_matrix(g.values(), 1, 5);
    const CVector x = random_complex_vector(15, 3);
    const CVector c = random_complex_vector(45, 4);
    CHECK((op.apply(x) - F * x).norm() < 1e-12);
    CHECK((op.adjoint(c) - F.adjoint() * c).norm() < 1e-12);

    Eigen::JacobiSVD<CMatrix> svd(F);
    CHECK(operator_norm(op, 300) == Catch::Approx(svd.singularValues()(0)).epsilon(1e-6));
    CHECK_THROWS_AS(op.adjoint(CVector::Zero(44)), Error);
}

TEST_CASE("dgt rejects mismatched sizes", "[gabor]") {
    const auto lat = make_lattice(15, 1, 5);
    CHECK_THROWS_AS(dgt(CVector::Zero(14), make_window(WindowKind::Hann, 15), lat), Error);
    CHECK_THROWS_AS(dgt(CVector::Zero(15), make_window(WindowKind::Hann, 21), lat), Error);
    CHECK_THROWS_AS(Window(CVector::Zero(5), WindowKind::Custom), Error);
}

TEST_CASE("coefficient CSV lists m outer, n inner", "[gabor]") {
    const auto lat = make_lattice(6, 1, 3);
    GaborCoefficients c(lat);
    c(1, 5) = complex(0.5, -1.0);
    std::ostringstream os;
    write_coefficients_csv(os, c);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "m,n,re,im");
    std::getline(is, line);
    CHECK(line == "0,0,0,0");
    std::vector<std::string> lines;
    while (std::getline(is, line))
        lines.push_back(line);
    REQUIRE(lines.size() == 11);
    CHECK(lines.back() == "1,5,0.5,-1");
}
