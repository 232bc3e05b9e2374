#include <catch_amalgamated.hpp>

#include "oracles/oracles.hpp"
#include "sdgf/gabor.hpp"
#include "sdgf/zauner.hpp"

using namespace sdgf;
using namespace sdgf::zauner;

TEST_CASE("validate_dimension accepts odd square-free multiples of 3", "[zauner]") {
    for (Index L : {3, 15, 21, 33, 51, 57, 1155, 33915})
        CHECK(validate_dimension(L));
    for (Index L : {1, 2, 6, 9, 10, 27, 45, 63, 75, 99})
        CHECK_FALSE(validate_dimension(L));
}

TEST_CASE("mod_inverse", "[zauner]") {
    CHECK(mod_inverse(14, 15) == 14);
    CHECK(mod_inverse(3, 7) == 5);
    CHECK_THROWS_AS(mod_inverse(6, 15), Error);
    for (std::int64_t L : {3, 15, 57, 1155}) {
        const auto inv = mod_inverse(L - 1, L);
        CHECK(inv >= 1);
        CHECK(inv < L);
        CHECK(((L - 1) * inv) % L == 1);
    }
}

TEST_CASE("dense unitary matches the closed-form entries", "[zauner][oracle]") {
    for (Index L : {3, 15, 21}) {
        for (double theta : {0.0, 0.7}) {
            const CMatrix U = zauner_unitary(make_params(L, theta));
            const CMatrix ref = oracle::zauner_matrix(L, theta);
            CHECK((U - ref).norm() < 1e-12);
        }
    }
}

TEST_CASE("unitary and order three up to phase", "[zauner]") {
    for (Index L : {3, 15, 21, 33, 57}) {
        const CMatrix U = zauner_unitary(make_params(L));
        const CMatrix I = CMatrix::Identity(L, L);
        CHECK((U * U.adjoint() - I).norm() <= 1e-10);
        const CMatrix U3 = U * U * U;
        const double phi = std::arg(U3(0, 0));
        CHECK((U3 - std::polar(1.0, phi) * I).norm() <= 1e-8);
    }
}

TEST_CASE("both exponent lifts agree for odd L", "[zauner]") {
    // tau has order L when L is odd, so the lift of beta_inv is invisible.
    for (Index L : {3, 15, 21}) {
        const CMatrix a = zauner_unitary(make_params(L, 0.0, ExponentConvention::Canonical));
        const CMatrix b = zauner_unitary(make_params(L, 0.0, ExponentConvention::Lifted));
        CHECK((a - b).norm() < 1e-12);
    }
    CHECK(frozen_convention() == ExponentConvention::Canonical);
}

TEST_CASE("matrix-free apply equals dense product", "[zauner]") {
    for (Index L : {3, 15, 57, 105}) {
        const auto p = make_params(L, 0.3);
        const CMatrix U = zauner_unitary(p);
        for (int t = 0; t < 3; ++t) {
            const CVector x = random_complex_vector(L, 10 * L + t);
            CHECK((apply_zauner(p, x) - U * x).norm() < 1e-11 * x.norm());
        }
    }
    CHECK_THROWS_AS(apply_zauner(make_params(15), CVector::Zero(14)), Error);
}

TEST_CASE("dense construction refuses large L", "[zauner]") {
    try {
        zauner_unitary(make_params(1155), 1000);
        FAIL("expected DimensionTooLargeForDense");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionTooLargeForDense);
    }
}

TEST_CASE("spectral projectors are idempotent and complementary", "[zauner][property]") {
    const Index L = 21;
    const auto p0 = make_params(L);
    CVector e0 = CVector::Zero(L);
    e0(0) = 1.0;
    const double phi0 = std::arg(apply_power(p0, e0, 3)(0));
    const CVector r = random_complex_vector(L, 5);
    CVector sum = CVector::Zero(L);
    for (int k = 0; k < 3; ++k) {
        const CVector Pr = spectral_projection(p0, phi0, k, r);
        CHECK((spectral_projection(p0, phi0, k, Pr) - Pr).norm() < 1e-12);
        sum += Pr;
    }
    CHECK((sum - r).norm() < 1e-12);
}

TEST_CASE("star window is a unit eigenvector", "[zauner]") {
    for (Index L : {3, 15, 57}) {
        for (int k = 0; k < 3; ++k) {
            const auto sw = star_window(L, 0.0, k);
            CHECK(sw.values.norm() == Catch::Approx(1.0).epsilon(1e-12));
            CHECK(sw.residual <= 1e-8);
            CHECK(std::abs(std::abs(sw.eigenvalue) - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("projector and dense extraction agree on the eigenspace", "[zauner]") {
    const Index L = 15;
    const auto a = star_window(L, 0.0, 1, 3);
    StarWindowOptions opts;
    opts.force_dense = true;
    const auto b = star_window(L, 0.0, 1, 3, opts);
    CHECK(b.method == ExtractionMethod::Dense);
    CHECK(a.method == ExtractionMethod::Projector);
    CHECK(std::abs(a.eigenvalue - b.eigenvalue) < 1e-8);
}

TEST_CASE("L = 3 has an empty eigenspace that falls back", "[zauner]") {
    const auto sw = star_window(3, 0.0, 2);
    CHECK(sw.residual <= 1e-8);
}

TEST_CASE("theta only rotates the eigenvalue; |dgt| of the window is unchanged", "[zauner][property]") {
    const Index L = 21;
    const auto lat = gabor::make_lattice(L, 1, 7);
    const auto base = star_window(L, 0.0, 0, 9);
    const CVector x = random_complex_vector(L, 1);
    const RVector mag0 = gabor::dgt(x, base.window(), lat).flat().cwiseAbs();
    for (double theta : {0.4, 1.9, -2.5}) {
        const auto sw = star_window(L, theta, 0, 9);
        CHECK(std::abs(sw.eigenvalue - std::polar(1.0, theta) * base.eigenvalue) < 1e-10);
        const RVector mag = gabor::dgt(x, sw.window(), lat).flat().cwiseAbs();
        CHECK((mag - mag0).norm() < 1e-10);
    }
}

TEST_CASE("large compliant L uses the matrix-free path", "[zauner]") {
    const auto sw = star_window(1155);
    CHECK(sw.method == ExtractionMethod::Projector);
    CHECK(sw.residual <= 1e-8);
}

TEST_CASE("non-compliant L is refused", "[zauner]") {
    for (Index L : {45, 9, 10}) {
        try {
            star_window(L);
            FAIL("expected DimensionNotCompliant");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::DimensionNotCompliant);
            CHECK(std::string(e.what()).find("square-free") != std::string::npos);
        }
    }
    CHECK_THROWS_AS(star_window(15, 0.0, 3), Error);
}
