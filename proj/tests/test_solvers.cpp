#include <catch_amalgamated.hpp>

#include "oracles/oracles.hpp"
#include "sdgf/signals.hpp"
#include "sdgf/solvers.hpp"
#include "sdgf/zauner.hpp"

using namespace sdgf;
using namespace sdgf::solvers;

namespace {

struct Fixture {
    gabor::Lattice lat = gabor::make_lattice(15, 1, 5);
    gabor::Window g = zauner::star_window(15).window();
    LinearOperator op = gabor::analysis_operator(g, lat);
    CMatrix F = oracle::analysis_matrix(g.values(), 1, 5);
};

} // namespace

TEST_CASE("complex soft threshold satisfies the prox optimality condition", "[solvers][property]") {
    for (int t = 0; t < 20; ++t) {
        const CVector z = random_complex_vector(30, 500 + t);
        const double step = 0.2 + 0.1 * t;
        const CVector p = prox_l1_complex(z, step);
        for (Index i = 0; i < z.size(); ++i) {
            if (std::abs(p(i)) == 0.0) {
                CHECK(std::abs(z(i)) <= step + 1e-14);
            } else {
                // z - p = step * p / |p|
                CHECK(std::abs(z(i) - p(i) - step * p(i) / std::abs(p(i))) < 1e-12);
            }
        }
    }
    CHECK_THROWS_AS(prox_l1_complex(CVector::Ones(3), 0.0), Error);
}

TEST_CASE("clip and ball projections", "[solvers]") {
    CVector z(3);
    z << complex(3, 4), complex(0.1, 0), complex(0, -2);
    const CVector c = clip_modulus(z, 1.0);
    CHECK(std::abs(c(0) - complex(0.6, 0.8)) < 1e-15);
    CHECK(c(1) == z(1));
    CHECK(std::abs(c(2) - complex(0, -1)) < 1e-15);

    const CVector center = CVector::Ones(3);
    const CVector far = center + z;
    const CVector pr = project_l2_ball(far, center, 2.0);
    CHECK((pr - center).norm() == Catch::Approx(2.0));
    CHECK((project_l2_ball(center, center, 1.0) - center).norm() == 0.0);
}

TEST_CASE("constraint projector lands on the constraint boundary", "[solvers]") {
    const CMatrix A = signals::gaussian_matrix(8, 15, Field::Complex, 3).A;
    const CVector y = random_complex_vector(8, 4);
    const ConstraintProjector proj(A, y, 0.5);
    CHECK(proj.min_residual() < 1e-10); // wide A has full row rank
    const CVector x = random_complex_vector(15, 5);
    const CVector px = proj.project(x);
    CHECK((A * px - y).norm() == Catch::Approx(0.5).epsilon(1e-9));
    // px - x is in range(A^H) by optimality
    const CVector d = px - x;
    Eigen::BDCSVD<CMatrix> svd(A, Eigen::ComputeThinV);
    const CMatrix V = svd.matrixV();
    CHECK((d - V * (V.adjoint() * d)).norm() < 1e-10);
}

TEST_CASE("denoise closed forms", "[solvers]") {
    Fixture fx;
    const CVector y = random_complex_vector(15, 11);
    const auto exact = solve_analysis_denoise(y, fx.op, 0.0);
    CHECK((exact.x_hat - y).norm() <= 1e-9);
    const auto zero = solve_analysis_denoise(y, fx.op, y.norm() * 1.01);
    CHECK(zero.x_hat.norm() <= 1e-6 * y.norm());
    CHECK_THROWS_AS(solve_analysis_denoise(y, fx.op, -1.0), Error);
}

TEST_CASE("square invertible A with eta = 0 inverts A", "[solvers]") {
    Fixture fx;
    for (Field field : {Field::Real, Field::Complex}) {
        const CMatrix A = signals::gaussian_matrix(15, 15, field, 21).A;
        const CVector x = field == Field::Real ? random_real_vector(15, 22) : random_complex_vector(15, 22);
        const CVector y = A * x;
        const auto r = solve_analysis_cs(A, y, fx.op, 0.0, {}, field);
        CHECK((r.x_hat - A.lu().solve(y)).norm() <= 1e-6 * x.norm());
    }
}

TEST_CASE("CS agrees with an independent ADMM solver", "[solvers][oracle]") {
    Fixture fx;
    for (int i = 0; i < 6; ++i) {
        const Field field = i % 2 ? Field::Complex : Field::Real;
        const CMatrix A = signals::gaussian_matrix(9, 15, field, 40 + i).A;
        const CVector x = field == Field::Real ? random_real_vector(15, 50 + i) : random_complex_vector(15, 50 + i);
        const auto noisy = signals::add_gaussian_noise(A * x, 0.05, 60 + i, field);
        const auto r = solve_analysis_cs(A, noisy.noisy, fx.op, noisy.noise_norm, {}, field);
        const auto o = oracle::admm_cs(fx.F, A, noisy.noisy, noisy.noise_norm, field == Field::Real, 70 + i);
        CHECK(r.constraint_slack <= noisy.noise_norm + 1e-6);
        CHECK(r.objective == Catch::Approx(o.objective).epsilon(1e-4));
        if (field == Field::Real)
            CHECK(r.x_hat.imag().norm() == 0.0);
    }
}

TEST_CASE("denoise agrees with ADMM on the identity measurement", "[solvers][oracle]") {
    Fixture fx;
    const CMatrix I = CMatrix::Identity(15, 15);
    for (int i = 0; i < 4; ++i) {
        const CVector x = random_complex_vector(15, 80 + i);
        const auto noisy = signals::add_gaussian_noise(x, 0.2, 90 + i, Field::Complex);
        const auto r = solve_analysis_denoise(noisy.noisy, fx.op, noisy.noise_norm);
        const auto o = oracle::admm_cs(fx.F, I, noisy.noisy, noisy.noise_norm, false, 95 + i);
        CHECK(r.constraint_slack <= noisy.noise_norm + 1e-9);
        CHECK(r.objective == Catch::Approx(o.objective).epsilon(1e-4));
    }
}

TEST_CASE("solutions scale with the data", "[solvers][property]") {
    Fixture fx;
    const CMatrix A = signals::gaussian_matrix(10, 15, Field::Complex, 7).A;
    const CVector y = A * random_complex_vector(15, 8) + 0.01 * random_complex_vector(10, 9);
    const double eta = 0.05;
    const auto base = solve_analysis_cs(A, y, fx.op, eta);
    for (double c : {0.1, 10.0}) {
        const auto scaled = solve_analysis_cs(A, c * y, fx.op, c * eta);
        CHECK(scaled.objective == Catch::Approx(c * base.objective).epsilon(1e-5));
        CHECK((scaled.x_hat - c * base.x_hat).norm() <= 1e-3 * c * base.x_hat.norm());
    }
}

TEST_CASE("CS edge cases", "[solvers]") {
    Fixture fx;
    const CMatrix A = signals::gaussian_matrix(10, 15, Field::Complex, 7).A;
    const CVector y = random_complex_vector(10, 1);
    const auto r = solve_analysis_cs(A, y, fx.op, y.norm() + 1.0);
    CHECK(r.x_hat.norm() == 0.0);
    CHECK_THROWS_AS(solve_analysis_cs(A, CVector::Zero(9), fx.op, 0.1), Error);

    // Tall A whose range misses y: infeasible for a tight eta.
    const CMatrix tall = signals::gaussian_matrix(20, 15, Field::Complex, 8).A;
    const CVector off = random_complex_vector(20, 2);
    try {
        solve_analysis_cs(tall, off, fx.op, 1e-3);
        FAIL("expected Infeasible");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Infeasible);
    }
}

TEST_CASE("solver output is deterministic and seed perturbation is harmless", "[solvers]") {
    Fixture fx;
    const CMatrix A = signals::gaussian_matrix(9, 15, Field::Complex, 3).A;
    const CVector y = A * random_complex_vector(15, 4);
    const auto a = solve_analysis_cs(A, y, fx.op, 0.05);
    const auto b = solve_analysis_cs(A, y, fx.op, 0.05);
    CHECK(a.x_hat == b.x_hat);
    SolverConfig cfg;
    cfg.seed = 99;
    const auto c = solve_analysis_cs(A, y, fx.op, 0.05, cfg);
    CHECK(c.objective == Catch::Approx(a.objective).epsilon(1e-4));
}
