#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "pearcey/contour.hpp"
#include "pearcey/linalg.hpp"
#include "pearcey/quadrature.hpp"
#include "pearcey/richardson.hpp"

using namespace pearcey;

TEST_CASE("gauss_legendre small rules") {
    auto& r1 = gauss_legendre(1);
    CHECK(r1.nodes[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(r1.weights[0] == doctest::Approx(2.0).epsilon(1e-15));

    auto& r2 = gauss_legendre(2);
    CHECK(r2.nodes[0] == doctest::Approx(-0.5773502691896258).epsilon(1e-14));
    CHECK(r2.nodes[1] == doctest::Approx(0.5773502691896258).epsilon(1e-14));
    CHECK(r2.weights[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r2.weights[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("gauss_legendre monomial exactness") {
    // oracle: int_{-1}^1 x^p dx = 2/(p+1) for even p, 0 otherwise
    auto& r = gauss_legendre(16);
    double v = 0.0;
    for (int i = 0; i < 16; ++i) v += r.weights[i] * std::pow(r.nodes[i], 14);
    CHECK(std::abs(v - 2.0 / 15.0) < 1e-14);

    for (int n : {3, 8, 16, 40}) {
        auto& g = gauss_legendre(n);
        double wsum = 0.0;
        for (double w : g.weights) wsum += w;
        CHECK(std::abs(wsum - 2.0) < 1e-13);
        for (int i = 0; i + 1 < n; ++i) CHECK(g.nodes[i] < g.nodes[i + 1]);
        for (int p = 0; p <= 2 * n - 1; ++p) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], p);
            double exact = (p % 2 == 0) ? 2.0 / (p + 1) : 0.0;
            CHECK(std::abs(s - exact) <= 1e-13 * std::max(1.0, std::abs(exact)));
        }
    }
}

TEST_CASE("integrate_contour residue and gaussian") {
    auto circle = ContourPath::circle(0.0, 1.0, -pi, pi);
    auto res = integrate_contour([](cplx t) { return 1.0 / t; }, circle, 1e-13);
    CHECK(std::abs(res.value - 2.0 * pi * iu) < 1e-12);

    auto zero = integrate_contour([](cplx t) { return t; }, circle, 1e-13);
    CHECK(std::abs(zero.value) < 1e-12);

    // oracle: erf-normalization, int e^{-t^2} over (-8,8) = sqrt(pi) to 1e-28
    auto line = ContourPath::line(-8.0, 8.0);
    auto g = integrate_contour([](cplx t) { return std::exp(-t * t); }, line, 1e-13);
    CHECK(std::abs(g.value - std::sqrt(pi)) < 1e-12);
}

TEST_CASE("integrate_contour path-splitting additivity") {
    auto f = [](cplx t) { return std::exp(t) / (t + 2.0); };
    auto one = ContourPath::line(cplx(-1.0, -0.5), cplx(2.0, 1.0));
    ContourPath two;
    cplx mid(0.7, 0.1);
    two.add_line(cplx(-1.0, -0.5), mid).add_line(mid, cplx(2.0, 1.0));
    auto a = integrate_contour(f, one, 1e-12), b = integrate_contour(f, two, 1e-12);
    CHECK(std::abs(a.value - b.value) < 2e-12);
}

TEST_CASE("closed contour of polynomial vanishes") {
    auto circle = ContourPath::circle(cplx(0.3, -0.2), 1.7, 0.0, 2.0 * pi);
    auto v = integrate_contour(
        [](cplx t) { return 3.0 * t * t * t - t * t + 5.0 * t - 7.0; }, circle, 1e-12);
    CHECK(std::abs(v.value) < 1e-11);
}

static cplx det_cofactor(const MatrixC& m) {
    int n = m.size();
    if (n == 1) return m(0, 0);
    cplx acc(0.0);
    double sign = 1.0;
    for (int j = 0; j < n; ++j) {
        MatrixC sub(n - 1);
        for (int r = 1; r < n; ++r) {
            int cc = 0;
            for (int c = 0; c < n; ++c)
                if (c != j) sub(r - 1, cc++) = m(r, c);
        }
        acc += sign * m(0, j) * det_cofactor(sub);
        sign = -sign;
    }
    return acc;
}

TEST_CASE("logdet: trivial and cofactor oracle") {
    CHECK(std::abs(logdet(MatrixC::identity(5))) < 1e-14);

    MatrixC d(2);
    d(0, 0) = 2.0;
    d(1, 1) = 3.0;
    CHECK(std::abs(logdet(d) - std::log(6.0)) < 1e-14);

    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 5; ++rep) {
        MatrixC m(6);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) m(i, j) = cplx(u(rng), u(rng)) + (i == j ? 3.0 : 0.0);
        cplx ld = logdet(m);
        cplx oracle = std::log(det_cofactor(m));
        double dphase = std::remainder(std::imag(ld) - std::imag(oracle), 2.0 * pi);
        CHECK(std::abs(std::real(ld) - std::real(oracle)) < 1e-10 * std::abs(std::real(oracle) + 1.0));
        CHECK(std::abs(dphase) < 1e-10);
    }
}

TEST_CASE("logdet is additive mod 2 pi i") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 8; ++rep) {
        MatrixC a(4), b(4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                a(i, j) = cplx(u(rng), u(rng)) + (i == j ? 2.5 : 0.0);
                b(i, j) = cplx(u(rng), u(rng)) + (i == j ? 2.5 : 0.0);
            }
        cplx lab = logdet(a * b), la = logdet(a), lb = logdet(b);
        CHECK(std::abs(std::real(lab) - std::real(la) - std::real(lb)) < 1e-9);
        CHECK(std::abs(std::remainder(std::imag(lab) - std::imag(la) - std::imag(lb), 2.0 * pi)) <
              1e-9);
    }
}

TEST_CASE("logdet real-symmetric input has tiny phase") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    MatrixC m(8);
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j <= i; ++j) {
            double v = u(rng);
            m(i, j) = v;
            m(j, i) = v;
        }
        m(i, i) += 2.0;
    }
    CHECK(std::abs(std::imag(logdet(m))) < 1e-10);
}

TEST_CASE("solve_linear: trivial, diagonal, adjugate oracle") {
    MatrixC b(2);
    b(0, 0) = 1.0;
    b(1, 1) = 1.0;
    MatrixC m(2);
    m(0, 0) = 2.0;
    m(1, 1) = 4.0;
    auto x = solve_linear(m, b);
    CHECK(std::abs(x(0, 0) - 0.5) < 1e-14);
    CHECK(std::abs(x(1, 1) - 0.25) < 1e-14);

    auto xi = solve_linear(MatrixC::identity(3), b = MatrixC::identity(3));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(std::abs(xi(i, j) - (i == j ? 1.0 : 0.0)) < 1e-15);

    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    MatrixC a(3), rhs(3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            a(i, j) = cplx(u(rng), u(rng)) + (i == j ? 2.0 : 0.0);
            rhs(i, j) = cplx(u(rng), u(rng));
        }
    auto sol = solve_linear(a, rhs);
    // adjugate/det oracle
    cplx det = det_cofactor(a);
    MatrixC adj(3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            MatrixC sub(2);
            int rr = 0;
            for (int r = 0; r < 3; ++r) {
                if (r == j) continue;
                int cc = 0;
                for (int c = 0; c < 3; ++c)
                    if (c != i) sub(rr, cc++) = a(r, c);
                ++rr;
            }
            adj(i, j) = (((i + j) % 2 == 0) ? 1.0 : -1.0) * det_cofactor(sub);
        }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            cplx oracle(0.0);
            for (int k = 0; k < 3; ++k) oracle += adj(i, k) * rhs(k, j) / det;
            CHECK(std::abs(sol(i, j) - oracle) < 1e-11);
        }
}

TEST_CASE("solve_linear rejects singular input") {
    MatrixC m(2);
    m(0, 0) = 1.0;
    m(0, 1) = 2.0;
    m(1, 0) = 2.0;
    m(1, 1) = 4.0;
    CHECK_THROWS_AS(solve_linear(m, MatrixC::identity(2)), singular_matrix_error);
}

TEST_CASE("extrapolate_to_zero models") {
    std::vector<std::pair<double, cplx>> s1{{0.1, 1.1}, {0.05, 1.05}, {0.025, 1.025}};
    auto e1 = extrapolate_to_zero(s1, 1.0);
    CHECK(std::abs(e1.value - 1.0) < 1e-12);

    std::vector<std::pair<double, cplx>> s2;
    for (double d : {0.1, 0.05, 0.025, 0.0125})
        s2.push_back({d, 2.0 + 3.0 * std::sqrt(d)});
    auto e2 = extrapolate_to_zero(s2, 0.5);
    CHECK(std::abs(e2.value - 2.0) < 1e-10);

    std::vector<std::pair<double, cplx>> bad{{0.1, 1.0}, {0.2, 1.0}, {0.05, 1.0}};
    CHECK_THROWS_AS(extrapolate_to_zero(bad, 1.0), std::invalid_argument);
}

TEST_CASE("contour path endpoint chaining and budget exhaustion") {
    ContourPath good;
    good.add_line(0.0, cplx(1.0, 0.0)).add_line(cplx(1.0, 0.0), cplx(1.0, 1.0));
    CHECK(good.endpoints_chain());
    ContourPath bad;
    bad.add_line(0.0, cplx(1.0, 0.0)).add_line(cplx(1.0, 1e-6), cplx(1.0, 1.0));
    CHECK(!bad.endpoints_chain());

    // near-singular integrand exhausts the subdivision budget; the error
    // carries the best estimate
    auto f = [](cplx t) { return 1.0 / (t - cplx(0.5, 1e-13)); };
    auto line = ContourPath::line(0.0, 1.0);
    try {
        integrate_contour(f, line, 1e-14);
        CHECK(false);
    } catch (const quadrature_error& e) {
        CHECK(std::isfinite(std::real(e.best_estimate)));
        CHECK(e.achieved_error > 0.0);
    }
}

TEST_CASE("gauss_legendre input gates") {
    CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
    CHECK_THROWS_AS(gauss_legendre(5000), std::invalid_argument);
    CHECK_NOTHROW(gauss_legendre(4096));
}
