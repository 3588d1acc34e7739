#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <masep/rapidity.hpp>
#include <masep/scaling.hpp>

using namespace masep;

TEST_CASE("quantum numbers of the gap state") {
    auto I4 = gap_quantum_numbers(4, -1);
    CHECK(I4 == std::vector<double>{-1.5, -0.5, 0.5, 2.5});
    auto I3 = gap_quantum_numbers(3, -1);
    CHECK(I3 == std::vector<double>{-1.0, 0.0, 2.0});
    auto I3p = gap_quantum_numbers(3, +1);
    CHECK(I3p == std::vector<double>{1.0, 0.0, -2.0});
}

TEST_CASE("SSEP closed form") {
    OneSpeciesSolver solver(0.7, 0.7);
    for (int L : {4, 8, 12}) {
        auto sol = solver.solve_gap(L, L / 2);
        CHECK(std::abs(sol.energy - Complex(-4 * 0.7 * std::pow(std::sin(M_PI / L), 2), 0)) < 1e-14);
        CHECK(std::abs(energy_from_roots(sol.roots) - sol.energy) < 1e-12);
    }
}

TEST_CASE("L=4 half filling at (2/3,1/3) reproduces the (-1)^2 gap") {
    OneSpeciesSolver solver(2.0 / 3, 1.0 / 3);
    auto sol = solver.solve_gap(4, 2);
    CHECK(sol.residual <= 1e-12);
    CHECK(std::abs(sol.energy - Complex(-1.0, 0)) < 1e-10);
    // rho = 1/2: the pair degenerates to a real value
    CHECK(std::abs(sol.energy.imag()) < 1e-10);
}

TEST_CASE("bethe gap agrees with diagonalization up to L = 14") {
    const double p = 0.8, q = 0.2;
    OneSpeciesSolver solver(p, q);
    for (int L : {8, 10, 12, 14}) {
        auto diag = second_largest(sector_spectrum(Sector::from_parts({L / 2, L / 2}), p, q));
        auto sol = solver.solve_gap(L, L / 2);
        INFO("L = ", L);
        CHECK(std::abs(sol.energy.real() - diag.Eplus.real()) < 1e-8);
        CHECK(std::abs(std::abs(sol.energy.imag()) - std::abs(diag.Eplus.imag())) < 1e-8);
        // the Bethe-equation residual in the polynomial form also vanishes
        double worst = 0;
        for (const Complex& r : bethe_residuals(sol.roots)) worst = std::max(worst, std::abs(r));
        CHECK(worst < 1e-9);
    }
    // away from half filling the pair carries the 2 pi |(p-q)(1-2 rho)| / L momentum term
    for (int L : {8, 12}) {
        int n1 = L / 4;
        auto diag = second_largest(sector_spectrum(Sector::from_parts({L - n1, n1}), p, q));
        auto sol = solver.solve_gap(L, n1);
        CHECK(std::abs(sol.energy.real() - diag.Eplus.real()) < 1e-8);
        CHECK(std::abs(std::abs(sol.energy.imag()) - std::abs(diag.Eplus.imag())) < 1e-8);
        CHECK(std::abs(sol.energy.imag()) > 1e-3);
    }
}

TEST_CASE("solver preconditions") {
    CHECK_THROWS_AS(OneSpeciesSolver(0.2, 0.8), InvalidArgument);
    OneSpeciesSolver solver(0.8, 0.2);
    CHECK_THROWS_AS(solver.solve_gap(8, 5), InvalidArgument);
    CHECK_THROWS_AS(solver.solve(8, 2, {0.25, 0.75}, {{0.5, 0.5}, {0.5, -0.5}}), InvalidArgument);
}

TEST_CASE("seed-free solve with explicit quantum numbers") {
    OneSpeciesSolver solver(0.8, 0.2);
    auto sol = solver.solve(10, 3, gap_quantum_numbers(3, -1));
    auto gap = solver.solve_gap(10, 3);
    CHECK(sol.residual <= 1e-12);
    CHECK(std::abs(sol.energy - gap.energy) < 1e-10);
}

TEST_CASE("rapidity transforms") {
    const double p = 0.8, q = 0.2;
    RapidityMap map(p, q);
    CHECK(map.delta() == doctest::Approx(std::cosh(map.eta())));
    CHECK(map.eta() == doctest::Approx(0.5 * std::log(p / q)));

    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        Complex lam(2.5 * u(rng), 2.5 * u(rng));
        Complex uu = map.lambda_to_u(lam);
        CHECK(std::abs(map.u_to_lambda(uu) - lam) < 1e-12 * std::max(1.0, std::abs(lam)));

        // energy identity under the map
        Complex direct = (1.0 - p * lam) * (1.0 - q * lam) / lam;
        CHECK(std::abs(map.energy_term(uu) - direct) < 1e-10 * std::max(1.0, std::abs(direct)));

        // u -> lambda -> u on the principal strip
        Complex u0(2.0 * u(rng), 0.8 * u(rng));
        CHECK(std::abs(map.lambda_to_u(map.u_to_lambda(u0)) - u0) < 1e-10);
    }

    // R~(u) entries match the asymmetric six-vertex weights
    for (int rep = 0; rep < 5; ++rep) {
        Complex uu(2.0 * u(rng), 0.7 * u(rng));
        auto R = map.r_matrix(uu, 3);
        for (int a = 1; a <= 3; ++a)
            for (int b = 1; b <= 3; ++b) {
                if (a == b) {
                    CHECK(std::abs(R.entry(a, a, a, a) - 1.0) < 1e-12);
                    continue;
                }
                CHECK(std::abs(R.entry(a, b, a, b) - map.weight_pass(uu, a < b)) < 1e-12);
                CHECK(std::abs(R.entry(b, a, a, b) - map.weight_swap(uu, a < b)) < 1e-12);
            }
        // difference-form Yang-Baxter equation
        Complex u2(2.0 * u(rng), 0.7 * u(rng));
        CHECK(map.ybe_residual(uu, u2, 3) < 1e-12);
    }

    CHECK_THROWS_AS(RapidityMap(0.8, 0.0), InvalidArgument);

    CHECK(std::abs(rapidity_transform(Complex(0.3, 0.1), RapidityDirection::lambda_to_momentum, p, q) -
                   (-Complex(0, 1) * std::log(p * Complex(0.3, 0.1) * std::exp(-map.eta())))) < 1e-14);
}

TEST_CASE("asymptotic predictions") {
    auto [ep, em] = asymptotic_prediction(100, 0.5, 0.8, 0.2);
    CHECK(ep.imag() == 0.0);  // rho = 1/2 is purely real
    CHECK(ep.real() == doctest::Approx(-2 * kpz_amplitude_constant * 0.6 * 0.5 / 1000.0));

    auto [e1, e2] = asymptotic_prediction(64, 0.25, 0.8, 0.2);
    auto [f1, f2] = asymptotic_prediction(64, 0.75, 0.8, 0.2);
    CHECK(std::abs(e1 - f1) < 1e-15);  // rho <-> 1-rho symmetry
    CHECK(e2 == std::conj(e1));

    auto [s1, s2] = asymptotic_prediction(50, 0.3, 0.6, 0.6);
    CHECK(s1.real() == doctest::Approx(-4 * M_PI * M_PI * 0.6 / 2500.0));
    CHECK(s1.imag() == 0.0);
}

TEST_CASE("gap_scan and fit_exponent") {
    // SSEP: exact formula, z -> 2
    auto ssep = gap_scan({64, 128, 256, 512, 1024, 2048, 4096}, 0.5, 0.7, 0.7, GapMethod::bethe);
    auto fit = fit_exponent(ssep);
    REQUIRE_FALSE(fit.refused);
    CHECK(std::abs(fit.z - 2.0) < 1e-3);
    for (const auto& s : ssep) CHECK(std::abs(s.Eplus.real() + 4 * 0.7 * std::pow(std::sin(M_PI / s.L), 2)) < 1e-14);

    // cross-validation of methods on one instance
    auto bd = gap_scan({12}, 0.5, 0.8, 0.2, GapMethod::bethe);
    auto dd = gap_scan({12}, 0.5, 0.8, 0.2, GapMethod::diagonalization);
    CHECK(std::abs(bd[0].Eplus.real() - dd[0].Eplus.real()) < 1e-8);

    // refusals
    CHECK(fit_exponent(gap_scan({8, 16}, 0.5, 0.7, 0.7, GapMethod::bethe)).refused);
    CHECK(fit_exponent(gap_scan({8, 10, 12, 14}, 0.5, 0.7, 0.7, GapMethod::bethe)).refused);  // < one decade
    CHECK_THROWS_AS(gap_scan({9}, 0.5, 0.8, 0.2, GapMethod::bethe), InvalidArgument);
}

TEST_CASE("next-leading string shrinks toward SSEP (L=7 ramp)") {
    Sector s = Sector::from_parts({2, 1, 3, 1});
    double prev = std::numeric_limits<double>::infinity();
    for (double v : {0.3, 0.2, 0.1, 0.0}) {
        double p = 0.5 + v / 2, q = 0.5 - v / 2;
        auto next = next_leading(s, p, q);
        double spread = 0;
        for (std::size_t i = 0; i < next.size(); ++i)
            for (std::size_t j = 0; j < next.size(); ++j) {
                spread = std::max(spread, std::abs(next[i].Eplus - next[j].Eplus));
                spread = std::max(spread, std::abs(next[i].Eplus - next[j].Eminus));
            }
        CHECK(spread < prev + 1e-15);
        prev = spread;
    }
    CHECK(prev < 1e-12);  // fully degenerate at p = q
}
