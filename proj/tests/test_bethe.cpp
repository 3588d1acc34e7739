#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <masep/bethe_poly.hpp>
#include <masep/io.hpp>

using namespace masep;

namespace {
const double P = 2.0 / 3.0, Q = 1.0 / 3.0;

const std::vector<FixtureRow>& fixture_rows() {
    static std::vector<FixtureRow> rows = load_fixture_rows(MASEP_FIXTURE_PATH);
    return rows;
}
}  // namespace

TEST_CASE("weight function identities") {
    Complex l(0.7, 0.3), m(-0.4, 1.1);
    auto w = weight_functions(l, m, P, Q, 4);
    CHECK(std::abs(w.g - (w.f - Q / P)) < 1e-14);
    CHECK(std::abs(w.fbar - (P / Q) * w.f) < 1e-14);
    CHECK(std::abs(w.g - (1.0 - weight_f(m, l, P, Q))) < 1e-14);
    CHECK(std::abs(w.d - std::pow(P * l, 4)) < 1e-14);
    CHECK(std::abs(weight_f(1.0 / P, l, P, Q) - 1.0) < 1e-14);
    CHECK(std::abs(weight_f(l, 1.0 / P, P, Q) - Q / P) < 1e-14);

    // xi composition law
    Complex l1(0.2, 0.5), l2(-0.8, 0.1), mu(0.9, -0.4);
    Complex lhs = ybe_argument(ybe_argument(l1, mu, Complex(P), Complex(Q)),
                               ybe_argument(l2, mu, Complex(P), Complex(Q)), Complex(P), Complex(Q));
    CHECK(std::abs(lhs - ybe_argument(l1, l2, Complex(P), Complex(Q))) < 1e-12);

    CHECK_THROWS_AS(weight_f(l, l, P, Q), PoleError);
}

TEST_CASE("golden fixtures: residuals, eigen-polynomial, energy") {
    const auto& rows = fixture_rows();
    REQUIRE(rows.size() == 75);
    int checked_sets = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        for (std::size_t rs = 0; rs < row.root_sets.size(); ++rs) {
            const auto& roots = row.root_sets[rs];
            INFO("row ", i, " sector ", row.sector.str(), " E ", row.energy.real(), "+", row.energy.imag(), "i");
            if (rs == 0) {
                // the duplicated (alt) root data satisfies the joint pole-free
                // condition but not the per-level cleared equations, so the
                // equation residual applies to the primary rows only
                double worst = 0;
                for (const Complex& r : bethe_residuals(roots)) worst = std::max(worst, std::abs(r));
                CHECK(worst < 1e-5);
            }
            auto coeff = transfer_eigenvalue_coefficients(roots);
            CHECK(polynomial_distance(coeff, row.lambda_coeff) < 2e-5);
            CHECK(std::abs(energy_from_roots(roots) - row.energy) < 1e-5);
            ++checked_sets;
        }
    }
    CHECK(checked_sets == 78);  // two conjugate rows and one real row carry a second root set
}

TEST_CASE("duplicate root rows share one eigen-polynomial") {
    int dual_rows = 0;
    for (const auto& row : fixture_rows()) {
        if (row.root_sets.size() < 2) continue;
        ++dual_rows;
        auto a = transfer_eigenvalue_coefficients(row.root_sets[0]);
        auto b = transfer_eigenvalue_coefficients(row.root_sets[1]);
        CHECK(polynomial_distance(a, b) < 2e-5);
        CHECK_FALSE(is_regular(row.root_sets[0]));
        CHECK_FALSE(is_regular(row.root_sets[1]));
    }
    CHECK(dual_rows == 3);
}

TEST_CASE("transfer eigenvalue at explicit roots") {
    // sector (3,1), lambda^(1) = {-1.5}: Lambda = 8l^4/27 + 8l^3/9 - 4l^2/3 + 2l - 1
    BetheRootSet roots;
    roots.L = 4;
    roots.p = P;
    roots.q = Q;
    roots.nesting = NestingOrder::standard(4);
    roots.counts = {3, 1, 0, 0};
    roots.levels = {{{-1.5, 0.0}}, {}, {}};
    std::vector<Complex> expected = {-1.0, 2.0, -4.0 / 3.0, 8.0 / 9.0, 8.0 / 27.0};
    CHECK(polynomial_distance(transfer_eigenvalue_coefficients(roots), expected) < 1e-12);
    CHECK(std::abs(energy_from_roots(roots) - Complex(-2.0)) < 1e-14);

    // evaluation directly on top of a root goes through the two-sided limit
    double pole = -1;
    Complex at_root = transfer_eigenvalue(roots, Complex(-1.5, 0.0), &pole);
    Complex poly = 0;
    for (int k = 4; k >= 0; --k) poly = poly * Complex(-1.5) + expected[k];
    CHECK(std::abs(at_root - poly) < 1e-9);
    CHECK(pole < 1e-9);
}

TEST_CASE("energy examples") {
    auto single = [&](Complex root) {
        BetheRootSet roots;
        roots.L = 4;
        roots.p = P;
        roots.q = Q;
        roots.nesting = NestingOrder::standard(4);
        roots.counts = {3, 1, 0, 0};
        roots.levels = {{root}, {}, {}};
        return energy_from_roots(roots);
    };
    CHECK(std::abs(single({-1.5, 0}) - Complex(-2, 0)) < 1e-14);
    CHECK(std::abs(single({0, -1.5}) - Complex(-1, 1.0 / 3)) < 1e-14);
    CHECK(std::abs(single({0, 1.5}) - Complex(-1, -1.0 / 3)) < 1e-14);
    BetheRootSet zero;
    zero.L = 4;
    zero.p = P;
    zero.q = Q;
    zero.nesting = NestingOrder::standard(4);
    zero.counts = {3, 1, 0, 0};
    zero.levels = {{{0.0, 0.0}}, {}, {}};
    CHECK_THROWS_AS(energy_from_roots(zero), PoleError);
}

TEST_CASE("stationary specialization") {
    for (const Sector& s : enumerate_basic_sectors(4)) {
        BetheRootSet roots = stationary_roots(s, P, Q);
        if (s.species() > 1) CHECK_FALSE(is_regular(roots));  // the vacuum's empty root set is regular
        for (const Complex& r : bethe_residuals(roots)) CHECK(std::abs(r) < 1e-13);
        CHECK(std::abs(energy_from_roots(roots)) < 1e-13);
        auto coeff = transfer_eigenvalue_coefficients(roots);
        CHECK(polynomial_distance(coeff, stationary_polynomial_coefficients(s, P, Q)) < 1e-11);
    }
    // vacuum sector: empty roots, Lambda = 1 + 3 (2l/3)^4 = 16l^4/27 + 1
    auto vac = stationary_polynomial_coefficients(Sector::from_parts({4}), P, Q);
    CHECK(std::abs(vac[0] - 1.0) < 1e-15);
    CHECK(std::abs(vac[4] - 16.0 / 27.0) < 1e-15);
}

TEST_CASE("random non-root has a visible residual") {
    BetheRootSet roots;
    roots.L = 4;
    roots.p = P;
    roots.q = Q;
    roots.nesting = NestingOrder::standard(4);
    roots.counts = {3, 1, 0, 0};
    roots.levels = {{{0.37, 0.91}}, {}, {}};
    double worst = 0;
    for (const Complex& r : bethe_residuals(roots)) worst = std::max(worst, std::abs(r));
    CHECK(worst > 1e-2);
}

TEST_CASE("coincident roots off the stationary point are rejected") {
    BetheRootSet roots;
    roots.L = 4;
    roots.p = P;
    roots.q = Q;
    roots.nesting = NestingOrder::standard(4);
    roots.counts = {2, 2, 0, 0};
    roots.levels = {{{0.4, 0.2}, {0.4, 0.2}}, {}, {}};
    CHECK_THROWS_AS(bethe_residuals(roots), StructuralError);
}

TEST_CASE("extract_eigen_polynomials reproduces the (2,2) block") {
    Sector s = Sector::from_parts({2, 2});
    auto polys = extract_eigen_polynomials(s, P, Q);
    REQUIRE(polys.size() == 6);
    int matched = 0;
    for (const auto& row : fixture_rows()) {
        if (!(row.sector == s)) continue;
        double best = 1e9;
        for (const auto& poly : polys) best = std::min(best, polynomial_distance(poly.coeff, row.lambda_coeff));
        INFO("fixture E ", row.energy.real(), "+", row.energy.imag(), "i best ", best);
        CHECK(best < 1e-9);
        ++matched;
    }
    CHECK(matched == 6);

    // the set is closed under coefficient-wise conjugation, and every
    // Lambda(0) is an eigenvalue of the cyclic shift (modulus 1)
    for (const auto& poly : polys) {
        std::vector<Complex> conj;
        for (const auto& c : poly.coeff) conj.push_back(std::conj(c));
        double best = 1e9;
        for (const auto& other : polys) best = std::min(best, polynomial_distance(other.coeff, conj));
        CHECK(best < 1e-9);
        CHECK(std::abs(std::abs(poly.coeff[0]) - 1.0) < 1e-9);
    }

    // log-derivative at 0 reproduces the sector spectrum
    std::vector<Complex> energies;
    for (const auto& poly : polys) energies.push_back(poly.energy());
    CHECK(multiset_equal(sector_spectrum(s, P, Q), Spectrum::of(energies)).ok);

    // sum over polynomials equals the trace of T(lambda)
    auto basis = build_basis(s);
    for (Complex lam : {Complex(0.42, 0.17), Complex(-0.3, 0.6)}) {
        Complex trace = 0;
        auto T = build_transfer<Complex>(lam, basis, Complex(P), Complex(Q));
        for (int i = 0; i < basis->dim(); ++i) trace += T.at(i, i);
        Complex sum = 0;
        for (const auto& poly : polys) sum += poly(lam);
        CHECK(std::abs(sum - trace) < 1e-8 * std::abs(trace));
    }
}

TEST_CASE("stationary eigen-polynomial attaches to the stationary eigenvector") {
    for (int L = 2; L <= 5; ++L)
        for (const Sector& s : enumerate_basic_sectors(L)) {
            auto polys = extract_eigen_polynomials(s, 0.8, 0.2);
            auto expected = stationary_polynomial_coefficients(s, 0.8, 0.2);
            double best = 1e9;
            const EigenPolynomial* station = nullptr;
            for (const auto& poly : polys)
                if (std::abs(poly.energy()) < best) {
                    best = std::abs(poly.energy());
                    station = &poly;
                }
            REQUIRE(station != nullptr);
            CHECK(best < 1e-9);
            CHECK(polynomial_distance(station->coeff, expected) < 1e-9);
            CHECK(std::abs((*station)(Complex(0.0)) - 1.0) < 1e-9);  // |Lambda(0)| = 1
        }
}

TEST_CASE("verify_completeness on the fixtures") {
    const auto& rows = fixture_rows();
    auto report_for = [&](const std::vector<int>& parts) {
        Sector s = Sector::from_parts(parts);
        std::vector<BetheRootSet> roots;
        for (const auto& row : rows)
            if (row.sector == s)
                for (const auto& rs : row.root_sets) roots.push_back(rs);
        // six-digit printed roots bound the energy accuracy near 1e-5
        return verify_completeness(s, P, Q, roots, Tolerance{1e-4, 1e-4});
    };

    auto c22 = report_for({2, 2});
    CHECK(c22.regular_count == 5);
    CHECK(c22.genuine_dim == 5);
    CHECK(c22.regular_matches_genuine);
    CHECK(c22.regular_energies_match_genuine_spectrum);

    auto vac = report_for({4});
    CHECK(vac.regular_count == 1);  // the empty root set is regular
    CHECK(vac.genuine_dim == 1);
    CHECK(vac.regular_matches_genuine);

    auto c112 = report_for({1, 1, 2});
    CHECK(c112.regular_count == 3);
    CHECK(c112.regular_matches_genuine);
    CHECK(c112.regular_energies_match_genuine_spectrum);

    auto c1111 = report_for({1, 1, 1, 1});
    CHECK(c1111.regular_count == 1);
    CHECK(c1111.regular_matches_genuine);

    // with the corrected level-2 roots, (1,2,1) aligns as well
    auto c121 = report_for({1, 2, 1});
    CHECK(c121.regular_count == 5);
    CHECK(c121.genuine_dim == 5);
    CHECK(c121.regular_matches_genuine);
    CHECK(c121.regular_energies_match_genuine_spectrum);
}

TEST_CASE("reduction relation") {
    // N=3 data (1,1,2) at L=4: top level to 1/p merges into one-species (1,3)
    BetheRootSet roots;
    roots.L = 4;
    roots.p = P;
    roots.q = Q;
    roots.nesting = NestingOrder::standard(3);
    roots.counts = {1, 1, 2};
    roots.levels = {{{0.37, 0.45}, {-1.2, 0.3}, {2.1, -0.8}}, {{0.9, 0.1}, {-0.33, 0.7}}};
    auto rep = check_reduction(roots);
    CHECK(rep.ok);
    CHECK(rep.worst_residual < 1e-9);
    CHECK(std::abs(rep.energy_full - rep.energy_merged) < 1e-13);

    // N=2 degenerate case reduces to the vacuum polynomial
    BetheRootSet two;
    two.L = 4;
    two.p = P;
    two.q = Q;
    two.nesting = NestingOrder::standard(2);
    two.counts = {3, 1};
    two.levels = {{{0.6, 0.2}}};
    CHECK(check_reduction(two).ok);

    BetheRootSet bad = roots;
    bad.nesting.a = {2, 3, 1};
    CHECK_THROWS_AS(check_reduction(bad), InvalidArgument);
}

namespace {

// test-only multistart oracle: Newton on the raw cleared equation sides,
// keeping the regular roots (the degenerate all-1/p manifold would otherwise
// flood the search with spurious near-solutions)
std::vector<Complex> regular_energies_by_multistart(int L, double p, double q, const std::vector<int>& order,
                                                    const std::vector<int>& counts, int trials) {
    BetheRootSet proto;
    proto.L = L;
    proto.p = p;
    proto.q = q;
    proto.nesting.a = order;
    proto.counts = counts;
    auto sizes = proto.level_sizes();
    const int N = proto.N();
    int unknowns = 0;
    for (int l = 1; l <= N - 1; ++l) unknowns += sizes[l];
    auto assemble = [&](const Eigen::VectorXcd& z) {
        BetheRootSet cur = proto;
        cur.levels.clear();
        int at = 0;
        for (int l = 1; l <= N - 1; ++l) {
            std::vector<Complex> lv;
            for (int j = 0; j < sizes[l]; ++j) lv.push_back(z(at++));
            cur.levels.push_back(std::move(lv));
        }
        return cur;
    };
    auto raw = [&](const Eigen::VectorXcd& z, Eigen::VectorXcd& F) {
        BetheRootSet cur = assemble(z);
        int idx = 0;
        for (int l = 1; l <= N - 1; ++l)
            for (int j = 0; j < sizes[l]; ++j, ++idx) {
                auto sides = bethe_equation_sides(cur, l, j);
                F(idx) = sides.lhs - sides.rhs;
            }
    };
    std::vector<Complex> energies;
    std::mt19937 rng(20240);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    Eigen::VectorXcd z(unknowns), F(unknowns), Fp(unknowns);
    Eigen::MatrixXcd J(unknowns, unknowns);
    for (int trial = 0; trial < trials; ++trial) {
        for (int c = 0; c < unknowns; ++c) z(c) = Complex(u(rng), u(rng));
        for (int it = 0; it < 100; ++it) {
            raw(z, F);
            if (F.cwiseAbs().maxCoeff() < 1e-13) break;
            const double h = 1e-7;
            for (int c = 0; c < unknowns; ++c) {
                Complex save = z(c);
                z(c) += h;
                raw(z, Fp);
                z(c) = save;
                J.col(c) = (Fp - F) / h;
            }
            Eigen::VectorXcd step = J.fullPivLu().solve(-F);
            if (!step.allFinite()) break;
            double damp = std::min(1.0, 2.0 / (1e-12 + step.norm()));
            z += damp * step;
        }
        if (!z.allFinite()) continue;
        raw(z, F);
        if (F.cwiseAbs().maxCoeff() > 1e-10) continue;
        BetheRootSet cur = assemble(z);
        bool clean = true;  // distinct roots, within and across levels
        for (int la = 0; la < N - 1; ++la)
            for (int lb = la; lb < N - 1; ++lb)
                for (std::size_t a = 0; a < cur.levels[la].size(); ++a)
                    for (std::size_t b = (la == lb ? a + 1 : 0); b < cur.levels[lb].size(); ++b)
                        if (std::abs(cur.levels[la][a] - cur.levels[lb][b]) < 1e-6) clean = false;
        if (!clean || !is_regular(cur, 1e-3)) continue;
        Complex e = energy_from_roots(cur);
        if (!std::isfinite(e.real()) || std::abs(e) > 50) continue;
        bool seen = false;
        for (const auto& known : energies) seen = seen || std::abs(known - e) < 1e-6;
        if (!seen) energies.push_back(e);
    }
    sort_eigenvalues(energies);
    return energies;
}

}  // namespace

TEST_CASE("energy does not depend on the nesting order") {
    // Bethe roots themselves depend on the nesting order (different orders
    // produce regular representatives of different eigenstates), but every
    // energy computed from any order lands in the one sector spectrum.
    const double p = 0.8, q = 0.2;
    Tolerance loose{1e-6, 1e-6};
    Sector full = Sector::from_parts({1, 1, 1});
    Spectrum spec = sector_spectrum(full, p, q, loose);

    auto es = regular_energies_by_multistart(3, p, q, {1, 2, 3}, {1, 1, 1}, 1500);
    auto ew = regular_energies_by_multistart(3, p, q, {1, 3, 2}, {1, 1, 1}, 1500);
    REQUIRE(!es.empty());
    REQUIRE(!ew.empty());
    CHECK(multiset_contains(spec, Spectrum::of(es, loose), loose).ok);
    CHECK(multiset_contains(spec, Spectrum::of(ew, loose), loose).ok);

    // the standard order's regular roots carry the genuine spectrum {-L(p+q)}
    Spectrum genuine = genuine_spectrum(full, p, q, GenuineMethod::kernel, loose);
    CHECK(multiset_equal(genuine, Spectrum::of(es, loose), loose).ok);
    // the swapped order reaches the inherited one-species pair instead
    CHECK(ew.size() == 2);
    CHECK(std::abs(ew[0] - std::conj(ew[1])) < 1e-6);

    // one-species sector: the regular roots of the standard order carry the
    // genuine pair of (2,1)
    auto e12 = regular_energies_by_multistart(3, p, q, {1, 2}, {2, 1}, 800);
    Spectrum genuine21 = genuine_spectrum(Sector::from_parts({2, 1}), p, q, GenuineMethod::kernel, loose);
    CHECK(multiset_equal(genuine21, Spectrum::of(e12, loose), loose).ok);
}
