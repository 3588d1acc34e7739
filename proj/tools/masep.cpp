// Batch front end: spectra, genuine spectra, duality/inclusion/fixture
// verification, gap scans, one-species Bethe solving, Hasse export and
// stationary states. Outputs are deterministic for a fixed config and seed.

#include <CLI11.hpp>

#include <iostream>

#include <masep/bethe_solver.hpp>
#include <masep/io.hpp>
#include <masep/parallel.hpp>
#include <masep/rapidity.hpp>

using namespace masep;

namespace {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_capacity = 2, exit_missing = 3, exit_failed = 4 };

struct Options {
    int L = -1;
    std::string sector_text;
    std::string p_text = "0.5", q_text = "0.5";
    double tol_abs = 1e-8, tol_rel = 1e-8;
    std::size_t capacity = 6000;
    std::string format = "json";
    std::string out_path;
    std::string fixtures;
    std::string suite;
    std::string method = "kernel";
    bool genuine = false;
    bool next_leading_flag = false;
    int Lmin = 64, Lmax = 1024;
    double rho = 0.5;
    std::string scan_method = "bethe";
    int n1 = -1;
    unsigned seed = 1;
    int jobs = 1;

    double p() const { return to_double(parse_rational(p_text)); }
    double q() const { return to_double(parse_rational(q_text)); }
    Tolerance tol() const { return {tol_abs, tol_rel}; }

    Sector sector() const {
        if (sector_text.empty()) throw InvalidArgument("missing --sector");
        Sector s = parse_sector(sector_text, L);
        if (L >= 1 && s.L() != L) throw InvalidArgument("sector inconsistent with --L");
        return s;
    }
};

void emit(const Options& opt, const std::string& text) {
    if (opt.out_path.empty())
        std::cout << text;
    else
        write_text(opt.out_path, text);
}

int cmd_spectrum(const Options& opt) {
    Sector s = opt.sector();
    Spectrum spec = opt.genuine ? genuine_spectrum(s, opt.p(), opt.q(),
                                                   opt.method == "mobius" ? GenuineMethod::mobius
                                                                          : GenuineMethod::kernel,
                                                   opt.tol(), opt.capacity)
                                : sector_spectrum(s, opt.p(), opt.q(), opt.tol(), opt.capacity);
    if (opt.format == "csv") {
        std::string text = spectrum_to_csv(spec);
        if (opt.next_leading_flag && s.species() >= 2) {
            text += "next_leading_split,reE,imE\n";
            for (const auto& nl : next_leading(s, opt.p(), opt.q(), opt.tol(), opt.capacity))
                text += std::to_string(nl.split) + "," + format_double(nl.Eplus.real()) + "," +
                        format_double(nl.Eplus.imag()) + "\n";
        }
        emit(opt, text);
    } else {
        Json j = spectrum_to_json(spec);
        if (opt.next_leading_flag && s.species() >= 2) {
            Json nls = Json::array();
            for (const auto& nl : next_leading(s, opt.p(), opt.q(), opt.tol(), opt.capacity))
                nls.push_back({{"split", nl.split},
                               {"collapsed", nl.collapsed.str()},
                               {"E", {nl.Eplus.real(), nl.Eplus.imag()}}});
            j["next_leading"] = std::move(nls);
        }
        emit(opt, j.dump(2) + "\n");
    }
    return exit_ok;
}

int cmd_duality(const Options& opt) {
    auto rep = check_spectral_duality(opt.sector(), opt.p(), opt.q(), opt.tol(), opt.capacity);
    Json j = {{"sector", rep.sector.str()},
              {"complement", rep.complement.str()},
              {"spectra_match", rep.spectra_match},
              {"omega_rank", rep.omega_rank},
              {"omega_rank_ok", rep.omega_rank_ok},
              {"omega_kill_residual", rep.omega_kill_residual},
              {"worst_distance", rep.cert.worst_distance}};
    emit(opt, j.dump(2) + "\n");
    return rep.ok() ? exit_ok : exit_failed;
}

int verify_duality(const Options& opt, Json& report) {
    bool ok = true;
    int L = opt.L > 0 ? opt.L : 4;
    SpectrumCache cache(opt.p(), opt.q(), opt.tol(), opt.capacity);
    for (const Sector& s : enumerate_basic_sectors(L)) {
        auto rep = check_spectral_duality(s, opt.p(), opt.q(), opt.tol(), opt.capacity, &cache);
        // kernel and Mobius genuine spectra must agree as well
        Spectrum k = genuine_spectrum(s, opt.p(), opt.q(), GenuineMethod::kernel, opt.tol(), opt.capacity);
        Spectrum m =
            genuine_spectrum(s, opt.p(), opt.q(), GenuineMethod::mobius, opt.tol(), opt.capacity, &cache);
        bool methods_agree = multiset_equal(k, m, opt.tol()).ok;
        ok = ok && rep.ok() && methods_agree;
        report["checks"].push_back({{"sector", s.str()},
                                    {"spectra_match", rep.spectra_match},
                                    {"omega_rank_ok", rep.omega_rank_ok},
                                    {"methods_agree", methods_agree},
                                    {"worst_distance", rep.cert.worst_distance}});
    }
    return ok ? exit_ok : exit_failed;
}

int verify_inclusion(const Options& opt, Json& report) {
    bool ok = true;
    int L = opt.L > 0 ? opt.L : 5;
    SpectrumCache cache(opt.p(), opt.q(), opt.tol(), opt.capacity);
    for (const Sector& t : enumerate_basic_sectors(L))
        for (const Sector& s : lower_set(t)) {
            auto cert = multiset_contains(cache.get(t), cache.get(s), opt.tol());
            ok = ok && cert.ok;
            report["checks"].push_back(
                {{"lower", s.str()}, {"upper", t.str()}, {"ok", cert.ok}, {"worst", cert.worst_distance}});
        }
    return ok ? exit_ok : exit_failed;
}

int verify_gap_conjecture(const Options& opt, Json& report) {
    int L = opt.L > 0 ? opt.L : 5;
    std::vector<Sector> targets;
    for (const Sector& s : enumerate_basic_sectors(L))
        if (sector_dimension(s) <= BigInt(opt.capacity)) targets.push_back(s);
    std::vector<GapConjectureReport> reps(targets.size());
    parallel_for(
        targets.size(),
        [&](std::size_t i) { reps[i] = check_gap_conjecture(targets[i], opt.p(), opt.q(), opt.tol(), opt.capacity); },
        opt.jobs);
    bool ok = true;
    for (const auto& rep : reps) {
        ok = ok && rep.holds;
        Json entry = {{"sector", rep.sector.str()}, {"holds", rep.holds}, {"threshold", rep.threshold}};
        if (!rep.holds) entry["violator"] = {rep.violator.real(), rep.violator.imag()};
        report["checks"].push_back(std::move(entry));
    }
    return ok ? exit_ok : exit_failed;
}

int verify_ybe(const Options& opt, Json& report) {
    std::mt19937 rng(opt.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    bool ok = true;
    for (int N = 2; N <= 4; ++N)
        for (int rep = 0; rep < 4; ++rep) {
            Complex l1(u(rng), u(rng)), l2(u(rng), u(rng));
            double resid = ybe_residual(l1, l2, opt.p(), opt.q(), N);
            ok = ok && resid < 1e-12;
            report["checks"].push_back({{"N", N}, {"residual", resid}});
        }
    return ok ? exit_ok : exit_failed;
}

int verify_bethe_fixtures(const Options& opt, Json& report) {
    if (opt.fixtures.empty()) throw MissingInput("--fixtures required for the bethe-fixtures suite");
    auto rows = load_fixture_rows(opt.fixtures);
    bool ok = true;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.root_sets.size(); ++i) {
            const auto& roots = row.root_sets[i];
            double resid = 0;
            if (i == 0)
                for (const Complex& r : bethe_residuals(roots)) resid = std::max(resid, std::abs(r));
            double lam_err = polynomial_distance(transfer_eigenvalue_coefficients(roots), row.lambda_coeff);
            double e_err = std::abs(energy_from_roots(roots) - row.energy);
            bool row_ok = resid < 1e-5 && lam_err < 2e-5 && e_err < 1e-5;
            ok = ok && row_ok;
            report["checks"].push_back({{"sector", row.sector.str()},
                                        {"energy", {row.energy.real(), row.energy.imag()}},
                                        {"residual", resid},
                                        {"lambda_error", lam_err},
                                        {"energy_error", e_err},
                                        {"ok", row_ok}});
        }
    }
    return ok ? exit_ok : exit_failed;
}

int verify_stationary(const Options& opt, Json& report) {
    bool ok = true;
    int L = opt.L > 0 ? opt.L : 5;
    for (const Sector& s : enumerate_basic_sectors(L)) {
        auto basis = build_basis(s, opt.capacity);
        Eigen::MatrixXd H = dense(build_hamiltonian(basis, opt.p(), opt.q()));
        Eigen::VectorXd x = stationary_vector(s, opt.p(), opt.q(), opt.capacity);
        double resid = (H * x).cwiseAbs().maxCoeff() / std::max(1.0, H.cwiseAbs().maxCoeff());
        // stationary eigen-polynomial identity via the Bethe specialization
        auto coeff = transfer_eigenvalue_coefficients(stationary_roots(s, opt.p(), opt.q()));
        double poly_err =
            polynomial_distance(coeff, stationary_polynomial_coefficients(s, opt.p(), opt.q()));
        bool row_ok = resid <= 1e-10 && x.minCoeff() >= -1e-12 && poly_err < 1e-9;
        ok = ok && row_ok;
        report["checks"].push_back(
            {{"sector", s.str()}, {"residual", resid}, {"poly_error", poly_err}, {"ok", row_ok}});
    }
    return ok ? exit_ok : exit_failed;
}

int cmd_verify(const Options& opt) {
    Json report;
    report["suite"] = opt.suite;
    report["p"] = opt.p();
    report["q"] = opt.q();
    report["checks"] = Json::array();
    int code;
    if (opt.suite == "duality")
        code = verify_duality(opt, report);
    else if (opt.suite == "inclusion")
        code = verify_inclusion(opt, report);
    else if (opt.suite == "gap-conjecture")
        code = verify_gap_conjecture(opt, report);
    else if (opt.suite == "ybe")
        code = verify_ybe(opt, report);
    else if (opt.suite == "bethe-fixtures")
        code = verify_bethe_fixtures(opt, report);
    else if (opt.suite == "stationary")
        code = verify_stationary(opt, report);
    else
        throw InvalidArgument("unknown suite " + opt.suite);
    report["pass"] = (code == exit_ok);
    emit(opt, report.dump(2) + "\n");
    return code;
}

int cmd_scan(const Options& opt) {
    if (opt.Lmin > opt.Lmax) throw InvalidArgument("empty L range");
    std::vector<int> Ls;
    for (int L = opt.Lmin; L <= opt.Lmax; L *= 2) {
        double n = opt.rho * L;
        if (std::abs(n - std::lround(n)) > 1e-9) {
            std::cerr << "warning: skipping L=" << L << " (density not representable)\n";
            continue;
        }
        Ls.push_back(L);
    }
    if (Ls.empty()) throw InvalidArgument("no representable sizes in the L range");
    GapMethod method = opt.scan_method == "diag" ? GapMethod::diagonalization : GapMethod::bethe;
    auto samples = gap_scan(Ls, opt.rho, opt.p(), opt.q(), method, opt.capacity);
    auto fit = fit_exponent(samples);
    if (opt.format == "csv")
        emit(opt, scan_to_csv(samples));
    else
        emit(opt, scan_to_json(samples, fit).dump(2) + "\n");
    return exit_ok;
}

int cmd_bethe_verify(const Options& opt) {
    Options o = opt;
    o.suite = "bethe-fixtures";
    return cmd_verify(o);
}

int cmd_bethe_solve1(const Options& opt) {
    if (opt.L < 2 || opt.n1 < 1) throw InvalidArgument("bethe solve1 needs --L and --n1");
    OneSpeciesSolver solver(std::max(opt.p(), opt.q()), std::min(opt.p(), opt.q()));
    auto sol = solver.solve_gap(opt.L, std::min(opt.n1, opt.L - opt.n1));
    Json j = roots_to_json(sol.roots);
    j["E"] = {sol.energy.real(), sol.energy.imag()};
    j["residual"] = sol.residual;
    j["newton_iterations"] = sol.newton_iterations;
    emit(opt, j.dump(2) + "\n");
    return exit_ok;
}

int cmd_hasse(const Options& opt) {
    if (opt.L < 1) throw InvalidArgument("hasse needs --L");
    auto edges = hasse_cover_edges(opt.L);
    if (opt.format == "csv") {
        std::string text = "lower,upper\n";
        for (const auto& e : edges) text += e.lower.str() + ";" + e.upper.str() + "\n";
        emit(opt, text);
    } else {
        Json j;
        j["L"] = opt.L;
        Json list = Json::array();
        for (const auto& e : edges) list.push_back({{"lower", e.lower.str()}, {"upper", e.upper.str()}});
        j["edges"] = std::move(list);
        Json dims = Json::array();
        for (const Sector& s : enumerate_basic_sectors(opt.L))
            dims.push_back({{"sector", s.str()},
                            {"dim", sector_dimension(s).str()},
                            {"genuine_dim", genuine_dimension(s).str()}});
        j["sectors"] = std::move(dims);
        emit(opt, j.dump(2) + "\n");
    }
    return exit_ok;
}

int cmd_stationary(const Options& opt) {
    Sector s = opt.sector();
    auto basis = build_basis(s, opt.capacity);
    Eigen::VectorXd x = stationary_vector(s, opt.p(), opt.q(), opt.capacity);
    if (opt.format == "csv") {
        std::string text = "state,probability\n";
        for (int i = 0; i < basis->dim(); ++i) {
            std::string word;
            for (int v : basis->states[i]) word += std::to_string(v);
            text += word + "," + format_double(x(i)) + "\n";
        }
        emit(opt, text);
    } else {
        Json j;
        j["sector"] = s.str();
        j["p"] = opt.p();
        j["q"] = opt.q();
        Json probs = Json::array();
        for (int i = 0; i < basis->dim(); ++i) {
            std::string word;
            for (int v : basis->states[i]) word += std::to_string(v);
            probs.push_back({{"state", word}, {"probability", x(i)}});
        }
        j["stationary"] = std::move(probs);
        emit(opt, j.dump(2) + "\n");
    }
    return exit_ok;
}

void add_common(CLI::App* app, Options& opt) {
    app->add_option("--L", opt.L, "ring length");
    app->add_option("--sector", opt.sector_text, "sector as parts '2,1,3,1' or subset 's:2,3,6'");
    app->add_option("--p", opt.p_text, "right hop rate (decimal or fraction like 2/3)");
    app->add_option("--q", opt.q_text, "left hop rate");
    app->add_option("--tol-abs", opt.tol_abs, "absolute matching tolerance");
    app->add_option("--tol-rel", opt.tol_rel, "relative matching tolerance");
    app->add_option("--capacity", opt.capacity, "dense dimension cap (env MASEP_CAPACITY)");
    app->add_option("--format", opt.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app->add_option("--out", opt.out_path, "output file (stdout when omitted)");
    app->add_option("--seed", opt.seed, "seed for sampled checks");
    app->add_option("--jobs", opt.jobs, "worker pool size for sweeps");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-species ASEP spectra, duality checks and Bethe-ansatz tools"};
    app.require_subcommand(1);
    Options opt;
    if (const char* cap = std::getenv("MASEP_CAPACITY")) opt.capacity = std::strtoull(cap, nullptr, 10);

    auto* spectrum = app.add_subcommand("spectrum", "sector spectrum (optionally genuine / next-leading)");
    add_common(spectrum, opt);
    spectrum->add_flag("--genuine", opt.genuine, "emit the genuine spectrum");
    spectrum->add_option("--genuine-method", opt.method, "kernel or mobius")
        ->check(CLI::IsMember({"kernel", "mobius"}));
    spectrum->add_flag("--next-leading", opt.next_leading_flag, "append the next-leading pairs");

    auto* genuine = app.add_subcommand("genuine", "genuine spectrum of a sector");
    add_common(genuine, opt);
    genuine->add_option("--method", opt.method, "kernel or mobius")->check(CLI::IsMember({"kernel", "mobius"}));

    auto* duality = app.add_subcommand("duality", "spectral duality report for one sector");
    add_common(duality, opt);

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    add_common(verify, opt);
    verify->add_option("--suite", opt.suite, "duality|inclusion|gap-conjecture|ybe|bethe-fixtures|stationary")
        ->required();
    verify->add_option("--fixtures", opt.fixtures, "fixture file for bethe-fixtures");

    auto* scan = app.add_subcommand("scan", "gap scan over ring sizes with exponent fit");
    add_common(scan, opt);
    scan->add_option("--Lmin", opt.Lmin, "smallest ring (doubling up to Lmax)");
    scan->add_option("--Lmax", opt.Lmax, "largest ring");
    scan->add_option("--rho", opt.rho, "particle density");
    scan->add_option("--method", opt.scan_method, "bethe or diag")->check(CLI::IsMember({"bethe", "diag"}));

    auto* bethe = app.add_subcommand("bethe", "Bethe-ansatz tools");
    auto* bverify = bethe->add_subcommand("verify", "verify root fixtures");
    add_common(bverify, opt);
    bverify->add_option("--fixtures", opt.fixtures, "fixture file")->required();
    auto* bsolve = bethe->add_subcommand("solve1", "solve the one-species gap state");
    add_common(bsolve, opt);
    bsolve->add_option("--n1", opt.n1, "particle count")->required();

    auto* hasse = app.add_subcommand("hasse", "Hasse diagram and dimension table");
    add_common(hasse, opt);

    auto* stationary = app.add_subcommand("stationary", "stationary distribution of a sector");
    add_common(stationary, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;  // help/version exit clean
    }

    try {
        if (*spectrum) return cmd_spectrum(opt);
        if (*genuine) {
            opt.genuine = true;
            return cmd_spectrum(opt);
        }
        if (*duality) return cmd_duality(opt);
        if (*verify) return cmd_verify(opt);
        if (*scan) return cmd_scan(opt);
        if (*bethe) {
            if (*bverify) return cmd_bethe_verify(opt);
            if (*bsolve) return cmd_bethe_solve1(opt);
            std::cerr << "bethe needs a subcommand (verify | solve1)\n";
            return exit_usage;
        }
        if (*hasse) return cmd_hasse(opt);
        if (*stationary) return cmd_stationary(opt);
    } catch (const CapacityError& e) {
        std::cerr << "capacity: " << e.what() << "\n";
        return exit_capacity;
    } catch (const MissingInput& e) {
        std::cerr << "missing input: " << e.what() << "\n";
        return exit_missing;
    } catch (const InvalidArgument& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return exit_usage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_failed;
    }
    return exit_usage;
}
