#pragma once

#include <json.hpp>

#include <fstream>

#include "masep/bethe_poly.hpp"
#include "masep/scaling.hpp"

namespace masep {

using Json = nlohmann::json;

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Spectrum JSON: {"sector": "...", "p": .., "q": .., "eigenvalues":
/// [[re, im, multiplicity], ...]} sorted by (-re, im).
inline Json spectrum_to_json(const Spectrum& spec) {
    Json j;
    j["sector"] = spec.sector ? spec.sector->str() : "";
    j["p"] = spec.p;
    j["q"] = spec.q;
    Json evs = Json::array();
    for (const auto& [z, mult] : grouped_values(spec)) evs.push_back({z.real(), z.imag(), mult});
    j["eigenvalues"] = std::move(evs);
    return j;
}

inline std::string spectrum_to_csv(const Spectrum& spec) {
    std::string out = "re,im,multiplicity\n";
    for (const auto& [z, mult] : grouped_values(spec))
        out += format_double(z.real()) + "," + format_double(z.imag()) + "," + std::to_string(mult) + "\n";
    return out;
}

/// Coordinate-list CSV (row,col,value) of a sparse matrix.
template <class T>
std::string matrix_to_csv(const SparseMatrix<T>& m) {
    std::vector<std::tuple<int, int, double>> triplets;
    m.for_each([&](int r, int c, const T& v) { triplets.emplace_back(r, c, double(v)); });
    std::sort(triplets.begin(), triplets.end());
    std::string out = "row,col,value\n";
    for (const auto& [r, c, v] : triplets)
        out += std::to_string(r) + "," + std::to_string(c) + "," + format_double(v) + "\n";
    return out;
}

/// JSON envelope carrying the sector, rates and basis ordering of a matrix.
template <class T>
Json matrix_envelope(const SparseMatrix<T>& m, double p, double q) {
    Json j;
    if (m.domain_basis()) {
        j["sector"] = m.domain_basis()->sector.str();
        Json states = Json::array();
        for (const auto& k : m.domain_basis()->states) {
            std::string word;
            for (std::size_t i = 0; i < k.size(); ++i) word += (i ? "," : "") + std::to_string(k[i]);
            states.push_back(word);
        }
        j["basis"] = std::move(states);
    }
    j["p"] = p;
    j["q"] = q;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    return j;
}

inline Json roots_to_json(const BetheRootSet& roots) {
    Json j;
    j["L"] = roots.L;
    j["p"] = roots.p;
    j["q"] = roots.q;
    j["nesting"] = roots.nesting.a;
    j["counts"] = roots.counts;
    Json levels = Json::array();
    for (const auto& lv : roots.levels) {
        Json level = Json::array();
        for (const auto& r : lv) level.push_back({r.real(), r.imag()});
        levels.push_back(std::move(level));
    }
    j["levels"] = std::move(levels);
    return j;
}

inline BetheRootSet roots_from_json(const Json& j) {
    BetheRootSet roots;
    roots.L = j.at("L").get<int>();
    roots.p = j.at("p").get<double>();
    roots.q = j.at("q").get<double>();
    roots.nesting.a = j.at("nesting").get<std::vector<int>>();
    roots.counts = j.at("counts").get<std::vector<int>>();
    for (const auto& level : j.at("levels")) {
        std::vector<Complex> lv;
        for (const auto& r : level) lv.emplace_back(r.at(0).get<double>(), r.at(1).get<double>());
        roots.levels.push_back(std::move(lv));
    }
    roots.validate();
    return roots;
}

/// One row of the golden eigenvalue tables: exact polynomial/energy entries
/// are stored as rational [num, den] pairs, roots as decimals.
struct FixtureRow {
    Sector sector;
    std::vector<Complex> lambda_coeff;  // c_0..c_L
    Complex energy;
    bool exact_values = true;              // Lambda/E entries are exact rationals
    std::vector<BetheRootSet> root_sets;  // one, or two for duplicated rows
};

namespace detail {

inline Complex fixture_complex(const Json& entry) {
    // [re_num, re_den, im_num, im_den]
    return {entry.at(0).get<double>() / entry.at(1).get<double>(),
            entry.at(2).get<double>() / entry.at(3).get<double>()};
}

}  // namespace detail

inline std::vector<FixtureRow> load_fixture_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingInput("cannot open fixture file " + path);
    Json doc = Json::parse(in);
    const int L = doc.at("L").get<int>();
    const double p = doc.at("p").get<double>(), q = doc.at("q").get<double>();
    std::vector<FixtureRow> rows;
    for (const auto& jrow : doc.at("rows")) {
        FixtureRow row;
        row.sector = Sector::from_parts(jrow.at("sector").get<std::vector<int>>());
        for (const auto& c : jrow.at("lambda")) row.lambda_coeff.push_back(detail::fixture_complex(c));
        row.energy = detail::fixture_complex(jrow.at("energy"));
        if (jrow.contains("exact")) row.exact_values = jrow.at("exact").get<bool>();
        auto parse_levels = [&](const Json& jlevels) {
            BetheRootSet roots;
            roots.L = L;
            roots.p = p;
            roots.q = q;
            roots.nesting = NestingOrder::standard(L);
            roots.counts.assign(L, 0);
            auto parts = row.sector.parts();
            for (std::size_t i = 0; i < parts.size(); ++i) roots.counts[i] = parts[i];
            for (const auto& level : jlevels) {
                std::vector<Complex> lv;
                for (const auto& r : level) lv.emplace_back(r.at(0).get<double>(), r.at(1).get<double>());
                roots.levels.push_back(std::move(lv));
            }
            roots.validate();
            return roots;
        };
        row.root_sets.push_back(parse_levels(jrow.at("levels")));
        if (jrow.contains("alt_levels")) row.root_sets.push_back(parse_levels(jrow.at("alt_levels")));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

inline Json scan_to_json(const std::vector<GapSample>& samples, const FitResult& fit) {
    Json j;
    Json rows = Json::array();
    for (const auto& s : samples)
        rows.push_back({{"L", s.L},
                        {"rho", s.rho},
                        {"reE", s.Eplus.real()},
                        {"imE", s.Eplus.imag()},
                        {"method", s.method},
                        {"converged", s.converged}});
    j["samples"] = std::move(rows);
    j["fit"] = {{"refused", fit.refused},
                {"reason", fit.reason},
                {"z", fit.z},
                {"amplitude", fit.amplitude},
                {"rms_residual", fit.rms_residual},
                {"points_used", fit.points_used}};
    return j;
}

inline std::string scan_to_csv(const std::vector<GapSample>& samples) {
    std::string out = "L,rho,p,q,reE,imE,method\n";
    for (const auto& s : samples)
        out += std::to_string(s.L) + "," + format_double(s.rho) + "," + format_double(s.p) + "," +
               format_double(s.q) + "," + format_double(s.Eplus.real()) + "," + format_double(s.Eplus.imag()) +
               "," + s.method + "\n";
    return out;
}

}  // namespace masep
