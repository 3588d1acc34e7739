#pragma once

#include "masep/bethe_solver.hpp"
#include "masep/spectra.hpp"

namespace masep {

/// Numerically evaluated KPZ amplitude constant of the one-species gap.
inline constexpr double kpz_amplitude_constant = 6.50918933794;

struct GapSample {
    int L = 0;
    double rho = 0, p = 0, q = 0;
    Complex Eplus, Eminus;
    std::string method;  // "diagonalization" | "bethe"
    bool converged = true;
};

enum class GapMethod { diagonalization, bethe };

/// Leading asymptotics of the second-largest pair:
/// +-2 pi i |(p-q)(1-2 rho)|/L - 2C|p-q| sqrt(rho(1-rho)) L^{-3/2} for p != q,
/// -4 pi^2 p / L^2 for p == q.
inline std::pair<Complex, Complex> asymptotic_prediction(int L, double rho, double p, double q) {
    if (p == q) {
        double re = -4.0 * M_PI * M_PI * p / (double(L) * L);
        return {Complex(re, 0), Complex(re, 0)};
    }
    double im = 2.0 * M_PI * std::abs((p - q) * (1.0 - 2.0 * rho)) / L;
    double re = -2.0 * kpz_amplitude_constant * std::abs(p - q) * std::sqrt(rho * (1.0 - rho)) /
                std::pow(double(L), 1.5);
    return {Complex(re, im), Complex(re, -im)};
}

/// One gap sample per ring size; Bethe non-convergence flags the sample and
/// the scan continues.
inline std::vector<GapSample> gap_scan(const std::vector<int>& L_list, double rho, double p, double q,
                                       GapMethod method, std::size_t capacity = 6000,
                                       OneSpeciesSolver* solver = nullptr) {
    std::vector<GapSample> out;
    std::optional<OneSpeciesSolver> local;
    if (method == GapMethod::bethe && !solver) {
        local.emplace(std::max(p, q), std::min(p, q));
        solver = &*local;
    }
    for (int L : L_list) {
        double n_real = rho * L;
        int n1 = int(std::lround(n_real));
        if (std::abs(n_real - n1) > 1e-9 || n1 < 1 || n1 >= L)
            throw InvalidArgument("density not representable at L=" + std::to_string(L));
        GapSample sample;
        sample.L = L;
        sample.rho = rho;
        sample.p = p;
        sample.q = q;
        if (method == GapMethod::diagonalization) {
            sample.method = "diagonalization";
            auto sl = second_largest(sector_spectrum(Sector::from_parts({L - n1, n1}), p, q, {}, capacity));
            sample.Eplus = sl.Eplus;
            sample.Eminus = sl.Eminus;
        } else {
            sample.method = "bethe";
            int m = std::min(n1, L - n1);  // particle-hole: Spec(m1,m2) = Spec(m2,m1)
            try {
                Complex e = solver->solve_gap(L, m, -1).energy;
                sample.Eplus = e.imag() >= 0 ? e : std::conj(e);
                sample.Eminus = std::conj(sample.Eplus);
            } catch (const NonConvergence&) {
                sample.converged = false;
            }
        }
        out.push_back(sample);
    }
    return out;
}

struct FitResult {
    bool refused = false;
    std::string reason;
    double z = 0;          // dynamical exponent (slope of -Re E vs L in log-log)
    double amplitude = 0;  // c in -Re E ~ c L^{-z}
    double rms_residual = 0;
    int points_used = 0;
};

/// ln(-Re E) vs ln L least squares on the largest half of the samples.
inline FitResult fit_exponent(std::vector<GapSample> samples) {
    FitResult fit;
    std::erase_if(samples, [](const GapSample& s) { return !s.converged; });
    std::sort(samples.begin(), samples.end(), [](const GapSample& a, const GapSample& b) { return a.L < b.L; });
    if (samples.size() < 4) {
        fit.refused = true;
        fit.reason = "need at least 4 samples";
        return fit;
    }
    if (samples.back().L < 10 * samples.front().L) {
        fit.refused = true;
        fit.reason = "samples span less than one decade in L";
        return fit;
    }
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        if (-samples[i + 1].Eplus.real() >= -samples[i].Eplus.real()) {
            fit.refused = true;
            fit.reason = "gap sequence is not monotone decreasing";
            return fit;
        }
    }
    std::size_t start = samples.size() / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = start; i < samples.size(); ++i) {
        double x = std::log(double(samples[i].L));
        double y = std::log(-samples[i].Eplus.real());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;
    fit.z = -slope;
    fit.amplitude = std::exp(intercept);
    fit.points_used = n;
    double ss = 0;
    for (std::size_t i = start; i < samples.size(); ++i) {
        double x = std::log(double(samples[i].L));
        double y = std::log(-samples[i].Eplus.real());
        ss += std::pow(y - (intercept + slope * x), 2);
    }
    fit.rms_residual = std::sqrt(ss / n);
    return fit;
}

/// KPZ amplitude with the leading correction removed: fit
/// c(L) = -Re E * L^{3/2} linearly in L^{-1/2} and take the intercept.
inline double extrapolate_kpz_amplitude(const std::vector<GapSample>& samples) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& s : samples) {
        if (!s.converged) continue;
        double x = 1.0 / std::sqrt(double(s.L));
        double y = -s.Eplus.real() * std::pow(double(s.L), 1.5);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) throw InvalidArgument("amplitude extrapolation needs at least 2 samples");
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return (sy - slope * sx) / n;
}

}  // namespace masep
