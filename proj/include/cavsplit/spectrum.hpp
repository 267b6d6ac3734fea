#pragma once

// Transmission sweeps, peak detection, the multi-branch resonance condition
// and the mode-index (avoided-crossing) bookkeeping built on top of them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cavsplit/cavity.hpp"
#include "cavsplit/constants.hpp"
#include "cavsplit/error.hpp"
#include "cavsplit/medium.hpp"

namespace cavsplit {

/// Uniformly sampled transmission. Frequencies are detunings from the atomic
/// line in Hz; sample i sits at start_hz + i * step_hz.
struct Spectrum {
    double start_hz = 0.0;
    double step_hz = 1.0;
    std::vector<double> values;
    std::optional<Scenario> params;

    std::size_t size() const { return values.size(); }
    double frequency(std::size_t i) const { return start_hz + static_cast<double>(i) * step_hz; }
    double stop_hz() const { return values.empty() ? start_hz : frequency(values.size() - 1); }

    std::vector<double> grid() const {
        std::vector<double> g(values.size());
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = frequency(i);
        return g;
    }
};

struct SweepWindow {
    double lo_hz = 0.0;
    double hi_hz = 0.0;
    double step_hz = 1e6;
};

/// Window of +/- half_width_fsr free spectral ranges around the line, trimmed
/// to a whole number of steps so that the grid is symmetric and contains 0.
inline SweepWindow symmetric_window(const CavityParams& cavity, double half_width_fsr = 3.3,
                                    double step_hz = 1e6) {
    if (!(step_hz > 0.0)) throw InvalidParameter("symmetric_window: step must be > 0");
    const double half = std::floor(half_width_fsr * fsr(cavity) / step_hz) * step_hz;
    return {-half, half, step_hz};
}

/// Sweep-step notices go here; the default sink drops them.
struct SweepDiagnostics {
    std::vector<std::string> notices;
};

/// Dense transmission on lo_hz, lo_hz + step, ... up to hi_hz.
inline Spectrum sweep(const SweepWindow& window, const Scenario& scenario,
                      SweepDiagnostics* diagnostics = nullptr) {
    if (!(window.step_hz > 0.0)) throw InvalidParameter("sweep: step must be > 0");
    if (!(window.hi_hz > window.lo_hz)) throw InvalidParameter("sweep: empty frequency range");
    scenario.validate();

    const double kappa = linewidth(scenario.cavity);
    if (diagnostics && window.step_hz > kappa / 10.0) {
        diagnostics->notices.push_back("sweep step " + std::to_string(window.step_hz) +
                                       " Hz exceeds kappa/10 = " + std::to_string(kappa / 10.0) +
                                       " Hz; peaks may be under-resolved");
    }

    const auto n = static_cast<std::size_t>(
        std::floor((window.hi_hz - window.lo_hz) / window.step_hz + 1e-9)) + 1;
    Spectrum s;
    s.start_hz = window.lo_hz;
    s.step_hz = window.step_hz;
    s.params = scenario;
    s.values.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        s.values[i] = transmission(to_angular(s.frequency(i)), scenario);
    return s;
}

// ---------------------------------------------------------------------------
// Peaks

enum class Branch { unsplit, lower, upper };

inline std::string_view to_string(Branch b) {
    switch (b) {
    case Branch::unsplit: return "unsplit";
    case Branch::lower: return "lower";
    case Branch::upper: return "upper";
    }
    return "unsplit";
}

inline Branch parse_branch(std::string_view text) {
    if (text == "lower") return Branch::lower;
    if (text == "upper") return Branch::upper;
    if (text == "unsplit") return Branch::unsplit;
    throw InvalidParameter("unknown branch '" + std::string(text) + "'");
}

struct Peak {
    double position_hz = 0.0;
    double height = 0.0;
    double fwhm_hz = 0.0;
    std::optional<int> mode_index;
    Branch branch = Branch::unsplit;
    bool ambiguous = false;

    bool operator==(const Peak&) const = default;
};

namespace detail {

// Distance from sample `i` to the half-height crossing in direction `dir`,
// linearly interpolated. Stops at a valley that never reaches half height, or
// at the edge of the data.
inline double half_width_side(const std::vector<double>& v, std::size_t i, double half, int dir,
                              double step) {
    const auto n = static_cast<long>(v.size());
    const auto start = static_cast<long>(i);
    long j = start;
    for (long k = j + dir; k >= 0 && k < n; j = k, k += dir) {
        const double a = v[static_cast<std::size_t>(j)];
        const double b = v[static_cast<std::size_t>(k)];
        if (b <= half) return (static_cast<double>(std::labs(j - start)) + (a - half) / (a - b)) * step;
        if (b > a) break;
    }
    return static_cast<double>(std::labs(j - start)) * step;
}

} // namespace detail

/// Local maxima above `threshold`, refined by a three-point parabola, with
/// FWHM from the half-height crossings. Sorted by position.
inline std::vector<Peak> find_peaks(const Spectrum& spectrum, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw InvalidParameter("find_peaks: threshold must lie in (0, 1)");
    std::vector<Peak> peaks;
    const auto& v = spectrum.values;
    if (v.size() < 3) return peaks;

    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (!(v[i] > v[i - 1] && v[i] >= v[i + 1]) || v[i] <= threshold) continue;
        // On a flat top only the first sample qualifies.
        const double y0 = v[i - 1];
        const double y1 = v[i];
        const double y2 = v[i + 1];
        const double curvature = y0 - 2.0 * y1 + y2;
        double offset = 0.0;
        double height = y1;
        if (curvature < 0.0) {
            offset = 0.5 * (y0 - y2) / curvature;
            offset = std::clamp(offset, -0.5, 0.5);
            height = y1 - 0.25 * (y0 - y2) * offset;
        }
        Peak p;
        p.position_hz = spectrum.frequency(i) + offset * spectrum.step_hz;
        p.height = height;
        const double half = 0.5 * height;
        p.fwhm_hz = detail::half_width_side(v, i, half, -1, spectrum.step_hz) +
                    detail::half_width_side(v, i, half, +1, spectrum.step_hz);
        if (!(p.fwhm_hz > 0.0)) p.fwhm_hz = spectrum.step_hz;
        peaks.push_back(p);
    }
    return peaks;
}

// ---------------------------------------------------------------------------
// Resonance roots

struct ResonanceRoot {
    int m = 0;                  // offset from the anchored order m0
    double position_hz = 0.0;
    double transmission = 0.0;
    double amplitude = 0.0;     // round-trip field amplitude at the root
    double phase_error = 0.0;   // phi - 2 pi (m0 + m), rad
    bool buried = false;        // transmission below the detection threshold
};

namespace detail {

inline double resonance_phase(double delta_hz, const Scenario& s) {
    const double delta = to_angular(delta_hz);
    const ComplexResponse r = response(delta, s.medium);
    return detail::round_trip_from(delta, r, s.cavity, s.medium, 0).phase;
}

// Scan step fine enough to separate the closely spaced roots near the line.
inline double root_scan_step(const Scenario& s, double sweep_step_hz) {
    double width = to_hz(s.medium.effective_width());
    if (s.medium.mode == ResponseMode::voigt && s.medium.doppler_width > 0.0)
        width = to_hz(std::max(s.medium.gamma_a, s.medium.doppler_width));
    return std::min(sweep_step_hz, width / 16.0);
}

inline double bisect_phase(const Scenario& s, double target, double lo, double hi, double f_lo) {
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double f_mid = resonance_phase(mid, s) - target;
        if (f_mid == 0.0) return mid;
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    const double e_lo = std::abs(resonance_phase(lo, s) - target);
    const double e_hi = std::abs(resonance_phase(hi, s) - target);
    return e_lo <= e_hi ? lo : hi;
}

} // namespace detail

/// All roots of phi(delta) = 2 pi (m0 + m), m in [m_lo, m_hi], inside
/// [lo_hz, hi_hz]. Sign changes are bracketed on a fine grid and bisected to
/// machine precision. Roots with transmission below `threshold` are kept and
/// flagged as buried.
inline std::vector<ResonanceRoot> solve_phase_resonances(int m_lo, int m_hi, const SweepWindow& window,
                                                         const Scenario& scenario,
                                                         double threshold = 1e-3) {
    if (m_lo > m_hi) throw InvalidParameter("solve_phase_resonances: empty mode range");
    if (!(window.hi_hz > window.lo_hz)) throw InvalidParameter("solve_phase_resonances: empty window");
    scenario.validate();

    const double step = detail::root_scan_step(scenario, window.step_hz > 0.0 ? window.step_hz : 1e6);
    const auto n = static_cast<std::size_t>(std::ceil((window.hi_hz - window.lo_hz) / step));

    std::vector<ResonanceRoot> roots;
    auto record = [&](int m, double position) {
        const double delta = to_angular(position);
        const ComplexResponse r = response(delta, scenario.medium);
        const RoundTrip rt = detail::round_trip_from(delta, r, scenario.cavity, scenario.medium, 0);
        ResonanceRoot root;
        root.m = m;
        root.position_hz = position;
        root.amplitude = rt.amplitude;
        root.phase_error = rt.phase - phys::two_pi * m;
        root.transmission = detail::airy_normalized(rt, std::exp(-r.alpha * scenario.medium.La),
                                                    scenario.cavity.rho());
        root.buried = root.transmission < threshold;
        roots.push_back(root);
    };

    double x0 = window.lo_hz;
    double c0 = detail::resonance_phase(x0, scenario) / phys::two_pi;
    for (std::size_t i = 1; i <= n; ++i) {
        const double x1 = std::min(window.lo_hz + static_cast<double>(i) * step, window.hi_hz);
        const double c1 = detail::resonance_phase(x1, scenario) / phys::two_pi;
        const double lo_c = std::min(c0, c1);
        const double hi_c = std::max(c0, c1);
        const int first = std::max(m_lo, static_cast<int>(std::ceil(lo_c)));
        const int last = std::min(m_hi, static_cast<int>(std::floor(hi_c)));
        for (int m = first; m <= last; ++m) {
            const double target = phys::two_pi * m;
            const double f0 = (c0 - m) * phys::two_pi;
            const double f1 = (c1 - m) * phys::two_pi;
            if (f0 == 0.0) {
                if (i == 1) record(m, x0); // interior grid zeros are recorded as the right end
                continue;
            }
            if (f1 == 0.0) {
                record(m, x1);
                continue;
            }
            if ((f0 < 0.0) != (f1 < 0.0))
                record(m, detail::bisect_phase(scenario, target, x0, x1, f0));
        }
        x0 = x1;
        c0 = c1;
    }
    std::sort(roots.begin(), roots.end(), [](const ResonanceRoot& a, const ResonanceRoot& b) {
        return a.position_hz < b.position_hz;
    });
    return roots;
}

/// Roots for every mode index whose resonance can fall inside the window.
inline std::vector<ResonanceRoot> solve_phase_resonances(const SweepWindow& window, const Scenario& scenario,
                                                         double threshold = 1e-3) {
    return solve_phase_resonances(std::numeric_limits<int>::min() / 2, std::numeric_limits<int>::max() / 2,
                                  window, scenario, threshold);
}

// ---------------------------------------------------------------------------
// Avoided-crossing map

struct BranchPoint {
    double position_hz = 0.0;
    double height = 0.0;
};

struct ModeBranches {
    std::vector<BranchPoint> lower; // detected peaks below the line
    std::vector<BranchPoint> upper; // detected peaks above the line
    std::vector<ResonanceRoot> roots;

    /// Detected on both sides of the atomic line.
    bool split() const { return !lower.empty() && !upper.empty(); }
};

struct CrossingMap {
    std::map<int, ModeBranches> modes;
    std::vector<Peak> peaks; // input peaks with mode_index / branch / ambiguous filled in
    std::size_t unassigned = 0;
    std::size_t ambiguous = 0;

    std::vector<int> split_modes() const {
        std::vector<int> out;
        for (const auto& [m, b] : modes)
            if (b.split()) out.push_back(m);
        return out;
    }
    std::size_t split_mode_count() const { return split_modes().size(); }
};

/// Assigns each peak the mode index of the nearest root (within `max_distance_hz`,
/// normally the cavity linewidth). Exact ties within 1 kHz go to the lower |m|.
/// A second root of a different m within reach marks the peak ambiguous.
inline CrossingMap avoided_crossing_map(std::vector<Peak> peaks, const std::vector<ResonanceRoot>& roots,
                                        double max_distance_hz) {
    constexpr double tie_hz = 1e3;
    CrossingMap map;
    for (const auto& r : roots) map.modes[r.m].roots.push_back(r);

    for (auto& p : peaks) {
        p.mode_index.reset();
        p.branch = Branch::unsplit;
        p.ambiguous = false;
        const ResonanceRoot* best = nullptr;
        double best_d = std::numeric_limits<double>::infinity();
        for (const auto& r : roots) {
            const double d = std::abs(r.position_hz - p.position_hz);
            if (d < best_d) {
                best_d = d;
                best = &r;
            }
        }
        if (best && best_d >= max_distance_hz) best = nullptr;
        if (best) {
            for (const auto& r : roots) {
                const double d = std::abs(r.position_hz - p.position_hz);
                if (d <= best_d + tie_hz && std::abs(r.m) < std::abs(best->m)) best = &r;
            }
        }
        if (!best) {
            ++map.unassigned;
            continue;
        }
        for (const auto& r : roots) {
            if (r.m != best->m && std::abs(r.position_hz - p.position_hz) < max_distance_hz) {
                p.ambiguous = true;
                break;
            }
        }
        if (p.ambiguous) ++map.ambiguous;
        p.mode_index = best->m;
        auto& mode = map.modes[best->m];
        (p.position_hz < 0.0 ? mode.lower : mode.upper).push_back({p.position_hz, p.height});
    }

    for (auto& p : peaks) {
        if (!p.mode_index) continue;
        const auto& mode = map.modes[*p.mode_index];
        if (mode.split()) p.branch = p.position_hz < 0.0 ? Branch::lower : Branch::upper;
    }
    map.peaks = std::move(peaks);
    return map;
}

// ---------------------------------------------------------------------------
// Splitting

struct Splitting {
    double g_sqrt_n_hz = 0.0;
    bool split = false;
    bool superstrong = false;

    bool operator==(const Splitting&) const = default;
};

/// Half the spacing of the innermost pair straddling the line. Peaks assigned
/// to m = 0 take precedence; otherwise any pair is used.
inline Splitting measure_splitting(const std::vector<Peak>& peaks, double fsr_hz) {
    auto innermost = [&](bool central_only) -> std::optional<std::pair<double, double>> {
        std::optional<double> left;
        std::optional<double> right;
        for (const auto& p : peaks) {
            if (central_only && !(p.mode_index && *p.mode_index == 0)) continue;
            if (p.position_hz < 0.0 && (!left || p.position_hz > *left)) left = p.position_hz;
            if (p.position_hz > 0.0 && (!right || p.position_hz < *right)) right = p.position_hz;
        }
        if (!left || !right) return std::nullopt;
        // an unsplit peak just off line center leaves the innermost pair lopsided
        if (std::abs(*left + *right) > 0.5 * (*right - *left)) return std::nullopt;
        return std::pair{*left, *right};
    };
    for (const auto& p : peaks)
        if (std::abs(p.position_hz) <= 1e-6 * fsr_hz) return {}; // peak on the line: unsplit
    auto pair = innermost(true);
    if (!pair) pair = innermost(false);
    Splitting out;
    if (!pair) return out;
    out.split = true;
    out.g_sqrt_n_hz = 0.5 * (pair->second - pair->first);
    out.superstrong = out.g_sqrt_n_hz >= fsr_hz;
    return out;
}

// ---------------------------------------------------------------------------
// Full analysis of one scenario

struct Analysis {
    Spectrum spectrum;
    std::vector<ResonanceRoot> roots;
    CrossingMap crossing;
    Splitting splitting;
    std::vector<std::string> notices;

    const std::vector<Peak>& peaks() const { return crossing.peaks; }
};

/// sweep -> find_peaks -> roots -> mode assignment -> splitting.
inline Analysis analyze(const Scenario& scenario, const SweepWindow& window, double threshold = 1e-3) {
    Analysis a;
    SweepDiagnostics diag;
    a.spectrum = sweep(window, scenario, &diag);
    a.notices = std::move(diag.notices);
    a.roots = solve_phase_resonances(window, scenario, threshold);
    a.crossing = avoided_crossing_map(find_peaks(a.spectrum, threshold), a.roots, linewidth(scenario.cavity));
    a.splitting = measure_splitting(a.crossing.peaks, fsr(scenario.cavity));
    return a;
}

} // namespace cavsplit
