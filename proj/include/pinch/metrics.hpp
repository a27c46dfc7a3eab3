// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinchsim Authors
//
// Azimuth-cut post-processing: normalization, main/side lobe extraction,
// measurement CSV ingestion and export, and measured-vs-simulated comparison.
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "pinch/cut.hpp"
#include "pinch/error.hpp"

namespace pinch {

//! Half-power level, -10 log10(2) dB.
inline const double half_power_db = -10 * std::log10(2.0);

//! Shift so the peak sits at exactly 0 dB.
inline Cut1D normalize(Cut1D cut)
{
    detail::require(!cut.value_db.empty(), "cannot normalize an empty cut");
    const double peak = *std::max_element(cut.value_db.begin(), cut.value_db.end());
    for (double& v : cut.value_db)
        v -= peak;
    return cut;
}

struct SideLobe
{
    double angle_deg;
    double level_db; // relative to the main peak (<= 0)
};

struct LobeReport
{
    double peak_angle_deg;
    double peak_value_db;
    double hpbw_deg;               // width at half power
    double extent_start_deg;       // main lobe, counter-clockwise from start to end
    double extent_end_deg;
    bool extent_full_circle = false;
    std::vector<SideLobe> side_lobes;
};

namespace detail {

inline std::size_t wrap(long i, std::size_t n)
{
    const long m = static_cast<long>(n);
    return static_cast<std::size_t>(((i % m) + m) % m);
}

inline std::size_t argmax_first(const std::vector<double>& v)
{
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

//! Contiguous run of samples >= level around `peak`, as offsets [-left, +right].
struct Run
{
    std::size_t left = 0;
    std::size_t right = 0;
    bool full = false;
};

inline Run run_above(const std::vector<double>& v, std::size_t peak, double level)
{
    const std::size_t n = v.size();
    Run r;
    while (r.left + 1 < n && v[wrap(static_cast<long>(peak) - static_cast<long>(r.left) - 1, n)] >= level)
        ++r.left;
    if (r.left + 1 >= n)
    {
        r.full = true;
        return r;
    }
    while (r.left + r.right + 1 < n && v[wrap(static_cast<long>(peak + r.right + 1), n)] >= level)
        ++r.right;
    r.full = (r.left + r.right + 1 >= n);
    return r;
}

//! Fractional offset (in samples) beyond index `inside` toward `outside`
//! where the linear interpolant crosses `level`.
inline double crossing_fraction(double inside, double outside, double level)
{
    if (inside == outside)
        return 0;
    return std::clamp((inside - level) / (inside - outside), 0.0, 1.0);
}

inline double wrap_deg(double a)
{
    a = std::fmod(a, 360.0);
    return a < 0 ? a + 360.0 : a;
}

} // namespace detail

/*!
 * Main lobe of a cut.
 *
 * The peak is the first maximum; the extent is the maximal circular run of
 * samples at or above peak + threshold_db containing the peak. The
 * half-power beamwidth uses linear interpolation of the crossings.
 */
inline LobeReport main_lobe(const Cut1D& cut, double threshold_db = -10.0)
{
    validate_cut(cut);
    detail::require(threshold_db < 0, "main lobe threshold must be negative");
    const auto& v = cut.value_db;
    const std::size_t n = v.size();
    const double step = cut.step_deg();
    const std::size_t peak = detail::argmax_first(v);

    LobeReport rep{};
    rep.peak_angle_deg = cut.phi_deg[peak];
    rep.peak_value_db = v[peak];

    const auto ext = detail::run_above(v, peak, v[peak] + threshold_db);
    if (ext.full)
    {
        rep.extent_full_circle = true;
        rep.extent_start_deg = cut.phi_deg.front();
        rep.extent_end_deg = cut.phi_deg.back();
    }
    else
    {
        rep.extent_start_deg = cut.phi_deg[detail::wrap(static_cast<long>(peak) - static_cast<long>(ext.left), n)];
        rep.extent_end_deg = cut.phi_deg[detail::wrap(static_cast<long>(peak + ext.right), n)];
    }

    const double hp_level = v[peak] + half_power_db;
    const auto hp = detail::run_above(v, peak, hp_level);
    if (hp.full)
    {
        rep.hpbw_deg = 360.0;
    }
    else
    {
        const std::size_t li = detail::wrap(static_cast<long>(peak) - static_cast<long>(hp.left), n);
        const std::size_t lo = detail::wrap(static_cast<long>(li) - 1, n);
        const std::size_t ri = detail::wrap(static_cast<long>(peak + hp.right), n);
        const std::size_t ro = detail::wrap(static_cast<long>(ri) + 1, n);
        const double left = detail::crossing_fraction(v[li], v[lo], hp_level);
        const double right = detail::crossing_fraction(v[ri], v[ro], hp_level);
        rep.hpbw_deg = (static_cast<double>(hp.left + hp.right) + left + right) * step;
    }
    return rep;
}

/*!
 * Local maxima outside the main-lobe extent whose topographic prominence is
 * at least `prominence_db`, sorted by level (descending). Plateaus report
 * their middle sample.
 */
inline std::vector<SideLobe>
side_lobes(const Cut1D& cut, double prominence_db = 1.0, double extent_threshold_db = -10.0)
{
    detail::require(prominence_db > 0, "side lobe prominence must be positive");
    const LobeReport main = main_lobe(cut, extent_threshold_db);
    std::vector<SideLobe> out;
    if (main.extent_full_circle)
        return out;

    const auto& v = cut.value_db;
    const std::size_t n = v.size();
    const std::size_t peak = detail::argmax_first(v);
    const auto ext = detail::run_above(v, peak, v[peak] + extent_threshold_db);
    std::vector<bool> in_main(n, false);
    for (long k = -static_cast<long>(ext.left); k <= static_cast<long>(ext.right); ++k)
        in_main[detail::wrap(static_cast<long>(peak) + k, n)] = true;

    for (std::size_t i = 0; i < n; ++i)
    {
        // Start of a plateau whose left neighbor is strictly lower.
        if (!(v[detail::wrap(static_cast<long>(i) - 1, n)] < v[i]))
            continue;
        std::size_t len = 1;
        while (len < n && v[detail::wrap(static_cast<long>(i + len), n)] == v[i])
            ++len;
        if (len >= n || !(v[detail::wrap(static_cast<long>(i + len), n)] < v[i]))
            continue;
        const std::size_t mid = detail::wrap(static_cast<long>(i + (len - 1) / 2), n);
        if (in_main[mid])
            continue;

        // Prominence: walk each way until a strictly higher sample, tracking
        // the lowest value passed; the key col is the higher of the two minima.
        const double h = v[i];
        auto walk = [&](long dir) {
            double lowest = h;
            const long start = dir > 0 ? static_cast<long>(i + len - 1) : static_cast<long>(i);
            for (long k = 1; k < static_cast<long>(n); ++k)
            {
                const double x = v[detail::wrap(start + dir * k, n)];
                if (x > h)
                    return lowest;
                lowest = std::min(lowest, x);
            }
            return lowest;
        };
        const double col = std::max(walk(-1), walk(+1));
        if (h - col >= prominence_db)
            out.push_back({cut.phi_deg[mid], h - main.peak_value_db});
    }
    std::sort(out.begin(), out.end(), [](const SideLobe& a, const SideLobe& b) {
        if (a.level_db != b.level_db)
            return a.level_db > b.level_db;
        return a.angle_deg < b.angle_deg;
    });
    return out;
}

//! main_lobe() with side_lobes() filled in.
inline LobeReport
lobe_report(const Cut1D& cut, double extent_threshold_db = -10.0, double prominence_db = 1.0)
{
    LobeReport rep = main_lobe(cut, extent_threshold_db);
    rep.side_lobes = side_lobes(cut, prominence_db, extent_threshold_db);
    return rep;
}

//! Peak level minus the strongest side lobe, dB; nullopt without side lobes.
inline std::optional<double> peak_to_side_lobe_db(const LobeReport& rep)
{
    if (rep.side_lobes.empty())
        return std::nullopt;
    return -rep.side_lobes.front().level_db;
}

//---------------------------------------------------------------------------//
// CSV I/O
//---------------------------------------------------------------------------//

//! Fixed six-decimal formatting; negative zero prints as zero.
inline std::string format_fixed6(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    std::string s(buf);
    if (s == "-0.000000")
        s = "0.000000";
    return s;
}

inline constexpr std::string_view cut_csv_header = "phi_deg,directivity_dbi";
inline constexpr std::string_view measurement_csv_header = "angle_deg,s21_db";

inline void write_cut_csv(const Cut1D& cut, std::ostream& os)
{
    validate_cut(cut);
    os << cut_csv_header << '\n';
    for (std::size_t k = 0; k < cut.size(); ++k)
        os << format_fixed6(cut.phi_deg[k]) << ',' << format_fixed6(cut.value_db[k]) << '\n';
}

namespace detail {
inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline bool parse_double(std::string_view s, double& out)
{
    s = trim(s);
    if (s.empty())
        return false;
    if (s.front() == '+')
        s.remove_prefix(1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size() && std::isfinite(out);
}
} // namespace detail

/*!
 * Read a rotary-sweep measurement and resample it onto the canonical grid
 * phi_k = k * step_deg by circular linear interpolation.
 *
 * Accepts the `angle_deg,s21_db` header (or the cut export header). Angles
 * must be strictly ascending and span less than a full turn.
 */
inline Cut1D ingest_measurement(std::istream& is, double step_deg = 1.0)
{
    detail::require(step_deg > 0 && step_deg <= 90, "canonical grid step must be in (0, 90] deg");
    const double count = 360.0 / step_deg;
    detail::require(std::abs(count - std::round(count)) < 1e-9, "canonical grid step must divide 360 deg");

    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    std::vector<double> ang;
    std::vector<double> val;
    while (std::getline(is, line))
    {
        ++lineno;
        const std::string_view text = detail::trim(line);
        if (!have_header)
        {
            if (text != measurement_csv_header && text != cut_csv_header)
                throw ParseError(lineno, "expected header '" + std::string(measurement_csv_header) + "'");
            have_header = true;
            continue;
        }
        if (text.empty())
            continue;
        const auto comma = text.find(',');
        double a = 0;
        double v = 0;
        if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos
            || !detail::parse_double(text.substr(0, comma), a) || !detail::parse_double(text.substr(comma + 1), v))
        {
            throw ParseError(lineno, "malformed row '" + std::string(text) + "'");
        }
        if (!ang.empty())
        {
            if (a == ang.back())
                throw ParseError(lineno, "duplicate angle " + format_fixed6(a));
            if (a < ang.back())
                throw ParseError(lineno, "angles are not ascending");
        }
        ang.push_back(a);
        val.push_back(v);
    }
    if (!have_header)
        throw ParseError(lineno + 1, "missing header");
    if (ang.size() < 8)
        throw ParseError(lineno, "need at least 8 samples, got " + std::to_string(ang.size()));
    if (ang.back() - ang.front() >= 360.0)
        throw ParseError(lineno, "angles span a full turn or more");

    // Circular order of the samples on [0, 360).
    std::vector<std::size_t> order(ang.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::vector<double> wrapped(ang.size());
    for (std::size_t i = 0; i < ang.size(); ++i)
        wrapped[i] = detail::wrap_deg(ang[i]);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return wrapped[a] < wrapped[b]; });
    std::vector<double> pa;
    std::vector<double> pv;
    for (std::size_t i : order)
    {
        pa.push_back(wrapped[i]);
        pv.push_back(val[i]);
    }

    const auto n = static_cast<std::size_t>(std::llround(count));
    Cut1D cut;
    cut.label = CutLabel::measured;
    cut.phi_deg = uniform_phi_grid_deg(n);
    cut.value_db.resize(n);
    const std::size_t m = pa.size();
    for (std::size_t k = 0; k < n; ++k)
    {
        const double x = cut.phi_deg[k];
        // First sample strictly greater than x; interval [hi-1, hi] circularly.
        const auto hi_it = std::upper_bound(pa.begin(), pa.end(), x);
        const std::size_t hi = static_cast<std::size_t>(hi_it - pa.begin()) % m;
        const std::size_t lo = (hi + m - 1) % m;
        double a0 = pa[lo];
        double a1 = pa[hi];
        double xx = x;
        if (a1 <= a0)
            a1 += 360.0;
        if (xx < a0)
            xx += 360.0;
        const double t = (xx - a0) / (a1 - a0);
        cut.value_db[k] = t == 0 ? pv[lo] : pv[lo] + t * (pv[hi] - pv[lo]);
    }
    return cut;
}

//---------------------------------------------------------------------------//
// Comparison
//---------------------------------------------------------------------------//

struct Comparison
{
    double phi_offset_deg;       // rotation applied to b to align it with a
    double peak_angle_error_deg; // residual after the offset
    double rmse_db;
    std::size_t window_samples;
};

/*!
 * Align `b` to `a` by the grid-resolution circular shift minimizing RMSE of
 * the normalized cuts over the samples within window_db of either peak.
 * Levels below the window are clamped to its floor, so a lobe present in
 * only one cut counts as a mismatch.
 * The reported offset d means b(phi + d) best matches a(phi).
 */
inline Comparison compare(const Cut1D& a, const Cut1D& b, double window_db = 10.0)
{
    validate_cut(a);
    validate_cut(b);
    detail::require(a.size() == b.size(), "cuts must share a grid");
    detail::require(window_db > 0, "comparison window must be positive");
    const Cut1D na = normalize(a);
    const Cut1D nb = normalize(b);
    const std::size_t n = na.size();
    const double step = na.step_deg();

    // Candidate shifts ordered by (|shift|, shift) so ties favour small offsets.
    std::vector<long> shifts;
    for (long s = -static_cast<long>((n - 1) / 2); s <= static_cast<long>(n / 2); ++s)
        shifts.push_back(s);
    std::stable_sort(shifts.begin(), shifts.end(), [](long x, long y) {
        if (std::abs(x) != std::abs(y))
            return std::abs(x) < std::abs(y);
        return x < y;
    });

    std::optional<Comparison> best;
    long best_shift = 0;
    for (long s : shifts)
    {
        double sq = 0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i)
        {
            const double va = std::max(na.value_db[i], -window_db);
            const double vb = std::max(nb.value_db[detail::wrap(static_cast<long>(i) + s, n)], -window_db);
            if (va <= -window_db && vb <= -window_db)
                continue;
            const double d = va - vb;
            sq += d * d;
            ++count;
        }
        if (count == 0)
            continue;
        const double rmse = std::sqrt(sq / static_cast<double>(count));
        if (!best || rmse < best->rmse_db)
        {
            best = Comparison{static_cast<double>(s) * step, 0, rmse, count};
            best_shift = s;
        }
    }
    if (!best)
        throw NumericalError("comparison window is empty at every offset");

    const std::size_t pa = detail::argmax_first(na.value_db);
    const std::size_t pb = detail::argmax_first(nb.value_db);
    double err = (static_cast<double>(pb) - static_cast<double>(best_shift) - static_cast<double>(pa)) * step;
    err = std::fmod(err, 360.0);
    if (err > 180.0)
        err -= 360.0;
    if (err <= -180.0)
        err += 360.0;
    best->peak_angle_error_deg = err;
    return *best;
}

} // namespace pinch
