#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "finlm/errors.hpp"
#include "finlm/util.hpp"

namespace finlm::train {

struct CurveEntry {
    std::uint64_t step = 0;
    double lr = 0.0;
    double loss = 0.0;

    bool operator==(const CurveEntry&) const = default;
};

struct LossCurve {
    std::vector<CurveEntry> entries;

    bool operator==(const LossCurve&) const = default;
};

// CSV with header step,lr,loss. '#' lines before the header carry run
// metadata and are skipped on read.
inline std::string loss_curve_csv(const LossCurve& curve) {
    std::string out = "step,lr,loss\n";
    for (const auto& e : curve.entries) {
        out += std::to_string(e.step) + "," + util::format_double(e.lr) + "," + util::format_double(e.loss) +
               "\n";
    }
    return out;
}

inline LossCurve parse_loss_curve_csv(const std::string& csv) {
    LossCurve curve;
    bool header_seen = false;
    for (const auto& line : util::split_lines(csv)) {
        std::string_view sv = util::trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        if (!header_seen) {
            if (sv != "step,lr,loss") throw Error(ErrorCode::ParseError, "expected header step,lr,loss");
            header_seen = true;
            continue;
        }
        std::size_t c1 = sv.find(',');
        std::size_t c2 = sv.find(',', c1 == std::string_view::npos ? c1 : c1 + 1);
        if (c1 == std::string_view::npos || c2 == std::string_view::npos)
            throw Error(ErrorCode::ParseError, "bad curve row: " + std::string(sv));
        CurveEntry e;
        e.step = std::stoull(std::string(sv.substr(0, c1)));
        e.lr = std::stod(std::string(sv.substr(c1 + 1, c2 - c1 - 1)));
        e.loss = std::stod(std::string(sv.substr(c2 + 1)));
        curve.entries.push_back(e);
    }
    if (!header_seen) throw Error(ErrorCode::ParseError, "missing curve header");
    return curve;
}

// ---------------------------------------------------------------------------
// Spike and saturation analysis

struct AnalyzeConfig {
    std::size_t spike_window = 25;   // trailing entries feeding the median
    double spike_ratio = 1.5;        // loss > ratio x trailing median => spike
    double saturation_tail = 0.2;    // fraction of entries in the tail fit
    double slope_tolerance = 1e-4;   // |slope| per step below which the tail is flat
};

struct CurveAnalysis {
    std::vector<std::uint64_t> spikes;  // step numbers flagged as spikes
    bool saturated = false;
    double tail_slope = 0.0;
};

namespace detail {

inline double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// Least-squares slope of loss against step over the given entries.
inline double fit_slope(const std::vector<CurveEntry>& entries, std::size_t begin) {
    std::size_t n = entries.size() - begin;
    if (n < 2) return 0.0;
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = begin; i < entries.size(); ++i) {
        mean_x += static_cast<double>(entries[i].step);
        mean_y += entries[i].loss;
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = begin; i < entries.size(); ++i) {
        double dx = static_cast<double>(entries[i].step) - mean_x;
        num += dx * (entries[i].loss - mean_y);
        den += dx * dx;
    }
    return den == 0.0 ? 0.0 : num / den;
}

}  // namespace detail

// Entry t is a spike iff loss_t > ratio x median(loss over the w preceding
// entries). Saturated iff the least-squares slope over the final fraction of
// entries stays within the tolerance.
inline CurveAnalysis analyze_curve(const LossCurve& curve, const AnalyzeConfig& config = {}) {
    const auto& entries = curve.entries;
    if (entries.size() < config.spike_window + 1)
        throw Error(ErrorCode::CurveTooShort,
                    "need at least " + std::to_string(config.spike_window + 1) + " entries, have " +
                        std::to_string(entries.size()));

    CurveAnalysis analysis;
    std::vector<double> window;
    window.reserve(config.spike_window);
    for (std::size_t t = config.spike_window; t < entries.size(); ++t) {
        window.clear();
        for (std::size_t i = t - config.spike_window; i < t; ++i) window.push_back(entries[i].loss);
        double med = detail::median_of(window);
        if (entries[t].loss > config.spike_ratio * med) analysis.spikes.push_back(entries[t].step);
    }

    std::size_t tail_count = static_cast<std::size_t>(
        std::ceil(config.saturation_tail * static_cast<double>(entries.size())));
    tail_count = std::max<std::size_t>(tail_count, 2);
    tail_count = std::min(tail_count, entries.size());
    analysis.tail_slope = detail::fit_slope(entries, entries.size() - tail_count);
    analysis.saturated = std::abs(analysis.tail_slope) < config.slope_tolerance;
    return analysis;
}

}  // namespace finlm::train
