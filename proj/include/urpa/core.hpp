#pragma once
// Domain types and the deterministic interval mathematics every other
// module consumes: temporal IoU, boundary relaxation, endpoint clamping.
//
// Intervals are closed [start, end] on the normalized timeline [0, 1];
// durations are end - start with no frame-rate semantics.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace urpa {

struct TimeInterval {
    double start = 0.0;
    double end = 0.0;

    // Direct construction rejects invalid pairs; use clamp_interval to
    // normalize raw model outputs instead.
    static TimeInterval make(double start, double end) {
        if (!(std::isfinite(start) && std::isfinite(end)))
            throw std::invalid_argument("interval endpoints must be finite");
        if (start < 0.0 || end > 1.0 || start > end)
            throw std::invalid_argument("interval must satisfy 0 <= start <= end <= 1");
        return TimeInterval{start, end};
    }

    double length() const { return end - start; }

    bool operator==(const TimeInterval& other) const {
        return start == other.start && end == other.end;
    }
};

enum class DomainTag { source, target };

inline std::string to_string(DomainTag tag) { return tag == DomainTag::source ? "source" : "target"; }

// One <video, query> pair. The profile is the per-frame similarity readout
// against the query; ground truth is absent on adaptation sets.
struct GroundingSample {
    std::string id;
    std::vector<double> similarity_profile;  // L values in [-1, 1]
    std::vector<double> query_embedding;     // d values
    std::optional<TimeInterval> gt_interval;
    DomainTag domain_tag = DomainTag::source;
};

enum class Split { train, test };

struct ClampedInterval {
    TimeInterval interval;
    bool swapped = false;  // endpoints arrived inverted and were reordered
};

// Clamps both endpoints into [0, 1]; inverted pairs are reordered and
// flagged so downstream diagnostics can count them.
inline ClampedInterval clamp_interval(double raw_start, double raw_end) {
    if (!(std::isfinite(raw_start) && std::isfinite(raw_end)))
        throw std::invalid_argument("clamp_interval: non-finite input");
    double s = std::clamp(raw_start, 0.0, 1.0);
    double e = std::clamp(raw_end, 0.0, 1.0);
    bool swapped = false;
    if (e < s) {
        std::swap(s, e);
        swapped = true;
    }
    return ClampedInterval{TimeInterval{s, e}, swapped};
}

// Temporal intersection-over-union. Degenerate unions: identical point
// intervals score 1 (continuity limit), anything else with a zero-length
// union scores 0.
inline double tiou(const TimeInterval& a, const TimeInterval& b) {
    const double inter = std::max(0.0, std::min(a.end, b.end) - std::max(a.start, b.start));
    const double uni = a.length() + b.length() - inter;
    if (uni <= 0.0) return (a == b) ? 1.0 : 0.0;
    return inter / uni;
}

// Extends both boundaries outward by fraction alpha of the event duration,
// saturating at the timeline edges.
inline TimeInterval relax(const TimeInterval& gt, double alpha) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("relax: alpha must be >= 0");
    const double d = gt.length();
    return TimeInterval{std::max(0.0, gt.start - alpha * d), std::min(1.0, gt.end + alpha * d)};
}

}  // namespace urpa
