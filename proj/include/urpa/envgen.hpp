#pragma once
// Synthetic temporal-grounding dataset generator with controllable
// distribution shift, plus the line-delimited dataset file format.
//
// Each sample hides one true event interval. Event duration is Beta
// distributed, placement is uniform, and the similarity profile is an
// indicator of the event corrupted by Gaussian noise and clamped to
// [-1, 1]. Stored ground truth is the true interval shifted by
// annotation_bias (a fraction of the duration) and clamped, which
// operationalizes systematic labelling bias. Four independent knobs
// realize source/target shift: duration shape, annotation bias, feature
// noise, and a rotation applied to the class-mean query embeddings.
//
// All stored floats are quantized to 9 significant digits at generation
// time so a write/read cycle is an exact identity.

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "urpa/core.hpp"
#include "urpa/parallel.hpp"
#include "urpa/rng.hpp"
#include "urpa/util.hpp"

namespace urpa {

struct DomainSpec {
    double duration_shape_a = 5.0;  // Beta parameters for event duration
    double duration_shape_b = 5.0;
    double annotation_bias = 0.0;   // label shift, fraction of duration
    double feature_noise_sigma = 0.0;
    double class_rotation_angle = 0.0;  // radians, applied to class means
    int n_query_classes = 4;
    int profile_length = 64;  // L
    int embed_dim = 8;        // d

    void validate() const {
        if (!(duration_shape_a > 0.0) || !(duration_shape_b > 0.0))
            throw std::invalid_argument("duration shape parameters must be positive");
        if (!(feature_noise_sigma >= 0.0))
            throw std::invalid_argument("feature_noise_sigma must be >= 0");
        if (!std::isfinite(annotation_bias) || !std::isfinite(class_rotation_angle))
            throw std::invalid_argument("domain spec has non-finite fields");
        if (profile_length < 8) throw std::invalid_argument("profile_length must be >= 8");
        if (embed_dim < 4) throw std::invalid_argument("embed_dim must be >= 4");
        if (n_query_classes < 2) throw std::invalid_argument("n_query_classes must be >= 2");
    }
};

struct DatasetManifest {
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    DomainSpec domain_params;
    Split split = Split::train;
};

struct GenerationReport {
    std::size_t n_generated = 0;
    double mean_event_duration = 0.0;
    double mean_profile_snr = 0.0;
    std::uint64_t seed = 0;
};

namespace detail {

// Class-mean embeddings are a fixed function of (class, dim); the domain's
// rotation angle then turns them in the (0,1) plane. Using a salt that does
// not depend on the dataset seed keeps class semantics shared across
// domains, which is what makes the rotation a pure shift knob.
inline std::vector<double> class_mean(int cls, int dim, double rotation_angle) {
    RngStream rng = RngStream::derive(0xc1a55e5ull, {static_cast<std::uint64_t>(cls)});
    std::vector<double> v(dim);
    double norm = 0.0;
    for (auto& x : v) {
        x = rng.normal();
        norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm > 0.0)
        for (auto& x : v) x /= norm;
    const double c = std::cos(rotation_angle);
    const double s = std::sin(rotation_angle);
    const double x0 = v[0], x1 = v[1];
    v[0] = c * x0 - s * x1;
    v[1] = s * x0 + c * x1;
    return v;
}

struct RawEvent {
    TimeInterval truth;
    int cls = 0;
};

inline RawEvent draw_event(const DomainSpec& spec, RngStream& rng) {
    RawEvent ev;
    ev.cls = static_cast<int>(rng.index(static_cast<std::size_t>(spec.n_query_classes)));
    const double duration = rng.beta(spec.duration_shape_a, spec.duration_shape_b);
    const double start = rng.uniform() * (1.0 - duration);
    ev.truth = TimeInterval{start, start + duration};
    return ev;
}

}  // namespace detail

// Deterministic per-sample generation: sample i draws from the stream
// keyed by (seed, i), so the result is independent of the worker count.
inline std::pair<std::vector<GroundingSample>, GenerationReport> generate_domain(
    const DomainSpec& spec, std::size_t n, std::uint64_t seed, bool labelled,
    DomainTag tag = DomainTag::source) {
    spec.validate();
    if (n < 1) throw std::invalid_argument("generate_domain: n must be >= 1");

    const int L = spec.profile_length;
    std::vector<GroundingSample> samples(n);
    std::vector<double> durations(n, 0.0);
    std::vector<double> snrs(n, -1.0);  // -1 marks "no inside/outside split"

    parallel_for(n, [&](std::size_t i) {
        RngStream rng = RngStream::derive(seed, {0xe4e11ull, i});
        const detail::RawEvent ev = detail::draw_event(spec, rng);
        durations[i] = ev.truth.length();

        GroundingSample& s = samples[i];
        s.id = to_string(tag) + "-" + to_hex(seed).substr(8) + "-" + std::to_string(i);
        s.domain_tag = tag;
        s.query_embedding = detail::class_mean(ev.cls, spec.embed_dim, spec.class_rotation_angle);
        for (auto& q : s.query_embedding) q = round9(q);

        s.similarity_profile.resize(L);
        double in_sum = 0.0, out_sum = 0.0;
        int in_n = 0, out_n = 0;
        for (int b = 0; b < L; ++b) {
            const double center = (b + 0.5) / L;
            const bool inside = center >= ev.truth.start && center <= ev.truth.end;
            double v = (inside ? 1.0 : 0.0) + spec.feature_noise_sigma * rng.normal();
            v = round9(std::clamp(v, -1.0, 1.0));
            s.similarity_profile[b] = v;
            if (inside) {
                in_sum += v;
                ++in_n;
            } else {
                out_sum += v;
                ++out_n;
            }
        }
        if (in_n > 0 && out_n > 0) {
            const double in_mean = in_sum / in_n;
            const double out_mean = out_sum / out_n;
            double ss = 0.0;
            for (int b = 0; b < L; ++b) {
                const double center = (b + 0.5) / L;
                const bool inside = center >= ev.truth.start && center <= ev.truth.end;
                const double d = s.similarity_profile[b] - (inside ? in_mean : out_mean);
                ss += d * d;
            }
            const double resid = std::sqrt(ss / L);
            snrs[i] = (in_mean - out_mean) / (resid + 1e-9);
        }

        if (labelled) {
            const double shift = spec.annotation_bias * ev.truth.length();
            const double gs = std::clamp(ev.truth.start + shift, 0.0, 1.0);
            const double ge = std::clamp(ev.truth.end + shift, 0.0, 1.0);
            s.gt_interval = TimeInterval{round9(gs), round9(std::max(gs, ge))};
        }
    });

    GenerationReport report;
    report.n_generated = n;
    report.seed = seed;
    double dur_sum = 0.0;
    double snr_sum = 0.0;
    std::size_t snr_n = 0;
    for (std::size_t i = 0; i < n; ++i) {
        dur_sum += durations[i];
        if (snrs[i] != -1.0) {
            snr_sum += snrs[i];
            ++snr_n;
        }
    }
    report.mean_event_duration = dur_sum / static_cast<double>(n);
    report.mean_profile_snr = snr_n > 0 ? snr_sum / static_cast<double>(snr_n) : 0.0;
    return {std::move(samples), report};
}

// Uniform sample without replacement; ground truth is stripped so the
// adaptation set is genuinely unlabelled.
inline std::vector<GroundingSample> subsample_target(const std::vector<GroundingSample>& dataset,
                                                     std::size_t k, std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("subsample_target: k must be >= 1");
    if (k > dataset.size()) throw std::invalid_argument("subsample_target: k exceeds dataset size");
    RngStream rng = RngStream::derive(seed, {0x50b5e7ull});
    const auto perm = rng.permutation(dataset.size());
    std::vector<GroundingSample> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        GroundingSample s = dataset[perm[i]];
        s.gt_interval.reset();
        out.push_back(std::move(s));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dataset file format: line-delimited JSON. First line is the header
//   {"version":1,"spec":{...},"n":N,"seed":S,"split":...,"domain":...}
// followed by one record per sample. Floats carry 9 significant digits.

namespace detail {

inline void append_float_array(std::string& out, const std::vector<double>& v) {
    out += '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_g9(v[i]);
    }
    out += ']';
}

inline nlohmann::json spec_to_json(const DomainSpec& s) {
    return nlohmann::json{{"duration_shape_a", s.duration_shape_a},
                          {"duration_shape_b", s.duration_shape_b},
                          {"annotation_bias", s.annotation_bias},
                          {"feature_noise_sigma", s.feature_noise_sigma},
                          {"class_rotation_angle", s.class_rotation_angle},
                          {"n_query_classes", s.n_query_classes},
                          {"profile_length", s.profile_length},
                          {"embed_dim", s.embed_dim}};
}

inline DomainSpec spec_from_json(const nlohmann::json& j) {
    DomainSpec s;
    s.duration_shape_a = j.at("duration_shape_a").get<double>();
    s.duration_shape_b = j.at("duration_shape_b").get<double>();
    s.annotation_bias = j.at("annotation_bias").get<double>();
    s.feature_noise_sigma = j.at("feature_noise_sigma").get<double>();
    s.class_rotation_angle = j.at("class_rotation_angle").get<double>();
    s.n_query_classes = j.at("n_query_classes").get<int>();
    s.profile_length = j.at("profile_length").get<int>();
    s.embed_dim = j.at("embed_dim").get<int>();
    return s;
}

}  // namespace detail

inline std::string serialize_dataset(const std::vector<GroundingSample>& samples,
                                     const DatasetManifest& manifest) {
    nlohmann::json header{{"version", 1},
                          {"spec", detail::spec_to_json(manifest.domain_params)},
                          {"n", samples.size()},
                          {"seed", manifest.seed},
                          {"split", manifest.split == Split::train ? "train" : "test"}};
    std::string out = header.dump();
    out += '\n';
    for (const auto& s : samples) {
        out += "{\"id\":";
        out += nlohmann::json(s.id).dump();
        out += ",\"profile\":";
        detail::append_float_array(out, s.similarity_profile);
        out += ",\"query\":";
        detail::append_float_array(out, s.query_embedding);
        out += ",\"gt\":";
        if (s.gt_interval) {
            out += '[';
            out += format_g9(s.gt_interval->start);
            out += ',';
            out += format_g9(s.gt_interval->end);
            out += ']';
        } else {
            out += "null";
        }
        out += ",\"domain\":\"";
        out += to_string(s.domain_tag);
        out += "\"}\n";
    }
    return out;
}

inline void write_dataset(const std::filesystem::path& path,
                          const std::vector<GroundingSample>& samples,
                          const DatasetManifest& manifest) {
    write_file_atomic(path, serialize_dataset(samples, manifest));
}

struct DatasetFile {
    DatasetManifest manifest;
    std::vector<GroundingSample> samples;
};

// Parse errors always name the offending line; truncation names the last
// line that parsed cleanly.
inline DatasetFile parse_dataset(const std::string& text, const std::string& origin) {
    DatasetFile out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    std::size_t expected = 0;
    try {
        if (!std::getline(in, line)) throw std::runtime_error("empty file");
        ++lineno;
        const auto header = nlohmann::json::parse(line);
        if (header.at("version").get<int>() != 1)
            throw std::runtime_error("unsupported dataset version");
        out.manifest.domain_params = detail::spec_from_json(header.at("spec"));
        expected = header.at("n").get<std::size_t>();
        out.manifest.n_samples = expected;
        out.manifest.seed = header.value("seed", std::uint64_t{0});
        out.manifest.split = header.value("split", std::string("train")) == "test" ? Split::test
                                                                                   : Split::train;
        out.samples.reserve(expected);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            ++lineno;
            const auto j = nlohmann::json::parse(line);
            GroundingSample s;
            s.id = j.at("id").get<std::string>();
            s.similarity_profile = j.at("profile").get<std::vector<double>>();
            s.query_embedding = j.at("query").get<std::vector<double>>();
            if (!j.at("gt").is_null()) {
                const auto g = j.at("gt");
                s.gt_interval = TimeInterval::make(g.at(0).get<double>(), g.at(1).get<double>());
            }
            s.domain_tag = j.at("domain").get<std::string>() == "target" ? DomainTag::target
                                                                         : DomainTag::source;
            out.samples.push_back(std::move(s));
        }
    } catch (const std::exception& e) {
        throw std::runtime_error(origin + ": bad record at line " + std::to_string(lineno + 1) +
                                 " (last good line " + std::to_string(lineno) + "): " + e.what());
    }
    if (out.samples.size() != expected)
        throw std::runtime_error(origin + ": truncated dataset, header declares " +
                                 std::to_string(expected) + " records but file ends after line " +
                                 std::to_string(lineno) + " (last good line " +
                                 std::to_string(lineno) + ")");
    return out;
}

inline DatasetFile read_dataset(const std::filesystem::path& path) {
    return parse_dataset(read_file(path), path.string());
}

}  // namespace urpa
