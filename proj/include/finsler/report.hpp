#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "finsler/classify.hpp"
#include "finsler/metric.hpp"

namespace finsler {

struct CheckSet {
    bool classify = true;
    bool identities = false;
    bool theorem_a = false;
    bool perpendicular = false;
    bool ratios = false;

    std::vector<std::string> names() const;
    static CheckSet parse(const std::vector<std::string>& ids);  // throws ConfigError
};

struct RunConfig {
    MetricSpec metric = MetricSpec::builtin(Family::Euclidean, 3);
    int n_points = 16;
    uint64_t seed = 42;
    double tolerance = 1e-6;
    CheckSet checks;
    int threads = 0;  // 0 = hardware concurrency
};

struct PointReport {
    int index = 0;
    std::vector<double> x, y;
    bool skipped = false;
    std::string skip_reason;
    // insertion-ordered verdicts keyed by check name
    std::vector<std::pair<std::string, Verdict>> verdicts;
    std::vector<std::pair<std::string, double>> scalars;
    std::vector<IdentityResult> identities;
};

struct AggregateVerdict {
    std::string check;
    Label label = Label::Indeterminate;
    double worst_residual = 0.0;
    int holds = 0, fails = 0;
};

struct AggregateIdentity {
    std::string name;
    bool pass = true;
    double worst_residual = 0.0;
    int applicable = 0;
};

struct ScalarRange {
    std::string name;
    double min = 0.0, max = 0.0;
};

struct ClassificationReport {
    std::string schema_version;
    std::string tool_version;
    std::string metric_name;
    int dimension = 0;
    uint64_t seed = 0;
    double tolerance = 0.0;
    std::vector<std::string> checks;
    std::vector<PointReport> points;
    std::vector<AggregateVerdict> aggregate_verdicts;
    std::vector<AggregateIdentity> aggregate_identities;
    std::vector<ScalarRange> scalar_ranges;
    int skipped_points = 0;
};

/// The spec'd point sampler (see sample_domain_points for the contract).
inline std::vector<std::pair<std::vector<double>, std::vector<double>>> sample_points(const MetricSpec& spec,
                                                                                      int count, uint64_t seed) {
    return sample_domain_points(spec, count, seed);
}

/// Runs every requested check on every sampled point. Points aborted by
/// domain or smoothness errors are reported as skipped, never dropped.
/// Deterministic for a fixed (config, seed) regardless of thread count.
ClassificationReport run(const RunConfig& config);

/// Canonical machine format: fixed key order, 17 significant digits.
/// serialize -> parse -> serialize is byte-identical.
std::string report_to_json(const ClassificationReport& report);
ClassificationReport report_from_json(const std::string& text);

/// Human rendering of the same numbers (never a second computation).
std::string report_to_text(const ClassificationReport& report);

struct CatalogEntry {
    std::string id;
    std::string preset;
    int example = 0;  // worked-example number in the catalog documentation
    std::string expected_classification;
    std::string expected_scalars;
};
std::vector<CatalogEntry> catalog();
std::string catalog_to_text();

}  // namespace finsler
