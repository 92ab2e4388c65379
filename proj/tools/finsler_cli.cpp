// Command-line front end: classify metrics, validate Finsler axioms, list
// the builtin catalog.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "finsler/report.hpp"
#include "finsler/version.hpp"

using namespace finsler;

namespace {

struct MetricArgs {
    std::string metric;
    int dim = 4;
    std::vector<std::string> params;
    std::string preset;
};

void add_metric_options(CLI::App* cmd, MetricArgs& args) {
    cmd->add_option("--metric", args.metric, "metric config file (JSON) or builtin family id")->required();
    cmd->add_option("--dim", args.dim, "dimension for builtin families (default 4)");
    cmd->add_option("--param", args.params, "family parameter, key=value or key=v1,v2,... (repeatable)");
    cmd->add_option("--preset", args.preset, "family preset (lphi: sqexp|norm, warped: exp|poly2)");
}

ParamMap parse_params(const std::vector<std::string>& kvs) {
    ParamMap out;
    for (const auto& kv : kvs) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--param expects key=value, got '" + kv + "'");
        std::string key = kv.substr(0, eq);
        std::string value = kv.substr(eq + 1);
        if (value.find(',') == std::string::npos) {
            out[key] = std::stod(value);
        } else {
            std::vector<double> vec;
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ',')) vec.push_back(std::stod(item));
            out[key] = vec;
        }
    }
    return out;
}

MetricSpec resolve_metric(const MetricArgs& args) {
    std::ifstream in(args.metric);
    if (in.good()) {
        std::stringstream ss;
        ss << in.rdbuf();
        return metric_from_json(ss.str());
    }
    auto family = family_from_id(args.metric);
    if (!family) throw ConfigError("'" + args.metric + "' is neither a readable file nor a builtin family id");
    std::optional<std::string> preset;
    if (!args.preset.empty()) preset = args.preset;
    return MetricSpec::builtin(*family, args.dim, parse_params(args.params), preset);
}

void write_output(const std::string& content, const std::string& path) {
    if (path == "-" || path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file '" + path + "'");
    out << content;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finsler curvature classifier"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    MetricArgs cargs;
    int points = 16;
    uint64_t seed = 42;
    double tol = 1e-6;
    std::string checks_csv = "classify";
    std::string format = "json";
    std::string out_path = "-";
    int threads = 0;

    CLI::App* classify = app.add_subcommand("classify", "sample points and run the requested checks");
    add_metric_options(classify, cargs);
    classify->add_option("--points", points, "number of sample points (default 16)");
    classify->add_option("--seed", seed, "sampler seed (default 42)");
    classify->add_option("--tol", tol, "verdict tolerance (default 1e-6)");
    classify->add_option("--checks", checks_csv,
                         "comma list of classify,identities,theorem_a,perpendicular,ratios");
    classify->add_option("--format", format, "json or text (default json)")
        ->check(CLI::IsMember({"json", "text"}));
    classify->add_option("--out", out_path, "output path, - for stdout (default -)");
    classify->add_option("--threads", threads, "worker threads, 0 = all cores");

    MetricArgs vargs;
    int vsamples = 32;
    uint64_t vseed = 42;
    CLI::App* validate_cmd = app.add_subcommand("validate", "check the Finsler axioms on samples");
    add_metric_options(validate_cmd, vargs);
    validate_cmd->add_option("--samples", vsamples, "number of validation samples (default 32)");
    validate_cmd->add_option("--seed", vseed, "sampler seed (default 42)");

    CLI::App* catalog_cmd = app.add_subcommand("catalog", "list builtin metrics and their classifications");

    CLI11_PARSE(app, argc, argv);

    try {
        if (classify->parsed()) {
            RunConfig config;
            config.metric = resolve_metric(cargs);
            config.n_points = points;
            config.seed = seed;
            config.tolerance = tol;
            std::vector<std::string> ids;
            std::stringstream ss(checks_csv);
            std::string item;
            while (std::getline(ss, item, ',')) ids.push_back(item);
            config.checks = CheckSet::parse(ids);
            config.threads = threads;
            ClassificationReport report = run(config);
            write_output(format == "json" ? report_to_json(report) : report_to_text(report), out_path);
            return 0;  // verdict "fails" is a result, not an error
        }
        if (validate_cmd->parsed()) {
            MetricSpec spec = resolve_metric(vargs);
            ValidationReport report = validate(spec, vsamples, vseed);
            std::printf("metric: %s  n=%d  samples=%d\n", spec.name().c_str(), spec.dimension(),
                        report.samples_used);
            for (const auto& c : report.checks)
                std::printf("  %-22s %s  (%s = %.6g)\n", c.name.c_str(), c.pass ? "pass" : "FAIL",
                            c.detail.c_str(), c.worst);
            std::printf("overall: %s\n", report.all_pass ? "pass" : "FAIL");
            return 0;
        }
        if (catalog_cmd->parsed()) {
            std::cout << catalog_to_text();
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
