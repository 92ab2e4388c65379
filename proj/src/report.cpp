#include "finsler/report.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "finsler/version.hpp"

namespace finsler {

std::vector<std::string> CheckSet::names() const {
    std::vector<std::string> out;
    if (classify) out.push_back("classify");
    if (identities) out.push_back("identities");
    if (theorem_a) out.push_back("theorem_a");
    if (perpendicular) out.push_back("perpendicular");
    if (ratios) out.push_back("ratios");
    return out;
}

CheckSet CheckSet::parse(const std::vector<std::string>& ids) {
    CheckSet set;
    set.classify = false;
    for (const auto& id : ids) {
        if (id == "classify")
            set.classify = true;
        else if (id == "identities")
            set.identities = true;
        else if (id == "theorem_a")
            set.theorem_a = true;
        else if (id == "perpendicular")
            set.perpendicular = true;
        else if (id == "ratios")
            set.ratios = true;
        else
            throw ConfigError("unknown check id '" + id + "'");
    }
    if (!set.classify && !set.identities && !set.theorem_a && !set.perpendicular && !set.ratios)
        throw ConfigError("check set must not be empty");
    return set;
}

namespace {

PointReport run_point(const RunConfig& config, int index, const std::vector<double>& x,
                      const std::vector<double>& y) {
    PointReport pr;
    pr.index = index;
    pr.x = x;
    pr.y = y;
    const CheckSet& cs = config.checks;
    const double tol = config.tolerance;
    try {
        int py = required_y_order(cs.classify, cs.identities, cs.theorem_a, cs.perpendicular, cs.ratios);
        PointFrame frame(config.metric, x, y, 2, py);
        CartanFrame cf(frame);

        if (cs.classify) {
            pr.verdicts.emplace_back("scalar_curvature", scalar_curvature_test(frame, tol));
            pr.verdicts.emplace_back("constant_curvature", constant_curvature_test(frame, tol));
            pr.verdicts.emplace_back("hp_scalar", hp_scalar_test(frame, tol));
            pr.verdicts.emplace_back("hp_constant", hp_constant_test(frame, tol));
            pr.verdicts.emplace_back("vanishing_hp", vanishing_hp_test(frame, tol));
            pr.verdicts.emplace_back("b_alpha_hbar", thm_b_alpha_check(frame, tol));
            pr.verdicts.emplace_back("f_form_zero", f_form_test(frame, tol));
            pr.verdicts.emplace_back("n_form_zero", n_form_test(frame, tol));
            pr.scalars.emplace_back("k", scalar_curvature_field(frame).value());
            pr.scalars.emplace_back("eps", hp_scalar_field(frame).value());
        }
        if (cs.theorem_a) pr.verdicts.emplace_back("theorem_a", theorem_a_identity(cf, tol));
        if (cs.perpendicular) {
            PerpendicularResult res = perpendicular_test(cf, tol);
            pr.verdicts.emplace_back("perpendicular", res.verdict);
            pr.scalars.emplace_back("q", res.q);
            pr.scalars.emplace_back("rho", res.rho);
        }
        if (cs.ratios) {
            RatioVerdicts rv = ratio_checks(frame, tol);
            pr.verdicts.emplace_back("ratio_c", rv.c);
            pr.verdicts.emplace_back("ratio_b", rv.b);
            pr.verdicts.emplace_back("ratio_a", rv.a);
        }
        if (cs.identities) pr.identities = identity_suite(cf);
    } catch (const Error& e) {
        pr.skipped = true;
        pr.skip_reason = e.what();
        pr.verdicts.clear();
        pr.scalars.clear();
        pr.identities.clear();
    }
    return pr;
}

}  // namespace

ClassificationReport run(const RunConfig& config) {
    if (config.n_points < 1) throw ConfigError("n_points must be at least 1");
    if (!(config.tolerance > 0.0)) throw ConfigError("tolerance must be positive");

    ClassificationReport report;
    report.schema_version = kReportSchemaVersion;
    report.tool_version = kToolVersion;
    report.metric_name = config.metric.name();
    report.dimension = config.metric.dimension();
    report.seed = config.seed;
    report.tolerance = config.tolerance;
    report.checks = config.checks.names();

    auto points = sample_domain_points(config.metric, config.n_points, config.seed);
    report.points.resize(points.size());

    int threads = config.threads > 0 ? config.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min<int>(threads, static_cast<int>(points.size())));
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= points.size()) break;
            report.points[i] = run_point(config, static_cast<int>(i), points[i].first, points[i].second);
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // aggregates, in first-point verdict order
    std::vector<std::string> order;
    for (const auto& pr : report.points)
        for (const auto& [name, v] : pr.verdicts)
            if (std::find(order.begin(), order.end(), name) == order.end()) order.push_back(name);
    for (const auto& name : order) {
        AggregateVerdict agg;
        agg.check = name;
        bool any = false, all_hold = true;
        for (const auto& pr : report.points) {
            for (const auto& [vn, v] : pr.verdicts) {
                if (vn != name) continue;
                any = true;
                agg.worst_residual = std::max(agg.worst_residual, v.residual);
                if (v.holds())
                    ++agg.holds;
                else {
                    ++agg.fails;
                    all_hold = false;
                }
            }
        }
        agg.label = !any ? Label::Indeterminate : (all_hold ? Label::Holds : Label::Fails);
        report.aggregate_verdicts.push_back(agg);
    }

    std::vector<std::string> id_order;
    for (const auto& pr : report.points)
        for (const auto& ir : pr.identities)
            if (std::find(id_order.begin(), id_order.end(), ir.name) == id_order.end()) id_order.push_back(ir.name);
    for (const auto& name : id_order) {
        AggregateIdentity agg;
        agg.name = name;
        for (const auto& pr : report.points)
            for (const auto& ir : pr.identities) {
                if (ir.name != name || !ir.applicable) continue;
                ++agg.applicable;
                agg.worst_residual = std::max(agg.worst_residual, ir.residual);
                if (!ir.pass) agg.pass = false;
            }
        report.aggregate_identities.push_back(agg);
    }

    std::vector<std::string> sc_order;
    for (const auto& pr : report.points)
        for (const auto& [name, v] : pr.scalars)
            if (std::find(sc_order.begin(), sc_order.end(), name) == sc_order.end()) sc_order.push_back(name);
    for (const auto& name : sc_order) {
        ScalarRange r;
        r.name = name;
        bool first = true;
        for (const auto& pr : report.points)
            for (const auto& [sn, v] : pr.scalars) {
                if (sn != name) continue;
                if (first) {
                    r.min = r.max = v;
                    first = false;
                } else {
                    r.min = std::min(r.min, v);
                    r.max = std::max(r.max, v);
                }
            }
        if (!first) report.scalar_ranges.push_back(r);
    }

    for (const auto& pr : report.points)
        if (pr.skipped) ++report.skipped_points;
    return report;
}

// ---------- canonical JSON writer ----------

namespace {

class JsonWriter {
public:
    std::string take() { return std::move(out_); }

    void raw(const char* s) { out_ += s; }

    void string(const std::string& s) {
        out_ += '"';
        for (char c : s) {
            switch (c) {
                case '"': out_ += "\\\""; break;
                case '\\': out_ += "\\\\"; break;
                case '\n': out_ += "\\n"; break;
                case '\t': out_ += "\\t"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                        out_ += buf;
                    } else {
                        out_ += c;
                    }
            }
        }
        out_ += '"';
    }

    void number(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out_ += buf;
    }

    void integer(long long v) { out_ += std::to_string(v); }
    void boolean(bool v) { out_ += v ? "true" : "false"; }

private:
    std::string out_;
};

void write_verdict(JsonWriter& w, const Verdict& v) {
    w.raw("{\"label\":");
    w.string(label_name(v.label));
    if (v.scalar) {
        w.raw(",\"scalar\":");
        w.number(*v.scalar);
    }
    w.raw(",\"residual\":");
    w.number(v.residual);
    w.raw(",\"tolerance\":");
    w.number(v.tolerance);
    w.raw(",\"flags\":[");
    for (size_t i = 0; i < v.flags.size(); ++i) {
        if (i) w.raw(",");
        w.string(v.flags[i]);
    }
    w.raw("]}");
}

Label label_from_name(const std::string& s) {
    if (s == "holds") return Label::Holds;
    if (s == "fails") return Label::Fails;
    return Label::Indeterminate;
}

}  // namespace

std::string report_to_json(const ClassificationReport& r) {
    JsonWriter w;
    w.raw("{\"schema_version\":");
    w.string(r.schema_version);
    w.raw(",\"tool_version\":");
    w.string(r.tool_version);
    w.raw(",\"metric\":{\"name\":");
    w.string(r.metric_name);
    w.raw(",\"dimension\":");
    w.integer(r.dimension);
    w.raw("},\"seed\":");
    w.integer(static_cast<long long>(r.seed));
    w.raw(",\"tolerance\":");
    w.number(r.tolerance);
    w.raw(",\"checks\":[");
    for (size_t i = 0; i < r.checks.size(); ++i) {
        if (i) w.raw(",");
        w.string(r.checks[i]);
    }
    w.raw("],\"points\":[");
    for (size_t p = 0; p < r.points.size(); ++p) {
        const PointReport& pr = r.points[p];
        if (p) w.raw(",");
        w.raw("{\"index\":");
        w.integer(pr.index);
        w.raw(",\"x\":[");
        for (size_t i = 0; i < pr.x.size(); ++i) {
            if (i) w.raw(",");
            w.number(pr.x[i]);
        }
        w.raw("],\"y\":[");
        for (size_t i = 0; i < pr.y.size(); ++i) {
            if (i) w.raw(",");
            w.number(pr.y[i]);
        }
        w.raw("],\"skipped\":");
        w.boolean(pr.skipped);
        if (pr.skipped) {
            w.raw(",\"skip_reason\":");
            w.string(pr.skip_reason);
        }
        w.raw(",\"verdicts\":{");
        for (size_t i = 0; i < pr.verdicts.size(); ++i) {
            if (i) w.raw(",");
            w.string(pr.verdicts[i].first);
            w.raw(":");
            write_verdict(w, pr.verdicts[i].second);
        }
        w.raw("},\"scalars\":{");
        for (size_t i = 0; i < pr.scalars.size(); ++i) {
            if (i) w.raw(",");
            w.string(pr.scalars[i].first);
            w.raw(":");
            w.number(pr.scalars[i].second);
        }
        w.raw("},\"identities\":[");
        for (size_t i = 0; i < pr.identities.size(); ++i) {
            const IdentityResult& ir = pr.identities[i];
            if (i) w.raw(",");
            w.raw("{\"name\":");
            w.string(ir.name);
            w.raw(",\"applicable\":");
            w.boolean(ir.applicable);
            w.raw(",\"pass\":");
            w.boolean(ir.pass);
            w.raw(",\"residual\":");
            w.number(ir.residual);
            w.raw(",\"tolerance\":");
            w.number(ir.tolerance);
            w.raw("}");
        }
        w.raw("]}");
    }
    w.raw("],\"aggregate\":{\"verdicts\":{");
    for (size_t i = 0; i < r.aggregate_verdicts.size(); ++i) {
        const AggregateVerdict& a = r.aggregate_verdicts[i];
        if (i) w.raw(",");
        w.string(a.check);
        w.raw(":{\"label\":");
        w.string(label_name(a.label));
        w.raw(",\"worst_residual\":");
        w.number(a.worst_residual);
        w.raw(",\"holds\":");
        w.integer(a.holds);
        w.raw(",\"fails\":");
        w.integer(a.fails);
        w.raw("}");
    }
    w.raw("},\"identities\":{");
    for (size_t i = 0; i < r.aggregate_identities.size(); ++i) {
        const AggregateIdentity& a = r.aggregate_identities[i];
        if (i) w.raw(",");
        w.string(a.name);
        w.raw(":{\"pass\":");
        w.boolean(a.pass);
        w.raw(",\"worst_residual\":");
        w.number(a.worst_residual);
        w.raw(",\"applicable\":");
        w.integer(a.applicable);
        w.raw("}");
    }
    w.raw("},\"scalars\":{");
    for (size_t i = 0; i < r.scalar_ranges.size(); ++i) {
        const ScalarRange& s = r.scalar_ranges[i];
        if (i) w.raw(",");
        w.string(s.name);
        w.raw(":{\"min\":");
        w.number(s.min);
        w.raw(",\"max\":");
        w.number(s.max);
        w.raw("}");
    }
    w.raw("},\"skipped_points\":");
    w.integer(r.skipped_points);
    w.raw("}}");
    std::string out = w.take();
    out += "\n";
    return out;
}

ClassificationReport report_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("report is not valid JSON: ") + e.what());
    }
    ClassificationReport r;
    r.schema_version = j.at("schema_version").get<std::string>();
    r.tool_version = j.at("tool_version").get<std::string>();
    r.metric_name = j.at("metric").at("name").get<std::string>();
    r.dimension = j.at("metric").at("dimension").get<int>();
    r.seed = j.at("seed").get<uint64_t>();
    r.tolerance = j.at("tolerance").get<double>();
    for (const auto& c : j.at("checks")) r.checks.push_back(c.get<std::string>());
    for (const auto& jp : j.at("points")) {
        PointReport pr;
        pr.index = jp.at("index").get<int>();
        pr.x = jp.at("x").get<std::vector<double>>();
        pr.y = jp.at("y").get<std::vector<double>>();
        pr.skipped = jp.at("skipped").get<bool>();
        if (jp.contains("skip_reason")) pr.skip_reason = jp.at("skip_reason").get<std::string>();
        for (const auto& [name, jv] : jp.at("verdicts").items()) {
            Verdict v;
            v.label = label_from_name(jv.at("label").get<std::string>());
            if (jv.contains("scalar")) v.scalar = jv.at("scalar").get<double>();
            v.residual = jv.at("residual").get<double>();
            v.tolerance = jv.at("tolerance").get<double>();
            for (const auto& f : jv.at("flags")) v.flags.push_back(f.get<std::string>());
            pr.verdicts.emplace_back(name, v);
        }
        for (const auto& [name, jv] : jp.at("scalars").items()) pr.scalars.emplace_back(name, jv.get<double>());
        for (const auto& ji : jp.at("identities")) {
            IdentityResult ir;
            ir.name = ji.at("name").get<std::string>();
            ir.applicable = ji.at("applicable").get<bool>();
            ir.pass = ji.at("pass").get<bool>();
            ir.residual = ji.at("residual").get<double>();
            ir.tolerance = ji.at("tolerance").get<double>();
            pr.identities.push_back(ir);
        }
        r.points.push_back(std::move(pr));
    }
    const auto& ja = j.at("aggregate");
    for (const auto& [name, jv] : ja.at("verdicts").items()) {
        AggregateVerdict a;
        a.check = name;
        a.label = label_from_name(jv.at("label").get<std::string>());
        a.worst_residual = jv.at("worst_residual").get<double>();
        a.holds = jv.at("holds").get<int>();
        a.fails = jv.at("fails").get<int>();
        r.aggregate_verdicts.push_back(a);
    }
    for (const auto& [name, jv] : ja.at("identities").items()) {
        AggregateIdentity a;
        a.name = name;
        a.pass = jv.at("pass").get<bool>();
        a.worst_residual = jv.at("worst_residual").get<double>();
        a.applicable = jv.at("applicable").get<int>();
        r.aggregate_identities.push_back(a);
    }
    for (const auto& [name, jv] : ja.at("scalars").items()) {
        ScalarRange s;
        s.name = name;
        s.min = jv.at("min").get<double>();
        s.max = jv.at("max").get<double>();
        r.scalar_ranges.push_back(s);
    }
    r.skipped_points = ja.at("skipped_points").get<int>();
    return r;
}

std::string report_to_text(const ClassificationReport& r) {
    std::ostringstream os;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    os << "metric: " << r.metric_name << "  n=" << r.dimension << "  seed=" << r.seed
       << "  tolerance=" << num(r.tolerance) << "\n";
    os << "checks:";
    for (const auto& c : r.checks) os << " " << c;
    os << "\npoints: " << r.points.size() << " (" << r.skipped_points << " skipped)\n\n";
    os << "aggregate verdicts:\n";
    for (const auto& a : r.aggregate_verdicts)
        os << "  " << a.check << ": " << label_name(a.label) << "  worst_residual=" << num(a.worst_residual)
           << "  holds=" << a.holds << " fails=" << a.fails << "\n";
    if (!r.aggregate_identities.empty()) {
        os << "aggregate identities:\n";
        for (const auto& a : r.aggregate_identities)
            os << "  " << a.name << ": " << (a.pass ? "pass" : "fail")
               << "  worst_residual=" << num(a.worst_residual) << "  applicable_points=" << a.applicable << "\n";
    }
    if (!r.scalar_ranges.empty()) {
        os << "scalar ranges:\n";
        for (const auto& s : r.scalar_ranges)
            os << "  " << s.name << ": [" << num(s.min) << ", " << num(s.max) << "]\n";
    }
    os << "\nper point:\n";
    for (const auto& p : r.points) {
        os << "  [" << p.index << "] x=(";
        for (size_t i = 0; i < p.x.size(); ++i) os << (i ? ", " : "") << num(p.x[i]);
        os << ") y=(";
        for (size_t i = 0; i < p.y.size(); ++i) os << (i ? ", " : "") << num(p.y[i]);
        os << ")\n";
        if (p.skipped) {
            os << "      skipped: " << p.skip_reason << "\n";
            continue;
        }
        for (const auto& [name, v] : p.verdicts) {
            os << "      " << name << ": " << label_name(v.label);
            if (v.scalar) os << "  scalar=" << num(*v.scalar);
            os << "  residual=" << num(v.residual);
            for (const auto& f : v.flags) os << "  [" << f << "]";
            os << "\n";
        }
        for (const auto& ir : p.identities) {
            if (!ir.applicable) continue;
            os << "      identity " << ir.name << ": " << (ir.pass ? "pass" : "fail")
               << "  residual=" << num(ir.residual) << "\n";
        }
    }
    return os.str();
}

std::vector<CatalogEntry> catalog() {
    return {
        {"euclidean", "", 0, "flat; every verdict holds with scalar 0", "k = eps = 0"},
        {"lmu", "", 1, "constant curvature mu; hp-constant with eps = mu", "k = eps = mu"},
        {"funk", "", 2, "constant curvature -1/4; hp-constant", "k = eps = -1/4"},
        {"lphi", "sqexp|norm", 3, "zero constant curvature; vanishing hp-scalar curvature", "k = eps = 0"},
        {"shen_ball", "", 5, "scalar (non-constant) curvature; hp-scalar curvature",
         "k = 3<a,y>/F + 3<a,x>^2 - 2|a|^2|x|^2; eps = 2<a,y>/F + 3<a,x>^2 - 2|a|^2|x|^2"},
        {"warped", "exp|poly2", 6,
         "n=2: scalar curvature with eps = 0 (hp-constant, not constant); n=3: hp-scalar but not scalar",
         "n=2: k = (f'^2 - f f'')/f^4; n=3: eps = -(phi'(y2^2+y3^2) + phi^2 y1^2)/L^2"},
    };
}

std::string catalog_to_text() {
    std::ostringstream os;
    os << "builtin metric families (worked examples 1-6; 0 marks the trivial baseline):\n\n";
    for (const auto& e : catalog()) {
        os << "  " << e.id;
        if (!e.preset.empty()) os << " (preset: " << e.preset << ")";
        if (e.example > 0) os << "  [example " << e.example << "]";
        os << "\n    classification: " << e.expected_classification << "\n    scalars: " << e.expected_scalars
           << "\n";
    }
    os << "\nexample 4 is lphi with the sqexp preset (its displayed phi choice).\n";
    return os.str();
}

}  // namespace finsler
