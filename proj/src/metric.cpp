#include "finsler/metric.hpp"

#include <cmath>
#include <random>

#include <json.hpp>

#include "finsler/errors.hpp"

namespace finsler {
namespace {

template <class S>
S dot_span(std::span<const S> u, std::span<const S> v) {
    S acc = u[0] * v[0];
    for (size_t i = 1; i < u.size(); ++i) acc = acc + u[i] * v[i];
    return acc;
}

template <class S>
S dot_const(std::span<const double> a, std::span<const S> v) {
    S acc = a[0] * v[0];
    for (size_t i = 1; i < v.size(); ++i) acc = acc + a[i] * v[i];
    return acc;
}

template <class S>
S lmu_L(double mu, std::span<const S> x, std::span<const S> y) {
    using std::sqrt;
    S x2 = dot_span(x, x);
    S y2 = dot_span(y, y);
    S xy = dot_span(x, y);
    return sqrt(y2 + mu * (x2 * y2 - xy * xy)) / (1.0 + mu * x2);
}

template <class S>
S funk_L(std::span<const S> x, std::span<const S> y) {
    using std::sqrt;
    S x2 = dot_span(x, x);
    S y2 = dot_span(y, y);
    S xy = dot_span(x, y);
    return (sqrt(y2 - (x2 * y2 - xy * xy)) + xy) / (1.0 - x2);
}

template <class S>
S lphi_L(std::span<const double> a, PhiPreset preset, std::span<const S> x, std::span<const S> y) {
    using std::exp;
    using std::sqrt;
    S ax = dot_const(a, x);
    S ay = dot_const(a, y);
    S opax = 1.0 + ax;
    // z^i = ((1+<a,x>) y^i - <a,y> x^i) / <a,y>
    S z2 = [&] {
        std::vector<S> z;
        z.reserve(x.size());
        for (size_t i = 0; i < x.size(); ++i) z.push_back((opax * y[i] - ay * x[i]) / ay);
        return dot_span(std::span<const S>(z), std::span<const S>(z));
    }();
    S phi = preset == PhiPreset::SqExp ? sqrt(z2 + exp(-z2)) : sqrt(z2);
    return ay / (opax * opax) * phi;
}

template <class S>
S shen_L(std::span<const double> a, std::span<const S> x, std::span<const S> y) {
    using std::sqrt;
    double a2 = 0.0;
    for (double v : a) a2 += v * v;
    S x2 = dot_span(x, x);
    S y2 = dot_span(y, y);
    S xy = dot_span(x, y);
    S ax = dot_const(a, x);
    S ay = dot_const(a, y);
    S s = x2 * ay - 2.0 * ax * xy;
    S A = 1.0 - a2 * (x2 * x2);
    return (sqrt(A * y2 + s * s) - s) / A;
}

template <class S>
S warped_L(WarpPreset preset, std::span<const S> x, std::span<const S> y) {
    using std::exp;
    using std::sqrt;
    S f = preset == WarpPreset::Exp ? exp(x[0]) : 1.0 + x[0] * x[0];
    return f * sqrt(dot_span(y, y));
}

std::vector<double> default_a(int n) {
    static const double pattern[] = {0.2, -0.1, 0.15, 0.05, 0.1, -0.05};
    std::vector<double> a(n);
    for (int i = 0; i < n; ++i) a[i] = pattern[i % 6];
    return a;
}

double vec_norm(std::span<const double> v) {
    double s = 0.0;
    for (double e : v) s += e * e;
    return std::sqrt(s);
}

double get_scalar_param(const ParamMap& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    if (it == p.end()) return fallback;
    if (const double* d = std::get_if<double>(&it->second)) return *d;
    throw BadParameterError("parameter '" + key + "' must be a scalar");
}

std::vector<double> get_vector_param(const ParamMap& p, const std::string& key, std::vector<double> fallback) {
    auto it = p.find(key);
    if (it == p.end()) return fallback;
    if (const auto* v = std::get_if<std::vector<double>>(&it->second)) return *v;
    throw BadParameterError("parameter '" + key + "' must be a vector");
}

}  // namespace

const char* family_id(Family f) {
    switch (f) {
        case Family::Euclidean: return "euclidean";
        case Family::Lmu: return "lmu";
        case Family::Funk: return "funk";
        case Family::Lphi: return "lphi";
        case Family::ShenBall: return "shen_ball";
        case Family::Warped: return "warped";
    }
    return "?";
}

std::optional<Family> family_from_id(const std::string& id) {
    for (Family f : {Family::Euclidean, Family::Lmu, Family::Funk, Family::Lphi, Family::ShenBall, Family::Warped})
        if (id == family_id(f)) return f;
    return std::nullopt;
}

MetricSpec MetricSpec::builtin(Family f, int dimension, ParamMap params, std::optional<std::string> preset) {
    if (dimension < 2) throw BadParameterError("dimension must be at least 2");
    MetricSpec spec;
    spec.n_ = dimension;
    spec.family_ = f;
    spec.params_ = params;
    spec.name_ = family_id(f);

    switch (f) {
        case Family::Euclidean:
            spec.domain_.sample_radius = 1.0;
            break;
        case Family::Lmu: {
            spec.mu_ = get_scalar_param(params, "mu", -0.5);
            spec.params_["mu"] = spec.mu_;
            if (spec.mu_ < 0.0) {
                double r = 1.0 / std::sqrt(-spec.mu_);
                spec.domain_.validity_radius = r;
                spec.domain_.sample_radius = 0.9 * r;
            } else {
                spec.domain_.sample_radius = 1.0;
            }
            break;
        }
        case Family::Funk:
            spec.domain_.validity_radius = 1.0;
            spec.domain_.sample_radius = 0.9;
            break;
        case Family::Lphi: {
            spec.a_ = get_vector_param(params, "a", default_a(dimension));
            if (static_cast<int>(spec.a_.size()) != dimension)
                throw BadParameterError("vector parameter 'a' must have length n");
            if (vec_norm(spec.a_) == 0.0) throw BadParameterError("parameter 'a' must be nonzero");
            spec.params_["a"] = spec.a_;
            if (preset) {
                if (*preset == "sqexp") spec.phi_ = PhiPreset::SqExp;
                else if (*preset == "norm") spec.phi_ = PhiPreset::Norm;
                else throw BadParameterError("unknown phi preset '" + *preset + "'");
            }
            spec.domain_.validity_radius = 0.99 / vec_norm(spec.a_);
            spec.domain_.sample_radius = std::min(1.0, 0.5 / vec_norm(spec.a_));
            spec.domain_.y_dot_vector = spec.a_;
            spec.name_ = std::string(family_id(f)) + (spec.phi_ == PhiPreset::SqExp ? ":sqexp" : ":norm");
            break;
        }
        case Family::ShenBall: {
            spec.a_ = get_vector_param(params, "a", default_a(dimension));
            if (static_cast<int>(spec.a_.size()) != dimension)
                throw BadParameterError("vector parameter 'a' must have length n");
            if (vec_norm(spec.a_) == 0.0) throw BadParameterError("parameter 'a' must be nonzero");
            spec.params_["a"] = spec.a_;
            double r = 1.0 / std::sqrt(vec_norm(spec.a_));
            spec.domain_.validity_radius = r;
            spec.domain_.sample_radius = 0.7 * r;
            spec.domain_.y_dot_vector = spec.a_;
            break;
        }
        case Family::Warped: {
            if (preset) {
                if (*preset == "exp") spec.warp_ = WarpPreset::Exp;
                else if (*preset == "poly2") spec.warp_ = WarpPreset::Poly2;
                else throw BadParameterError("unknown warp preset '" + *preset + "'");
            } else {
                spec.warp_ = WarpPreset::Poly2;
            }
            spec.domain_.sample_radius = 1.0;
            spec.name_ = std::string(family_id(f)) + (spec.warp_ == WarpPreset::Exp ? ":exp" : ":poly2");
            break;
        }
    }
    return spec;
}

MetricSpec MetricSpec::expression(std::string name, int dimension, ExpressionAst ast, ParamMap params,
                                  std::optional<MetricDomain> domain) {
    if (dimension < 2) throw BadParameterError("dimension must be at least 2");
    MetricSpec spec;
    spec.name_ = name.empty() ? "expression" : std::move(name);
    spec.n_ = dimension;
    spec.expr_ = std::move(ast);
    spec.params_ = std::move(params);
    if (domain) spec.domain_ = *domain;

    std::vector<std::string> idents;
    collect_idents(spec.expr_->root, idents);
    for (const auto& id : idents)
        if (!spec.params_.count(id))
            throw UnknownIdentifierError("expression references undefined parameter '" + id + "'", 0, 0);
    return spec;
}

template <class S>
S MetricSpec::value(std::span<const S> x, std::span<const S> y) const {
    if (expr_) return eval_expression<S>(*expr_, x, y, params_);
    switch (*family_) {
        case Family::Euclidean: {
            using std::sqrt;
            return sqrt(dot_span(y, y));
        }
        case Family::Lmu: return lmu_L(mu_, x, y);
        case Family::Funk: return funk_L(x, y);
        case Family::Lphi: return lphi_L(a_, phi_, x, y);
        case Family::ShenBall: return shen_L(a_, x, y);
        case Family::Warped: return warped_L(warp_, x, y);
    }
    throw Error("unreachable");
}

template double MetricSpec::value<double>(std::span<const double>, std::span<const double>) const;
template Jet MetricSpec::value<Jet>(std::span<const Jet>, std::span<const Jet>) const;

double MetricSpec::value_at(std::span<const double> x, std::span<const double> y) const {
    if (!inside_domain(x, y)) throw DomainError("evaluation point outside metric domain");
    return value<double>(x, y);
}

Jet MetricSpec::lift_L(std::span<const double> x, std::span<const double> y, int order_x, int order_y) const {
    if (!inside_domain(x, y)) throw DomainError("evaluation point outside metric domain");
    const JetShape* s = jet_shape(n_, order_x, order_y);
    JetVec jx = lift_point_x(s, x);
    JetVec jy = lift_point_y(s, y);
    Jet L = value<Jet>(jx, jy);
    if (!L.all_finite()) throw NonSmoothPointError("non-finite value in metric evaluation");
    return L;
}

bool MetricSpec::inside_domain(std::span<const double> x, std::span<const double> y) const {
    double y2 = 0.0;
    for (double v : y) y2 += v * v;
    if (y2 == 0.0) return false;
    if (domain_.validity_radius >= 0.0) {
        double x2 = 0.0;
        for (double v : x) x2 += v * v;
        if (x2 >= domain_.validity_radius * domain_.validity_radius) return false;
    }
    if (family_ == Family::Lphi) {
        double ax = 0.0, ay = 0.0;
        for (size_t i = 0; i < a_.size(); ++i) {
            ax += a_[i] * x[i];
            ay += a_[i] * y[i];
        }
        if (1.0 + ax <= 0.0 || ay <= 0.0) return false;
    }
    return true;
}

double warp_f(WarpPreset p, double t) { return p == WarpPreset::Exp ? std::exp(t) : 1.0 + t * t; }
double warp_f1(WarpPreset p, double t) { return p == WarpPreset::Exp ? std::exp(t) : 2.0 * t; }
double warp_f2(WarpPreset p, double t) { return p == WarpPreset::Exp ? std::exp(t) : 2.0; }

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<std::pair<std::vector<double>, std::vector<double>>> sample_domain_points(const MetricSpec& spec,
                                                                                      int count, uint64_t seed) {
    std::mt19937_64 rng(seed);
    const int n = spec.dimension();
    const MetricDomain& dom = spec.domain();
    std::vector<std::pair<std::vector<double>, std::vector<double>>> out;
    out.reserve(count);
    for (int p = 0; p < count; ++p) {
        bool found = false;
        for (int attempt = 0; attempt < 20000 && !found; ++attempt) {
            std::vector<double> x(n), y(n);
            double x2 = 0.0;
            for (int i = 0; i < n; ++i) {
                x[i] = (2.0 * uniform01(rng) - 1.0) * dom.sample_radius;
                x2 += x[i] * x[i];
            }
            if (x2 > dom.sample_radius * dom.sample_radius) continue;
            double y2 = 0.0;
            for (int i = 0; i < n; ++i) {
                y[i] = (2.0 * uniform01(rng) - 1.0) * dom.y_max;
                y2 += y[i] * y[i];
            }
            if (y2 < dom.y_min * dom.y_min || y2 > dom.y_max * dom.y_max) continue;
            if (dom.y_dot_vector) {
                double ay = 0.0;
                for (int i = 0; i < n; ++i) ay += (*dom.y_dot_vector)[i] * y[i];
                if (ay <= dom.y_dot_min) continue;
            }
            if (!spec.inside_domain(x, y)) continue;
            try {
                if (!(spec.value_at(x, y) > 0.0)) continue;
            } catch (const Error&) {
                continue;
            }
            out.emplace_back(std::move(x), std::move(y));
            found = true;
        }
        if (!found) throw SamplingExhaustedError("could not sample an in-domain point for " + spec.name());
    }
    return out;
}

ValidationReport validate(const MetricSpec& spec, int n_samples, uint64_t seed) {
    ValidationReport report;
    auto points = sample_domain_points(spec, n_samples, seed);
    report.samples_used = static_cast<int>(points.size());

    ValidationCheck positivity{"positivity", true, 0.0, ""};
    ValidationCheck homogeneity{"homogeneity", true, 0.0, ""};
    ValidationCheck definite{"g_positive_definite", true, 0.0, ""};
    double min_L = 1e300, worst_hom = 0.0, min_pivot = 1e300;

    const int n = spec.dimension();
    for (auto& [x, y] : points) {
        double L;
        try {
            L = spec.value_at(x, y);
        } catch (const Error& e) {
            ++report.samples_rejected;
            continue;
        }
        min_L = std::min(min_L, L);
        if (!(L > 0.0)) positivity.pass = false;

        for (double lambda : {0.5, 2.0, 3.0}) {
            std::vector<double> ys(y);
            for (double& v : ys) v *= lambda;
            double Ls = spec.value<double>(std::span<const double>(x), std::span<const double>(ys));
            double rel = std::abs(Ls - lambda * L) / (lambda * L);
            worst_hom = std::max(worst_hom, rel);
            if (rel > 1e-10) homogeneity.pass = false;
        }

        try {
            Jet L2jet = spec.lift_L(x, y, 0, 2);
            Jet L2 = L2jet * L2jet;
            std::vector<double> g(static_cast<size_t>(n) * n);
            std::vector<int> ex(n, 0);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    std::vector<int> ey(n, 0);
                    ++ey[i];
                    ++ey[j];
                    g[i * n + j] = 0.5 * L2.partial(ex, ey);
                }
            // Cholesky; a failed pivot means not positive definite
            for (int i = 0; i < n && definite.pass; ++i) {
                for (int j = 0; j <= i; ++j) {
                    double s = g[i * n + j];
                    for (int k = 0; k < j; ++k) s -= g[i * n + k] * g[j * n + k];
                    if (i == j) {
                        if (s <= 0.0) {
                            definite.pass = false;
                            break;
                        }
                        min_pivot = std::min(min_pivot, s);
                        g[i * n + j] = std::sqrt(s);
                    } else {
                        g[i * n + j] = s / g[j * n + j];
                    }
                }
            }
        } catch (const Error&) {
            definite.pass = false;
        }
    }

    positivity.worst = min_L;
    positivity.detail = "min L over samples";
    homogeneity.worst = worst_hom;
    homogeneity.detail = "worst |L(x,t y) - t L| / (t L)";
    definite.worst = min_pivot;
    definite.detail = "min Cholesky pivot of g";

    report.checks = {positivity, homogeneity, definite};
    report.all_pass = positivity.pass && homogeneity.pass && definite.pass;
    return report;
}

namespace {

nlohmann::json domain_to_json(const MetricDomain& d) {
    nlohmann::json j;
    j["sample_radius"] = d.sample_radius;
    j["validity_radius"] = d.validity_radius;
    j["y_min"] = d.y_min;
    j["y_max"] = d.y_max;
    if (d.y_dot_vector) {
        j["y_dot_vector"] = *d.y_dot_vector;
        j["y_dot_min"] = d.y_dot_min;
    }
    return j;
}

MetricDomain domain_from_json(const nlohmann::json& j, MetricDomain base) {
    if (j.contains("sample_radius")) base.sample_radius = j["sample_radius"].get<double>();
    if (j.contains("validity_radius")) base.validity_radius = j["validity_radius"].get<double>();
    if (j.contains("y_min")) base.y_min = j["y_min"].get<double>();
    if (j.contains("y_max")) base.y_max = j["y_max"].get<double>();
    if (j.contains("y_dot_vector")) base.y_dot_vector = j["y_dot_vector"].get<std::vector<double>>();
    if (j.contains("y_dot_min")) base.y_dot_min = j["y_dot_min"].get<double>();
    return base;
}

}  // namespace

std::string metric_to_json(const MetricSpec& spec) {
    nlohmann::json j;
    j["name"] = spec.name();
    j["dimension"] = spec.dimension();
    if (spec.is_expression()) {
        j["expression"] = serialize_expression(*spec.expr());
    } else {
        j["family"] = family_id(*spec.family());
        if (spec.family() == Family::Lphi) j["preset"] = spec.phi_preset() == PhiPreset::SqExp ? "sqexp" : "norm";
        if (spec.family() == Family::Warped) j["preset"] = spec.warp_preset() == WarpPreset::Exp ? "exp" : "poly2";
    }
    if (!spec.params().empty()) {
        nlohmann::json p;
        for (const auto& [key, value] : spec.params()) {
            if (const double* d = std::get_if<double>(&value))
                p[key] = *d;
            else
                p[key] = std::get<std::vector<double>>(value);
        }
        j["params"] = p;
    }
    j["domain"] = domain_to_json(spec.domain());
    return j.dump(2) + "\n";
}

MetricSpec metric_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("metric config is not valid JSON: ") + e.what());
    }
    if (!j.contains("dimension")) throw ConfigError("metric config must declare 'dimension'");
    int n = j["dimension"].get<int>();

    ParamMap params;
    if (j.contains("params")) {
        for (auto& [key, value] : j["params"].items()) {
            if (value.is_number())
                params[key] = value.get<double>();
            else if (value.is_array())
                params[key] = value.get<std::vector<double>>();
            else
                throw ConfigError("parameter '" + key + "' must be a number or array");
        }
    }

    MetricSpec spec = MetricSpec::builtin(Family::Euclidean, n);
    if (j.contains("family")) {
        auto fam = family_from_id(j["family"].get<std::string>());
        if (!fam) throw ConfigError("unknown family '" + j["family"].get<std::string>() + "'");
        std::optional<std::string> preset;
        if (j.contains("preset")) preset = j["preset"].get<std::string>();
        spec = MetricSpec::builtin(*fam, n, params, preset);
    } else if (j.contains("expression")) {
        ExpressionAst ast = parse_expression(j["expression"].get<std::string>());
        std::string name = j.contains("name") ? j["name"].get<std::string>() : "expression";
        spec = MetricSpec::expression(name, n, std::move(ast), params, {});
    } else {
        throw ConfigError("metric config needs either 'family' or 'expression'");
    }
    if (j.contains("domain")) return spec.with_domain(domain_from_json(j["domain"], spec.domain()));
    return spec;
}

}  // namespace finsler
