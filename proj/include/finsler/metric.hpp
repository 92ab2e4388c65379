#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "finsler/ast.hpp"
#include "finsler/jet.hpp"

namespace finsler {

/// Built-in fundamental-function families. lmu is the projectively flat
/// constant-curvature Riemannian family with parameter mu; funk the Funk
/// metric on the unit ball; lphi the flat class <a,y>/(1+<a,x>)^2 phi(z) with
/// a preset phi; shen_ball the scalar-curvature Randers-type metric on the
/// ball of radius 1/sqrt(|a|); warped the product f(x^1)|y| with a preset f.
enum class Family { Euclidean, Lmu, Funk, Lphi, ShenBall, Warped };

enum class PhiPreset { SqExp, Norm };     // phi(z) = sqrt(|z|^2 + e^{-|z|^2}) or |z|
enum class WarpPreset { Exp, Poly2 };     // f(t) = e^t or 1 + t^2

const char* family_id(Family f);
std::optional<Family> family_from_id(const std::string& id);

struct MetricDomain {
    double sample_radius = 1.0;   // x sampled uniformly in this ball
    double validity_radius = -1;  // hard |x| bound; <0 means unbounded
    double y_min = 0.5, y_max = 2.0;
    std::optional<std::vector<double>> y_dot_vector;  // sampler rejects <a,y> <= y_dot_min
    double y_dot_min = 0.1;
};

class MetricSpec {
public:
    /// Builds a catalog family; throws BadParameterError on invalid params.
    /// preset picks phi for lphi ("sqexp", "norm") or f for warped ("exp",
    /// "poly2").
    static MetricSpec builtin(Family f, int dimension, ParamMap params = {},
                              std::optional<std::string> preset = {});

    /// Wraps a parsed expression; all identifiers must resolve in params.
    static MetricSpec expression(std::string name, int dimension, ExpressionAst ast, ParamMap params = {},
                                 std::optional<MetricDomain> domain = {});

    const std::string& name() const { return name_; }
    int dimension() const { return n_; }
    std::optional<Family> family() const { return family_; }
    const ParamMap& params() const { return params_; }
    const MetricDomain& domain() const { return domain_; }
    const std::optional<ExpressionAst>& expr() const { return expr_; }

    bool is_expression() const { return expr_.has_value(); }

    /// L(x, y); S is double or Jet. Throws DomainError outside the domain.
    template <class S>
    S value(std::span<const S> x, std::span<const S> y) const;

    double value_at(std::span<const double> x, std::span<const double> y) const;

    /// L lifted to a jet of the requested orders at (x, y).
    Jet lift_L(std::span<const double> x, std::span<const double> y, int order_x, int order_y) const;

    bool inside_domain(std::span<const double> x, std::span<const double> y) const;

    PhiPreset phi_preset() const { return phi_; }
    WarpPreset warp_preset() const { return warp_; }
    double mu() const { return mu_; }
    const std::vector<double>& a_vector() const { return a_; }

    MetricSpec with_domain(MetricDomain d) const {
        MetricSpec copy = *this;
        copy.domain_ = std::move(d);
        return copy;
    }

private:
    MetricSpec() = default;

    std::string name_;
    int n_ = 0;
    std::optional<Family> family_;
    std::optional<ExpressionAst> expr_;
    ParamMap params_;
    MetricDomain domain_;

    // decoded family parameters
    double mu_ = 0.0;
    std::vector<double> a_;
    PhiPreset phi_ = PhiPreset::SqExp;
    WarpPreset warp_ = WarpPreset::Exp;
};

struct ValidationCheck {
    std::string name;
    bool pass = false;
    double worst = 0.0;  // worst violation measure (check-specific)
    std::string detail;
};

struct ValidationReport {
    bool all_pass = false;
    int samples_used = 0;
    int samples_rejected = 0;
    std::vector<ValidationCheck> checks;
};

/// Samples in-domain points and checks positivity, positive 1-homogeneity
/// (lambda in {0.5, 2, 3}) and positive-definiteness of the fundamental
/// tensor. Failures are report entries, never exceptions.
ValidationReport validate(const MetricSpec& spec, int n_samples, uint64_t seed);

/// Seeded in-domain point sampler shared by validation and the batch runner.
/// x is uniform in the sample ball (rejection), y uniform in the annulus
/// [y_min, y_max] minus declared exclusions. Throws SamplingExhaustedError.
std::vector<std::pair<std::vector<double>, std::vector<double>>> sample_domain_points(const MetricSpec& spec,
                                                                                      int count, uint64_t seed);

/// Warped-family profile f and its first two derivatives (analytic).
double warp_f(WarpPreset p, double t);
double warp_f1(WarpPreset p, double t);
double warp_f2(WarpPreset p, double t);

/// Canonical JSON round-trip for metric definitions.
std::string metric_to_json(const MetricSpec& spec);
MetricSpec metric_from_json(const std::string& text);

}  // namespace finsler
