#pragma once

#include <optional>
#include <string>

#include "finsler/cartan_frame.hpp"
#include "finsler/point_frame.hpp"

namespace finsler {

enum class Label { Holds, Fails, Indeterminate };
const char* label_name(Label l);

struct Verdict {
    Label label = Label::Indeterminate;
    std::optional<double> scalar;
    double residual = 0.0;
    double tolerance = 0.0;
    std::vector<std::string> flags;

    bool holds() const { return label == Label::Holds; }
};

// --- metric-weighted tensor utilities (plain values) ---

/// |T|^2 with every covariant slot raised and every contravariant slot
/// lowered by g, then contracted against T itself.
double norm_g(PointFrame& frame, const Tensor<double>& t);

/// g-weighted inner product of two tensors of equal variance.
double inner_g(PointFrame& frame, const Tensor<double>& a, const Tensor<double>& b);

/// Relative residual with the absolute floor that classifies identically
/// zero tensors as exact.
double rel_residual(double diff_norm, double ref_norm, int n, int rank);
double residual_floor(int n, int rank);

// --- projection operator ---

/// Contracts every slot with the indicatrix projector h (covariant slots on
/// its upper index, contravariant slots on its lower index). Idempotent;
/// annihilates the Hilbert form and every eta-contraction.
TensorJ project(PointFrame& frame, const TensorJ& t);
Tensor<double> project_values(PointFrame& frame, const Tensor<double>& t);

// --- abstract-slot assemblies ---
// Quadrilinear components R(X_j, X_k, Z_h, W_d) of the h-curvatures, i.e.
// the pairing in which the catalog's constant-curvature family comes out
// with positive scalar. All slots covariant.
Tensor<double> berwald_quad(PointFrame& frame);
Tensor<double> cartan_quad(CartanFrame& cf);
TensorJ berwald_quad_jets(PointFrame& frame);

/// The antisymmetrized hbar x hbar pattern A_{jkhd} = hbar_{jh} hbar_{kd} -
/// hbar_{kh} hbar_{jd}; its g-norm squared is 2(n-1)(n-2).
Tensor<double> hp_pattern(PointFrame& frame);

// --- extracted scalar fields (jets, differentiable) ---
Jet scalar_curvature_field(PointFrame& frame);  // k = tr H / ((n-1) L^2)
Jet hp_scalar_field(PointFrame& frame);         // eps from the projected h-curvature

// --- pi-form towers over a scalar field ---
TensorJ c_form(PointFrame& frame, const Jet& field);      // C_i = L d/dy^i field
TensorJ b_form(PointFrame& frame, const TensorJ& c);      // B_ij = L P(d/dy^j C_i)
TensorJ a_form(PointFrame& frame, const TensorJ& b);      // A_ijk = L P(d/dy^k B_ij)

// --- classifier verdicts ---
Verdict scalar_curvature_test(PointFrame& frame, double tol);
Verdict hp_scalar_test(PointFrame& frame, double tol);
Verdict constant_curvature_test(PointFrame& frame, double tol);
Verdict hp_constant_test(PointFrame& frame, double tol);
Verdict vanishing_hp_test(PointFrame& frame, double tol);
Verdict thm_b_alpha_check(PointFrame& frame, double tol);  // B^k = 3(eps-k) hbar
struct RatioVerdicts {
    Verdict c, b, a;
};
RatioVerdicts ratio_checks(PointFrame& frame, double tol);  // 3X^eps = 2X^k
Verdict f_form_test(PointFrame& frame, double tol);         // P.F = 0 <=> constant curvature
Verdict n_form_test(PointFrame& frame, double tol);         // P.N = 0 <=> vanishing hp
struct PerpendicularResult {
    Verdict verdict;
    double q = 0.0, rho = 0.0;
};
PerpendicularResult perpendicular_test(CartanFrame& cf, double tol);
Verdict theorem_a_identity(CartanFrame& cf, double tol);

// --- identity suite (curvature identities, residual-based) ---
struct IdentityResult {
    std::string name;
    bool applicable = true;
    bool pass = false;
    double residual = 0.0;
    double tolerance = 0.0;
};

std::vector<IdentityResult> identity_suite(CartanFrame& cf, double scale_tol = 1.0);

/// Jet y-order needed for a given set of checks (x-order is always 2).
int required_y_order(bool classify, bool identities, bool theorem_a, bool perpendicular, bool ratios);

}  // namespace finsler
