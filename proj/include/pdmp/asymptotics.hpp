#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pdmp/fpe.hpp"
#include "pdmp/grid.hpp"
#include "pdmp/model.hpp"

namespace pdmp {

enum class Verdict { AsymptoticallyStable, Sweeping, Inconclusive };

std::string_view to_string(Verdict v);

/// An exactly evaluated rational number.
struct ExactValue {
    std::string text;  // "p/q" in lowest terms, or "p"
    int sign = 0;
    double value = 0.0;
};

/// b'(0) of a builtin field; for HopfPolar the radial derivative mu.
/// Throws DegenerateDerivative when it vanishes.
double derivative_at_zero(const VectorField& field);

/// p0 b0'(0) + p1 b1'(0) in exact rational arithmetic on the binary values of
/// the parameters.
ExactValue lambda_exact(const ModelSpec& spec);
double lambda(const ModelSpec& spec);

/// Largest positive zero of any field inside (0, spec.domain.hi); 0 if none.
double support_endpoint(const ModelSpec& spec);

/// Stationary solutions f_i = exp(-R) / |b_i| of the two-state moment system,
/// R(x) = int_{x0}^x (q0 / b0 + q1 / b1).
struct StationaryPair {
    VectorField b0;
    VectorField b1;
    double q0 = 0.0;
    double q1 = 0.0;
    double x0 = 0.0;
    double a = 0.0;
    Grid1D grid;
    /// Cell-center samples; zero for centers outside (0, a).
    std::vector<double> f0;
    std::vector<double> f1;

    double r(double x) const;
    /// -R(x), by adaptive quadrature from x0.
    double log_weight(double x) const;
    double f(int i, double x) const;
    double sum(double x) const { return f(0, x) + f(1, x); }
};

/// Throws SingularInterior if some b_i changes sign strictly inside (0, a).
StationaryPair stationary_pair(const ModelSpec& spec, double x0, double a, const Grid1D& grid);

/// v_star = (f0 + f1) / kappa on (0, a).
struct StationaryDensity {
    StationaryPair pair;
    double kappa = 0.0;

    double operator()(double x) const;
    /// int_lo^hi v_star.
    double mass_in(double lo, double hi) const;
    /// Cell averages on `grid` (zero outside (0, a)).
    std::vector<double> cell_averages(const Grid1D& grid) const;
};

struct KappaResult {
    /// +infinity when the graded quadrature diverges.
    double kappa = 0.0;
    bool finite = false;
    /// Present iff kappa is finite.
    std::optional<StationaryDensity> v_star;
    /// int v_star over (0, a) on the graded nodes.
    double v_star_integral = 0.0;
};

inline constexpr int kGradedLevels = 60;
inline constexpr double kGradedRatio = 0.5;

KappaResult kappa_and_vstar(const StationaryPair& pair);

struct LargeTimeReport {
    double lambda = 0.0;
    std::string lambda_exact;
    Verdict verdict = Verdict::Inconclusive;
    double kappa = 0.0;
    double a = 0.0;
    std::optional<StationaryDensity> v_star;
    std::vector<std::string> notes;
};

LargeTimeReport classify(const ModelSpec& spec);

/// n^n gamma^n > (n-1)^(n-1).
bool fold_condition(double gamma, int n);

/// V*(theta, r) = v_star(r) / (2 pi) on the annulus, as cell averages
/// (theta outer). Throws NegativeLambda unless lambda > 0.
std::vector<double> hopf_vstar(const ModelSpec& spec, const Grid2D& grid);

/// Radial stationary density of a Hopf model: the pitchfork v_star with
/// alpha_i = mu_i.
StationaryDensity hopf_radial_vstar(const ModelSpec& spec);

struct SweepingReport {
    std::vector<double> times;
    std::vector<double> masses;
    /// Strictly decreasing across snapshots.
    bool monotone = false;
    double final_mass = 0.0;
};

/// Mass of the summed density in [lo, hi] per snapshot, by cell overlap.
SweepingReport sweeping_diagnostic(const std::vector<FieldState>& snapshots, const Grid1D& grid, double lo,
                                   double hi);

/// Unnormalized closed-form f_i for Transcritical and Pitchfork pairs (and the
/// radial part of HopfPolar pairs). Throws ConstraintViolation otherwise.
double closed_form_stationary(const ModelSpec& spec, int i, double x);

}  // namespace pdmp
