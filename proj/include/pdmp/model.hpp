#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "pdmp/error.hpp"

namespace pdmp {

// ---------------------------------------------------------------------------
// Vector fields
// ---------------------------------------------------------------------------

/// b(x) = (beta - c x) x - mu x
struct Transcritical {
    double beta;
    double c;
    double mu;
};

/// b(x) = x^n / (1 + x^n) - gamma x
struct Goodwin {
    double gamma;
    int n = 2;
};

/// b(x) = alpha x - x^3
struct Pitchfork {
    double alpha;
};

/// Polar normal form: theta' = omega + b r^2, r' = mu r - r^3. Only b = 0 is
/// admissible, in which case theta advances at the constant rate omega.
struct HopfPolar {
    double omega;
    double mu;
    double b = 0.0;
};

/// b(x) = sum_k coeffs[k] x^k, degree at most kMaxPolynomialDegree.
struct Polynomial {
    std::vector<double> coeffs;
};

inline constexpr std::size_t kMaxPolynomialDegree = 6;

enum class FieldFamily { Transcritical, Goodwin, Pitchfork, HopfPolar, Polynomial };

struct VectorField {
    std::variant<Transcritical, Goodwin, Pitchfork, HopfPolar, Polynomial> params;

    FieldFamily family() const { return static_cast<FieldFamily>(params.index()); }
    bool is_polar() const { return family() == FieldFamily::HopfPolar; }
};

/// b(x). For HopfPolar this is the radial component mu r - r^3.
double eval_field(const VectorField& f, double x);
/// b'(x). For HopfPolar the radial derivative mu - 3 r^2.
double eval_field_derivative(const VectorField& f, double x);
/// Angular velocity of a HopfPolar field (b = 0); 0 for every 1D family.
double angular_rate(const VectorField& f);

std::string_view to_string(FieldFamily family);

// ---------------------------------------------------------------------------
// Switching chain
// ---------------------------------------------------------------------------

/// Intensity matrix of the environment chain, stored row-major.
class SwitchingChain {
public:
    SwitchingChain() = default;

    /// Builds Q from the off-diagonal rates; diagonal entries are set so that
    /// every row sums to zero.
    static SwitchingChain from_rates(const std::vector<std::vector<double>>& rates);
    /// Two-state chain with q_01 = q0 and q_10 = q1.
    static SwitchingChain two_state(double q0, double q1);
    /// Takes the full matrix verbatim, diagonal included. Used to represent
    /// user input that may violate the row-sum invariant; see validate().
    static SwitchingChain from_matrix(const std::vector<std::vector<double>>& q);

    std::size_t size() const { return n_; }
    double rate(std::size_t i, std::size_t j) const { return q_[i * n_ + j]; }
    /// q_i = sum_{j != i} q_ij
    double exit_rate(std::size_t i) const;

private:
    std::size_t n_ = 0;
    std::vector<double> q_;
};

// ---------------------------------------------------------------------------
// Domain and initial density
// ---------------------------------------------------------------------------

enum class DomainKind { Interval, PolarAnnulus };

/// Interval (lo, hi), or for PolarAnnulus the radial range (lo, hi) times the
/// periodic angle [0, 2 pi).
struct Domain {
    DomainKind kind = DomainKind::Interval;
    double lo = 0.0;
    double hi = 1.0;

    static Domain interval(double lo, double hi) { return {DomainKind::Interval, lo, hi}; }
    static Domain polar_annulus(double r_lo, double r_hi) { return {DomainKind::PolarAnnulus, r_lo, r_hi}; }

    bool contains(double x) const { return x > lo && x < hi; }
};

enum class DensityKind { GridSamples, SmoothBump, TruncatedGaussian, ProductOfMarginals };

/// A probability density on a 1D interval, or the product of an angular and
/// a radial marginal. Normalized at construction.
class InitialDensity {
public:
    InitialDensity() = default;

    /// Piecewise constant on a uniform partition of [lo, hi].
    static InitialDensity grid_samples(double lo, double hi, std::vector<double> values);
    /// C-infinity bump exp(-1 / (1 - z^2)), z = (x - center) / half_width,
    /// restricted to [lo, hi].
    static InitialDensity smooth_bump(double center, double half_width, double lo, double hi);
    static InitialDensity truncated_gaussian(double mean, double sd, double lo, double hi);
    /// g(theta, r) = angular(theta) * radial(r).
    static InitialDensity product(InitialDensity angular, InitialDensity radial);

    DensityKind kind() const { return kind_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }

    double operator()(double x) const;
    double operator()(double theta, double r) const;

    /// Mean of the density over [a, b], computed by quadrature (exact for
    /// GridSamples).
    double cell_average(double a, double b) const;

    const InitialDensity& angular() const { return marginals_.at(0); }
    const InitialDensity& radial() const { return marginals_.at(1); }

private:
    double raw(double x) const;

    DensityKind kind_ = DensityKind::SmoothBump;
    double lo_ = 0.0;
    double hi_ = 1.0;
    double p0_ = 0.5;  // center or mean
    double p1_ = 0.25; // half width or sd
    double scale_ = 1.0;
    std::vector<double> samples_;
    std::vector<InitialDensity> marginals_;
};

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

struct ModelSpec {
    std::vector<VectorField> fields;
    SwitchingChain chain;
    Domain domain;
    InitialDensity g;
    std::size_t initial_state = 0;

    std::size_t n_states() const { return fields.size(); }
    bool is_polar() const { return domain.kind == DomainKind::PolarAnnulus; }
};

enum class DiagnosticCode {
    FieldCountMismatch,
    InitialStateOutOfRange,
    NegativeRate,
    RowSumNonzero,
    AbsorbingState,
    DomainInvalid,
    DomainKindMismatch,
    TranscriticalParam,
    GoodwinParam,
    HopfBNonzero,
    PolynomialDegree,
    NonFiniteField,
    DensityInvalid,
};

std::string_view to_string(DiagnosticCode code);

struct Diagnostic {
    DiagnosticCode code;
    std::string message;
};

/// Empty iff every invariant holds.
std::vector<Diagnostic> validate(const ModelSpec& spec);

/// Throws ConstraintViolation listing every diagnostic, if any.
void require_valid(const ModelSpec& spec);

enum class BuiltinModel { Transcritical, Goodwin, Pitchfork, Hopf };

using ParamMap = std::map<std::string, double>;

/// Two-state builtin models. Required keys:
///   all:            q0, q1
///   Transcritical:  beta0, beta1, c, mu
///   Goodwin:        gamma0, gamma1      (n optional, default 2)
///   Pitchfork:      alpha0, alpha1
///   Hopf:           omega0, omega1, mu0, mu1   (b optional, must be 0)
/// Optional: x_hi (defaults to 1.5 x the largest positive stationary point),
/// x_lo (default 0), initial_state, g_center, g_width, and for Hopf
/// theta_center, theta_width.
ModelSpec build_builtin(BuiltinModel model, const ParamMap& params);

std::string_view to_string(BuiltinModel model);

}  // namespace pdmp
