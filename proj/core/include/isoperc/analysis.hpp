#pragma once

#include "isoperc/percsim.hpp"

#include <cstdint>
#include <limits>
#include <string_view>

namespace isoperc {

enum class FitKind { Power, Exponential };

/// Closed abscissa interval [lo, hi].
struct FitWindow {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

struct FitOptions {
    std::size_t resamples = 1000;
    std::uint64_t seed = 0;
    double confidence = 0.95;
};

/// Power fits report the slope of log y against log x (y ~ x^slope).
/// Exponential fits report the decay rate a of y ~ e^{-a x}.
struct ExponentFit {
    FitKind kind = FitKind::Power;
    double estimate = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double std_error = 0.0;  // bootstrap standard deviation
    double intercept = 0.0;  // log y at x = 1 (power) or x = 0 (exponential)
    FitWindow window;        // abscissa range actually used
    std::size_t points = 0;
    /// Weighted RMS residual of log y.
    double residual_norm = 0.0;

    bool ci_excludes_zero() const noexcept { return ci_lo > 0.0 || ci_hi < 0.0; }
};

/// Weighted least squares on (log x, log y) with weights y^2 / stderr^2 (all
/// equal when no errors are given). The CI comes from resampling batch means
/// jointly across abscissae, or from Gaussian noise of size stderr when the
/// curve carries no batches. Needs at least 4 points in the window (Error(Size))
/// with positive estimates (Error(Domain)).
ExponentFit fit_power_law(const ObservableCurve& curve, FitWindow window = {}, const FitOptions& options = {});
/// Same on (x, log y).
ExponentFit fit_exponential(const ObservableCurve& curve, FitWindow window = {}, const FitOptions& options = {});

/// Window from the (skip+1)-th smallest positive abscissa up to the last
/// point before an estimate vanishes or its standard error exceeds
/// `max_relative_error` times the estimate. Empty (lo > hi) when none qualify.
FitWindow resolved_window(const ObservableCurve& curve, std::size_t skip = 2, double max_relative_error = 0.5);

/// A curve from plain values, with optional standard errors.
ObservableCurve make_curve(std::vector<double> x, std::vector<double> y, std::vector<double> std_error = {});

struct ExponentValue {
    double value = 0.0;
    double std_error = 0.0;
};

/// rho from P(rad >= k) ~ k^{-1/rho}; eta from P(0 <-> x) ~ |x|^{-eta};
/// delta from P(|C| >= n) ~ n^{-1/delta}.
ExponentValue rho_from_one_arm(const ExponentFit& fit);
ExponentValue eta_from_two_point(const ExponentFit& fit);
ExponentValue delta_from_volume(const ExponentFit& fit);

enum class Verdict { Consistent, Inconsistent, Inconclusive };
std::string_view to_string(Verdict v) noexcept;

struct RelationCheck {
    double residual = 0.0;
    double std_error = 0.0;
    Verdict verdict = Verdict::Inconclusive;
};

struct ScalingReport {
    RelationCheck eta_rho;    // eta rho - 2
    RelationCheck rho_delta;  // 2 rho - (delta + 1)
    /// Inconsistent if either relation is, Consistent if both are.
    Verdict overall = Verdict::Inconclusive;
};

/// Residuals with delta-method errors. A relation is inconsistent when the
/// residual lies outside its 95% band, inconclusive when that band is wider
/// than half the relation's scale, consistent otherwise.
ScalingReport scaling_report(ExponentValue rho, ExponentValue eta, ExponentValue delta);

} // namespace isoperc
