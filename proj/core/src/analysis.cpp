#include "isoperc/analysis.hpp"

#include "isoperc/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace isoperc {

namespace {

struct Line {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
};

Line weighted_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w) {
    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
    }
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += w[i] * (x[i] - mx) * (x[i] - mx);
        sxy += w[i] * (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0)) throw Error(ErrorKind::Size, "fit window has no spread in the abscissa");
    Line l;
    l.slope = sxy / sxx;
    l.intercept = my - l.slope * mx;
    double rss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (l.intercept + l.slope * x[i]);
        rss += w[i] * r * r;
    }
    l.residual = std::sqrt(rss / sw);
    return l;
}

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= v.size()) return v.back();
    return v[i] + (pos - static_cast<double>(i)) * (v[i + 1] - v[i]);
}

ExponentFit fit(const ObservableCurve& c, FitWindow window, const FitOptions& options, FitKind kind) {
    if (c.estimate.size() != c.abscissa.size()) throw Error(ErrorKind::Shape, "curve columns differ in length");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < c.abscissa.size(); ++i)
        if (c.abscissa[i] >= window.lo && c.abscissa[i] <= window.hi) idx.push_back(i);
    if (idx.size() < 4) throw Error(ErrorKind::Size, "fit window holds fewer than 4 points");
    for (auto i : idx)
        if (!(c.estimate[i] > 0)) throw Error(ErrorKind::Domain, "nonpositive estimate in fit window");
    if (kind == FitKind::Power)
        for (auto i : idx)
            if (!(c.abscissa[i] > 0)) throw Error(ErrorKind::Domain, "power fit needs positive abscissae");

    const std::size_t n = idx.size();
    std::vector<double> x(n), y(n), w(n, 1.0), se(n, 0.0);
    bool have_errors = c.std_error.size() == c.abscissa.size();
    for (std::size_t k = 0; k < n; ++k) {
        const auto i = idx[k];
        x[k] = kind == FitKind::Power ? std::log(c.abscissa[i]) : c.abscissa[i];
        y[k] = std::log(c.estimate[i]);
        if (have_errors) se[k] = c.std_error[i];
    }
    double floor = std::numeric_limits<double>::infinity();
    for (double s : se)
        if (s > 0) floor = std::min(floor, s);
    have_errors = have_errors && std::isfinite(floor);
    if (have_errors)
        for (std::size_t k = 0; k < n; ++k) {
            const double rel = std::max(se[k], floor) / c.estimate[idx[k]];
            w[k] = 1.0 / (rel * rel);
        }

    const Line line = weighted_line(x, y, w);
    ExponentFit out;
    out.kind = kind;
    out.estimate = kind == FitKind::Power ? line.slope : -line.slope;
    out.intercept = line.intercept;
    out.residual_norm = line.residual;
    out.points = n;
    out.window = {c.abscissa[idx.front()], c.abscissa[idx.back()]};
    for (auto i : idx) {
        out.window.lo = std::min(out.window.lo, c.abscissa[i]);
        out.window.hi = std::max(out.window.hi, c.abscissa[i]);
    }

    std::size_t batches = 0;
    if (c.batch_means.size() == c.abscissa.size()) {
        batches = c.batch_means[idx[0]].size();
        for (auto i : idx)
            if (c.batch_means[i].size() != batches) batches = 0;
    }
    if (batches < 2 && !have_errors) {
        out.ci_lo = out.ci_hi = out.estimate;
        return out;
    }

    std::mt19937_64 gen(options.seed);
    std::normal_distribution<double> normal;
    std::uniform_int_distribution<std::size_t> pick(0, batches > 0 ? batches - 1 : 0);
    std::vector<double> draws;
    draws.reserve(options.resamples);
    std::vector<double> yb(n);
    std::vector<std::size_t> chosen(batches);
    for (std::size_t r = 0; r < options.resamples; ++r) {
        bool ok = true;
        if (batches >= 2) {
            for (auto& b : chosen) b = pick(gen);
            for (std::size_t k = 0; k < n && ok; ++k) {
                double m = 0;
                for (auto b : chosen) m += c.batch_means[idx[k]][b];
                m /= static_cast<double>(batches);
                ok = m > 0;
                yb[k] = ok ? std::log(m) : 0.0;
            }
        } else {
            for (std::size_t k = 0; k < n && ok; ++k) {
                const double v = c.estimate[idx[k]] + se[k] * normal(gen);
                ok = v > 0;
                yb[k] = ok ? std::log(v) : 0.0;
            }
        }
        if (!ok) continue;
        const double s = weighted_line(x, yb, w).slope;
        draws.push_back(kind == FitKind::Power ? s : -s);
    }
    if (draws.size() < 2) {
        out.ci_lo = out.ci_hi = out.estimate;
        return out;
    }
    const double tail = (1.0 - options.confidence) / 2;
    out.ci_lo = std::min(quantile(draws, tail), out.estimate);
    out.ci_hi = std::max(quantile(draws, 1.0 - tail), out.estimate);
    double mean = 0;
    for (double d : draws) mean += d;
    mean /= static_cast<double>(draws.size());
    double var = 0;
    for (double d : draws) var += (d - mean) * (d - mean);
    out.std_error = std::sqrt(var / static_cast<double>(draws.size() - 1));
    return out;
}

ExponentValue reciprocal_of_negated(const ExponentFit& f) {
    if (!(f.estimate < 0)) throw Error(ErrorKind::Domain, "tail exponent must be negative");
    return {-1.0 / f.estimate, f.std_error / (f.estimate * f.estimate)};
}

RelationCheck check(double residual, double std_error, double scale) {
    RelationCheck r{residual, std_error, Verdict::Consistent};
    const double band = 1.96 * std_error;
    if (std::abs(residual) > band + 1e-12 * scale) r.verdict = Verdict::Inconsistent;
    else if (band > 0.5 * scale) r.verdict = Verdict::Inconclusive;
    return r;
}

} // namespace

ExponentFit fit_power_law(const ObservableCurve& curve, FitWindow window, const FitOptions& options) {
    return fit(curve, window, options, FitKind::Power);
}

ExponentFit fit_exponential(const ObservableCurve& curve, FitWindow window, const FitOptions& options) {
    return fit(curve, window, options, FitKind::Exponential);
}

FitWindow resolved_window(const ObservableCurve& c, std::size_t skip, double max_relative_error) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < c.abscissa.size(); ++i)
        if (c.abscissa[i] > 0) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return c.abscissa[a] < c.abscissa[b]; });
    FitWindow w{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (std::size_t j = skip; j < order.size(); ++j) {
        const auto i = order[j];
        const double se = i < c.std_error.size() ? c.std_error[i] : 0.0;
        if (!(c.estimate[i] > 0) || se > max_relative_error * c.estimate[i]) break;
        w.lo = std::min(w.lo, c.abscissa[i]);
        w.hi = std::max(w.hi, c.abscissa[i]);
    }
    return w;
}

ObservableCurve make_curve(std::vector<double> x, std::vector<double> y, std::vector<double> std_error) {
    if (x.size() != y.size() || (!std_error.empty() && std_error.size() != x.size()))
        throw Error(ErrorKind::Shape, "curve columns differ in length");
    ObservableCurve c;
    c.abscissa = std::move(x);
    c.estimate = std::move(y);
    c.std_error = std_error.empty() ? std::vector<double>(c.abscissa.size(), 0.0) : std::move(std_error);
    c.samples.assign(c.abscissa.size(), 0);
    return c;
}

ExponentValue rho_from_one_arm(const ExponentFit& fit) { return reciprocal_of_negated(fit); }
ExponentValue eta_from_two_point(const ExponentFit& fit) { return {-fit.estimate, fit.std_error}; }
ExponentValue delta_from_volume(const ExponentFit& fit) { return reciprocal_of_negated(fit); }

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
    case Verdict::Consistent: return "consistent";
    case Verdict::Inconsistent: return "inconsistent";
    case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

ScalingReport scaling_report(ExponentValue rho, ExponentValue eta, ExponentValue delta) {
    ScalingReport r;
    const double s1 = std::hypot(eta.value * rho.std_error, rho.value * eta.std_error);
    r.eta_rho = check(eta.value * rho.value - 2.0, s1, 2.0);
    const double s2 = std::hypot(2 * rho.std_error, delta.std_error);
    r.rho_delta = check(2 * rho.value - (delta.value + 1), s2, std::abs(delta.value + 1));
    if (r.eta_rho.verdict == Verdict::Inconsistent || r.rho_delta.verdict == Verdict::Inconsistent)
        r.overall = Verdict::Inconsistent;
    else if (r.eta_rho.verdict == Verdict::Consistent && r.rho_delta.verdict == Verdict::Consistent)
        r.overall = Verdict::Consistent;
    return r;
}

} // namespace isoperc
