#include "mlin/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mlin/errors.hpp"
#include "mlin/parallel.hpp"
#include "mlin/rng.hpp"

namespace mlin {

namespace {

double lp_power(const GridFunction& u, double p, double meas) {
    double acc = 0;
    for (const auto& v : u.values()) acc += std::pow(std::abs(v), p);
    return acc * meas;
}

// subgradient weight of sum |u|^p dx: p |u|^{p-2} u dx, 0 at u = 0
GridFunction subgradient_weight(const GridFunction& u, double p, double meas) {
    GridFunction v(u.grid());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double a = std::abs(u[i]);
        if (a > 0.0) v[i] = meas * p * std::pow(a, p - 2.0) * u[i];
    }
    return v;
}

struct TrialResult {
    double value = 0;
    std::vector<GridFunction> inputs;
};

} // namespace

double operator_ratio(const MultilinearOperator& T, std::span<const GridFunction> fs) {
    GridFunction u = T.apply(fs);
    for (const auto& v : u.values()) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw numeric_error("operator produced a non-finite value; inputs recorded in the "
                                "certificate of the failing trial");
    }
    const double p = 2.0 / T.arity();
    double den = 1;
    for (const auto& f : fs) den *= l2_norm(f);
    if (den == 0) return 0;
    return quasinorm(u, p) / den;
}

NormEstimate estimate_opnorm(const MultilinearOperator& T, const AscentOptions& opt,
                             std::uint64_t seed) {
    if (opt.trials < 1) throw std::invalid_argument("estimate_opnorm: trials must be >= 1");
    const int m = T.arity();
    const TorusGrid& g = T.grid();
    const double p = 2.0 / m;
    double meas = 1;
    for (int a = 0; a < g.n; ++a) meas *= g.dx();

    const auto warm = T.initializers();

    auto run_trial = [&](std::size_t trial) {
        Rng rng = Rng::substream(seed, trial);
        TrialResult tr;
        if (trial < warm.size()) {
            tr.inputs = warm[trial];
            for (auto& f : tr.inputs) {
                const double nrm = l2_norm(f);
                if (nrm > 0) f *= cplx{1.0 / nrm, 0};
            }
        } else {
            for (int j = 0; j < m; ++j) tr.inputs.push_back(GridFunction::random_unit(g, rng));
        }
        tr.value = operator_ratio(T, tr.inputs);

        double step = 0.25;
        for (int it = 0; it < opt.ascent_steps && step >= opt.step_tol; ++it) {
            const int j = it % m;
            GridFunction u = T.apply(tr.inputs);
            GridFunction v = subgradient_weight(u, p, meas);
            GridFunction grad = T.adjoint_gradient(j, tr.inputs, v);
            const double gn = l2_norm(grad);
            if (gn == 0.0) continue;
            // normalized step with halving line search and sphere retraction
            bool accepted = false;
            while (step >= opt.step_tol) {
                std::vector<GridFunction> cand = tr.inputs;
                for (std::size_t i = 0; i < cand[j].size(); ++i)
                    cand[j][i] += cplx{step / gn, 0} * grad[i];
                const double nrm = l2_norm(cand[j]);
                if (nrm > 0) cand[j] *= cplx{1.0 / nrm, 0};
                const double val = operator_ratio(T, cand);
                if (val > tr.value) {
                    tr.value = val;
                    tr.inputs = std::move(cand);
                    step = std::min(step * 2.0, 1.0);
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) break;
        }
        return tr;
    };

    std::vector<TrialResult> results(static_cast<std::size_t>(opt.trials));
    parallel_for(results.size(), opt.workers,
                 [&](std::size_t t) { results[t] = run_trial(t); });

    NormEstimate best;
    best.trials = opt.trials;
    best.ascent_steps = opt.ascent_steps;
    best.seed = seed;
    std::size_t besti = 0;
    for (std::size_t t = 0; t < results.size(); ++t) {
        if (results[t].value > best.value) {
            best.value = results[t].value;
            besti = t;
        }
    }
    best.certificate = std::move(results[besti].inputs);
    return best;
}

FitResult fit_scaling(std::span<const std::pair<double, double>> samples) {
    if (samples.size() < 3) throw std::invalid_argument("fit_scaling: need at least 3 samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<std::pair<double, double>> logs;
    for (const auto& [x, y] : samples) {
        if (!(x > 0) || !(y > 0))
            throw std::invalid_argument("fit_scaling: samples must be positive");
        logs.emplace_back(std::log2(x), std::log2(y));
    }
    const double n = static_cast<double>(logs.size());
    for (const auto& [lx, ly] : logs) {
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0) throw std::invalid_argument("fit_scaling: degenerate abscissae");
    FitResult fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double rss = 0;
    for (const auto& [lx, ly] : logs) {
        const double r = ly - (fit.slope * lx + fit.intercept);
        rss += r * r;
    }
    fit.rms_residual = std::sqrt(rss / n);
    return fit;
}

EnvelopeRatio envelope_ratio(std::span<const double> estimates,
                             std::span<const double> predicted) {
    if (estimates.size() != predicted.size())
        throw std::invalid_argument("envelope_ratio: series lengths differ");
    if (estimates.empty()) throw std::invalid_argument("envelope_ratio: empty series");
    EnvelopeRatio out;
    out.max = -1e300;
    out.min = 1e300;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        const double r = estimates[i] / predicted[i];
        out.ratios.push_back(r);
        out.max = std::max(out.max, r);
        out.min = std::min(out.min, r);
    }
    return out;
}

ScalingReport make_scaling_report(std::string parameter, std::vector<double> params,
                                  std::vector<double> estimates,
                                  const std::function<double(double)>& envelope,
                                  std::uint64_t seed) {
    if (params.size() != estimates.size())
        throw std::invalid_argument("scaling report: series lengths differ");
    ScalingReport rep;
    rep.parameter = std::move(parameter);
    rep.params = std::move(params);
    rep.estimates = std::move(estimates);
    rep.seed = seed;
    for (std::size_t i = 0; i < rep.params.size(); ++i)
        rep.envelopes.push_back(envelope(rep.params[i]));
    EnvelopeRatio er = envelope_ratio(rep.estimates, rep.envelopes);
    rep.ratios = er.ratios;
    rep.ratio_max = er.max;
    rep.ratio_min = er.min;
    std::vector<std::pair<double, double>> samples;
    for (std::size_t i = 0; i < rep.params.size(); ++i)
        samples.emplace_back(rep.params[i], rep.estimates[i]);
    rep.fit = fit_scaling(samples);
    return rep;
}

} // namespace mlin
