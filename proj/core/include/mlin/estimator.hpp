#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mlin/grid.hpp"
#include "mlin/operators.hpp"

namespace mlin {

/// Achieved-ratio lower bound of the L^2 x..x L^2 -> L^{2/m} operator
/// quasinorm, with the maximizing tuple as reproducible certificate.
struct NormEstimate {
    double value = 0;
    int trials = 0;
    int ascent_steps = 0;
    std::uint64_t seed = 0;
    std::vector<GridFunction> certificate;
};

struct AscentOptions {
    int trials = 64;
    int ascent_steps = 200;
    double step_tol = 1e-8;
    int workers = 1;
};

/// ||T(f_1..f_m)||_{2/m} / prod ||f_j||_2 for one input tuple; throws
/// numeric_error when the operator output is not finite.
double operator_ratio(const MultilinearOperator& T, std::span<const GridFunction> fs);

/// Best of seeded random complex-Gaussian probes and alternating normalized
/// subgradient ascent on ||T||_{2/m}^{2/m}.  Deterministic for a fixed seed
/// independent of the worker count; best-so-far never decreases.
NormEstimate estimate_opnorm(const MultilinearOperator& T, const AscentOptions& opt,
                             std::uint64_t seed);

struct FitResult {
    double slope = 0;
    double intercept = 0;
    double rms_residual = 0;
};

/// Least squares of log2(value) against log2(parameter); needs >= 3 positive
/// samples.
FitResult fit_scaling(std::span<const std::pair<double, double>> samples);

/// (parameter, estimate, envelope, ratio) series with the fitted log-log
/// slope; the flat-ratio signature is what the scaling experiments gate on.
struct ScalingReport {
    std::string parameter;
    std::vector<double> params, estimates, envelopes, ratios;
    FitResult fit;
    double ratio_max = 0, ratio_min = 0;
    std::uint64_t seed = 0;
};

ScalingReport make_scaling_report(std::string parameter, std::vector<double> params,
                                  std::vector<double> estimates,
                                  const std::function<double(double)>& envelope,
                                  std::uint64_t seed);

/// Ratio series against a predicted envelope plus its max/min spread.
struct EnvelopeRatio {
    std::vector<double> ratios;
    double max = 0, min = 0;
};
EnvelopeRatio envelope_ratio(std::span<const double> estimates,
                             std::span<const double> predicted);

} // namespace mlin
