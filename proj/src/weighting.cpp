// SPDX-License-Identifier: Apache-2.0
#include "csrec/weighting.hpp"

#include <cmath>

#include "csrec/metrics.hpp"

namespace csrec::weighting {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;  // 1/sqrt(2*pi)

double normal_pdf(double t) { return kInvSqrt2Pi * std::exp(-0.5 * t * t); }

// Standard Normal cdf via erfc, accurate to well below 1e-12 absolute.
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

double calibrate_sigma(double contrast) {
    if (!(contrast > 1.0)) throw ConfigError("cost function: contrast must be > 1");
    return 1.0 / std::sqrt(2.0 * std::log(contrast));
}

CostFunction CostFunction::for_contrast(double contrast) {
    CostFunction fn;
    fn.contrast = contrast;
    fn.sigma = calibrate_sigma(contrast);
    fn.normalizer = fn.sigma * (normal_cdf(1.0 / fn.sigma) - normal_cdf(0.0));
    return fn;
}

double CostFunction::operator()(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) throw DataError("cost function: argument outside [0,1]");
    return normal_pdf(x / sigma) / normalizer;
}

std::vector<double> ecdf_normalize(const std::vector<double>& scores) {
    const std::size_t n = scores.size();
    if (n < 2) throw DataError("ecdf_normalize: need at least two users");
    for (double s : scores)
        if (std::isnan(s)) throw DataError("ecdf_normalize: NaN score");
    auto ranks = metrics::average_ranks(scores);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = (ranks[i] - 1.0) / double(n - 1);
    return out;
}

std::vector<double> user_weights(const std::vector<double>& scores, double contrast,
                                 const WeightOptions& opts) {
    const auto fn = CostFunction::for_contrast(contrast);
    const auto values = ecdf_normalize(scores);
    std::vector<double> weights(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) weights[i] = fn(values[i]);
    if (opts.mean_one) {
        double mean = 0.0;
        for (double w : weights) mean += w;
        mean /= double(weights.size());
        for (double& w : weights) w /= mean;
    }
    return weights;
}

}  // namespace csrec::weighting
