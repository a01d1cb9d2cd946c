// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "csrec/common.hpp"

namespace csrec::weighting {

// sigma solving density(0)/density(1) = contrast for the zero-mean Normal
// truncated to [0,1]: sigma = 1/sqrt(2 ln contrast).
double calibrate_sigma(double contrast);

// Density of a Normal(0, sigma^2) truncated to [0,1]. cost(0)/cost(1) equals
// the contrast exactly and the density integrates to 1 over [0,1].
struct CostFunction {
    double contrast = 0.0;
    double sigma = 0.0;
    double normalizer = 0.0;  // sigma * (Phi(1/sigma) - Phi(0))

    static CostFunction for_contrast(double contrast);
    double operator()(double x) const;  // x in [0,1]
};

// Rank statistic of the scores normalized to [0,1]:
// (avg_rank - 1)/(N - 1), average ranks for ties, so the minimum score maps
// to 0 and the maximum to 1 and the cost function's full co-domain is used.
std::vector<double> ecdf_normalize(const std::vector<double>& scores);

struct WeightOptions {
    bool mean_one = false;  // rescale weights to mean 1 (off: raw density)
};

// omega(u) = cost(ecdf(score_u)); strictly positive, non-increasing in the
// raw score.
std::vector<double> user_weights(const std::vector<double>& scores, double contrast,
                                 const WeightOptions& opts = {});

}  // namespace csrec::weighting
