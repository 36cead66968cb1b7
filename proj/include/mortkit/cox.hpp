#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mortkit/cohort.hpp"

namespace mortkit {

struct CovariateSpec {
    std::vector<std::string> names; // one label per covariate column, unique
};

struct CoxFit {
    std::vector<double> coefficients;
    std::vector<double> hazard_ratios;   // exp(coefficients[i]), as computed
    std::vector<double> standard_errors; // sqrt(diag(inverse observed information))
    double log_partial_likelihood = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Breslow partial log-likelihood and its analytic gradient at the given
// coefficient vector. Tied deaths share one risk-set term; subjects censored
// at a death time are still at risk for it.
std::pair<double, std::vector<double>>
partial_loglik_and_gradient(const Cohort& cohort, const std::vector<double>& coefficients);

// Maximizes the Breslow partial log-likelihood by Newton-Raphson with
// step-halving (gradient 2-norm tolerance 1e-8, at most 50 iterations,
// at most 20 halvings per step). Aborts with Divergence once any |w| > 50,
// which signals monotone likelihood. Returns converged=false with the best
// iterate when the iteration or halving limits are hit.
CoxFit cox_fit(const Cohort& cohort, const CovariateSpec& spec);

} // namespace mortkit
