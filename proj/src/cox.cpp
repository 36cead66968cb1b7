#include "mortkit/cox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mortkit/errors.hpp"

namespace mortkit {

namespace {

constexpr double kGradientTolerance = 1e-8;
constexpr int kMaxIterations = 50;
constexpr int kMaxHalvings = 20;
constexpr double kCoefficientBound = 50.0;

// Cohort data sorted by descending time so the risk set grows as we walk it.
// Covariates are mean-centered; the Breslow likelihood is exactly invariant
// under that shift but the exponentials stay tame.
struct PreparedCohort {
    std::size_t n = 0;
    std::size_t p = 0;
    std::vector<double> time;      // descending
    std::vector<char> event;
    std::vector<double> x;         // row-major n*p, centered
    std::size_t n_deaths = 0;
};

PreparedCohort prepare(const Cohort& cohort) {
    const std::vector<Subject>& subs = cohort.subjects;
    PreparedCohort pc;
    pc.n = subs.size();
    pc.p = subs.front().covariates.size();

    std::vector<std::size_t> order(pc.n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return subs[a].observed_time > subs[b].observed_time;
    });

    std::vector<double> means(pc.p, 0.0);
    for (const Subject& s : subs) {
        for (std::size_t k = 0; k < pc.p; ++k) means[k] += s.covariates[k];
    }
    for (double& m : means) m /= static_cast<double>(pc.n);

    pc.time.resize(pc.n);
    pc.event.resize(pc.n);
    pc.x.resize(pc.n * pc.p);
    for (std::size_t i = 0; i < pc.n; ++i) {
        const Subject& s = subs[order[i]];
        pc.time[i] = s.observed_time;
        pc.event[i] = s.event ? 1 : 0;
        if (s.event) ++pc.n_deaths;
        for (std::size_t k = 0; k < pc.p; ++k) {
            pc.x[i * pc.p + k] = s.covariates[k] - means[k];
        }
    }
    return pc;
}

struct LikelihoodEval {
    double loglik = 0.0;
    std::vector<double> gradient; // empty unless requested
    std::vector<double> hessian;  // p*p row-major, empty unless requested
};

// Single descending pass: add each tie group to the running risk-set sums,
// then fold the group's deaths into the Breslow terms.
LikelihoodEval evaluate(const PreparedCohort& pc, const std::vector<double>& beta,
                        bool want_derivatives) {
    const std::size_t p = pc.p;
    LikelihoodEval out;
    if (want_derivatives) {
        out.gradient.assign(p, 0.0);
        out.hessian.assign(p * p, 0.0);
    }

    double s0 = 0.0;
    std::vector<double> s1(p, 0.0);
    std::vector<double> s2(want_derivatives ? p * p : 0, 0.0);
    std::vector<double> death_etas;

    std::size_t i = 0;
    while (i < pc.n) {
        const double t = pc.time[i];
        death_etas.clear();
        long deaths = 0;
        while (i < pc.n && pc.time[i] == t) {
            const double* xi = &pc.x[i * p];
            double eta = 0.0;
            for (std::size_t k = 0; k < p; ++k) eta += xi[k] * beta[k];
            const double w = std::exp(eta);
            s0 += w;
            for (std::size_t k = 0; k < p; ++k) s1[k] += w * xi[k];
            if (want_derivatives) {
                for (std::size_t k = 0; k < p; ++k) {
                    const double wxk = w * xi[k];
                    for (std::size_t l = k; l < p; ++l) s2[k * p + l] += wxk * xi[l];
                }
            }
            if (pc.event[i]) {
                ++deaths;
                death_etas.push_back(eta);
                if (want_derivatives) {
                    for (std::size_t k = 0; k < p; ++k) out.gradient[k] += xi[k];
                }
            }
            ++i;
        }
        if (deaths == 0) continue;

        for (double eta : death_etas) out.loglik += eta;
        out.loglik -= static_cast<double>(deaths) * std::log(s0);
        if (want_derivatives) {
            const double d = static_cast<double>(deaths);
            for (std::size_t k = 0; k < p; ++k) {
                const double mk = s1[k] / s0;
                out.gradient[k] -= d * mk;
                for (std::size_t l = k; l < p; ++l) {
                    const double ml = s1[l] / s0;
                    out.hessian[k * p + l] -= d * (s2[k * p + l] / s0 - mk * ml);
                }
            }
        }
    }
    if (want_derivatives) {
        for (std::size_t k = 0; k < p; ++k) {
            for (std::size_t l = 0; l < k; ++l) out.hessian[k * p + l] = out.hessian[l * p + k];
        }
    }
    return out;
}

// In-place lower Cholesky of a symmetric positive-definite p*p matrix.
bool cholesky(std::vector<double>& a, std::size_t p) {
    for (std::size_t j = 0; j < p; ++j) {
        double diag = a[j * p + j];
        for (std::size_t k = 0; k < j; ++k) diag -= a[j * p + k] * a[j * p + k];
        if (!(diag > 0.0)) return false;
        const double ljj = std::sqrt(diag);
        a[j * p + j] = ljj;
        for (std::size_t i = j + 1; i < p; ++i) {
            double v = a[i * p + j];
            for (std::size_t k = 0; k < j; ++k) v -= a[i * p + k] * a[j * p + k];
            a[i * p + j] = v / ljj;
        }
    }
    return true;
}

std::vector<double> cholesky_solve(const std::vector<double>& chol, std::size_t p,
                                   std::vector<double> b) {
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t k = 0; k < i; ++k) b[i] -= chol[i * p + k] * b[k];
        b[i] /= chol[i * p + i];
    }
    for (std::size_t ii = p; ii-- > 0;) {
        for (std::size_t k = ii + 1; k < p; ++k) b[ii] -= chol[k * p + ii] * b[k];
        b[ii] /= chol[ii * p + ii];
    }
    return b;
}

// Diagonal of the inverse of the matrix whose Cholesky factor is given.
std::vector<double> cholesky_inverse_diag(const std::vector<double>& chol, std::size_t p) {
    std::vector<double> diag(p, 0.0);
    std::vector<double> e(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        const std::vector<double> col = cholesky_solve(chol, p, e);
        diag[j] = col[j];
    }
    return diag;
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

} // namespace

std::pair<double, std::vector<double>>
partial_loglik_and_gradient(const Cohort& cohort, const std::vector<double>& coefficients) {
    validate_cohort(cohort);
    if (coefficients.size() != cohort.subjects.front().covariates.size()) {
        throw InvalidInput("coefficient vector length does not match covariate count");
    }
    const PreparedCohort pc = prepare(cohort);
    LikelihoodEval eval = evaluate(pc, coefficients, true);
    return {eval.loglik, std::move(eval.gradient)};
}

CoxFit cox_fit(const Cohort& cohort, const CovariateSpec& spec) {
    validate_cohort(cohort);
    const std::size_t p = spec.names.size();
    if (p == 0) throw InvalidInput("covariate spec is empty");
    if (p != cohort.subjects.front().covariates.size()) {
        throw InvalidInput("covariate spec names do not match covariate count");
    }
    for (std::size_t k = 0; k < p; ++k) {
        for (std::size_t l = k + 1; l < p; ++l) {
            if (spec.names[k] == spec.names[l]) {
                throw InvalidInput("duplicate covariate name '" + spec.names[k] + "'");
            }
        }
    }
    if (count_events(cohort) == 0) {
        throw NoEvents("cohort '" + cohort.label + "' contains no deaths");
    }
    for (std::size_t k = 0; k < p; ++k) {
        const double first = cohort.subjects.front().covariates[k];
        bool varies = false;
        for (const Subject& s : cohort.subjects) {
            if (s.covariates[k] != first) {
                varies = true;
                break;
            }
        }
        if (!varies) {
            throw DegenerateCovariate("covariate '" + spec.names[k] + "' has zero variance");
        }
    }

    const PreparedCohort pc = prepare(cohort);
    std::vector<double> beta(p, 0.0);
    LikelihoodEval eval = evaluate(pc, beta, true);

    CoxFit fit;
    fit.iterations = 0;
    bool stalled = false;
    while (fit.iterations < kMaxIterations && norm2(eval.gradient) > kGradientTolerance) {
        std::vector<double> info = eval.hessian; // -H is the observed information
        for (double& v : info) v = -v;
        if (!cholesky(info, p)) {
            throw Divergence("observed information is not positive definite");
        }
        const std::vector<double> direction = cholesky_solve(info, p, eval.gradient);

        double step = 1.0;
        std::vector<double> candidate(p);
        LikelihoodEval cand_eval;
        bool accepted = false;
        for (int h = 0; h <= kMaxHalvings; ++h) {
            for (std::size_t k = 0; k < p; ++k) candidate[k] = beta[k] + step * direction[k];
            cand_eval = evaluate(pc, candidate, false);
            if (std::isfinite(cand_eval.loglik) && cand_eval.loglik >= eval.loglik) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        ++fit.iterations;
        if (!accepted) {
            stalled = true;
            break;
        }
        beta = candidate;
        for (std::size_t k = 0; k < p; ++k) {
            if (std::abs(beta[k]) > kCoefficientBound) {
                throw Divergence("coefficient for covariate '" + spec.names[k] +
                                 "' exceeded " + std::to_string(kCoefficientBound) +
                                 "; monotone likelihood suspected");
            }
        }
        eval = evaluate(pc, beta, true);
        if (!std::isfinite(eval.loglik)) {
            throw Divergence("partial log-likelihood became non-finite");
        }
    }

    fit.converged = !stalled && norm2(eval.gradient) <= kGradientTolerance;
    fit.coefficients = beta;
    fit.log_partial_likelihood = eval.loglik;
    fit.hazard_ratios.resize(p);
    for (std::size_t k = 0; k < p; ++k) fit.hazard_ratios[k] = std::exp(beta[k]);

    std::vector<double> info = eval.hessian;
    for (double& v : info) v = -v;
    if (!cholesky(info, p)) {
        throw Divergence("observed information is not positive definite at the optimum");
    }
    const std::vector<double> inv_diag = cholesky_inverse_diag(info, p);
    fit.standard_errors.resize(p);
    for (std::size_t k = 0; k < p; ++k) fit.standard_errors[k] = std::sqrt(inv_diag[k]);
    return fit;
}

} // namespace mortkit
