#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mortkit/cox.hpp"
#include "mortkit/errors.hpp"
#include "tables.hpp"

using namespace mortkit;
using testdata::cohort;
using testdata::subject;

namespace {

// Independent Breslow partial log-likelihood: ascending times, naive risk-set
// scans, no shared code with the implementation under test.
double naive_breslow_loglik(const Cohort& c, const std::vector<double>& beta) {
    const auto& subs = c.subjects;
    std::vector<double> distinct_death_times;
    for (const Subject& s : subs) {
        if (s.event) distinct_death_times.push_back(s.observed_time);
    }
    std::sort(distinct_death_times.begin(), distinct_death_times.end());
    distinct_death_times.erase(
        std::unique(distinct_death_times.begin(), distinct_death_times.end()),
        distinct_death_times.end());

    auto eta = [&](const Subject& s) {
        double v = 0.0;
        for (std::size_t k = 0; k < beta.size(); ++k) v += beta[k] * s.covariates[k];
        return v;
    };

    double ll = 0.0;
    for (double t : distinct_death_times) {
        double risk_sum = 0.0;
        for (const Subject& s : subs) {
            if (s.observed_time >= t) risk_sum += std::exp(eta(s));
        }
        for (const Subject& s : subs) {
            if (s.event && s.observed_time == t) ll += eta(s) - std::log(risk_sum);
        }
    }
    return ll;
}

Cohort random_cohort(std::mt19937_64& rng, std::size_t n, std::size_t p) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Subject> subs;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x;
        for (std::size_t k = 0; k < p; ++k) x.push_back(std::floor(unif(rng) * 5.0) / 2.0 - 1.0);
        // coarse grid of times so ties occur
        const double t = std::floor(unif(rng) * 8.0) + 1.0;
        subs.push_back(testdata::subject("s" + std::to_string(i), t, unif(rng) < 0.7, x));
    }
    return cohort(std::move(subs));
}

} // namespace

TEST_CASE("log-likelihood and gradient of a single-subject death are zero") {
    const Cohort c = cohort({subject("only", 3.0, true, {2.5})});
    const auto [ll, grad] = partial_loglik_and_gradient(c, {0.7});
    CHECK(ll == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(grad[0] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("coefficient length mismatch is rejected") {
    const Cohort c = cohort({subject("a", 1.0, true, {1.0})});
    CHECK_THROWS_AS(partial_loglik_and_gradient(c, {0.1, 0.2}), InvalidInput);
}

TEST_CASE("gradient at zero equals sum over deaths of (x - risk-set mean)") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const Cohort c = random_cohort(rng, 12, 2);
        const auto [ll, grad] = partial_loglik_and_gradient(c, {0.0, 0.0});
        (void)ll;

        std::vector<double> expected(2, 0.0);
        for (const Subject& dead : c.subjects) {
            if (!dead.event) continue;
            double mean0 = 0.0, mean1 = 0.0;
            std::size_t at_risk = 0;
            for (const Subject& s : c.subjects) {
                if (s.observed_time >= dead.observed_time) {
                    mean0 += s.covariates[0];
                    mean1 += s.covariates[1];
                    ++at_risk;
                }
            }
            expected[0] += dead.covariates[0] - mean0 / static_cast<double>(at_risk);
            expected[1] += dead.covariates[1] - mean1 / static_cast<double>(at_risk);
        }
        CHECK(grad[0] == doctest::Approx(expected[0]).epsilon(1e-10));
        CHECK(grad[1] == doctest::Approx(expected[1]).epsilon(1e-10));
    }
}

TEST_CASE("log-likelihood agrees with an independent naive evaluation") {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 30; ++rep) {
        const Cohort c = random_cohort(rng, 10, 2);
        const std::vector<double> beta = {-0.4 + 0.1 * static_cast<double>(rep % 9),
                                          0.3 - 0.05 * static_cast<double>(rep % 7)};
        const auto [ll, grad] = partial_loglik_and_gradient(c, beta);
        (void)grad;
        CHECK(ll == doctest::Approx(naive_breslow_loglik(c, beta)).epsilon(1e-10));
    }
}

TEST_CASE("analytic gradient matches central finite differences") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int rep = 0; rep < 25; ++rep) {
        const Cohort c = random_cohort(rng, 15, 3);
        std::vector<double> beta = {coef(rng), coef(rng), coef(rng)};
        const auto [ll, grad] = partial_loglik_and_gradient(c, beta);
        (void)ll;
        for (std::size_t k = 0; k < beta.size(); ++k) {
            const double h = 1e-6;
            std::vector<double> up = beta, down = beta;
            up[k] += h;
            down[k] -= h;
            const double fd = (partial_loglik_and_gradient(c, up).first -
                               partial_loglik_and_gradient(c, down).first) /
                              (2.0 * h);
            const double scale = std::max({1.0, std::abs(grad[k]), std::abs(fd)});
            CHECK(std::abs(grad[k] - fd) / scale <= 1e-6);
        }
    }
}

TEST_CASE("symmetric groups give coefficient 0 and hazard ratio 1") {
    // pairs with identical times and outcomes, labels split 0/1
    std::vector<Subject> subs;
    const double times[] = {1.0, 2.0, 3.0, 4.0, 5.0};
    const bool events[] = {true, true, false, true, false};
    for (int i = 0; i < 5; ++i) {
        subs.push_back(subject("a" + std::to_string(i), times[i], events[i], {0.0}));
        subs.push_back(subject("b" + std::to_string(i), times[i], events[i], {1.0}));
    }
    const CoxFit fit = cox_fit(cohort(std::move(subs)), CovariateSpec{{"group"}});
    CHECK(fit.converged);
    CHECK(fit.coefficients[0] == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(fit.hazard_ratios[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(fit.hazard_ratios[0] == std::exp(fit.coefficients[0]));
}

TEST_CASE("six-subject fit matches a grid search of the partial likelihood") {
    const Cohort c = cohort({subject("s0", 1.0, true, {1.0}), subject("s1", 2.0, false, {0.0}),
                             subject("s2", 3.0, true, {1.0}), subject("s3", 4.0, true, {0.0}),
                             subject("s4", 5.0, false, {1.0}), subject("s5", 6.0, true, {0.0})});
    const CoxFit fit = cox_fit(c, CovariateSpec{{"x"}});
    REQUIRE(fit.converged);

    double best_w = 0.0;
    double best_ll = -std::numeric_limits<double>::infinity();
    for (long i = -100000; i <= 100000; ++i) {
        const double w = static_cast<double>(i) * 1e-4;
        const double ll = naive_breslow_loglik(c, {w});
        if (ll > best_ll) {
            best_ll = ll;
            best_w = w;
        }
    }
    CHECK(std::abs(fit.coefficients[0] - best_w) <= 1e-3);
    CHECK(fit.log_partial_likelihood >= naive_breslow_loglik(c, {0.0}));
}

TEST_CASE("fit is invariant under a rank-preserving time transform") {
    std::mt19937_64 rng(19);
    const Cohort base = random_cohort(rng, 25, 2);
    Cohort transformed = base;
    for (Subject& s : transformed.subjects) {
        s.observed_time = s.observed_time * s.observed_time * s.observed_time + 1.0;
    }
    const CovariateSpec spec{{"x1", "x2"}};
    const CoxFit f1 = cox_fit(base, spec);
    const CoxFit f2 = cox_fit(transformed, spec);
    CHECK(f1.coefficients[0] == doctest::Approx(f2.coefficients[0]).epsilon(1e-7));
    CHECK(f1.coefficients[1] == doctest::Approx(f2.coefficients[1]).epsilon(1e-7));
}

TEST_CASE("fit is invariant under covariate centering") {
    std::mt19937_64 rng(23);
    const Cohort base = random_cohort(rng, 25, 2);
    Cohort shifted = base;
    for (Subject& s : shifted.subjects) s.covariates[0] -= 5.0;
    const CovariateSpec spec{{"x1", "x2"}};
    const CoxFit f1 = cox_fit(base, spec);
    const CoxFit f2 = cox_fit(shifted, spec);
    CHECK(f1.coefficients[0] == doctest::Approx(f2.coefficients[0]).epsilon(1e-7));
    CHECK(f1.coefficients[1] == doctest::Approx(f2.coefficients[1]).epsilon(1e-7));
}

TEST_CASE("scaling a covariate by c divides its coefficient by c") {
    std::mt19937_64 rng(29);
    const Cohort base = random_cohort(rng, 25, 2);
    Cohort scaled = base;
    for (Subject& s : scaled.subjects) s.covariates[1] *= 4.0;
    const CovariateSpec spec{{"x1", "x2"}};
    const CoxFit f1 = cox_fit(base, spec);
    const CoxFit f2 = cox_fit(scaled, spec);
    CHECK(f2.coefficients[1] == doctest::Approx(f1.coefficients[1] / 4.0).epsilon(1e-7));
    CHECK(f2.coefficients[0] == doctest::Approx(f1.coefficients[0]).epsilon(1e-7));
}

TEST_CASE("error paths") {
    SUBCASE("no deaths") {
        const Cohort c = cohort({subject("a", 1.0, false, {1.0}),
                                 subject("b", 2.0, false, {0.0})});
        CHECK_THROWS_AS(cox_fit(c, CovariateSpec{{"x"}}), NoEvents);
    }
    SUBCASE("zero-variance covariate names the column") {
        const Cohort c = cohort({subject("a", 1.0, true, {1.0, 3.0}),
                                 subject("b", 2.0, true, {1.0, 4.0})});
        try {
            cox_fit(c, CovariateSpec{{"flat", "x2"}});
            FAIL("expected DegenerateCovariate");
        } catch (const DegenerateCovariate& e) {
            CHECK(std::string(e.what()).find("flat") != std::string::npos);
        }
    }
    SUBCASE("separation diverges") {
        // every death carries x > 0 while the x = 0 subjects never die; the
        // small covariate scale pushes the optimum past the trust bound
        std::vector<Subject> subs;
        for (int i = 0; i < 4; ++i) {
            subs.push_back(subject("d" + std::to_string(i), 1.0 + i, true, {0.25}));
            subs.push_back(subject("c" + std::to_string(i), 50.0 + i, false, {0.0}));
        }
        CHECK_THROWS_AS(cox_fit(cohort(std::move(subs)), CovariateSpec{{"x"}}), Divergence);
    }
    SUBCASE("spec shape errors") {
        const Cohort c = cohort({subject("a", 1.0, true, {1.0, 0.0}),
                                 subject("b", 2.0, true, {0.0, 1.0})});
        CHECK_THROWS_AS(cox_fit(c, CovariateSpec{{}}), InvalidInput);
        CHECK_THROWS_AS(cox_fit(c, CovariateSpec{{"x"}}), InvalidInput);
        CHECK_THROWS_AS(cox_fit(c, CovariateSpec{{"x", "x"}}), InvalidInput);
    }
}

TEST_CASE("standard errors are positive and iterations are reported") {
    std::mt19937_64 rng(31);
    const Cohort c = random_cohort(rng, 40, 2);
    const CoxFit fit = cox_fit(c, CovariateSpec{{"x1", "x2"}});
    CHECK(fit.converged);
    CHECK(fit.iterations >= 1);
    CHECK(fit.iterations <= 50);
    for (double se : fit.standard_errors) CHECK(se > 0.0);
    CHECK(fit.log_partial_likelihood >=
          partial_loglik_and_gradient(c, {0.0, 0.0}).first - 1e-12);
}
