#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "creditlens/analytics.hpp"
#include "creditlens/attribution.hpp"
#include "creditlens/corpus.hpp"
#include "creditlens/credit.hpp"
#include "creditlens/table.hpp"

namespace creditlens {

struct ObservationRow {
    std::string paper_id;
    std::string author_id;
    int outcome_recognition = 0;  // is_top_credit
    int outcome_primary = 0;      // is_primary_contributor
    int career_age = 0;
    int career_age_sq = 0;
    int is_last_author = 0;
    int is_male = 0;
    int is_gender_known = 0;
    double log_citations = 0.0;  // ln(1 + citation count)
    int pub_year = 0;
    int team_size = 0;  // 2..7
    std::string discipline;
};

enum class Outcome { Recognition, Primary };

// Main effects + team_size x author-variable interactions + discipline
// dummies with the most frequent category as reference.
struct ModelSpec {
    Outcome outcome = Outcome::Recognition;
    bool include_primary_term = true;  // excluded when primary is the outcome
    double ridge = 0.0;                // 0 = pure MLE; tiny values rescue separation in fixtures
    int max_iterations = 100;
    double tolerance = 1e-10;  // relative log-likelihood change
};

struct Coefficient {
    std::string term;
    double beta = 0.0;
    double se = 0.0;
    double z = 0.0;
};

struct EffectSize {
    std::string term;
    double range_lo = 0.0;
    double range_hi = 0.0;
    double delta_log_odds = 0.0;
};

struct FitResult {
    std::string model;
    int n = 0;
    std::vector<Coefficient> coefficients;
    double log_likelihood = 0.0;
    int iterations = 0;
    bool converged = false;
    double gradient_norm = 0.0;
    std::vector<EffectSize> effects;
};

// Joins contributions, credits, and demographics; restricted to attributable
// papers with team size 2..7 and at least one citation.
struct BuildObservationsResult {
    std::vector<ObservationRow> rows;
    int dropped_joins = 0;
};
BuildObservationsResult build_observations(const Corpus& corpus,
                                           const std::vector<ContributionVector>& contributions,
                                           const std::vector<CreditVector>& credits,
                                           const GenderTable& genders);

struct DesignMatrix {
    std::vector<std::string> terms;          // column names, intercept first
    std::vector<std::vector<double>> columns;  // column-major
    std::vector<double> outcome;
};
DesignMatrix build_design(const ModelSpec& spec, const std::vector<ObservationRow>& rows);

// Newton/IRLS with step-halving on the Bernoulli log-likelihood; features
// standardized internally, coefficients and standard errors mapped back to
// raw scale. Throws NumericError on separation or rank deficiency.
FitResult fit_logistic(const ModelSpec& spec, const std::vector<ObservationRow>& rows);
FitResult fit_logistic_design(const ModelSpec& spec, const DesignMatrix& design);

// Log-likelihood and gradient at raw-scale beta, for oracle checks.
double log_likelihood(const DesignMatrix& design, const std::vector<double>& beta);
std::vector<double> log_likelihood_gradient(const DesignMatrix& design,
                                            const std::vector<double>& beta);

// effect = beta * (hi - lo); interaction terms use the product ranges at the
// endpoints. Default ranges follow typical-range reporting: 0-1 binaries,
// 0-11 career age, 0-16 log citations, 1991-2021 year, 2-7 team size.
std::map<std::string, std::pair<double, double>> default_effect_ranges();
std::vector<EffectSize> effect_sizes(
    const FitResult& fit, const std::map<std::string, std::pair<double, double>>& ranges);

// Inverse-logit of the linear predictor, clipped into (1e-18, 1-1e-18).
double predict(const FitResult& fit, const ModelSpec& spec, const ObservationRow& row);

Table observations_table(const std::vector<ObservationRow>& rows);
std::vector<ObservationRow> observations_from_table(const Table& table);

std::string fit_report_json(const FitResult& fit);

}  // namespace creditlens
