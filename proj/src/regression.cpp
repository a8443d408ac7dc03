#include "creditlens/regression.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "creditlens/errors.hpp"

namespace creditlens {

namespace {

constexpr const char* kInterceptTerm = "intercept";
constexpr const char* kInteractionSep = "team_size_x_";

// log(1 + e^eta), overflow-safe
double log1pexp(double eta) {
    return std::max(eta, 0.0) + std::log1p(std::exp(-std::abs(eta)));
}

double sigmoid(double eta) {
    if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
    double e = std::exp(eta);
    return e / (1.0 + e);
}

std::vector<std::string> author_interaction_vars(const ModelSpec& spec) {
    std::vector<std::string> vars = {"career_age", "career_age_sq"};
    if (spec.include_primary_term && spec.outcome != Outcome::Primary)
        vars.push_back("is_primary_contributor");
    vars.push_back("is_last_author");
    vars.push_back("is_male");
    return vars;
}

double base_term_value(const std::string& term, const ObservationRow& row) {
    if (term == "career_age") return row.career_age;
    if (term == "career_age_sq") return row.career_age_sq;
    if (term == "is_primary_contributor") return row.outcome_primary;
    if (term == "is_last_author") return row.is_last_author;
    if (term == "is_male") return row.is_male;
    if (term == "log_citations") return row.log_citations;
    if (term == "pub_year") return row.pub_year;
    if (term == "team_size") return row.team_size;
    if (term.rfind("disc_", 0) == 0) return row.discipline == term.substr(5) ? 1.0 : 0.0;
    throw DataError("unknown model term: " + term);
}

double term_value(const std::string& term, const ObservationRow& row) {
    if (term == kInterceptTerm) return 1.0;
    if (term.rfind(kInteractionSep, 0) == 0)
        return row.team_size * base_term_value(term.substr(std::strlen(kInteractionSep)), row);
    return base_term_value(term, row);
}

}  // namespace

DesignMatrix build_design(const ModelSpec& spec, const std::vector<ObservationRow>& rows) {
    if (rows.empty()) throw DataError("no observations");
    // discipline dummies: k-1 indicators, reference = most frequent category
    std::map<std::string, int> disc_counts;
    for (const auto& r : rows) disc_counts[r.discipline] += 1;
    std::string reference;
    int best = -1;
    for (const auto& [d, c] : disc_counts)
        if (c > best) {
            best = c;
            reference = d;
        }

    std::vector<std::string> terms = {kInterceptTerm, "career_age", "career_age_sq"};
    if (spec.include_primary_term && spec.outcome != Outcome::Primary)
        terms.push_back("is_primary_contributor");
    terms.push_back("is_last_author");
    terms.push_back("is_male");
    terms.push_back("log_citations");
    terms.push_back("pub_year");
    terms.push_back("team_size");
    for (const auto& [d, c] : disc_counts)
        if (d != reference) terms.push_back("disc_" + d);
    for (const auto& v : author_interaction_vars(spec))
        terms.push_back(std::string(kInteractionSep) + v);

    DesignMatrix design;
    design.terms = terms;
    design.columns.assign(terms.size(), {});
    for (auto& col : design.columns) col.reserve(rows.size());
    design.outcome.reserve(rows.size());
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < terms.size(); ++j)
            design.columns[j].push_back(term_value(terms[j], r));
        design.outcome.push_back(spec.outcome == Outcome::Recognition
                                     ? static_cast<double>(r.outcome_recognition)
                                     : static_cast<double>(r.outcome_primary));
    }
    return design;
}

double log_likelihood(const DesignMatrix& design, const std::vector<double>& beta) {
    const std::size_t n = design.outcome.size();
    const std::size_t p = design.terms.size();
    if (beta.size() != p) throw DataError("beta length mismatch");
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double eta = 0.0;
        for (std::size_t j = 0; j < p; ++j) eta += design.columns[j][i] * beta[j];
        ll += design.outcome[i] * eta - log1pexp(eta);
    }
    return ll;
}

std::vector<double> log_likelihood_gradient(const DesignMatrix& design,
                                            const std::vector<double>& beta) {
    const std::size_t n = design.outcome.size();
    const std::size_t p = design.terms.size();
    std::vector<double> g(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double eta = 0.0;
        for (std::size_t j = 0; j < p; ++j) eta += design.columns[j][i] * beta[j];
        double resid = design.outcome[i] - sigmoid(eta);
        for (std::size_t j = 0; j < p; ++j) g[j] += design.columns[j][i] * resid;
    }
    return g;
}

FitResult fit_logistic_design(const ModelSpec& spec, const DesignMatrix& design) {
    using Eigen::MatrixXd;
    using Eigen::VectorXd;

    const Eigen::Index n = static_cast<Eigen::Index>(design.outcome.size());
    const Eigen::Index p = static_cast<Eigen::Index>(design.terms.size());
    if (n == 0) throw DataError("no observations");
    {
        bool has0 = false, has1 = false;
        for (double y : design.outcome) (y > 0.5 ? has1 : has0) = true;
        if (!has0 || !has1) throw DataError("outcome has a single class");
    }
    if (n < 10 * p)
        std::fputs("warning: fewer than 10 rows per parameter\n", stderr);

    MatrixXd X(n, p);
    for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index i = 0; i < n; ++i) X(i, j) = design.columns[j][i];
    VectorXd y = Eigen::Map<const VectorXd>(design.outcome.data(), n);

    // internal z-score standardization; intercept column untouched
    VectorXd mu = VectorXd::Zero(p), sigma = VectorXd::Ones(p);
    for (Eigen::Index j = 1; j < p; ++j) {
        mu(j) = X.col(j).mean();
        double var = (X.col(j).array() - mu(j)).square().sum() / n;
        sigma(j) = std::sqrt(var);
        if (sigma(j) <= 0)
            throw NumericError("rank deficiency: constant column " + design.terms[j]);
        X.col(j) = (X.col(j).array() - mu(j)) / sigma(j);
    }
    {
        Eigen::ColPivHouseholderQR<MatrixXd> qr(X);
        qr.setThreshold(1e-8);
        if (qr.rank() < p) {
            std::string cols;
            auto perm = qr.colsPermutation().indices();
            for (Eigen::Index k = qr.rank(); k < p; ++k) {
                if (!cols.empty()) cols += ", ";
                cols += design.terms[perm(k)];
            }
            throw NumericError("rank deficiency: collinear columns [" + cols + "]");
        }
    }

    auto penalized_ll = [&](const VectorXd& b) {
        double ll = 0.0;
        VectorXd eta = X * b;
        for (Eigen::Index i = 0; i < n; ++i) ll += y(i) * eta(i) - log1pexp(eta(i));
        if (spec.ridge > 0) ll -= 0.5 * spec.ridge * b.tail(p - 1).squaredNorm();
        return ll;
    };

    VectorXd beta = VectorXd::Zero(p);
    double ll = penalized_ll(beta);
    FitResult fit;
    fit.model = spec.outcome == Outcome::Recognition ? "recognition" : "primary";
    fit.n = static_cast<int>(n);

    VectorXd grad = VectorXd::Zero(p);
    MatrixXd info = MatrixXd::Zero(p, p);
    int iter = 0;
    for (; iter < spec.max_iterations; ++iter) {
        VectorXd eta = X * beta;
        VectorXd prob(n), w(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            prob(i) = sigmoid(eta(i));
            w(i) = std::max(prob(i) * (1.0 - prob(i)), 1e-10);
        }
        grad = X.transpose() * (y - prob);
        info = X.transpose() * w.asDiagonal() * X;
        if (spec.ridge > 0) {
            grad.tail(p - 1) -= spec.ridge * beta.tail(p - 1);
            info.diagonal().tail(p - 1).array() += spec.ridge;
        }
        double gnorm = grad.lpNorm<Eigen::Infinity>();
        VectorXd delta = info.ldlt().solve(grad);
        // step-halving: never accept a step that lowers the log-likelihood
        double step = 1.0;
        VectorXd candidate;
        double ll_new = ll;
        for (int h = 0; h < 60; ++h) {
            candidate = beta + step * delta;
            ll_new = penalized_ll(candidate);
            if (ll_new >= ll || gnorm < 1e-12) break;
            step *= 0.5;
        }
        double change = std::abs(ll_new - ll);
        beta = candidate;
        ll = ll_new;
        if (beta.lpNorm<Eigen::Infinity>() > 1e6) {
            Eigen::Index worst;
            beta.cwiseAbs().maxCoeff(&worst);
            throw NumericError("perfect separation suspected (diverging coefficient on " +
                               design.terms[worst] + ")");
        }
        {
            VectorXd eta2 = X * beta;
            VectorXd prob2(n);
            for (Eigen::Index i = 0; i < n; ++i) prob2(i) = sigmoid(eta2(i));
            grad = X.transpose() * (y - prob2);
            if (spec.ridge > 0) grad.tail(p - 1) -= spec.ridge * beta.tail(p - 1);
        }
        if (change <= spec.tolerance * (std::abs(ll) + 1.0) &&
            grad.lpNorm<Eigen::Infinity>() < 1e-6) {
            fit.converged = true;
            ++iter;
            break;
        }
    }
    fit.iterations = iter;
    fit.log_likelihood = ll;
    fit.gradient_norm = grad.lpNorm<Eigen::Infinity>();

    // a perfectly classified unpenalized fit means the MLE is at infinity
    if (spec.ridge == 0) {
        VectorXd eta = X * beta;
        double worst = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(y(i) - sigmoid(eta(i))));
        if (worst < 1e-6)
            throw NumericError("perfect separation suspected (all outcomes fit exactly)");
    }

    // information at the optimum for standard errors
    {
        VectorXd eta = X * beta;
        VectorXd w(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            double pr = sigmoid(eta(i));
            w(i) = std::max(pr * (1.0 - pr), 1e-10);
        }
        info = X.transpose() * w.asDiagonal() * X;
        if (spec.ridge > 0) info.diagonal().tail(p - 1).array() += spec.ridge;
    }
    MatrixXd cov_std = info.ldlt().solve(MatrixXd::Identity(p, p));

    // map standardized coefficients and covariance back to raw feature scale
    MatrixXd A = MatrixXd::Zero(p, p);
    A(0, 0) = 1.0;
    for (Eigen::Index j = 1; j < p; ++j) {
        A(0, j) = -mu(j) / sigma(j);
        A(j, j) = 1.0 / sigma(j);
    }
    VectorXd beta_raw = A * beta;
    MatrixXd cov_raw = A * cov_std * A.transpose();

    for (Eigen::Index j = 0; j < p; ++j) {
        Coefficient c;
        c.term = design.terms[j];
        c.beta = beta_raw(j);
        c.se = std::sqrt(std::max(cov_raw(j, j), 0.0));
        c.z = c.se > 0 ? c.beta / c.se : 0.0;
        fit.coefficients.push_back(std::move(c));
    }
    fit.effects = effect_sizes(fit, default_effect_ranges());
    return fit;
}

FitResult fit_logistic(const ModelSpec& spec, const std::vector<ObservationRow>& rows) {
    return fit_logistic_design(spec, build_design(spec, rows));
}

std::map<std::string, std::pair<double, double>> default_effect_ranges() {
    return {
        {"career_age", {0, 11}},      {"career_age_sq", {0, 121}},
        {"is_primary_contributor", {0, 1}}, {"is_last_author", {0, 1}},
        {"is_male", {0, 1}},          {"log_citations", {0, std::log(1.0 + 16.0)}},
        {"pub_year", {1991, 2021}},   {"team_size", {2, 7}},
    };
}

std::vector<EffectSize> effect_sizes(
    const FitResult& fit, const std::map<std::string, std::pair<double, double>>& ranges) {
    std::vector<EffectSize> out;
    for (const auto& c : fit.coefficients) {
        if (c.term == kInterceptTerm) continue;
        EffectSize e;
        e.term = c.term;
        auto it = ranges.find(c.term);
        if (it != ranges.end()) {
            e.range_lo = it->second.first;
            e.range_hi = it->second.second;
        } else if (c.term.rfind(kInteractionSep, 0) == 0) {
            // interaction evaluated at the team-size endpoints
            std::string var = c.term.substr(std::strlen(kInteractionSep));
            auto ts = ranges.find("team_size");
            auto vr = ranges.find(var);
            if (ts == ranges.end() || vr == ranges.end())
                throw DataError("no range for interaction term " + c.term);
            e.range_lo = ts->second.first * vr->second.first;
            e.range_hi = ts->second.second * vr->second.second;
        } else if (c.term.rfind("disc_", 0) == 0) {
            e.range_lo = 0;
            e.range_hi = 1;
        } else {
            throw DataError("no range for term " + c.term);
        }
        e.delta_log_odds = c.beta * (e.range_hi - e.range_lo);
        out.push_back(std::move(e));
    }
    return out;
}

double predict(const FitResult& fit, const ModelSpec& spec, const ObservationRow& row) {
    (void)spec;
    double eta = 0.0;
    for (const auto& c : fit.coefficients) eta += c.beta * term_value(c.term, row);
    eta = std::clamp(eta, -40.0, 40.0);
    double p = sigmoid(eta);
    return std::clamp(p, 1e-18, 1.0 - 1e-18);
}

BuildObservationsResult build_observations(const Corpus& corpus,
                                           const std::vector<ContributionVector>& contributions,
                                           const std::vector<CreditVector>& credits,
                                           const GenderTable& genders) {
    std::map<std::string, const ContributionVector*> contrib_by_paper;
    for (const auto& cv : contributions) contrib_by_paper[cv.paper_id] = &cv;
    std::map<std::string, const CreditVector*> credit_by_paper;
    for (const auto& cv : credits) credit_by_paper[cv.paper_id] = &cv;

    BuildObservationsResult result;
    for (const auto& [paper_id, paper] : corpus.papers) {
        int n = paper.team_size();
        if (n < 2 || n > 7) continue;
        if (corpus.citation_count(paper_id) < 1) continue;
        auto cit = contrib_by_paper.find(paper_id);
        auto crit = credit_by_paper.find(paper_id);
        if (cit == contrib_by_paper.end() || crit == credit_by_paper.end()) {
            result.dropped_joins += 1;
            continue;
        }
        const ContributionVector& contrib = *cit->second;
        const CreditVector& credit = *crit->second;
        if (contrib.unattributable) continue;
        if (static_cast<int>(contrib.shares.size()) != n ||
            static_cast<int>(credit.shares.size()) != n) {
            result.dropped_joins += 1;
            continue;
        }
        std::string top = top_credit_author(credit);
        std::string primary = primary_contributor(contrib);
        for (int i = 0; i < n; ++i) {
            const Authorship& a = paper.authors[i];
            ObservationRow row;
            row.paper_id = paper_id;
            row.author_id = a.author_id;
            row.outcome_recognition = a.author_id == top ? 1 : 0;
            row.outcome_primary = a.author_id == primary ? 1 : 0;
            const AuthorRecord& rec = corpus.authors.at(a.author_id);
            row.career_age = career_age(rec, paper.year);
            row.career_age_sq = row.career_age * row.career_age;
            row.is_last_author = a.position == n ? 1 : 0;
            Gender g = genders.infer(rec.name);
            row.is_male = g == Gender::Male ? 1 : 0;
            row.is_gender_known = g == Gender::Unknown ? 0 : 1;
            row.log_citations = std::log(1.0 + corpus.citation_count(paper_id));
            row.pub_year = paper.year;
            row.team_size = n;
            row.discipline = paper.discipline;
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

Table observations_table(const std::vector<ObservationRow>& rows) {
    Table t;
    t.header = {"paper_id",     "author_id",     "outcome_recognition", "outcome_primary",
                "career_age",   "career_age_sq", "is_last_author",      "is_male",
                "is_gender_known", "log_citations", "pub_year",          "team_size",
                "discipline"};
    for (const auto& r : rows) {
        t.rows.push_back({r.paper_id, r.author_id, std::to_string(r.outcome_recognition),
                          std::to_string(r.outcome_primary), std::to_string(r.career_age),
                          std::to_string(r.career_age_sq), std::to_string(r.is_last_author),
                          std::to_string(r.is_male), std::to_string(r.is_gender_known),
                          format_double(r.log_citations), std::to_string(r.pub_year),
                          std::to_string(r.team_size), r.discipline});
    }
    return t;
}

std::vector<ObservationRow> observations_from_table(const Table& table) {
    std::vector<ObservationRow> rows;
    for (const auto& row : table.rows) {
        if (row.size() < 13) throw DataError("observations row with missing columns");
        ObservationRow r;
        r.paper_id = row[0];
        r.author_id = row[1];
        r.outcome_recognition = std::stoi(row[2]);
        r.outcome_primary = std::stoi(row[3]);
        r.career_age = std::stoi(row[4]);
        r.career_age_sq = std::stoi(row[5]);
        r.is_last_author = std::stoi(row[6]);
        r.is_male = std::stoi(row[7]);
        r.is_gender_known = std::stoi(row[8]);
        r.log_citations = std::stod(row[9]);
        r.pub_year = std::stoi(row[10]);
        r.team_size = std::stoi(row[11]);
        r.discipline = row[12];
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string fit_report_json(const FitResult& fit) {
    nlohmann::ordered_json j;
    j["model"] = fit.model;
    j["n"] = fit.n;
    auto coeffs = nlohmann::ordered_json::array();
    for (const auto& c : fit.coefficients)
        coeffs.push_back({{"term", c.term}, {"beta", c.beta}, {"se", c.se}, {"z", c.z}});
    j["coefficients"] = std::move(coeffs);
    j["log_likelihood"] = fit.log_likelihood;
    j["iterations"] = fit.iterations;
    j["converged"] = fit.converged;
    auto effects = nlohmann::ordered_json::array();
    for (const auto& e : fit.effects)
        effects.push_back({{"term", e.term},
                           {"range", {e.range_lo, e.range_hi}},
                           {"delta_log_odds", e.delta_log_odds}});
    j["effects"] = std::move(effects);
    return j.dump(2);
}

}  // namespace creditlens
