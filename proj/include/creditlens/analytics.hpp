#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "creditlens/attribution.hpp"
#include "creditlens/corpus.hpp"
#include "creditlens/credit.hpp"
#include "creditlens/table.hpp"

namespace creditlens {

struct DecadeStat {
    std::string field;  // "Physics" | ... | "all"
    int decade_start = 0;
    int n_papers = 0;
    double mean_team_size = 0.0;
    double mean_laureates = 0.0;
    double unrecognized_fraction = 0.0;  // (mean_team - mean_laureates) / mean_team
};

struct RankCurvePoint {
    int team_size = 0;  // 7 means 7+
    int rank = 0;
    double mean_contribution_share = 0.0;
    double mean_credit_share = 0.0;
    int n = 0;
};

struct CorrelationResult {
    double r = 0.0;
    double p_value = 1.0;  // two-sided, from the t-distribution with n-2 df
    int n = 0;
};

// Prize papers binned by publication year into [k*w, (k+1)*w) decades,
// per field and pooled under field "all". Empty bins are omitted.
std::vector<DecadeStat> nobel_gap(const Corpus& corpus, int decade_width = 10);

// Mean contribution/credit share by author rank, grouped by team size;
// teams larger than 7 are binned as 7+. Unattributable papers are skipped
// for the contribution mean.
std::vector<RankCurvePoint> rank_curves(const std::vector<ContributionVector>& contributions,
                                        const std::vector<CreditVector>& credits);

// focal_year - first_pub_year, clamped at 0 (with a warning flag via the
// optional out-param).
int career_age(const AuthorRecord& author, int focal_year, bool* clamped = nullptr);

enum class Gender { Male, Female, Unknown };

class GenderTable {
  public:
    static GenderTable from_csv(const std::filesystem::path& path);  // name,gender rows
    void add(std::string first_name, Gender g);
    // first token of the display name, case-folded
    Gender infer(const std::string& display_name) const;
    std::size_t size() const { return table_.size(); }

  private:
    std::map<std::string, Gender> table_;
};

// Product-moment r with two-sided p via t = r*sqrt((n-2)/(1-r^2)).
// Throws NumericError on constant input or n < 3.
CorrelationResult pearson(const std::vector<double>& x, const std::vector<double>& y);

struct RankAgeCorrelation {
    std::map<int, CorrelationResult> per_team_size;
    double average_r = 0.0;  // unweighted unless weighted=true
};

struct RankAgeObservation {
    int team_size = 0;
    double rank = 0;
    double career_age = 0;
};

// Pearson r between rank and career age within each team size; groups with
// fewer than 3 rows are skipped.
RankAgeCorrelation rank_age_correlation(const std::vector<RankAgeObservation>& rows,
                                        bool weighted = false);

Table nobel_gap_table(const std::vector<DecadeStat>& stats);
Table rank_curves_table(const std::vector<RankCurvePoint>& points);

}  // namespace creditlens
