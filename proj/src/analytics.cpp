#include "creditlens/analytics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include <boost/math/distributions/students_t.hpp>

#include "creditlens/errors.hpp"

namespace creditlens {

std::vector<DecadeStat> nobel_gap(const Corpus& corpus, int decade_width) {
    if (decade_width <= 0) throw DataError("decade width must be positive");
    struct Acc {
        long team = 0;
        long laureates = 0;
        int n = 0;
    };
    // (field, decade_start) -> accumulator; field "all" pools everything
    std::map<std::pair<std::string, int>, Acc> bins;
    for (const auto& pl : corpus.prizes) {
        const PaperRecord& p = corpus.paper(pl.paper_id);
        int decade = (p.year / decade_width) * decade_width;
        if (p.year < 0) decade = ((p.year - decade_width + 1) / decade_width) * decade_width;
        for (const std::string& field : {pl.field, std::string("all")}) {
            Acc& a = bins[{field, decade}];
            a.team += p.team_size();
            a.laureates += static_cast<long>(pl.laureate_author_ids.size());
            a.n += 1;
        }
    }
    std::vector<DecadeStat> out;
    for (const auto& [key, a] : bins) {
        DecadeStat s;
        s.field = key.first;
        s.decade_start = key.second;
        s.n_papers = a.n;
        s.mean_team_size = static_cast<double>(a.team) / a.n;
        s.mean_laureates = static_cast<double>(a.laureates) / a.n;
        s.unrecognized_fraction =
            s.mean_team_size > 0 ? (s.mean_team_size - s.mean_laureates) / s.mean_team_size : 0.0;
        out.push_back(s);
    }
    return out;
}

std::vector<RankCurvePoint> rank_curves(const std::vector<ContributionVector>& contributions,
                                        const std::vector<CreditVector>& credits) {
    struct Acc {
        double contribution = 0;
        double credit = 0;
        int n = 0;
    };
    std::map<std::string, const ContributionVector*> contrib_by_paper;
    for (const auto& cv : contributions) contrib_by_paper[cv.paper_id] = &cv;

    std::map<std::pair<int, int>, Acc> bins;  // (team_size bin, rank)
    for (const auto& cr : credits) {
        auto it = contrib_by_paper.find(cr.paper_id);
        if (it == contrib_by_paper.end() || it->second->unattributable) continue;
        const ContributionVector& co = *it->second;
        if (co.shares.size() != cr.shares.size()) continue;  // inconsistent join
        int size_bin = std::min<int>(static_cast<int>(cr.shares.size()), 7);
        for (std::size_t i = 0; i < cr.shares.size(); ++i) {
            Acc& a = bins[{size_bin, static_cast<int>(i) + 1}];
            a.contribution += co.shares[i].share;
            a.credit += cr.shares[i].share;
            a.n += 1;
        }
    }
    std::vector<RankCurvePoint> out;
    for (const auto& [key, a] : bins) {
        RankCurvePoint p;
        p.team_size = key.first;
        p.rank = key.second;
        p.mean_contribution_share = a.contribution / a.n;
        p.mean_credit_share = a.credit / a.n;
        p.n = a.n;
        out.push_back(p);
    }
    return out;
}

int career_age(const AuthorRecord& author, int focal_year, bool* clamped) {
    if (clamped) *clamped = false;
    int age = focal_year - author.first_pub_year;
    if (age < 0) {
        if (clamped) *clamped = true;
        return 0;
    }
    return age;
}

GenderTable GenderTable::from_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open gender table: " + path.string());
    GenderTable t;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected name,gender");
        std::string name = line.substr(0, comma);
        std::string g = line.substr(comma + 1);
        if (lineno == 1 && (g == "gender" || g == "Gender")) continue;  // header
        Gender gender;
        if (g == "male" || g == "m" || g == "M") gender = Gender::Male;
        else if (g == "female" || g == "f" || g == "F") gender = Gender::Female;
        else gender = Gender::Unknown;
        t.add(std::move(name), gender);
    }
    return t;
}

void GenderTable::add(std::string first_name, Gender g) {
    std::transform(first_name.begin(), first_name.end(), first_name.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    table_[std::move(first_name)] = g;
}

Gender GenderTable::infer(const std::string& display_name) const {
    std::size_t start = display_name.find_first_not_of(" \t");
    if (start == std::string::npos) return Gender::Unknown;
    std::size_t end = display_name.find_first_of(" \t", start);
    std::string first = display_name.substr(start, end == std::string::npos ? end : end - start);
    std::transform(first.begin(), first.end(), first.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    auto it = table_.find(first);
    return it == table_.end() ? Gender::Unknown : it->second;
}

CorrelationResult pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DataError("pearson: length mismatch");
    const std::size_t n = x.size();
    if (n < 3) throw NumericError("pearson: need at least 3 points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0 || syy == 0) throw NumericError("pearson: undefined correlation (constant input)");
    CorrelationResult res;
    res.n = static_cast<int>(n);
    res.r = sxy / std::sqrt(sxx * syy);
    res.r = std::clamp(res.r, -1.0, 1.0);
    const double df = static_cast<double>(n - 2);
    if (std::abs(res.r) >= 1.0) {
        res.p_value = 0.0;
    } else {
        double t = res.r * std::sqrt(df / (1.0 - res.r * res.r));
        boost::math::students_t dist(df);
        res.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
    }
    return res;
}

RankAgeCorrelation rank_age_correlation(const std::vector<RankAgeObservation>& rows,
                                        bool weighted) {
    std::map<int, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const auto& r : rows) {
        groups[r.team_size].first.push_back(r.rank);
        groups[r.team_size].second.push_back(r.career_age);
    }
    RankAgeCorrelation out;
    double sum = 0, weight = 0;
    for (const auto& [size, xy] : groups) {
        if (xy.first.size() < 3) continue;
        CorrelationResult res;
        try {
            res = pearson(xy.first, xy.second);
        } catch (const NumericError&) {
            continue;  // degenerate group (constant rank or age)
        }
        out.per_team_size[size] = res;
        double w = weighted ? static_cast<double>(res.n) : 1.0;
        sum += w * res.r;
        weight += w;
    }
    out.average_r = weight > 0 ? sum / weight : 0.0;
    return out;
}

Table nobel_gap_table(const std::vector<DecadeStat>& stats) {
    Table t;
    t.header = {"field", "decade_start", "n_papers", "mean_team_size", "mean_laureates",
                "unrecognized_fraction"};
    for (const auto& s : stats) {
        t.rows.push_back({s.field, std::to_string(s.decade_start), std::to_string(s.n_papers),
                          format_double(s.mean_team_size), format_double(s.mean_laureates),
                          format_double(s.unrecognized_fraction)});
    }
    return t;
}

Table rank_curves_table(const std::vector<RankCurvePoint>& points) {
    Table t;
    t.header = {"team_size", "rank", "mean_contribution_share", "mean_credit_share", "n"};
    for (const auto& p : points) {
        t.rows.push_back({std::to_string(p.team_size), std::to_string(p.rank),
                          format_double(p.mean_contribution_share),
                          format_double(p.mean_credit_share), std::to_string(p.n)});
    }
    return t;
}

}  // namespace creditlens
