#include "creditlens/credit.hpp"

#include <algorithm>

#include "creditlens/errors.hpp"

namespace creditlens {

namespace {
const std::vector<std::string> kEmpty;
}

CitationGraph::CitationGraph(const Corpus& corpus) {
    for (const auto& [id, p] : corpus.papers) {
        auto& authors = authorship_[id];
        for (const auto& a : p.authors) authors.push_back(a.author_id);
        auto& refs = references_[id];
        for (const auto& r : p.references)
            if (std::find(refs.begin(), refs.end(), r) == refs.end()) refs.push_back(r);
    }
    for (const auto& [cited, citing] : corpus.citers) citers_[cited] = citing;
}

const std::vector<std::string>& CitationGraph::citers_of(const std::string& paper_id) const {
    auto it = citers_.find(paper_id);
    return it == citers_.end() ? kEmpty : it->second;
}

const std::vector<std::string>& CitationGraph::authors_of(const std::string& paper_id) const {
    auto it = authorship_.find(paper_id);
    return it == authorship_.end() ? kEmpty : it->second;
}

const std::vector<std::string>& CitationGraph::references_of(const std::string& paper_id) const {
    auto it = references_.find(paper_id);
    return it == references_.end() ? kEmpty : it->second;
}

CitationGraph build_graph(const Corpus& corpus) { return CitationGraph(corpus); }

CoCitationProfile co_citation_profile(const CitationGraph& g, const std::string& focal) {
    if (!g.has_paper(focal)) throw DataError("unknown focal paper: " + focal);
    CoCitationProfile profile;
    profile.focal = focal;
    const auto& citers = g.citers_of(focal);
    if (citers.empty()) return profile;  // no co-citation evidence
    std::map<std::string, long> strength;
    strength[focal] = static_cast<long>(citers.size());
    for (const auto& c : citers) {
        // a citing paper contributes at most 1 per co-cited paper (its
        // reference list is deduplicated in the graph)
        for (const auto& d : g.references_of(c))
            if (d != focal) strength[d] += 1;
    }
    for (auto& [id, s] : strength) profile.entries.push_back({id, s});
    return profile;
}

CreditVector allocate_credit(const CitationGraph& g, const std::string& focal) {
    const auto& focal_authors = g.authors_of(focal);
    if (focal_authors.empty()) throw DataError("unknown focal paper: " + focal);
    auto profile = co_citation_profile(g, focal);
    if (profile.entries.empty())
        throw NumericError(focal + ": no co-citation evidence (zero citations)");

    CreditVector cv;
    cv.paper_id = focal;
    cv.raw_scores.assign(focal_authors.size(), 0.0);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < focal_authors.size(); ++i) index[focal_authors[i]] = i;

    for (const auto& [d, s] : profile.entries) {
        const auto& authors = g.authors_of(d);
        if (authors.empty()) continue;  // dangling co-cited paper: no credit flows
        const double frac = static_cast<double>(s) / static_cast<double>(authors.size());
        for (const auto& a : authors) {
            auto it = index.find(a);
            if (it != index.end()) cv.raw_scores[it->second] += frac;
        }
    }
    double total = 0.0;
    for (double r : cv.raw_scores) total += r;
    for (std::size_t i = 0; i < focal_authors.size(); ++i) {
        CreditShare s;
        s.author_id = focal_authors[i];
        s.position = static_cast<int>(i) + 1;
        // total > 0 always holds via the focal self-entry; uniform fallback
        // kept as a defensive branch
        s.share = total > 0 ? cv.raw_scores[i] / total : 1.0 / focal_authors.size();
        cv.shares.push_back(std::move(s));
    }
    return cv;
}

std::string top_credit_author(const CreditVector& cv) {
    if (cv.shares.empty()) throw DataError(cv.paper_id + ": empty credit vector");
    const CreditShare* best = &cv.shares.front();
    for (const auto& s : cv.shares)
        if (s.share > best->share) best = &s;
    return best->author_id;
}

Table credit_table(const std::vector<CreditVector>& vectors) {
    Table t;
    t.header = {"paper_id", "author_id", "position", "credit_share", "is_top_credit"};
    for (const auto& cv : vectors) {
        std::string top = top_credit_author(cv);
        for (const auto& s : cv.shares) {
            t.rows.push_back({cv.paper_id, s.author_id, std::to_string(s.position),
                              format_double(s.share), s.author_id == top ? "1" : "0"});
        }
    }
    return t;
}

std::vector<CreditVector> credit_from_table(const Table& table) {
    std::map<std::string, CreditVector> by_paper;
    std::vector<std::string> order;
    for (const auto& row : table.rows) {
        if (row.size() < 5) throw DataError("credit row with missing columns");
        auto [it, fresh] = by_paper.try_emplace(row[0]);
        if (fresh) {
            it->second.paper_id = row[0];
            order.push_back(row[0]);
        }
        CreditShare s;
        s.author_id = row[1];
        s.position = std::stoi(row[2]);
        s.share = std::stod(row[3]);
        it->second.shares.push_back(std::move(s));
    }
    std::vector<CreditVector> out;
    for (const auto& id : order) {
        auto& cv = by_paper[id];
        std::sort(cv.shares.begin(), cv.shares.end(),
                  [](const CreditShare& a, const CreditShare& b) { return a.position < b.position; });
        out.push_back(std::move(cv));
    }
    return out;
}

}  // namespace creditlens
