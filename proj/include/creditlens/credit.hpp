#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "creditlens/corpus.hpp"
#include "creditlens/table.hpp"

namespace creditlens {

// Immutable after build; allocate_credit is read-only and parallel across
// focal papers.
class CitationGraph {
  public:
    explicit CitationGraph(const Corpus& corpus);

    const std::vector<std::string>& citers_of(const std::string& paper_id) const;
    // empty if the paper is unknown (dangling reference target)
    const std::vector<std::string>& authors_of(const std::string& paper_id) const;
    const std::vector<std::string>& references_of(const std::string& paper_id) const;
    bool has_paper(const std::string& paper_id) const { return authorship_.count(paper_id) > 0; }
    std::size_t paper_count() const { return authorship_.size(); }

  private:
    std::unordered_map<std::string, std::vector<std::string>> citers_;
    std::unordered_map<std::string, std::vector<std::string>> authorship_;
    std::unordered_map<std::string, std::vector<std::string>> references_;
};

struct CoCitationEntry {
    std::string paper_id;
    long strength = 0;  // citing papers shared with the focal paper
};

struct CoCitationProfile {
    std::string focal;
    // sorted by paper_id; includes the focal itself with strength = citation
    // count, which realizes the equal-share baseline in allocate_credit
    std::vector<CoCitationEntry> entries;
};

struct CreditShare {
    std::string author_id;
    int position = 0;
    double share = 0.0;
};

struct CreditVector {
    std::string paper_id;
    std::vector<CreditShare> shares;  // ordered by author position
    std::vector<double> raw_scores;   // pre-normalization, same order
};

CitationGraph build_graph(const Corpus& corpus);

CoCitationProfile co_citation_profile(const CitationGraph& g, const std::string& focal);

// raw score of author a = sum over co-cited entries (d, s) of
// s / |authors(d)| when a authored d; shares = raw scores normalized.
// Throws NumericError when the focal paper has no citations.
CreditVector allocate_credit(const CitationGraph& g, const std::string& focal);

// argmax share, ties -> smallest author position
std::string top_credit_author(const CreditVector& cv);

Table credit_table(const std::vector<CreditVector>& vectors);
std::vector<CreditVector> credit_from_table(const Table& table);

}  // namespace creditlens
