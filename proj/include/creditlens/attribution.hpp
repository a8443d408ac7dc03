#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "creditlens/corpus.hpp"
#include "creditlens/table.hpp"
#include "creditlens/texmacro.hpp"

namespace creditlens {

struct AuthorProfile {
    std::string author_id;
    // fingerprint -> earliest year this author used it
    std::map<MacroFingerprint, int> macro_history;
    int paper_count = 0;
};

struct ContributionShare {
    std::string author_id;
    int position = 0;
    int attributed_macro_count = 0;
    double share = 0.0;
};

struct ContributionVector {
    std::string paper_id;
    std::vector<ContributionShare> shares;  // ordered by author position
    int attributable_total = 0;             // sum of attributed counts
    bool unattributable = false;            // all counts zero: shares undefined
};

// Filters applied at attribution time: a name blocklist of template
// boilerplate plus a corpus-frequency cutoff (fingerprints defined in more
// than max_doc_fraction of papers are dropped).
class MacroFilter {
  public:
    MacroFilter() = default;

    static MacroFilter from_blocklist_file(const std::filesystem::path& path);

    // doc-frequency side, computed over the full occurrence set
    void fit_frequency(const std::vector<MacroOccurrence>& occurrences,
                       double max_doc_fraction = 0.05);

    void add_blocked_name(std::string name);
    bool passes(const MacroFingerprint& fp) const;

  private:
    std::set<std::string> blocked_names_;
    std::set<MacroFingerprint> frequent_;
};

// Profile of author a contains fingerprint m with year y iff a authored some
// paper of year y containing m and y is minimal over such papers.
std::map<std::string, AuthorProfile> build_profiles(const Corpus& corpus,
                                                    const std::vector<MacroOccurrence>& macros);

// attributed count of author a = focal fingerprints (post-filter) present in
// a's history strictly before focal.year. A macro matching several authors
// counts once for each. Shares normalize over the sum of counts.
ContributionVector attribute_contributions(const PaperRecord& focal,
                                           const std::vector<MacroFingerprint>& focal_macros,
                                           const std::map<std::string, AuthorProfile>& profiles,
                                           const MacroFilter* filter = nullptr);

// Maximal share; ties broken by smallest author position. Throws on an
// unattributable vector.
std::string primary_contributor(const ContributionVector& cv);

Table contributions_table(const std::vector<ContributionVector>& vectors);
std::vector<ContributionVector> contributions_from_table(const Table& table);

}  // namespace creditlens
