#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace creditlens {

struct Authorship {
    std::string author_id;
    std::string name;
    int position = 0;  // 1..n

    bool operator==(const Authorship&) const = default;
};

struct PaperRecord {
    std::string paper_id;
    std::string title;
    int year = 0;
    std::string discipline;
    std::vector<Authorship> authors;  // sorted by position 1..n
    std::vector<std::string> references;
    std::optional<std::string> doi;
    std::optional<std::string> source_path;

    bool operator==(const PaperRecord&) const = default;
    int team_size() const { return static_cast<int>(authors.size()); }
};

struct AuthorRecord {
    std::string author_id;
    std::string name;
    int first_pub_year = 0;  // derived: min year over the author's papers
    int paper_count = 0;

    bool operator==(const AuthorRecord&) const = default;
};

struct PrizeLink {
    std::string paper_id;
    std::vector<std::string> laureate_author_ids;
    int prize_year = 0;
    std::string field;  // Physics | Chemistry | Medicine

    bool operator==(const PrizeLink&) const = default;
};

// Immutable after load; safe for shared read access from parallel workers.
struct Corpus {
    std::map<std::string, PaperRecord> papers;
    std::map<std::string, AuthorRecord> authors;
    // forward citation index, cited -> sorted citing paper_ids
    std::map<std::string, std::vector<std::string>> citers;
    // referenced paper_ids that do not resolve in `papers` (kept, flagged)
    std::set<std::string> dangling_references;
    std::vector<PrizeLink> prizes;

    bool operator==(const Corpus&) const = default;

    const PaperRecord& paper(const std::string& id) const;
    int citation_count(const std::string& id) const;
};

// Validates records, derives first_pub_year, and builds the citation index
// (exact transpose of the union of reference lists).
Corpus load_corpus(const std::filesystem::path& papers_file,
                   const std::optional<std::filesystem::path>& prizes_file = std::nullopt);

void write_corpus(const Corpus& corpus, const std::filesystem::path& papers_file,
                  const std::optional<std::filesystem::path>& prizes_file = std::nullopt);

// Rebuilds indexes from `papers` + `prizes`; validates invariants.
// load_corpus and the synthesizer both funnel through this.
Corpus index_corpus(std::vector<PaperRecord> papers, std::vector<PrizeLink> prizes);

}  // namespace creditlens
