#include "creditlens/attribution.hpp"

#include <algorithm>
#include <fstream>

#include "creditlens/errors.hpp"

namespace creditlens {

MacroFilter MacroFilter::from_blocklist_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open blocklist: " + path.string());
    MacroFilter f;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        std::string name = line.substr(start);
        if (!name.empty() && name[0] == '\\') name.erase(0, 1);
        f.blocked_names_.insert(std::move(name));
    }
    return f;
}

void MacroFilter::fit_frequency(const std::vector<MacroOccurrence>& occurrences,
                                double max_doc_fraction) {
    std::set<std::string> papers;
    std::map<MacroFingerprint, std::set<std::string>> docs;
    for (const auto& occ : occurrences) {
        papers.insert(occ.paper_id);
        docs[occ.fingerprint].insert(occ.paper_id);
    }
    frequent_.clear();
    if (papers.empty()) return;
    const double n = static_cast<double>(papers.size());
    for (const auto& [fp, in_docs] : docs)
        if (static_cast<double>(in_docs.size()) / n > max_doc_fraction) frequent_.insert(fp);
}

void MacroFilter::add_blocked_name(std::string name) {
    blocked_names_.insert(std::move(name));
}

bool MacroFilter::passes(const MacroFingerprint& fp) const {
    return !blocked_names_.count(fp.name) && !frequent_.count(fp);
}

std::map<std::string, AuthorProfile> build_profiles(const Corpus& corpus,
                                                    const std::vector<MacroOccurrence>& macros) {
    std::map<std::string, std::vector<const MacroOccurrence*>> by_paper;
    for (const auto& occ : macros) by_paper[occ.paper_id].push_back(&occ);

    std::map<std::string, AuthorProfile> profiles;
    for (const auto& [paper_id, p] : corpus.papers) {
        auto it = by_paper.find(paper_id);
        for (const auto& a : p.authors) {
            auto [pit, inserted] = profiles.try_emplace(a.author_id);
            if (inserted) pit->second.author_id = a.author_id;
            pit->second.paper_count += 1;
            if (it == by_paper.end()) continue;
            for (const MacroOccurrence* occ : it->second) {
                auto [hit, fresh] = pit->second.macro_history.try_emplace(occ->fingerprint, p.year);
                if (!fresh) hit->second = std::min(hit->second, p.year);
            }
        }
    }
    return profiles;
}

ContributionVector attribute_contributions(const PaperRecord& focal,
                                           const std::vector<MacroFingerprint>& focal_macros,
                                           const std::map<std::string, AuthorProfile>& profiles,
                                           const MacroFilter* filter) {
    if (focal.authors.empty()) throw DataError(focal.paper_id + ": focal paper has no authors");
    // dedup defensively; upstream already dedups per paper
    std::set<MacroFingerprint> fps;
    for (const auto& fp : focal_macros)
        if (!filter || filter->passes(fp)) fps.insert(fp);

    ContributionVector cv;
    cv.paper_id = focal.paper_id;
    for (const auto& a : focal.authors) {
        ContributionShare s;
        s.author_id = a.author_id;
        s.position = a.position;
        auto pit = profiles.find(a.author_id);
        if (pit != profiles.end()) {
            for (const auto& fp : fps) {
                auto hit = pit->second.macro_history.find(fp);
                // "previously used" = strictly earlier calendar year
                if (hit != pit->second.macro_history.end() && hit->second < focal.year)
                    s.attributed_macro_count += 1;
            }
        }
        cv.attributable_total += s.attributed_macro_count;
        cv.shares.push_back(std::move(s));
    }
    if (cv.attributable_total == 0) {
        cv.unattributable = true;
    } else {
        for (auto& s : cv.shares)
            s.share = static_cast<double>(s.attributed_macro_count) / cv.attributable_total;
    }
    return cv;
}

std::string primary_contributor(const ContributionVector& cv) {
    if (cv.unattributable || cv.shares.empty())
        throw DataError(cv.paper_id + ": unattributable contribution vector");
    const ContributionShare* best = &cv.shares.front();
    for (const auto& s : cv.shares)
        if (s.share > best->share) best = &s;  // ties keep the smallest position
    return best->author_id;
}

Table contributions_table(const std::vector<ContributionVector>& vectors) {
    Table t;
    t.header = {"paper_id", "author_id",          "position",
                "macro_count", "contribution_share", "is_primary_contributor",
                "unattributable"};
    for (const auto& cv : vectors) {
        std::string primary = cv.unattributable ? std::string{} : primary_contributor(cv);
        for (const auto& s : cv.shares) {
            t.rows.push_back({cv.paper_id, s.author_id, std::to_string(s.position),
                              std::to_string(s.attributed_macro_count),
                              cv.unattributable ? "0" : format_double(s.share),
                              s.author_id == primary ? "1" : "0",
                              cv.unattributable ? "1" : "0"});
        }
    }
    return t;
}

std::vector<ContributionVector> contributions_from_table(const Table& table) {
    std::map<std::string, ContributionVector> by_paper;
    std::vector<std::string> order;
    for (const auto& row : table.rows) {
        if (row.size() < 7) throw DataError("contributions row with missing columns");
        auto [it, fresh] = by_paper.try_emplace(row[0]);
        if (fresh) {
            it->second.paper_id = row[0];
            order.push_back(row[0]);
        }
        ContributionShare s;
        s.author_id = row[1];
        s.position = std::stoi(row[2]);
        s.attributed_macro_count = std::stoi(row[3]);
        s.share = std::stod(row[4]);
        it->second.attributable_total += s.attributed_macro_count;
        it->second.unattributable = row[6] == "1";
        it->second.shares.push_back(std::move(s));
    }
    std::vector<ContributionVector> out;
    for (const auto& id : order) {
        auto& cv = by_paper[id];
        std::sort(cv.shares.begin(), cv.shares.end(),
                  [](const ContributionShare& a, const ContributionShare& b) {
                      return a.position < b.position;
                  });
        out.push_back(std::move(cv));
    }
    return out;
}

}  // namespace creditlens
