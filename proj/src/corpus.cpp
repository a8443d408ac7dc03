#include "creditlens/corpus.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "creditlens/errors.hpp"

namespace creditlens {

using nlohmann::ordered_json;

const PaperRecord& Corpus::paper(const std::string& id) const {
    auto it = papers.find(id);
    if (it == papers.end()) throw DataError("unknown paper_id: " + id);
    return it->second;
}

int Corpus::citation_count(const std::string& id) const {
    auto it = citers.find(id);
    return it == citers.end() ? 0 : static_cast<int>(it->second.size());
}

namespace {

void validate_paper(const PaperRecord& p) {
    if (p.paper_id.empty()) throw DataError("paper with empty paper_id");
    if (p.authors.empty()) throw DataError(p.paper_id + ": paper has no authors");
    std::set<std::string> seen_ids;
    std::vector<int> positions;
    for (const auto& a : p.authors) {
        if (!seen_ids.insert(a.author_id).second)
            throw DataError(p.paper_id + ": duplicate author_id " + a.author_id);
        positions.push_back(a.position);
    }
    std::vector<int> sorted = positions;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i < sorted.size(); ++i)
        if (sorted[i] != static_cast<int>(i) + 1)
            throw DataError(p.paper_id + ": author positions are not exactly 1.." +
                            std::to_string(p.authors.size()));
    for (const auto& r : p.references)
        if (r == p.paper_id)
            throw DataError(p.paper_id + ": paper references itself");
}

PaperRecord paper_from_json(const ordered_json& j) {
    PaperRecord p;
    p.paper_id = j.at("paper_id").get<std::string>();
    p.title = j.value("title", std::string{});
    p.year = j.at("year").get<int>();
    p.discipline = j.value("discipline", std::string{});
    for (const auto& a : j.at("authors")) {
        Authorship au;
        au.author_id = a.at("author_id").get<std::string>();
        au.name = a.value("name", std::string{});
        au.position = a.at("position").get<int>();
        p.authors.push_back(std::move(au));
    }
    std::sort(p.authors.begin(), p.authors.end(),
              [](const Authorship& x, const Authorship& y) { return x.position < y.position; });
    if (j.contains("references"))
        for (const auto& r : j.at("references")) p.references.push_back(r.get<std::string>());
    if (j.contains("doi") && !j.at("doi").is_null()) p.doi = j.at("doi").get<std::string>();
    if (j.contains("source_path") && !j.at("source_path").is_null())
        p.source_path = j.at("source_path").get<std::string>();
    return p;
}

ordered_json paper_to_json(const PaperRecord& p) {
    ordered_json j;
    j["paper_id"] = p.paper_id;
    j["title"] = p.title;
    j["year"] = p.year;
    j["discipline"] = p.discipline;
    ordered_json authors = ordered_json::array();
    for (const auto& a : p.authors) {
        authors.push_back({{"author_id", a.author_id}, {"name", a.name}, {"position", a.position}});
    }
    j["authors"] = std::move(authors);
    j["references"] = p.references;
    j["doi"] = p.doi ? ordered_json(*p.doi) : ordered_json(nullptr);
    j["source_path"] = p.source_path ? ordered_json(*p.source_path) : ordered_json(nullptr);
    return j;
}

}  // namespace

Corpus index_corpus(std::vector<PaperRecord> papers, std::vector<PrizeLink> prizes) {
    Corpus c;
    for (auto& p : papers) {
        validate_paper(p);
        auto id = p.paper_id;
        if (!c.papers.emplace(id, std::move(p)).second)
            throw DataError("duplicate paper_id: " + id);
    }
    // authors: first_pub_year derived from the loaded corpus, never trusted
    // from input
    for (const auto& [id, p] : c.papers) {
        for (const auto& a : p.authors) {
            auto [it, inserted] = c.authors.try_emplace(a.author_id);
            AuthorRecord& rec = it->second;
            if (inserted) {
                rec.author_id = a.author_id;
                rec.name = a.name;
                rec.first_pub_year = p.year;
            } else {
                rec.first_pub_year = std::min(rec.first_pub_year, p.year);
                if (rec.name.empty()) rec.name = a.name;
            }
            rec.paper_count += 1;
        }
    }
    // citation index = transpose of the reference lists; dangling targets kept
    for (const auto& [id, p] : c.papers) {
        for (const auto& r : p.references) {
            c.citers[r].push_back(id);
            if (!c.papers.count(r)) c.dangling_references.insert(r);
        }
    }
    for (auto& [id, v] : c.citers) std::sort(v.begin(), v.end());
    // prizes must resolve
    for (auto& pl : prizes) {
        const PaperRecord& p = c.paper(pl.paper_id);
        if (pl.laureate_author_ids.empty())
            throw DataError(pl.paper_id + ": prize with no laureates");
        for (const auto& lid : pl.laureate_author_ids) {
            bool found = std::any_of(p.authors.begin(), p.authors.end(),
                                     [&](const Authorship& a) { return a.author_id == lid; });
            if (!found)
                throw DataError(pl.paper_id + ": laureate " + lid + " is not an author");
        }
        c.prizes.push_back(std::move(pl));
    }
    std::sort(c.prizes.begin(), c.prizes.end(), [](const PrizeLink& a, const PrizeLink& b) {
        return a.paper_id < b.paper_id;
    });
    return c;
}

Corpus load_corpus(const std::filesystem::path& papers_file,
                   const std::optional<std::filesystem::path>& prizes_file) {
    std::ifstream is(papers_file, std::ios::binary);
    if (!is) throw DataError("cannot open: " + papers_file.string());
    std::vector<PaperRecord> papers;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            papers.push_back(paper_from_json(ordered_json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw DataError(papers_file.string() + ":" + std::to_string(lineno) + ": malformed record: " + e.what());
        }
    }
    std::vector<PrizeLink> prizes;
    if (prizes_file) {
        std::ifstream ps(*prizes_file, std::ios::binary);
        if (!ps) throw DataError("cannot open: " + prizes_file->string());
        lineno = 0;
        while (std::getline(ps, line)) {
            ++lineno;
            if (line.empty()) continue;
            try {
                auto j = ordered_json::parse(line);
                PrizeLink pl;
                pl.paper_id = j.at("paper_id").get<std::string>();
                for (const auto& a : j.at("laureate_author_ids"))
                    pl.laureate_author_ids.push_back(a.get<std::string>());
                pl.prize_year = j.at("prize_year").get<int>();
                pl.field = j.at("field").get<std::string>();
                prizes.push_back(std::move(pl));
            } catch (const nlohmann::json::exception& e) {
                throw DataError(prizes_file->string() + ":" + std::to_string(lineno) + ": malformed record: " + e.what());
            }
        }
    }
    return index_corpus(std::move(papers), std::move(prizes));
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& papers_file,
                  const std::optional<std::filesystem::path>& prizes_file) {
    std::ofstream os(papers_file, std::ios::binary);
    if (!os) throw DataError("cannot open for writing: " + papers_file.string());
    for (const auto& [id, p] : corpus.papers) os << paper_to_json(p).dump() << '\n';
    if (!os) throw DataError("write failed: " + papers_file.string());
    if (prizes_file) {
        std::ofstream ps(*prizes_file, std::ios::binary);
        if (!ps) throw DataError("cannot open for writing: " + prizes_file->string());
        for (const auto& pl : corpus.prizes) {
            ordered_json j;
            j["paper_id"] = pl.paper_id;
            j["laureate_author_ids"] = pl.laureate_author_ids;
            j["prize_year"] = pl.prize_year;
            j["field"] = pl.field;
            ps << j.dump() << '\n';
        }
        if (!ps) throw DataError("write failed: " + prizes_file->string());
    }
}

}  // namespace creditlens
