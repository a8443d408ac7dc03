#include "creditlens/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "creditlens/errors.hpp"

namespace creditlens {

namespace {

// Sampling helpers are hand-rolled on top of the raw mt19937_64 stream;
// std::uniform_int_distribution is implementation-defined and would break
// the cross-platform determinism contract.
struct Rng {
    std::mt19937_64 engine;
    explicit Rng(std::uint64_t seed) : engine(seed) {}

    std::uint64_t next() { return engine(); }
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }
    double real() { return (next() >> 11) * (1.0 / 9007199254740992.0); }

    int poisson(double mean) {
        // Knuth; fine for small means
        double limit = std::exp(-mean);
        double product = real();
        int count = 0;
        while (product > limit) {
            ++count;
            product *= real();
        }
        return count;
    }
};

// letters-only encoding; LaTeX control words cannot contain digits
std::string alpha_code(int n) {
    std::string out;
    do {
        out += static_cast<char>('a' + n % 26);
        n /= 26;
    } while (n > 0);
    std::reverse(out.begin(), out.end());
    return out;
}

std::string pad_id(const char* prefix, int n, int width) {
    std::string digits = std::to_string(n);
    std::string out = prefix;
    out.append(width > static_cast<int>(digits.size()) ? width - digits.size() : 0, '0');
    out += digits;
    return out;
}

const char* kMaleNames[] = {"James",  "Robert", "Michael", "David",  "Carlos", "Thomas",
                            "Daniel", "Henri",  "Andrew",  "Paul",   "Kenji",  "Omar",
                            "Ivan",   "Pierre", "Stefan",  "Rajesh", "Lars",   "Marco",
                            "Felix",  "Hiroshi"};
const char* kFemaleNames[] = {"Mary",   "Patricia", "Jennifer", "Linda", "Elena",  "Susan",
                              "Jessica", "Sarah",   "Karen",    "Marie", "Yuki",   "Fatima",
                              "Olga",    "Claire",  "Ingrid",   "Priya", "Astrid", "Giulia",
                              "Hannah",  "Akiko"};
const char* kSurnames[] = {"Smith", "Mueller", "Tanaka", "Garcia", "Novak", "Rossi",
                           "Kim",   "Patel",   "Larsen", "Dubois", "Weber", "Silva",
                           "Chen",  "Kowalski", "Moreau", "Okafor"};

}  // namespace

SynthConfig demo_config() {
    SynthConfig cfg;
    cfg.n_authors = 400;
    cfg.n_papers = 1000;
    cfg.n_disciplines = 16;
    cfg.vocab_min = 20;
    cfg.vocab_max = 200;
    cfg.coauthor_prior_cite_prob = 0.6;
    cfg.author_order = AuthorOrder::JuniorFirst;
    cfg.generate_prizes = true;
    return cfg;
}

SynthResult synthesize_corpus(const SynthConfig& config, std::uint64_t seed) {
    if (config.n_authors <= 0 || config.n_papers < 0)
        throw DataError("infeasible config: nonpositive pool sizes");
    if (config.year_max < config.year_min) throw DataError("infeasible config: year range");
    if (config.team_size_weights.empty())
        throw DataError("infeasible config: empty team-size distribution");
    double weight_total = 0;
    for (const auto& [size, w] : config.team_size_weights) {
        if (size < 1 || w < 0) throw DataError("infeasible config: bad team-size entry");
        if (w > 0 && size > config.n_authors)
            throw DataError("infeasible config: team size " + std::to_string(size) +
                            " exceeds author pool " + std::to_string(config.n_authors));
        weight_total += w;
    }
    if (weight_total <= 0) throw DataError("infeasible config: zero-weight distribution");

    Rng rng(seed);
    const int span = config.year_max - config.year_min + 1;

    struct SynthAuthor {
        std::string id;
        std::string name;
        int debut = 0;
        int sex = 0;  // index parity into the name lists
        std::vector<MacroFingerprint> vocab;
        std::vector<int> paper_indices;  // chronological
    };
    std::vector<SynthAuthor> authors(config.n_authors);
    for (int i = 0; i < config.n_authors; ++i) {
        SynthAuthor& a = authors[i];
        a.id = pad_id("a", i + 1, 4);
        a.sex = static_cast<int>(rng.below(2));
        const char* first = a.sex ? kMaleNames[rng.below(20)] : kFemaleNames[rng.below(20)];
        a.name = std::string(first) + " " + kSurnames[rng.below(16)];
        a.debut = config.year_min + static_cast<int>(rng.below(span));
        int vocab_size =
            config.vocab_min +
            static_cast<int>(rng.below(std::max(1, config.vocab_max - config.vocab_min + 1)));
        for (int j = 0; j < vocab_size; ++j) {
            std::string name = "mac" + alpha_code(i) + "x" + alpha_code(j);
            std::string body =
                "\\mathrm{v_{" + std::to_string(i) + "," + std::to_string(j) + "}}";
            a.vocab.push_back(make_fingerprint(name, 0, body));
        }
    }

    auto sample_team_size = [&]() {
        double u = rng.real() * weight_total;
        for (const auto& [size, w] : config.team_size_weights) {
            u -= w;
            if (u <= 0) return size;
        }
        return config.team_size_weights.rbegin()->first;
    };

    SynthResult result;
    std::vector<PaperRecord> papers;
    std::vector<PrizeLink> prizes;
    int prize_field = 0;
    for (int i = 0; i < config.n_papers; ++i) {
        PaperRecord p;
        p.paper_id = pad_id("p", i + 1, 5);
        // non-decreasing years so earlier indices are citable history
        p.year = config.year_min +
                 static_cast<int>(static_cast<long>(i) * span / std::max(1, config.n_papers));
        p.title = "Synthetic paper " + std::to_string(i + 1);
        p.discipline = "field" + pad_id("", static_cast<int>(rng.below(config.n_disciplines)) + 1, 2);

        std::vector<int> eligible;
        for (int a = 0; a < config.n_authors; ++a)
            if (authors[a].debut <= p.year) eligible.push_back(a);
        if (eligible.empty())
            for (int a = 0; a < config.n_authors; ++a) eligible.push_back(a);
        int team_size = std::min<int>(sample_team_size(), static_cast<int>(eligible.size()));

        std::vector<int> team;
        while (static_cast<int>(team.size()) < team_size) {
            int pick = eligible[rng.below(eligible.size())];
            if (std::find(team.begin(), team.end(), pick) == team.end()) team.push_back(pick);
        }
        if (config.author_order == AuthorOrder::JuniorFirst) {
            std::stable_sort(team.begin(), team.end(), [&](int x, int y) {
                return authors[x].debut > authors[y].debut;  // most recent debut first
            });
        }
        for (std::size_t k = 0; k < team.size(); ++k) {
            p.authors.push_back(
                {authors[team[k]].id, authors[team[k]].name, static_cast<int>(k) + 1});
        }

        // macro definitions: each team member contributes from their vocabulary
        std::vector<MacroFingerprint> macros;
        for (int a : team) {
            const auto& vocab = authors[a].vocab;
            int take = std::min<int>(config.macros_per_author_per_paper,
                                     static_cast<int>(vocab.size()));
            std::vector<std::size_t> chosen;
            while (static_cast<int>(chosen.size()) < take) {
                std::size_t j = rng.below(vocab.size());
                if (std::find(chosen.begin(), chosen.end(), j) == chosen.end())
                    chosen.push_back(j);
            }
            std::sort(chosen.begin(), chosen.end());
            for (std::size_t j : chosen) macros.push_back(vocab[j]);
        }
        std::sort(macros.begin(), macros.end());
        result.paper_macros[p.paper_id] = std::move(macros);

        // references to earlier papers; optional extra citations to prior
        // work of the cited paper's most senior authors
        if (i > 0) {
            int refs = std::min(rng.poisson(config.mean_references), i);
            std::vector<int> targets;
            while (static_cast<int>(targets.size()) < refs) {
                int t = static_cast<int>(rng.below(i));
                if (std::find(targets.begin(), targets.end(), t) == targets.end())
                    targets.push_back(t);
            }
            std::vector<int> extra;
            for (int t : targets) {
                if (rng.real() >= config.coauthor_prior_cite_prob) continue;
                // pick an author of t weighted by career length
                const PaperRecord& cited = papers[t];
                double total = 0;
                std::vector<double> w;
                std::vector<int> idx;
                for (const auto& au : cited.authors) {
                    int ai = std::stoi(au.author_id.substr(1)) - 1;
                    double weight = cited.year - authors[ai].debut + 1.0;
                    idx.push_back(ai);
                    w.push_back(weight);
                    total += weight;
                }
                double u = rng.real() * total;
                int picked = idx.back();
                for (std::size_t k = 0; k < w.size(); ++k) {
                    u -= w[k];
                    if (u <= 0) {
                        picked = idx[k];
                        break;
                    }
                }
                const auto& prior = authors[picked].paper_indices;
                if (!prior.empty()) extra.push_back(prior[rng.below(prior.size())]);
            }
            for (int t : extra)
                if (std::find(targets.begin(), targets.end(), t) == targets.end())
                    targets.push_back(t);
            std::sort(targets.begin(), targets.end());
            for (int t : targets) p.references.push_back(papers[t].paper_id);
        }

        if (config.generate_prizes && i % 10 == 0 && !p.authors.empty()) {
            PrizeLink pl;
            pl.paper_id = p.paper_id;
            pl.laureate_author_ids.push_back(p.authors.back().author_id);
            pl.prize_year = p.year + 3;
            const char* fields[] = {"Physics", "Chemistry", "Medicine"};
            pl.field = fields[prize_field++ % 3];
            prizes.push_back(std::move(pl));
        }

        for (int a : team) authors[a].paper_indices.push_back(i);
        papers.push_back(std::move(p));
    }
    result.corpus = index_corpus(std::move(papers), std::move(prizes));
    return result;
}

std::vector<MacroOccurrence> synth_macro_occurrences(const SynthResult& synth) {
    std::vector<MacroOccurrence> out;
    for (const auto& [paper_id, macros] : synth.paper_macros) {
        for (const auto& fp : macros) {
            MacroOccurrence occ;
            occ.fingerprint = fp;
            occ.paper_id = paper_id;
            occ.use_count = 1;
            out.push_back(std::move(occ));
        }
    }
    return out;
}

void write_synth_corpus(SynthResult& synth, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir / "sources");
    for (auto& [paper_id, paper] : synth.corpus.papers) {
        // relative to the corpus root so output files are location-independent
        paper.source_path = "sources/" + paper_id;
        fs::path dir = out_dir / "sources" / paper_id;
        fs::create_directories(dir);
        std::ofstream os(dir / "main.tex", std::ios::binary);
        if (!os) throw DataError("cannot write " + (dir / "main.tex").string());
        os << "\\documentclass{article}\n";
        const auto& macros = synth.paper_macros.at(paper_id);
        // synthetic bodies are short, so body_preview is the full normalized body
        for (const auto& fp : macros)
            os << "\\newcommand{\\" << fp.name << "}{" << fp.body_preview << "}\n";
        os << "\\begin{document}\n";
        for (const auto& fp : macros) os << "$\\" << fp.name << "$\n";
        os << "\\end{document}\n";
    }
    write_corpus(synth.corpus, out_dir / "papers.jsonl",
                 synth.corpus.prizes.empty()
                     ? std::nullopt
                     : std::optional<fs::path>(out_dir / "prizes.jsonl"));
    write_macros_jsonl(synth_macro_occurrences(synth), out_dir / "macros.jsonl");
}

}  // namespace creditlens
