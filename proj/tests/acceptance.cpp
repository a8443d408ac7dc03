// Acceptance suite: one criterion per section, one [PASS]/[FAIL] line each.
// Exit code 0 only when every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "creditlens/analytics.hpp"
#include "creditlens/attribution.hpp"
#include "creditlens/credit.hpp"
#include "creditlens/errors.hpp"
#include "creditlens/pipeline.hpp"
#include "creditlens/regression.hpp"
#include "creditlens/synth.hpp"
#include "creditlens/texmacro.hpp"

using namespace creditlens;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------- helpers

PaperRecord make_paper(const std::string& id, int year, std::vector<std::string> author_ids,
                       std::vector<std::string> refs = {}) {
    PaperRecord p;
    p.paper_id = id;
    p.year = year;
    p.discipline = "field01";
    int pos = 1;
    for (auto& a : author_ids) p.authors.push_back({a, "Name " + a, pos++});
    p.references = std::move(refs);
    return p;
}

// Brute-force credit oracle, written against the raw corpus records and
// independent of CitationGraph / co_citation_profile.
std::vector<double> oracle_credit(const Corpus& corpus, const std::string& focal) {
    const PaperRecord& fp = corpus.paper(focal);
    std::vector<std::string> citing;
    for (const auto& [id, p] : corpus.papers) {
        for (const auto& r : p.references)
            if (r == focal) {
                citing.push_back(id);
                break;
            }
    }
    if (citing.empty()) throw NumericError("oracle: zero citations");
    std::vector<double> raw(fp.authors.size(), 0.0);
    for (std::size_t i = 0; i < fp.authors.size(); ++i)
        raw[i] += static_cast<double>(citing.size()) / fp.authors.size();
    std::set<std::string> cocited;
    for (const auto& c : citing)
        for (const auto& d : corpus.paper(c).references)
            if (d != focal) cocited.insert(d);
    for (const auto& d : cocited) {
        if (!corpus.papers.count(d)) continue;
        long strength = 0;
        for (const auto& c : citing) {
            const auto& refs = corpus.paper(c).references;
            if (std::find(refs.begin(), refs.end(), d) != refs.end()) ++strength;
        }
        const PaperRecord& dp = corpus.paper(d);
        for (std::size_t i = 0; i < fp.authors.size(); ++i)
            for (const auto& da : dp.authors)
                if (da.author_id == fp.authors[i].author_id)
                    raw[i] += static_cast<double>(strength) / dp.authors.size();
    }
    double total = 0;
    for (double r : raw) total += r;
    for (double& r : raw) r /= total;
    return raw;
}

std::vector<PaperRecord> random_papers(std::mt19937_64& rng, int max_papers) {
    int n_papers = 2 + static_cast<int>(rng() % (max_papers - 1));
    int n_authors = 2 + static_cast<int>(rng() % 6);
    std::vector<PaperRecord> papers;
    for (int i = 0; i < n_papers; ++i) {
        int team = 1 + static_cast<int>(rng() % std::min(4, n_authors));
        std::vector<std::string> authors;
        while (static_cast<int>(authors.size()) < team) {
            std::string a = "a" + std::to_string(rng() % n_authors);
            if (std::find(authors.begin(), authors.end(), a) == authors.end())
                authors.push_back(a);
        }
        std::vector<std::string> refs;
        for (int j = 0; j < n_papers; ++j) {
            if (j == i) continue;
            if (rng() % 3 == 0) refs.push_back("p" + std::to_string(j));
        }
        papers.push_back(make_paper("p" + std::to_string(i), 2000 + i, authors, refs));
    }
    return papers;
}

fs::path fresh_dir(const std::string& name) {
    auto p = fs::temp_directory_path() / "creditlens_acceptance" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::map<std::string, std::string> output_hashes(const fs::path& dir) {
    std::map<std::string, std::string> hashes;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file())
            hashes[entry.path().filename().string()] = hash_file(entry.path());
    return hashes;
}

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
    if (!cond) throw Failure(what);
}

// ---------------------------------------------------------------- criteria

// 1. Two-author fixture: histories of 26 and 195 fingerprints, focal paper
// matching 8 and 40, shares exactly 1/6 and 5/6.
void criterion_contribution_shares() {
    std::vector<PaperRecord> papers;
    std::vector<MacroOccurrence> occurrences;
    auto fp = [](const std::string& name) { return make_fingerprint(name, 0, "body " + name); };
    auto add_history = [&](const std::string& author, const std::string& prefix, int count,
                           int year) {
        for (int i = 0; i < count; ++i) {
            std::string pid = prefix + std::to_string(i);
            papers.push_back(make_paper(pid, year, {author}));
            MacroOccurrence occ;
            occ.fingerprint = fp(prefix + std::to_string(i));
            occ.paper_id = pid;
            occ.use_count = 1;
            occurrences.push_back(occ);
        }
    };
    add_history("minor", "hm", 26, 2005);
    add_history("major", "lm", 195, 2006);
    PaperRecord focal = make_paper("focal", 2011, {"minor", "major"});
    papers.push_back(focal);
    std::vector<MacroFingerprint> focal_macros;
    for (int i = 0; i < 8; ++i) focal_macros.push_back(fp("hm" + std::to_string(i)));
    for (int i = 0; i < 40; ++i) focal_macros.push_back(fp("lm" + std::to_string(i)));

    Corpus corpus = index_corpus(papers, {});
    auto profiles = build_profiles(corpus, occurrences);
    ContributionVector cv = attribute_contributions(focal, focal_macros, profiles);
    require(cv.shares.size() == 2, "expected two shares");
    require(cv.shares[0].attributed_macro_count == 8, "first-author count != 8");
    require(cv.shares[1].attributed_macro_count == 40, "second-author count != 40");
    require(std::abs(cv.shares[0].share - 1.0 / 6.0) <= 1e-12, "share != 1/6");
    require(std::abs(cv.shares[1].share - 5.0 / 6.0) <= 1e-12, "share != 5/6");
    require(primary_contributor(cv) == "major", "wrong primary contributor");
}

// 2. Recognition-gap formula: (1.5 - 1.1)/1.5 and (4.5 - 1.1)/4.5.
void criterion_nobel_gap() {
    auto fixture = [](int base_team, int year, const std::string& field) {
        // ten papers: five of size t, five of size t+1 (mean t + 0.5);
        // laureates 9x1 + 1x2 (mean 1.1)
        std::vector<PaperRecord> papers;
        std::vector<PrizeLink> prizes;
        for (int i = 0; i < 10; ++i) {
            int team = i < 5 ? base_team : base_team + 1;
            papers.push_back(make_paper("p" + std::to_string(i), year,
                                        [&] {
                                            std::vector<std::string> a;
                                            for (int j = 0; j < team; ++j)
                                                a.push_back("p" + std::to_string(i) + "a" +
                                                            std::to_string(j));
                                            return a;
                                        }()));
            PrizeLink pl;
            pl.paper_id = papers.back().paper_id;
            int laureates = i == 9 ? 2 : 1;
            for (int j = 0; j < laureates; ++j)
                pl.laureate_author_ids.push_back(papers.back().authors[j].author_id);
            pl.prize_year = year + 5;
            pl.field = field;
            prizes.push_back(pl);
        }
        return index_corpus(papers, prizes);
    };
    auto frac = [](const Corpus& c, const std::string& field, int decade) {
        for (const auto& s : nobel_gap(c))
            if (s.field == field && s.decade_start == decade) return s.unrecognized_fraction;
        throw Failure("missing decade stat");
    };
    double lo = frac(fixture(1, 1993, "Physics"), "Physics", 1990);
    double hi = frac(fixture(4, 2014, "Chemistry"), "Chemistry", 2010);
    require(std::abs(lo - (1.5 - 1.1) / 1.5) <= 1e-12, "low-decade fraction wrong");
    require(std::abs(hi - (4.5 - 1.1) / 4.5) <= 1e-12, "high-decade fraction wrong");
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2f", lo);
    require(std::string(buf) == "0.27", "low fraction does not round to 0.27");
    std::snprintf(buf, sizeof(buf), "%.2f", hi);
    require(std::string(buf) == "0.76", "high fraction does not round to 0.76");
}

// 3. Credit oracle equivalence on 500 random graphs + exact worked example.
void criterion_credit_oracle() {
    Corpus worked = index_corpus(
        {make_paper("F", 2000, {"A", "B"}), make_paper("D1", 1999, {"A"}),
         make_paper("c1", 2001, {"z"}, {"F", "D1"}), make_paper("c2", 2001, {"z"}, {"F", "D1"}),
         make_paper("c3", 2001, {"z"}, {"F"})},
        {});
    CreditVector wv = allocate_credit(build_graph(worked), "F");
    require(wv.raw_scores[0] == 3.5 && wv.raw_scores[1] == 1.5, "worked raw scores wrong");
    require(wv.shares[0].share == 0.7 && wv.shares[1].share == 0.3,
            "worked example shares not exact");

    std::mt19937_64 rng(20260824);
    int graphs = 0, focals = 0;
    while (graphs < 500) {
        Corpus c = index_corpus(random_papers(rng, 12), {});
        CitationGraph g = build_graph(c);
        bool used = false;
        for (const auto& [id, p] : c.papers) {
            if (c.citation_count(id) == 0) continue;
            used = true;
            ++focals;
            CreditVector cv = allocate_credit(g, id);
            auto expected = oracle_credit(c, id);
            require(cv.shares.size() == expected.size(), "share count mismatch");
            for (std::size_t i = 0; i < expected.size(); ++i)
                require(std::abs(cv.shares[i].share - expected[i]) <= 1e-12,
                        "oracle mismatch on " + id);
        }
        if (used) ++graphs;
    }
    require(focals > 1000, "too few focal papers exercised");
}

// 4. Credit invariants on 1,000 random instances.
void criterion_credit_invariants() {
    std::mt19937_64 rng(77001);
    int instances = 0;
    while (instances < 1000) {
        std::vector<PaperRecord> papers = random_papers(rng, 10);
        Corpus c = index_corpus(papers, {});
        CitationGraph g = build_graph(c);
        std::string focal;
        for (const auto& [id, p] : c.papers)
            if (c.citation_count(id) > 0 && p.team_size() >= 2) focal = id;
        if (focal.empty()) continue;
        ++instances;
        CreditVector base = allocate_credit(g, focal);

        // (a) normalization and nonnegativity
        double total = 0;
        for (const auto& s : base.shares) {
            require(s.share >= 0, "negative share");
            total += s.share;
        }
        require(std::abs(total - 1.0) <= 1e-12, "shares do not sum to 1");

        // (b) permutation equivariance: reverse the focal byline
        {
            std::vector<PaperRecord> perm = papers;
            for (auto& p : perm)
                if (p.paper_id == focal) {
                    std::reverse(p.authors.begin(), p.authors.end());
                    for (int i = 0; i < p.team_size(); ++i) p.authors[i].position = i + 1;
                }
            CreditVector pv = allocate_credit(build_graph(index_corpus(perm, {})), focal);
            std::map<std::string, double> by_author;
            for (const auto& s : base.shares) by_author[s.author_id] = s.share;
            for (const auto& s : pv.shares)
                require(std::abs(s.share - by_author.at(s.author_id)) <= 1e-12,
                        "permutation changed a share");
        }

        // (c) irrelevant co-cited paper: outsiders added to one citer's list
        {
            std::vector<PaperRecord> ext = papers;
            ext.push_back(make_paper("IRR", 1990, {"outsider1", "outsider2"}));
            for (auto& p : ext)
                if (std::find(p.references.begin(), p.references.end(), focal) !=
                    p.references.end()) {
                    p.references.push_back("IRR");
                    break;
                }
            CreditVector ev = allocate_credit(build_graph(index_corpus(ext, {})), focal);
            for (std::size_t i = 0; i < base.shares.size(); ++i)
                require(std::abs(ev.shares[i].share - base.shares[i].share) <= 1e-12,
                        "irrelevant paper changed a share");
        }

        // (d) strength scaling: duplicate every citing paper
        {
            std::vector<PaperRecord> doubled = papers;
            for (const auto& p : papers) {
                if (std::find(p.references.begin(), p.references.end(), focal) ==
                    p.references.end())
                    continue;
                PaperRecord clone = p;
                clone.paper_id = p.paper_id + "_dup";
                for (auto& a : clone.authors) a.author_id += "_dup";
                doubled.push_back(clone);
            }
            CreditVector dv = allocate_credit(build_graph(index_corpus(doubled, {})), focal);
            for (std::size_t i = 0; i < base.shares.size(); ++i)
                require(std::abs(dv.shares[i].share - base.shares[i].share) <= 1e-12,
                        "duplicating citers changed a share");
        }
    }
}

// 5. Parser fixture corpus (30 files, hand-listed fingerprints) + verbatim
// decoy fuzzing over 10k random fixtures.
void criterion_parser() {
    fs::path root = fresh_dir("parser");
    int files_written = 0;
    auto write = [&](const std::string& paper, const std::string& file,
                     const std::string& content) {
        fs::create_directories(root / paper);
        std::ofstream(root / paper / file, std::ios::binary) << content;
        ++files_written;
    };
    auto fp = [](const std::string& name, int arity, const std::string& body) {
        return make_fingerprint(name, arity, body);
    };
    std::map<std::string, std::set<MacroFingerprint>> expected;

    // A: multi-file \input / \include chain
    write("A", "main.tex", "\\documentclass{article}\n\\input{defs}\n\\include{chapter}\n"
                           "\\begin{document}$\\R$, $\\norm{x}{2}$, $\\half$\\end{document}\n");
    write("A", "defs.tex", "\\newcommand{\\R}{\\mathbb{R}}\n"
                           "\\newcommand{\\norm}[2]{\\left\\|#1\\right\\|_{#2}}\n");
    write("A", "chapter.tex", "\\def\\half{\\frac{1}{2}}\n");
    expected["A"] = {fp("R", 0, "\\mathbb{R}"), fp("norm", 2, "\\left\\|#1\\right\\|_{#2}"),
                     fp("half", 0, "\\frac{1}{2}")};

    // B: comment and verbatim decoys around real definitions
    write("B", "main.tex",
          "\\documentclass{article}\n"
          "% \\newcommand{\\fakeA}{nope}\n"
          "\\begin{verbatim}\n\\newcommand{\\fakeB}{nope}\n\\end{verbatim}\n"
          "\\renewcommand{\\vect}[1]{\\boldsymbol{#1}}\n\\input{extra}\n");
    write("B", "extra.tex", "\\providecommand{\\eps}{\\varepsilon} % \\def\\fakeC{nope}\n");
    write("B", "unused_notes.txt", "\\newcommand{\\fakeD}{never parsed}\n");
    expected["B"] = {fp("vect", 1, "\\boldsymbol{#1}"), fp("eps", 0, "\\varepsilon")};

    // C: \input cycle a <-> b, each visited exactly once
    write("C", "main.tex", "\\documentclass{article}\n\\input{a}\n");
    write("C", "a.tex", "\\newcommand{\\fromA}{1}\n\\input{b}\n");
    write("C", "b.tex", "\\newcommand{\\fromB}{2}\n\\input{a}\n");
    expected["C"] = {fp("fromA", 0, "1"), fp("fromB", 0, "2")};

    // D: every definition form
    write("D", "main.tex", "\\documentclass{article}\n\\input{forms1}\n\\input{forms2}\n");
    write("D", "forms1.tex",
          "\\gdef\\ga{A}\n\\edef\\ea{B}\n\\xdef\\xa{C}\n"
          "\\def\\param#1#2{#1+#2}\n\\let\\mysum=\\sum\n\\let\\mydot\\cdot\n");
    write("D", "forms2.tex",
          "\\DeclareMathOperator{\\Tr}{Tr}\n\\DeclareRobustCommand{\\rbst}[1]{r#1}\n"
          "\\newcommand*{\\starred}{s}\n\\newcommand{\\opt}[2][x]{#1#2}\n");
    expected["D"] = {fp("ga", 0, "A"),       fp("ea", 0, "B"),
                     fp("xa", 0, "C"),       fp("param", 2, "#1+#2"),
                     fp("mysum", 0, "\\sum"), fp("mydot", 0, "\\cdot"),
                     fp("Tr", 0, "Tr"),      fp("rbst", 1, "r#1"),
                     fp("starred", 0, "s"),  fp("opt", 2, "#1#2")};

    // E: lstlisting/comment environments and literal \% are not comments
    write("E", "main.tex",
          "\\documentclass{article}\n\\input{code}\n\\input{pct}\n"
          "\\begin{comment}\n\\newcommand{\\fakeE}{nope}\n\\end{comment}\n");
    write("E", "code.tex",
          "\\begin{lstlisting}\n\\newcommand{\\fakeF}{nope}\n\\end{lstlisting}\n"
          "\\newcommand{\\realcode}{ok}\n");
    write("E", "pct.tex", "Interest rose 50\\% \\newcommand{\\pctreal}{kept}\n");
    expected["E"] = {fp("realcode", 0, "ok"), fp("pctreal", 0, "kept")};

    // F: bare \input (extension fallback), missing input, whitespace folding
    write("F", "main.tex", "\\documentclass{article}\n\\input{ws}\n\\input{missingfile}\n");
    write("F", "ws.tex", "\\newcommand{\\ws}{a    b\n   c}\n");
    write("F", "spare.tex", "% intentionally unreferenced\n");
    expected["F"] = {fp("ws", 0, "a b c")};

    // G: identical redefinitions dedup; distinct bodies stay distinct
    write("G", "main.tex", "\\documentclass{article}\n\\input{one}\n\\input{two}\n");
    write("G", "one.tex", "\\newcommand{\\dup}{same}\n\\newcommand{\\multi}{v1}\n");
    write("G", "two.tex", "\\newcommand{\\dup}{same}\n\\renewcommand{\\multi}{v2}\n");
    expected["G"] = {fp("dup", 0, "same"), fp("multi", 0, "v1"), fp("multi", 0, "v2")};

    // H: control-word boundary decoys and an unbalanced definition skipped
    write("H", "main.tex", "\\documentclass{article}\n\\input{bound}\n\\input{broken}\n");
    write("H", "bound.tex", "\\newcommand{\\Q}{q}\nUsage of \\Qe and \\Q here.\n");
    write("H", "broken.tex", "\\newcommand{\\broke}{unbalanced\n\n\\newcommand{\\fine}{f}\n");
    expected["H"] = {fp("Q", 0, "q"), fp("fine", 0, "f")};

    // I: \newenvironment is out of scope and contributes nothing
    write("I", "main.tex", "\\documentclass{article}\n\\input{envs}\n\\input{tail}\n");
    write("I", "envs.tex", "\\newenvironment{myenv}{\\begin{center}}{\\end{center}}\n");
    write("I", "tail.tex", "\\newcommand{\\after}{z}\n");
    expected["I"] = {fp("after", 0, "z")};

    // J: three-level include chain
    write("J", "main.tex", "\\documentclass{article}\n\\input{mid}\n");
    write("J", "mid.tex", "\\newcommand{\\midmac}{m}\n\\input{deep}\n");
    write("J", "deep.tex", "\\newcommand{\\deepmac}[3]{#1#2#3}\n");
    expected["J"] = {fp("midmac", 0, "m"), fp("deepmac", 3, "#1#2#3")};

    require(files_written == 30, "fixture suite must contain exactly 30 files, has " +
                                     std::to_string(files_written));

    for (const auto& [paper, want] : expected) {
        PaperRecord p = make_paper(paper, 2000, {"author_" + paper});
        p.source_path = (root / paper).string();
        PaperMacros pm = extract_paper_macros(p);
        std::set<MacroFingerprint> got;
        for (const auto& occ : pm.occurrences) got.insert(occ.fingerprint);
        if (got != want) {
            std::string detail = "paper " + paper + ": got {";
            for (const auto& f : got) detail += " " + f.name + "/" + std::to_string(f.arity);
            detail += " } want {";
            for (const auto& f : want) detail += " " + f.name + "/" + std::to_string(f.arity);
            detail += " }";
            throw Failure(detail);
        }
    }

    // fuzz: decoys inside verbatim-like regions must never leak
    std::mt19937_64 rng(5150);
    const char* envs[] = {"verbatim", "lstlisting", "comment"};
    for (int trial = 0; trial < 10000; ++trial) {
        std::ostringstream tex;
        std::set<std::string> real_names;
        int blocks = 1 + static_cast<int>(rng() % 5);
        // control-word names must be letters only
        auto alpha = [](int v) {
            std::string s;
            do {
                s += static_cast<char>('a' + v % 26);
                v /= 26;
            } while (v > 0);
            return s;
        };
        for (int b = 0; b < blocks; ++b) {
            std::string real = "real" + alpha(trial % 97) + "x" + alpha(b);
            real_names.insert(real);
            tex << "\\newcommand{\\" << real << "}{body" << b << "}\n";
            switch (rng() % 4) {
                case 0: {
                    const char* env = envs[rng() % 3];
                    tex << "\\begin{" << env << "}\n\\newcommand{\\decoy" << alpha(b)
                        << "}{bad}\n\\def\\decoydef" << alpha(b) << "{bad}\n\\end{" << env
                        << "}\n";
                    break;
                }
                case 1:
                    tex << "% \\newcommand{\\decoy" << alpha(b) << "}{bad}\n";
                    break;
                case 2:
                    tex << "text 99\\% \\relax % \\gdef\\decoy" << alpha(b) << "{bad}\n";
                    break;
                default:
                    tex << "plain text line " << b << "\n";
            }
        }
        auto defs = extract_definitions(strip_noncode(tex.str()));
        std::set<std::string> got;
        for (const auto& d : defs) got.insert(d.name);
        for (const auto& name : got)
            require(name.rfind("decoy", 0) != 0, "decoy leaked: " + name);
        for (const auto& name : real_names)
            require(got.count(name) == 1, "real definition lost: " + name);
    }
}

// 6. Regression recovery on 50k rows over the full model term set.
void criterion_regression_recovery() {
    std::mt19937_64 rng(424242);
    std::vector<ObservationRow> rows;
    rows.reserve(50000);
    for (int i = 0; i < 50000; ++i) {
        ObservationRow r;
        r.paper_id = "p" + std::to_string(i);
        r.author_id = "a" + std::to_string(i);
        r.career_age = static_cast<int>(rng() % 12);
        r.career_age_sq = r.career_age * r.career_age;
        r.outcome_primary = static_cast<int>(rng() % 2);  // covariate for this model
        r.is_last_author = static_cast<int>(rng() % 2);
        r.is_male = static_cast<int>(rng() % 2);
        r.log_citations = 0.05 * static_cast<double>(rng() % 60);
        r.pub_year = 1991 + static_cast<int>(rng() % 31);
        r.team_size = 2 + static_cast<int>(rng() % 6);
        // d00 deliberately most frequent -> deterministic reference category
        int disc = static_cast<int>(rng() % 20);
        r.discipline = disc < 5 ? "d00" : "d" + std::string(disc - 4 < 10 ? "0" : "") +
                                              std::to_string(disc - 4);
        rows.push_back(std::move(r));
    }

    ModelSpec spec;
    spec.outcome = Outcome::Recognition;
    DesignMatrix design = build_design(spec, rows);

    // full model structure: intercept + 5 author terms + 3 paper terms +
    // 15 discipline dummies + 5 interactions
    require(design.terms.size() == 29,
            "term count " + std::to_string(design.terms.size()) + " != 29");
    int author_terms = 0, dummies = 0, interactions = 0;
    for (const auto& t : design.terms) {
        if (t == "career_age" || t == "career_age_sq" || t == "is_primary_contributor" ||
            t == "is_last_author" || t == "is_male")
            ++author_terms;
        if (t.rfind("disc_", 0) == 0) ++dummies;
        if (t.rfind("team_size_x_", 0) == 0) ++interactions;
    }
    require(author_terms == 5, "expected 5 author terms");
    require(dummies == 15, "expected 15 discipline dummies");
    require(interactions == 5, "expected 5 interaction terms");

    std::map<std::string, double> beta_named = {
        {"career_age", 0.06},    {"career_age_sq", -0.003},
        {"is_primary_contributor", 0.8}, {"is_last_author", 0.5},
        {"is_male", 0.12},       {"log_citations", 0.3},
        {"pub_year", 0.004},     {"team_size", -0.2},
        {"team_size_x_career_age", 0.012}, {"team_size_x_career_age_sq", -0.0006},
        {"team_size_x_is_primary_contributor", -0.05},
        {"team_size_x_is_last_author", 0.07}, {"team_size_x_is_male", -0.03}};
    std::vector<double> beta_true(design.terms.size(), 0.0);
    for (std::size_t j = 1; j < design.terms.size(); ++j) {
        const std::string& t = design.terms[j];
        if (auto it = beta_named.find(t); it != beta_named.end()) beta_true[j] = it->second;
        else if (t.rfind("disc_", 0) == 0) beta_true[j] = (j % 2 == 0) ? 0.2 : -0.2;
    }
    // center the linear predictor so classes are balanced
    const std::size_t n = design.outcome.size();
    std::vector<double> eta(n, 0.0);
    for (std::size_t j = 1; j < design.terms.size(); ++j)
        for (std::size_t i = 0; i < n; ++i) eta[i] += beta_true[j] * design.columns[j][i];
    double mean_eta = 0;
    for (double e : eta) mean_eta += e;
    mean_eta /= static_cast<double>(n);
    beta_true[0] = -mean_eta;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        double p = 1.0 / (1.0 + std::exp(-(eta[i] - mean_eta)));
        design.outcome[i] = unif(rng) < p ? 1.0 : 0.0;
    }

    FitResult fit = fit_logistic_design(spec, design);
    require(fit.converged, "fit did not converge");
    for (std::size_t j = 0; j < design.terms.size(); ++j) {
        const Coefficient& c = fit.coefficients[j];
        require(c.se > 0, "zero SE on " + c.term);
        if (std::abs(c.beta - beta_true[j]) >= 3.0 * c.se)
            throw Failure("coefficient " + c.term + " off by " +
                          std::to_string(std::abs(c.beta - beta_true[j]) / c.se) + " SE");
    }

    // analytic gradient vs central finite differences, relative to the
    // gradient magnitude at a generic (non-stationary) point
    auto grad = log_likelihood_gradient(design, beta_true);
    double gnorm = 0;
    for (double g : grad) gnorm = std::max(gnorm, std::abs(g));
    require(gnorm > 1.0, "degenerate gradient check point");
    for (std::size_t j = 0; j < beta_true.size(); ++j) {
        double col_max = 1.0;
        for (double v : design.columns[j]) col_max = std::max(col_max, std::abs(v));
        const double h = 1e-5 / col_max;  // uniform perturbation of the linear predictor
        auto hi = beta_true, lo = beta_true;
        hi[j] += h;
        lo[j] -= h;
        double fd = (log_likelihood(design, hi) - log_likelihood(design, lo)) / (2 * h);
        require(std::abs(grad[j] - fd) / gnorm < 1e-6,
                "gradient mismatch on " + design.terms[j]);
    }
}

// 7. Qualitative sign test on planted data: career age +, team size -, last
// author + (sign test only).
void criterion_planted_signs() {
    SynthConfig cfg;
    cfg.n_papers = 4000;
    cfg.n_authors = 1000;
    cfg.n_disciplines = 8;
    cfg.author_order = AuthorOrder::JuniorFirst;      // seniors last on the byline
    cfg.coauthor_prior_cite_prob = 0.6;               // credit skews to seniors
    cfg.mean_references = 8.0;
    SynthResult synth = synthesize_corpus(cfg, 42);
    const Corpus& corpus = synth.corpus;

    auto occurrences = synth_macro_occurrences(synth);
    MacroFilter filter;
    filter.fit_frequency(occurrences, 0.05);
    auto profiles = build_profiles(corpus, occurrences);
    std::vector<ContributionVector> contributions;
    for (const auto& [id, p] : corpus.papers) {
        auto it = synth.paper_macros.find(id);
        if (it == synth.paper_macros.end()) continue;
        contributions.push_back(attribute_contributions(p, it->second, profiles, &filter));
    }
    CitationGraph graph = build_graph(corpus);
    std::vector<CreditVector> credits;
    for (const auto& [id, p] : corpus.papers)
        if (corpus.citation_count(id) > 0) credits.push_back(allocate_credit(graph, id));

    GenderTable genders =
        GenderTable::from_csv(fs::path(CREDITLENS_DATA_DIR) / "gender_names.csv");
    auto built = build_observations(corpus, contributions, credits, genders);
    require(built.rows.size() > 3000, "too few observations: " +
                                          std::to_string(built.rows.size()));

    ModelSpec spec;
    spec.outcome = Outcome::Recognition;
    FitResult fit = fit_logistic(spec, built.rows);
    require(fit.converged, "fit did not converge");
    auto beta = [&](const std::string& term) {
        for (const auto& c : fit.coefficients)
            if (c.term == term) return c.beta;
        throw Failure("missing term " + term);
    };
    require(beta("career_age") > 0, "career age effect not positive");
    require(beta("team_size") < 0, "team size effect not negative");
    require(beta("is_last_author") > 0, "last-author effect not positive");
}

// 8. End-to-end determinism of the full demo pipeline.
void criterion_determinism(double* single_thread_seconds) {
    fs::path corpus_dir = fresh_dir("demo_corpus");
    synth_demo(42, corpus_dir);

    auto config_for = [&](const fs::path& out, int workers) {
        PipelineConfig cfg;
        cfg.corpus_file = corpus_dir / "papers.jsonl";
        cfg.prizes_file = corpus_dir / "prizes.jsonl";
        cfg.src_root = corpus_dir;
        cfg.out_dir = out;
        cfg.gender_table_file = fs::path(CREDITLENS_DATA_DIR) / "gender_names.csv";
        cfg.blocklist_file = fs::path(CREDITLENS_DATA_DIR) / "macro_blocklist.txt";
        cfg.workers = workers;
        return cfg;
    };

    fs::path out1 = fresh_dir("demo_out1");
    auto t0 = std::chrono::steady_clock::now();
    run_pipeline(config_for(out1, 1));
    *single_thread_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    auto h1 = output_hashes(out1);

    // rerun in place: everything cached, bytes untouched
    PipelineResult rerun = run_pipeline(config_for(out1, 1));
    for (const auto& s : rerun.stages)
        require(s.skipped, "stage " + s.name + " reran without input changes");
    require(output_hashes(out1) == h1, "rerun changed output bytes");

    // fresh directory, same inputs: byte-identical
    fs::path out2 = fresh_dir("demo_out2");
    run_pipeline(config_for(out2, 1));
    require(output_hashes(out2) == h1, "fresh rerun differs");

    // different worker count: byte-identical including the manifest
    fs::path out4 = fresh_dir("demo_out4");
    run_pipeline(config_for(out4, 4));
    require(output_hashes(out4) == h1, "worker count changed output bytes");

    require(*single_thread_seconds < 60.0, "single-threaded run exceeded 60 s");
}

struct Criterion {
    std::string label;
    double limit_seconds;
    std::function<void(double*)> body;
};

}  // namespace

int main() {
    double pipeline_seconds = 0.0;
    std::vector<Criterion> criteria = {
        {"1. two-author contribution shares are exactly 1/6 and 5/6", 1.0,
         [](double*) { criterion_contribution_shares(); }},
        {"2. recognition-gap fractions 0.2667 and 0.7556", 1.0,
         [](double*) { criterion_nobel_gap(); }},
        {"3. credit allocation matches the brute-force oracle on 500 graphs", 10.0,
         [](double*) { criterion_credit_oracle(); }},
        {"4. credit invariants hold on 1000 random instances", 30.0,
         [](double*) { criterion_credit_invariants(); }},
        {"5. 30-file parser fixtures exact; 10k verbatim-decoy fuzz leak-free", 60.0,
         [](double*) { criterion_parser(); }},
        {"6. 50k-row regression recovery within 3 SE, gradient to 1e-6", 60.0,
         [](double*) { criterion_regression_recovery(); }},
        {"7. planted corpus gives signs: career age +, team size -, last author +", 120.0,
         [](double*) { criterion_planted_signs(); }},
        {"8. demo pipeline byte-identical across reruns and worker counts", 60.0,
         [&](double* s) { criterion_determinism(s); }},
    };

    int failures = 0;
    for (auto& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        std::string error;
        try {
            c.body(&pipeline_seconds);
        } catch (const std::exception& e) {
            error = e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (error.empty() && secs > c.limit_seconds)
            error = "exceeded time limit of " + std::to_string(c.limit_seconds) + " s";
        if (error.empty()) {
            std::printf("[PASS] %s (%.2fs)\n", c.label.c_str(), secs);
        } else {
            std::printf("[FAIL] %s (%.2fs): %s\n", c.label.c_str(), secs, error.c_str());
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}
