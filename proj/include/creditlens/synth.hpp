#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "creditlens/corpus.hpp"
#include "creditlens/texmacro.hpp"

namespace creditlens {

enum class AuthorOrder {
    Random,       // byline order unrelated to seniority
    JuniorFirst,  // oldest (earliest-debut) author last
};

struct SynthConfig {
    int n_authors = 400;
    int n_papers = 1000;
    int year_min = 1991;
    int year_max = 2021;
    int n_disciplines = 16;
    // team-size distribution: size -> weight (normalized internally)
    std::map<int, double> team_size_weights = {{1, 1}, {2, 2}, {3, 3}, {4, 2},
                                               {5, 1}, {6, 0.5}, {7, 0.25}};
    int vocab_min = 20;   // per-author macro vocabulary
    int vocab_max = 200;
    int macros_per_author_per_paper = 6;  // drawn from the author's vocabulary
    double mean_references = 8.0;         // references to earlier papers
    // after citing paper f, probability of also citing a prior paper of one
    // of f's authors, weighted toward senior authors; drives co-citation
    // credit toward seniors
    double coauthor_prior_cite_prob = 0.0;
    AuthorOrder author_order = AuthorOrder::Random;
    bool generate_prizes = false;  // one-laureate prizes on a paper sample
};

struct SynthResult {
    Corpus corpus;
    // per paper, the macro fingerprints defined in its (virtual) source
    std::map<std::string, std::vector<MacroFingerprint>> paper_macros;
};

// Pure function of (config, seed): the RNG stream and all sampling helpers
// are hand-rolled so output is byte-identical across platforms and runs.
SynthResult synthesize_corpus(const SynthConfig& config, std::uint64_t seed);

std::vector<MacroOccurrence> synth_macro_occurrences(const SynthResult& synth);

// Writes papers.jsonl, prizes.jsonl (when generated), macros.jsonl and a
// LaTeX source tree under out_dir/sources/<paper_id>/main.tex so the parser
// stage can run end to end. Sets each paper's source_path.
void write_synth_corpus(SynthResult& synth, const std::filesystem::path& out_dir);

// The documented demo configuration: 1,000 papers, 400 authors, 16
// disciplines, team sizes 1-7, vocabularies 20-200, seniority-last bylines
// and senior-favoring citations.
SynthConfig demo_config();

}  // namespace creditlens
