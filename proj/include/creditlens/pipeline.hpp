#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "creditlens/synth.hpp"

namespace creditlens {

struct PipelineConfig {
    std::filesystem::path corpus_file;
    std::optional<std::filesystem::path> prizes_file;
    std::filesystem::path src_root;  // source_path entries resolve against this
    std::filesystem::path out_dir;
    std::optional<std::filesystem::path> blocklist_file;
    std::optional<std::filesystem::path> gender_table_file;
    bool require_use = false;         // count a macro only when used in the body
    double max_doc_fraction = 0.05;   // corpus-frequency cutoff
    int min_citations = 1;
    bool weighted_correlation = false;
    int workers = 1;                  // no effect on outputs
    std::uint64_t seed = 42;

    void validate() const;  // all referenced paths checked before any stage runs
};

struct StageReport {
    std::string name;
    bool skipped = false;
    long rows = 0;
};

struct PipelineResult {
    std::vector<StageReport> stages;
};

// extract-macros -> attribute -> credit -> analyze -> fit, with
// content-hash memoization per stage recorded in out_dir/manifest.json.
PipelineResult run_pipeline(const PipelineConfig& config);

// Wraps synthesize_corpus with the documented demo configuration and writes
// the corpus files (papers/prizes/macros + LaTeX sources) under out_dir.
void synth_demo(std::uint64_t seed, const std::filesystem::path& out_dir);

std::string hash_file(const std::filesystem::path& path);

// Extraction over all papers with sources, parallel over `workers` threads;
// output keyed and sorted by paper_id, independent of scheduling.
std::vector<MacroOccurrence> extract_all_macros(const Corpus& corpus,
                                                const std::filesystem::path& src_root,
                                                bool require_use, int workers);

}  // namespace creditlens
