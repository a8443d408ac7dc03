#pragma once

#include <compare>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "creditlens/corpus.hpp"

namespace creditlens {

// Canonical macro identity: (name, arity, normalized-body hash). Common
// names like \R collide across unrelated authors; the body is the
// author-specific fingerprint.
struct MacroFingerprint {
    std::string name;  // control-sequence name without leading backslash
    int arity = 0;
    std::string body_hash;     // fnv1a64 hex of whitespace-normalized body
    std::string body_preview;  // first 80 chars of normalized body

    auto operator<=>(const MacroFingerprint& o) const {
        if (auto c = name <=> o.name; c != 0) return c;
        if (auto c = arity <=> o.arity; c != 0) return c;
        return body_hash <=> o.body_hash;
    }
    bool operator==(const MacroFingerprint& o) const {
        return name == o.name && arity == o.arity && body_hash == o.body_hash;
    }
};

// Normalizes the raw body (whitespace runs -> one space, trimmed) and hashes it.
MacroFingerprint make_fingerprint(std::string name, int arity, std::string_view raw_body);

struct MacroOccurrence {
    MacroFingerprint fingerprint;
    std::string paper_id;
    bool defined = true;
    int use_count = 0;  // body occurrences of \name outside its own definition

    bool operator==(const MacroOccurrence&) const = default;
};

struct SourceFile {
    std::string path;  // relative to the source root
    std::string content;
};

struct ResolvedSources {
    std::vector<SourceFile> files;  // main file first, then \input/\include order
    std::vector<std::string> warnings;
};

// Detects the main file (contains \documentclass or \begin{document};
// tie-break lexicographically first), expands \input/\include recursively,
// visits each file at most once.
ResolvedSources resolve_sources(const std::filesystem::path& source_root);

// Removes % comments (not \%) and blanks verbatim/lstlisting/comment
// environment bodies. Preserves line count. Idempotent.
std::string strip_noncode(std::string_view tex);

struct ScannedDefinition {
    MacroFingerprint fingerprint;
    std::size_t begin = 0;  // span of the defining statement in the input
    std::size_t end = 0;
};

// Recognizes \newcommand / \renewcommand / \providecommand (starred or not,
// optional-arg-count form), \def / \gdef / \edef / \xdef with #1..#9
// parameter texts, \DeclareMathOperator, \DeclareRobustCommand and
// \let\a\b. Unbalanced definitions are skipped with a warning, never fatal.
// Input must already be noncode-stripped.
std::vector<ScannedDefinition> scan_definitions(std::string_view tex,
                                                std::vector<std::string>* warnings = nullptr);

std::vector<MacroFingerprint> extract_definitions(std::string_view tex);

// use_count = occurrences of \name at control-word boundaries ("\R" does not
// match "\Re"), excluding defining statements.
std::vector<MacroOccurrence> count_usages(std::string_view tex,
                                          const std::vector<MacroFingerprint>& defs);

struct PaperMacros {
    std::string paper_id;
    std::vector<MacroOccurrence> occurrences;  // deduplicated, sorted by fingerprint
    bool no_source = false;
    std::vector<std::string> warnings;
};

// Full pipeline for one paper: resolve -> strip -> extract -> count, with
// per-paper fingerprint dedup (identical redefinitions count once).
PaperMacros extract_paper_macros(const PaperRecord& paper);

void write_macros_jsonl(const std::vector<MacroOccurrence>& occurrences,
                        const std::filesystem::path& out);
std::vector<MacroOccurrence> read_macros_jsonl(const std::filesystem::path& in);

}  // namespace creditlens
