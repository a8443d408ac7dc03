#include "creditlens/texmacro.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "creditlens/errors.hpp"
#include "creditlens/hash.hpp"

namespace creditlens {

namespace {

bool is_letter(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::string normalize_body(std::string_view raw) {
    std::string out;
    bool in_run = false;
    for (char c : raw) {
        if (is_space(c)) {
            in_run = true;
            continue;
        }
        if (in_run && !out.empty()) out += ' ';
        in_run = false;
        out += c;
    }
    return out;
}

// Reads a control sequence starting at `pos` (which must point at '\').
// Returns the name without the backslash, advances `pos` past it.
std::optional<std::string> read_control_sequence(std::string_view tex, std::size_t& pos) {
    if (pos >= tex.size() || tex[pos] != '\\') return std::nullopt;
    ++pos;
    if (pos >= tex.size()) return std::nullopt;
    if (is_letter(tex[pos])) {
        std::size_t start = pos;
        while (pos < tex.size() && is_letter(tex[pos])) ++pos;
        return std::string(tex.substr(start, pos - start));
    }
    return std::string(1, tex[pos++]);  // control symbol
}

void skip_spaces(std::string_view tex, std::size_t& pos) {
    while (pos < tex.size() && is_space(tex[pos])) ++pos;
}

// Reads a {...} group respecting \-escaped braces; returns the content,
// advances pos past the closing brace.
std::optional<std::string> read_group(std::string_view tex, std::size_t& pos) {
    if (pos >= tex.size() || tex[pos] != '{') return std::nullopt;
    std::size_t start = ++pos;
    int depth = 1;
    while (pos < tex.size()) {
        char c = tex[pos];
        if (c == '\\' && pos + 1 < tex.size()) {
            pos += 2;
            continue;
        }
        if (c == '{') ++depth;
        else if (c == '}') {
            --depth;
            if (depth == 0) {
                std::string content(tex.substr(start, pos - start));
                ++pos;
                return content;
            }
        }
        ++pos;
    }
    return std::nullopt;  // unbalanced
}

// Reads an optional [..] argument; returns content or nullopt.
std::optional<std::string> read_optional_arg(std::string_view tex, std::size_t& pos) {
    std::size_t p = pos;
    skip_spaces(tex, p);
    if (p >= tex.size() || tex[p] != '[') return std::nullopt;
    std::size_t start = ++p;
    int depth = 0;
    while (p < tex.size()) {
        char c = tex[p];
        if (c == '\\' && p + 1 < tex.size()) {
            p += 2;
            continue;
        }
        if (c == '{') ++depth;
        else if (c == '}') --depth;
        else if (c == ']' && depth == 0) {
            std::string content(tex.substr(start, p - start));
            pos = p + 1;
            return content;
        }
        ++p;
    }
    return std::nullopt;
}

// The macro being defined: either {\name} or \name.
std::optional<std::string> read_defined_name(std::string_view tex, std::size_t& pos) {
    skip_spaces(tex, pos);
    if (pos < tex.size() && tex[pos] == '{') {
        std::size_t p = pos + 1;
        skip_spaces(tex, p);
        auto name = read_control_sequence(tex, p);
        if (!name) return std::nullopt;
        skip_spaces(tex, p);
        if (p >= tex.size() || tex[p] != '}') return std::nullopt;
        pos = p + 1;
        return name;
    }
    return read_control_sequence(tex, pos);
}

const std::set<std::string, std::less<>> kNewcommandLike = {
    "newcommand", "renewcommand", "providecommand", "DeclareRobustCommand"};
const std::set<std::string, std::less<>> kDefLike = {"def", "gdef", "edef", "xdef"};
const std::set<std::string, std::less<>> kBlankedEnvs = {"verbatim", "verbatim*", "lstlisting",
                                                         "comment", "minted"};

}  // namespace

MacroFingerprint make_fingerprint(std::string name, int arity, std::string_view raw_body) {
    MacroFingerprint fp;
    fp.name = std::move(name);
    fp.arity = arity;
    std::string norm = normalize_body(raw_body);
    fp.body_hash = fnv1a64_hex(norm);
    fp.body_preview = norm.substr(0, 80);
    return fp;
}

std::string strip_noncode(std::string_view tex) {
    std::string out;
    out.reserve(tex.size());
    std::size_t i = 0;
    while (i < tex.size()) {
        char c = tex[i];
        if (c == '\\') {
            // check for \begin{<blanked env>}
            std::size_t p = i;
            auto cs = read_control_sequence(tex, p);
            if (cs && *cs == "begin") {
                std::size_t q = p;
                auto env = read_group(tex, q);
                if (env && kBlankedEnvs.count(normalize_body(*env))) {
                    std::string closer = "\\end{" + normalize_body(*env) + "}";
                    std::size_t close = tex.find(closer, q);
                    std::size_t stop = close == std::string_view::npos
                                           ? tex.size()
                                           : close + closer.size();
                    for (std::size_t k = i; k < stop; ++k)
                        if (tex[k] == '\n') out += '\n';
                    i = stop;
                    continue;
                }
            }
            // copy the escape and the escaped char (keeps \% intact)
            out += c;
            if (i + 1 < tex.size()) out += tex[i + 1];
            i += 2;
            continue;
        }
        if (c == '%') {
            while (i < tex.size() && tex[i] != '\n') ++i;
            continue;  // newline handled by the main loop
        }
        out += c;
        ++i;
    }
    return out;
}

std::vector<ScannedDefinition> scan_definitions(std::string_view tex,
                                                std::vector<std::string>* warnings) {
    std::vector<ScannedDefinition> defs;
    auto warn = [&](std::size_t at, const std::string& msg) {
        if (warnings)
            warnings->push_back("offset " + std::to_string(at) + ": " + msg);
    };
    std::size_t i = 0;
    while (i < tex.size()) {
        if (tex[i] != '\\') {
            ++i;
            continue;
        }
        std::size_t start = i;
        std::size_t pos = i;
        auto cs = read_control_sequence(tex, pos);
        if (!cs) {
            ++i;
            continue;
        }
        if (kNewcommandLike.count(*cs) || *cs == "DeclareMathOperator") {
            bool is_mathop = (*cs == "DeclareMathOperator");
            if (pos < tex.size() && tex[pos] == '*') ++pos;
            auto name = read_defined_name(tex, pos);
            if (!name) {
                warn(start, *cs + ": cannot read macro name, skipped");
                i = pos > start ? pos : start + 1;
                continue;
            }
            int arity = 0;
            if (!is_mathop) {
                if (auto k = read_optional_arg(tex, pos)) {
                    try {
                        arity = std::stoi(*k);
                    } catch (...) {
                        arity = 0;
                    }
                    read_optional_arg(tex, pos);  // default value for #1, if any
                }
            }
            skip_spaces(tex, pos);
            std::string body;
            if (pos < tex.size() && tex[pos] == '{') {
                auto b = read_group(tex, pos);
                if (!b) {
                    warn(start, *cs + " \\" + *name + ": unbalanced braces, skipped");
                    i = start + 1 + cs->size();
                    continue;
                }
                body = std::move(*b);
            } else if (pos < tex.size() && tex[pos] == '\\') {
                auto b = read_control_sequence(tex, pos);
                if (!b) {
                    ++i;
                    continue;
                }
                body = "\\" + *b;
            } else {
                warn(start, *cs + " \\" + *name + ": missing body, skipped");
                i = pos > start ? pos : start + 1;
                continue;
            }
            defs.push_back({make_fingerprint(*name, arity, body), start, pos});
            i = pos;
        } else if (kDefLike.count(*cs)) {
            auto name = read_control_sequence(tex, pos);
            if (!name) {
                warn(start, *cs + ": cannot read macro name, skipped");
                i = pos > start ? pos : start + 1;
                continue;
            }
            // parameter text runs up to the body's opening brace
            int arity = 0;
            bool ok = true;
            while (pos < tex.size() && tex[pos] != '{') {
                if (tex[pos] == '#' && pos + 1 < tex.size() && std::isdigit((unsigned char)tex[pos + 1]))
                    arity = std::max(arity, tex[pos + 1] - '0');
                if (tex[pos] == '\n' && pos + 1 < tex.size() && tex[pos + 1] == '\n') {
                    ok = false;  // blank line: not a definition we understand
                    break;
                }
                ++pos;
            }
            if (!ok || pos >= tex.size()) {
                warn(start, "\\" + *cs + "\\" + *name + ": no body found, skipped");
                i = start + 1 + cs->size();
                continue;
            }
            auto body = read_group(tex, pos);
            if (!body) {
                warn(start, "\\" + *cs + "\\" + *name + ": unbalanced braces, skipped");
                i = start + 1 + cs->size();
                continue;
            }
            defs.push_back({make_fingerprint(*name, arity, *body), start, pos});
            i = pos;
        } else if (*cs == "let") {
            skip_spaces(tex, pos);
            auto name = read_control_sequence(tex, pos);
            if (!name) {
                i = pos > start ? pos : start + 1;
                continue;
            }
            skip_spaces(tex, pos);
            if (pos < tex.size() && tex[pos] == '=') ++pos;
            skip_spaces(tex, pos);
            std::string body;
            if (pos < tex.size() && tex[pos] == '\\') {
                auto target = read_control_sequence(tex, pos);
                if (!target) {
                    ++i;
                    continue;
                }
                body = "\\" + *target;
            } else if (pos < tex.size()) {
                body = std::string(1, tex[pos++]);
            } else {
                warn(start, "\\let\\" + *name + ": missing target, skipped");
                break;
            }
            defs.push_back({make_fingerprint(*name, 0, body), start, pos});
            i = pos;
        } else {
            i = pos;
        }
    }
    return defs;
}

std::vector<MacroFingerprint> extract_definitions(std::string_view tex) {
    std::vector<MacroFingerprint> out;
    for (auto& d : scan_definitions(tex)) out.push_back(std::move(d.fingerprint));
    return out;
}

namespace {

int count_name_usages(std::string_view tex, const std::string& name,
                      const std::vector<ScannedDefinition>& spans) {
    const std::string needle = "\\" + name;
    const bool word = is_letter(name.back());
    int count = 0;
    std::size_t pos = 0;
    while ((pos = tex.find(needle, pos)) != std::string_view::npos) {
        std::size_t after = pos + needle.size();
        bool boundary = !word || after >= tex.size() || !is_letter(tex[after]);
        bool escaped = pos > 0 && tex[pos - 1] == '\\';
        bool in_def = std::any_of(spans.begin(), spans.end(), [&](const ScannedDefinition& d) {
            return pos >= d.begin && pos < d.end;
        });
        if (boundary && !escaped && !in_def) ++count;
        ++pos;
    }
    return count;
}

}  // namespace

std::vector<MacroOccurrence> count_usages(std::string_view tex,
                                          const std::vector<MacroFingerprint>& defs) {
    auto spans = scan_definitions(tex);
    std::map<std::string, int> by_name;
    std::vector<MacroOccurrence> out;
    for (const auto& fp : defs) {
        auto it = by_name.find(fp.name);
        if (it == by_name.end())
            it = by_name.emplace(fp.name, count_name_usages(tex, fp.name, spans)).first;
        MacroOccurrence occ;
        occ.fingerprint = fp;
        occ.use_count = it->second;
        out.push_back(std::move(occ));
    }
    return out;
}

ResolvedSources resolve_sources(const std::filesystem::path& source_root) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(source_root))
        throw DataError("source root is not a directory: " + source_root.string());
    std::vector<std::string> tex_files;
    for (const auto& e : fs::recursive_directory_iterator(source_root)) {
        if (e.is_regular_file() && e.path().extension() == ".tex")
            tex_files.push_back(fs::relative(e.path(), source_root).generic_string());
    }
    std::sort(tex_files.begin(), tex_files.end());

    ResolvedSources result;
    auto read_file = [&](const std::string& rel) -> std::optional<std::string> {
        std::ifstream is(source_root / rel, std::ios::binary);
        if (!is) return std::nullopt;
        std::ostringstream ss;
        ss << is.rdbuf();
        return ss.str();
    };

    std::string main_file;
    for (const auto& rel : tex_files) {
        auto content = read_file(rel);
        if (!content) continue;
        if (content->find("\\documentclass") != std::string::npos ||
            content->find("\\begin{document}") != std::string::npos) {
            main_file = rel;
            break;  // tex_files sorted: lexicographically first wins
        }
    }
    if (main_file.empty())
        throw DataError("no main file (\\documentclass / \\begin{document}) under " +
                        source_root.string());

    std::set<std::string> visited;
    // depth-first: a file's own content, then its \input/\include targets in
    // directive order
    auto visit = [&](auto&& self, const std::string& rel) -> void {
        if (!visited.insert(rel).second) return;  // cycle guard
        auto content = read_file(rel);
        if (!content) {
            result.warnings.push_back("unreadable file skipped: " + rel);
            return;
        }
        result.files.push_back({rel, *content});
        std::string stripped = strip_noncode(*content);
        std::size_t i = 0;
        std::vector<std::string> children;
        while (i < stripped.size()) {
            if (stripped[i] != '\\') {
                ++i;
                continue;
            }
            std::size_t pos = i;
            auto cs = read_control_sequence(stripped, pos);
            if (!cs || (*cs != "input" && *cs != "include")) {
                i = pos > i ? pos : i + 1;
                continue;
            }
            skip_spaces(stripped, pos);
            std::string target;
            if (pos < stripped.size() && stripped[pos] == '{') {
                auto g = read_group(stripped, pos);
                if (g) target = normalize_body(*g);
            } else {
                while (pos < stripped.size() && !is_space(stripped[pos]) &&
                       stripped[pos] != '\\' && stripped[pos] != '{' && stripped[pos] != '%')
                    target += stripped[pos++];
            }
            i = pos;
            if (target.empty()) continue;
            std::string rel_target = target;
            if (!fs::exists(source_root / rel_target)) rel_target += ".tex";
            if (!fs::exists(source_root / rel_target)) {
                result.warnings.push_back("missing \\input target skipped: " + target);
                continue;
            }
            children.push_back(fs::relative(source_root / rel_target, source_root).generic_string());
        }
        for (const auto& child : children) self(self, child);
    };
    visit(visit, main_file);
    return result;
}

PaperMacros extract_paper_macros(const PaperRecord& paper) {
    PaperMacros out;
    out.paper_id = paper.paper_id;
    if (!paper.source_path) {
        out.no_source = true;
        return out;
    }
    ResolvedSources sources;
    try {
        sources = resolve_sources(*paper.source_path);
    } catch (const DataError& e) {
        out.no_source = true;
        out.warnings.push_back(e.what());
        return out;
    }
    out.warnings = sources.warnings;
    std::string full;
    for (const auto& f : sources.files) {
        full += strip_noncode(f.content);
        full += '\n';
    }
    auto defs = extract_definitions(full);
    auto occurrences = count_usages(full, defs);
    // per-paper dedup: identical fingerprints merge; differing bodies under
    // the same name stay distinct
    std::map<MacroFingerprint, MacroOccurrence> dedup;
    for (auto& occ : occurrences) {
        occ.paper_id = paper.paper_id;
        dedup.try_emplace(occ.fingerprint, std::move(occ));
    }
    for (auto& [fp, occ] : dedup) out.occurrences.push_back(std::move(occ));
    return out;
}

void write_macros_jsonl(const std::vector<MacroOccurrence>& occurrences,
                        const std::filesystem::path& out) {
    std::ofstream os(out, std::ios::binary);
    if (!os) throw DataError("cannot open for writing: " + out.string());
    for (const auto& occ : occurrences) {
        nlohmann::ordered_json j;
        j["paper_id"] = occ.paper_id;
        j["name"] = occ.fingerprint.name;
        j["arity"] = occ.fingerprint.arity;
        j["body_hash"] = occ.fingerprint.body_hash;
        j["body_preview"] = occ.fingerprint.body_preview;
        j["use_count"] = occ.use_count;
        os << j.dump() << '\n';
    }
    if (!os) throw DataError("write failed: " + out.string());
}

std::vector<MacroOccurrence> read_macros_jsonl(const std::filesystem::path& in) {
    std::ifstream is(in, std::ios::binary);
    if (!is) throw DataError("cannot open: " + in.string());
    std::vector<MacroOccurrence> out;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            auto j = nlohmann::ordered_json::parse(line);
            MacroOccurrence occ;
            occ.paper_id = j.at("paper_id").get<std::string>();
            occ.fingerprint.name = j.at("name").get<std::string>();
            occ.fingerprint.arity = j.at("arity").get<int>();
            occ.fingerprint.body_hash = j.at("body_hash").get<std::string>();
            occ.fingerprint.body_preview = j.value("body_preview", std::string{});
            occ.use_count = j.at("use_count").get<int>();
            out.push_back(std::move(occ));
        } catch (const nlohmann::json::exception& e) {
            throw DataError(in.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace creditlens
