#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "creditlens/analytics.hpp"
#include "creditlens/attribution.hpp"
#include "creditlens/credit.hpp"
#include "creditlens/errors.hpp"
#include "creditlens/pipeline.hpp"
#include "creditlens/regression.hpp"
#include "creditlens/synth.hpp"
#include "creditlens/texmacro.hpp"

namespace fs = std::filesystem;
using namespace creditlens;

namespace {

// key=value file, '#' comments
std::map<std::string, std::string> parse_config_file(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open config: " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            auto a = s.find_first_not_of(" \t\r");
            auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = value;
    }
    return kv;
}

void apply_config_file(PipelineConfig& cfg, const fs::path& path) {
    for (const auto& [k, v] : parse_config_file(path)) {
        if (k == "corpus") cfg.corpus_file = v;
        else if (k == "prizes") cfg.prizes_file = v;
        else if (k == "src_root") cfg.src_root = v;
        else if (k == "out_dir") cfg.out_dir = v;
        else if (k == "blocklist") cfg.blocklist_file = v;
        else if (k == "gender_table") cfg.gender_table_file = v;
        else if (k == "require_use") cfg.require_use = (v == "1" || v == "true");
        else if (k == "max_doc_fraction") cfg.max_doc_fraction = std::stod(v);
        else if (k == "min_citations") cfg.min_citations = std::stoi(v);
        else if (k == "weighted_correlation") cfg.weighted_correlation = (v == "1" || v == "true");
        else if (k == "workers") cfg.workers = std::stoi(v);
        else if (k == "seed") cfg.seed = std::stoull(v);
        else throw UsageError("unknown config key: " + k);
    }
}

std::vector<ContributionVector> load_contributions(const fs::path& path) {
    return contributions_from_table(read_table(path, TableFormat::Csv));
}

std::vector<CreditVector> load_credit(const fs::path& path) {
    return credit_from_table(read_table(path, TableFormat::Csv));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"creditlens: contribution attribution, credit allocation and recognition models"};
    app.require_subcommand(1);

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    fs::path synth_out = "demo";
    std::uint64_t synth_seed = 42;
    int synth_papers = 1000, synth_authors = 400, synth_disciplines = 16;
    bool synth_demo_flag = false;
    synth->add_option("--out-dir", synth_out, "output directory");
    synth->add_option("--seed", synth_seed, "RNG seed");
    synth->add_option("--papers", synth_papers, "paper count");
    synth->add_option("--authors", synth_authors, "author pool size");
    synth->add_option("--disciplines", synth_disciplines, "discipline label count");
    synth->add_flag("--demo", synth_demo_flag, "use the documented demo configuration");

    // ---- extract-macros ----
    auto* extract = app.add_subcommand("extract-macros", "parse LaTeX sources into macros.jsonl");
    fs::path ex_corpus, ex_src_root = ".", ex_out = "macros.jsonl";
    bool ex_require_use = false;
    int ex_workers = 1;
    extract->add_option("--corpus", ex_corpus, "papers.jsonl")->required();
    extract->add_option("--src-root", ex_src_root, "root for source_path entries");
    extract->add_option("--out", ex_out, "output macros.jsonl");
    extract->add_flag("--require-use", ex_require_use, "keep only macros used in the body");
    extract->add_option("--workers", ex_workers, "worker threads");

    // ---- attribute ----
    auto* attribute = app.add_subcommand("attribute", "compute contribution shares");
    fs::path at_corpus, at_macros, at_out = "contributions.csv";
    std::optional<fs::path> at_blocklist;
    double at_max_freq = 0.05;
    attribute->add_option("--corpus", at_corpus, "papers.jsonl")->required();
    attribute->add_option("--macros", at_macros, "macros.jsonl")->required();
    attribute->add_option("--out", at_out, "output contributions.csv");
    attribute->add_option("--blocklist", at_blocklist, "macro-name blocklist file");
    attribute->add_option("--max-freq", at_max_freq, "doc-frequency cutoff (fraction)");

    // ---- credit ----
    auto* credit_cmd = app.add_subcommand("credit", "co-citation credit allocation");
    fs::path cr_corpus, cr_out = "credit.csv";
    int cr_min_citations = 1;
    credit_cmd->add_option("--corpus", cr_corpus, "papers.jsonl")->required();
    credit_cmd->add_option("--out", cr_out, "output credit.csv");
    credit_cmd->add_option("--min-citations", cr_min_citations, "citation floor for inclusion");

    // ---- analyze ----
    auto* analyze = app.add_subcommand("analyze", "descriptive statistics");
    analyze->require_subcommand(1);
    auto* nobel = analyze->add_subcommand("nobel-gap", "unrecognized fraction per decade");
    fs::path ng_corpus, ng_prizes, ng_out = "nobel_gap.csv";
    int ng_width = 10;
    nobel->add_option("--corpus", ng_corpus, "papers.jsonl")->required();
    nobel->add_option("--prizes", ng_prizes, "prizes.jsonl")->required();
    nobel->add_option("--out", ng_out, "output CSV");
    nobel->add_option("--decade-width", ng_width, "bin width in years");
    auto* curves = analyze->add_subcommand("rank-curves", "share-vs-rank curves");
    fs::path rc_contrib, rc_credit, rc_out = "rank_curves.csv";
    curves->add_option("--contributions", rc_contrib, "contributions.csv")->required();
    curves->add_option("--credit", rc_credit, "credit.csv")->required();
    curves->add_option("--out", rc_out, "output CSV");
    auto* obs_cmd = analyze->add_subcommand("observations", "build regression observations");
    fs::path ob_corpus, ob_contrib, ob_credit, ob_out = "observations.csv";
    std::optional<fs::path> ob_gender;
    obs_cmd->add_option("--corpus", ob_corpus, "papers.jsonl")->required();
    obs_cmd->add_option("--contributions", ob_contrib, "contributions.csv")->required();
    obs_cmd->add_option("--credit", ob_credit, "credit.csv")->required();
    obs_cmd->add_option("--gender-table", ob_gender, "name,gender CSV");
    obs_cmd->add_option("--out", ob_out, "output CSV");
    auto* corr = analyze->add_subcommand("correlations", "rank vs career-age correlation");
    fs::path co_corpus, co_obs, co_out = "correlations.csv";
    bool co_weighted = false;
    corr->add_option("--corpus", co_corpus, "papers.jsonl")->required();
    corr->add_option("--observations", co_obs, "observations.csv")->required();
    corr->add_option("--out", co_out, "output CSV");
    corr->add_flag("--weighted", co_weighted, "weight the average by group size");

    // ---- fit ----
    auto* fit_cmd = app.add_subcommand("fit", "logistic recognition / primary models");
    std::string fit_model = "recognition";
    fs::path fit_obs, fit_out = "fit.json";
    double fit_ridge = 0.0;
    fit_cmd->add_option("--model", fit_model, "recognition|primary")
        ->check(CLI::IsMember({"recognition", "primary"}));
    fit_cmd->add_option("--observations", fit_obs, "observations.csv")->required();
    fit_cmd->add_option("--out", fit_out, "output fit.json");
    fit_cmd->add_option("--ridge", fit_ridge, "optional ridge penalty");

    // ---- run ----
    auto* run = app.add_subcommand("run", "full pipeline with content-hash memoization");
    PipelineConfig pipeline_cfg;
    std::optional<fs::path> run_config_file;
    run->add_option("--config", run_config_file, "key=value config file");
    run->add_option("--corpus", pipeline_cfg.corpus_file, "papers.jsonl");
    run->add_option("--prizes", pipeline_cfg.prizes_file, "prizes.jsonl");
    run->add_option("--src-root", pipeline_cfg.src_root, "root for source_path entries");
    run->add_option("--out-dir", pipeline_cfg.out_dir, "output directory");
    run->add_option("--blocklist", pipeline_cfg.blocklist_file, "macro-name blocklist file");
    run->add_option("--gender-table", pipeline_cfg.gender_table_file, "name,gender CSV");
    run->add_flag("--require-use", pipeline_cfg.require_use, "macros must be used in the body");
    run->add_option("--max-freq", pipeline_cfg.max_doc_fraction, "doc-frequency cutoff");
    run->add_option("--min-citations", pipeline_cfg.min_citations, "citation floor");
    run->add_option("--workers", pipeline_cfg.workers, "worker threads (no output effect)");
    run->add_option("--seed", pipeline_cfg.seed, "pipeline seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (synth->parsed()) {
            SynthConfig cfg = synth_demo_flag ? demo_config() : SynthConfig{};
            if (!synth_demo_flag) {
                cfg.n_papers = synth_papers;
                cfg.n_authors = synth_authors;
                cfg.n_disciplines = synth_disciplines;
            }
            SynthResult result = synthesize_corpus(cfg, synth_seed);
            fs::create_directories(synth_out);
            write_synth_corpus(result, synth_out);
            std::cout << "wrote " << result.corpus.papers.size() << " papers to " << synth_out
                      << "\n";
        } else if (extract->parsed()) {
            Corpus corpus = load_corpus(ex_corpus);
            auto occurrences = extract_all_macros(corpus, ex_src_root, ex_require_use, ex_workers);
            write_macros_jsonl(occurrences, ex_out);
            std::cout << "wrote " << occurrences.size() << " occurrences to " << ex_out << "\n";
        } else if (attribute->parsed()) {
            Corpus corpus = load_corpus(at_corpus);
            auto occurrences = read_macros_jsonl(at_macros);
            MacroFilter filter;
            if (at_blocklist) filter = MacroFilter::from_blocklist_file(*at_blocklist);
            filter.fit_frequency(occurrences, at_max_freq);
            auto profiles = build_profiles(corpus, occurrences);
            std::map<std::string, std::vector<MacroFingerprint>> by_paper;
            for (const auto& occ : occurrences) by_paper[occ.paper_id].push_back(occ.fingerprint);
            std::vector<ContributionVector> vectors;
            for (const auto& [id, p] : corpus.papers) {
                auto it = by_paper.find(id);
                if (it == by_paper.end()) continue;
                vectors.push_back(attribute_contributions(p, it->second, profiles, &filter));
            }
            Table t = contributions_table(vectors);
            write_table(t, at_out, TableFormat::Csv);
            std::cout << "wrote " << t.rows.size() << " rows to " << at_out << "\n";
        } else if (credit_cmd->parsed()) {
            Corpus corpus = load_corpus(cr_corpus);
            CitationGraph graph = build_graph(corpus);
            std::vector<CreditVector> vectors;
            for (const auto& [id, p] : corpus.papers) {
                if (corpus.citation_count(id) < cr_min_citations) continue;
                vectors.push_back(allocate_credit(graph, id));
            }
            Table t = credit_table(vectors);
            write_table(t, cr_out, TableFormat::Csv);
            std::cout << "wrote " << t.rows.size() << " rows to " << cr_out << "\n";
        } else if (nobel->parsed()) {
            Corpus corpus = load_corpus(ng_corpus, ng_prizes);
            write_table(nobel_gap_table(nobel_gap(corpus, ng_width)), ng_out, TableFormat::Csv);
            std::cout << "wrote " << ng_out.string() << "\n";
        } else if (curves->parsed()) {
            auto contributions = load_contributions(rc_contrib);
            auto credits = load_credit(rc_credit);
            write_table(rank_curves_table(rank_curves(contributions, credits)), rc_out,
                        TableFormat::Csv);
            std::cout << "wrote " << rc_out.string() << "\n";
        } else if (obs_cmd->parsed()) {
            Corpus corpus = load_corpus(ob_corpus);
            auto contributions = load_contributions(ob_contrib);
            auto credits = load_credit(ob_credit);
            GenderTable genders;
            if (ob_gender) genders = GenderTable::from_csv(*ob_gender);
            auto built = build_observations(corpus, contributions, credits, genders);
            Table t = observations_table(built.rows);
            write_table(t, ob_out, TableFormat::Csv);
            std::cout << "wrote " << t.rows.size() << " rows to " << ob_out << " ("
                      << built.dropped_joins << " join misses dropped)\n";
        } else if (corr->parsed()) {
            Corpus corpus = load_corpus(co_corpus);
            auto rows = observations_from_table(read_table(co_obs, TableFormat::Csv));
            std::vector<RankAgeObservation> rank_rows;
            for (const auto& r : rows) {
                const PaperRecord& p = corpus.paper(r.paper_id);
                for (const auto& a : p.authors)
                    if (a.author_id == r.author_id)
                        rank_rows.push_back({r.team_size, static_cast<double>(a.position),
                                             static_cast<double>(r.career_age)});
            }
            auto res = rank_age_correlation(rank_rows, co_weighted);
            Table t;
            t.header = {"team_size", "r", "p_value", "n"};
            for (const auto& [size, cres] : res.per_team_size)
                t.rows.push_back({std::to_string(size), format_double(cres.r),
                                  format_double(cres.p_value), std::to_string(cres.n)});
            t.rows.push_back({"average", format_double(res.average_r), "", ""});
            write_table(t, co_out, TableFormat::Csv);
            std::cout << "wrote " << co_out.string() << "\n";
        } else if (fit_cmd->parsed()) {
            auto rows = observations_from_table(read_table(fit_obs, TableFormat::Csv));
            ModelSpec spec;
            spec.outcome = fit_model == "primary" ? Outcome::Primary : Outcome::Recognition;
            spec.include_primary_term = spec.outcome != Outcome::Primary;
            spec.ridge = fit_ridge;
            FitResult fr = fit_logistic(spec, rows);
            std::ofstream(fit_out, std::ios::binary) << fit_report_json(fr) << '\n';
            std::cout << "wrote " << fit_out.string() << " (log-likelihood "
                      << fr.log_likelihood << ", " << fr.iterations << " iterations)\n";
        } else if (run->parsed()) {
            if (run_config_file) apply_config_file(pipeline_cfg, *run_config_file);
            PipelineResult res = run_pipeline(pipeline_cfg);
            for (const auto& s : res.stages)
                std::cout << s.name << ": " << (s.skipped ? "skipped" : "ran") << " (" << s.rows
                          << " rows)\n";
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
