#include "creditlens/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "creditlens/analytics.hpp"
#include "creditlens/attribution.hpp"
#include "creditlens/credit.hpp"
#include "creditlens/errors.hpp"
#include "creditlens/hash.hpp"
#include "creditlens/regression.hpp"

namespace creditlens {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

void PipelineConfig::validate() const {
    if (!fs::exists(corpus_file)) throw DataError("corpus file not found: " + corpus_file.string());
    if (prizes_file && !fs::exists(*prizes_file))
        throw DataError("prizes file not found: " + prizes_file->string());
    if (blocklist_file && !fs::exists(*blocklist_file))
        throw DataError("blocklist file not found: " + blocklist_file->string());
    if (gender_table_file && !fs::exists(*gender_table_file))
        throw DataError("gender table not found: " + gender_table_file->string());
    if (workers < 1) throw DataError("workers must be >= 1");
    if (max_doc_fraction < 0 || max_doc_fraction > 1)
        throw DataError("frequency cutoff must lie in [0,1]");
}

std::string hash_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open: " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return fnv1a64_hex(ss.str());
}

std::vector<MacroOccurrence> extract_all_macros(const Corpus& corpus, const fs::path& src_root,
                                                bool require_use, int workers) {
    std::vector<const PaperRecord*> with_source;
    for (const auto& [id, p] : corpus.papers)
        if (p.source_path) with_source.push_back(&p);

    std::vector<std::vector<MacroOccurrence>> results(with_source.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = cursor.fetch_add(1);
            if (i >= with_source.size()) return;
            PaperRecord copy = *with_source[i];
            copy.source_path = (src_root / *copy.source_path).string();
            PaperMacros pm = extract_paper_macros(copy);
            for (auto& occ : pm.occurrences) {
                if (require_use && occ.use_count < 1) continue;
                results[i].push_back(std::move(occ));
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int t = 0; t < workers; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    std::vector<MacroOccurrence> out;
    for (auto& r : results)
        for (auto& occ : r) out.push_back(std::move(occ));
    // results indexed by paper order, occurrences sorted per paper upstream;
    // overall order is deterministic regardless of scheduling
    return out;
}

namespace {

struct Manifest {
    ordered_json data = ordered_json::object();

    static Manifest load(const fs::path& path) {
        Manifest m;
        std::ifstream is(path);
        if (is) {
            try {
                m.data = ordered_json::parse(is);
            } catch (const nlohmann::json::exception&) {
                m.data = ordered_json::object();
            }
        }
        return m;
    }

    void save(const fs::path& path) const {
        std::ofstream os(path, std::ios::binary);
        os << data.dump(2) << '\n';
    }

    bool up_to_date(const std::string& stage, const ordered_json& inputs,
                    const std::vector<fs::path>& outputs) const {
        if (!data.contains(stage)) return false;
        const auto& entry = data.at(stage);
        if (entry.value("inputs", ordered_json::object()) != inputs) return false;
        if (!entry.contains("outputs")) return false;
        for (const auto& out : outputs) {
            std::string key = out.filename().string();
            if (!entry.at("outputs").contains(key)) return false;
            if (!fs::exists(out)) return false;
            if (hash_file(out) != entry.at("outputs").at(key).get<std::string>()) return false;
        }
        return true;
    }

    void record(const std::string& stage, const ordered_json& inputs,
                const std::vector<fs::path>& outputs, long rows) {
        ordered_json entry;
        entry["inputs"] = inputs;
        ordered_json outs = ordered_json::object();
        for (const auto& out : outputs) outs[out.filename().string()] = hash_file(out);
        entry["outputs"] = std::move(outs);
        entry["rows"] = rows;
        data[stage] = std::move(entry);
    }
};

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
    config.validate();
    fs::create_directories(config.out_dir);
    const fs::path manifest_path = config.out_dir / "manifest.json";
    Manifest manifest = Manifest::load(manifest_path);
    PipelineResult result;

    const std::string corpus_hash = hash_file(config.corpus_file);
    const std::string prizes_hash = config.prizes_file ? hash_file(*config.prizes_file) : "";

    Corpus corpus = load_corpus(config.corpus_file, config.prizes_file);

    auto stage = [&](const std::string& name, const ordered_json& inputs,
                     const std::vector<fs::path>& outputs, auto&& body) {
        StageReport report;
        report.name = name;
        if (manifest.up_to_date(name, inputs, outputs)) {
            report.skipped = true;
            report.rows = manifest.data[name].value("rows", 0L);
        } else {
            report.rows = body();
            manifest.record(name, inputs, outputs, report.rows);
            manifest.save(manifest_path);
        }
        result.stages.push_back(report);
    };

    const fs::path macros_path = config.out_dir / "macros.jsonl";
    {
        ordered_json inputs;
        inputs["corpus"] = corpus_hash;
        inputs["require_use"] = config.require_use;
        inputs["workers_invariant"] = true;  // worker count deliberately not hashed
        stage("extract-macros", inputs, {macros_path}, [&]() -> long {
            auto occurrences =
                extract_all_macros(corpus, config.src_root, config.require_use, config.workers);
            write_macros_jsonl(occurrences, macros_path);
            return static_cast<long>(occurrences.size());
        });
    }

    const fs::path contributions_path = config.out_dir / "contributions.csv";
    {
        ordered_json inputs;
        inputs["corpus"] = corpus_hash;
        inputs["macros"] = hash_file(macros_path);
        inputs["max_doc_fraction"] = config.max_doc_fraction;
        inputs["blocklist"] = config.blocklist_file ? hash_file(*config.blocklist_file) : "";
        stage("attribute", inputs, {contributions_path}, [&]() -> long {
            auto occurrences = read_macros_jsonl(macros_path);
            MacroFilter filter;
            if (config.blocklist_file)
                filter = MacroFilter::from_blocklist_file(*config.blocklist_file);
            filter.fit_frequency(occurrences, config.max_doc_fraction);
            auto profiles = build_profiles(corpus, occurrences);
            std::map<std::string, std::vector<MacroFingerprint>> by_paper;
            for (const auto& occ : occurrences)
                by_paper[occ.paper_id].push_back(occ.fingerprint);
            std::vector<ContributionVector> vectors;
            for (const auto& [id, p] : corpus.papers) {
                auto it = by_paper.find(id);
                if (it == by_paper.end()) continue;
                vectors.push_back(attribute_contributions(p, it->second, profiles, &filter));
            }
            Table t = contributions_table(vectors);
            write_table(t, contributions_path, TableFormat::Csv);
            return static_cast<long>(t.rows.size());
        });
    }

    const fs::path credit_path = config.out_dir / "credit.csv";
    {
        ordered_json inputs;
        inputs["corpus"] = corpus_hash;
        inputs["min_citations"] = config.min_citations;
        stage("credit", inputs, {credit_path}, [&]() -> long {
            CitationGraph graph = build_graph(corpus);
            std::vector<CreditVector> vectors;
            for (const auto& [id, p] : corpus.papers) {
                if (corpus.citation_count(id) < config.min_citations) continue;
                vectors.push_back(allocate_credit(graph, id));
            }
            Table t = credit_table(vectors);
            write_table(t, credit_path, TableFormat::Csv);
            return static_cast<long>(t.rows.size());
        });
    }

    const fs::path nobel_path = config.out_dir / "nobel_gap.csv";
    const fs::path curves_path = config.out_dir / "rank_curves.csv";
    const fs::path correlations_path = config.out_dir / "correlations.csv";
    const fs::path observations_path = config.out_dir / "observations.csv";
    {
        ordered_json inputs;
        inputs["corpus"] = corpus_hash;
        inputs["prizes"] = prizes_hash;
        inputs["contributions"] = hash_file(contributions_path);
        inputs["credit"] = hash_file(credit_path);
        inputs["gender_table"] =
            config.gender_table_file ? hash_file(*config.gender_table_file) : "";
        inputs["weighted_correlation"] = config.weighted_correlation;
        std::vector<fs::path> outputs = {curves_path, correlations_path, observations_path};
        if (!corpus.prizes.empty()) outputs.insert(outputs.begin(), nobel_path);
        stage("analyze", inputs, outputs, [&]() -> long {
            auto contributions =
                contributions_from_table(read_table(contributions_path, TableFormat::Csv));
            auto credits = credit_from_table(read_table(credit_path, TableFormat::Csv));
            if (!corpus.prizes.empty())
                write_table(nobel_gap_table(nobel_gap(corpus)), nobel_path, TableFormat::Csv);
            write_table(rank_curves_table(rank_curves(contributions, credits)), curves_path,
                        TableFormat::Csv);
            GenderTable genders;
            if (config.gender_table_file)
                genders = GenderTable::from_csv(*config.gender_table_file);
            auto built = build_observations(corpus, contributions, credits, genders);
            Table obs = observations_table(built.rows);
            write_table(obs, observations_path, TableFormat::Csv);

            // rank/career-age correlation per team size
            std::vector<RankAgeObservation> rank_rows;
            for (const auto& r : built.rows) {
                const PaperRecord& p = corpus.paper(r.paper_id);
                for (const auto& a : p.authors)
                    if (a.author_id == r.author_id)
                        rank_rows.push_back({r.team_size, static_cast<double>(a.position),
                                             static_cast<double>(r.career_age)});
            }
            auto corr = rank_age_correlation(rank_rows, config.weighted_correlation);
            Table ct;
            ct.header = {"team_size", "r", "p_value", "n"};
            for (const auto& [size, res] : corr.per_team_size)
                ct.rows.push_back({std::to_string(size), format_double(res.r),
                                   format_double(res.p_value), std::to_string(res.n)});
            ct.rows.push_back({"average", format_double(corr.average_r), "", ""});
            write_table(ct, correlations_path, TableFormat::Csv);
            return static_cast<long>(obs.rows.size());
        });
    }

    const fs::path fit_recognition_path = config.out_dir / "fit_recognition.json";
    const fs::path fit_primary_path = config.out_dir / "fit_primary.json";
    {
        ordered_json inputs;
        inputs["observations"] = hash_file(observations_path);
        stage("fit", inputs, {fit_recognition_path, fit_primary_path}, [&]() -> long {
            auto rows = observations_from_table(read_table(observations_path, TableFormat::Csv));
            ModelSpec recognition;
            recognition.outcome = Outcome::Recognition;
            FitResult fr = fit_logistic(recognition, rows);
            std::ofstream(fit_recognition_path, std::ios::binary) << fit_report_json(fr) << '\n';
            ModelSpec primary;
            primary.outcome = Outcome::Primary;
            primary.include_primary_term = false;
            FitResult fp = fit_logistic(primary, rows);
            std::ofstream(fit_primary_path, std::ios::binary) << fit_report_json(fp) << '\n';
            return static_cast<long>(rows.size());
        });
    }

    return result;
}

void synth_demo(std::uint64_t seed, const fs::path& out_dir) {
    SynthResult synth = synthesize_corpus(demo_config(), seed);
    fs::create_directories(out_dir);
    write_synth_corpus(synth, out_dir);
}

}  // namespace creditlens
