#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "nl2sql/compiler.hpp"
#include "nl2sql/evaluator.hpp"
#include "nl2sql/ner.hpp"
#include "nl2sql/roundtrip.hpp"
#include "nl2sql/schema.hpp"
#include "nl2sql/sql_to_semql.hpp"
#include "nl2sql/stats.hpp"
#include "nl2sql/synthesis.hpp"
#include "nl2sql/value_index.hpp"

namespace fs = std::filesystem;
using namespace nl2sql;

namespace {

struct RunConfig {
    std::string catalog;
    std::string samples;
    std::string db_dir;
    std::string mode = "full";
    std::string policy = "baseline";
    std::string policy_cmd;
    std::string ner_cmd;
    std::string index_cache;
    int beam = 1;
    int timeout_ms = 10000;
    int workers = static_cast<int>(std::thread::hardware_concurrency());
    std::string out;
    bool show_candidates = false;
    bool fail_fast = false;
};

struct Dataset {
    std::vector<DatabaseSchema> schemas;
    std::map<std::string, std::size_t> by_id;
    std::map<std::string, SchemaGraph> graphs;
    std::map<std::string, std::shared_ptr<ValueIndex>> indexes;
    std::string db_dir;

    const DatabaseSchema* schema_of(const std::string& db_id) const {
        auto it = by_id.find(db_id);
        return it == by_id.end() ? nullptr : &schemas[it->second];
    }

    std::string db_path(const std::string& db_id) const {
        fs::path flat = fs::path(db_dir) / (db_id + ".sqlite");
        if (fs::exists(flat)) return flat.string();
        fs::path nested = fs::path(db_dir) / db_id / (db_id + ".sqlite");
        return nested.string();
    }
};

Dataset load_dataset(const RunConfig& config) {
    Dataset data;
    CatalogLoadResult catalog = load_schema_catalog(config.catalog);
    for (const CatalogError& err : catalog.rejected) {
        std::cerr << "warning: rejected descriptor " << err.db_id << ": " << err.reason << "\n";
    }
    data.schemas = std::move(catalog.schemas);
    for (std::size_t i = 0; i < data.schemas.size(); ++i) {
        data.by_id[data.schemas[i].db_id] = i;
        data.graphs[data.schemas[i].db_id] = build_schema_graph(data.schemas[i]);
    }
    data.db_dir = config.db_dir;
    return data;
}

std::shared_ptr<ValueIndex> index_for(Dataset& data, const RunConfig& config,
                                      const std::string& db_id) {
    auto it = data.indexes.find(db_id);
    if (it != data.indexes.end()) return it->second;
    const DatabaseSchema* schema = data.schema_of(db_id);
    if (!schema) throw std::runtime_error("unknown db_id: " + db_id);

    std::shared_ptr<ValueIndex> index;
    if (!config.index_cache.empty()) {
        fs::path cache = fs::path(config.index_cache) / (db_id + ".index.json");
        if (fs::exists(cache)) {
            std::ifstream in(cache);
            std::string text((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
            index = std::make_shared<ValueIndex>(ValueIndex::from_json(text));
        }
    }
    if (!index) {
        SqliteDb db = SqliteDb::open_read_only(data.db_path(db_id));
        index = std::make_shared<ValueIndex>(ValueIndex::build(db, *schema));
    }
    data.indexes[db_id] = index;
    return index;
}

std::vector<std::string> known_ids(const Dataset& data) {
    std::vector<std::string> ids;
    ids.reserve(data.schemas.size());
    for (const DatabaseSchema& s : data.schemas) ids.push_back(s.db_id);
    return ids;
}

void write_or_print(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(out_path);
    out << text << "\n";
    std::cout << "wrote " << out_path << "\n";
}

// thread-local policy instances; external policies own one pipe per worker
class PolicyPool {
public:
    PolicyPool(const RunConfig& config) : config_(config) {}

    ScoringPolicy& get() {
        std::lock_guard<std::mutex> lock(mutex_);
        auto id = std::this_thread::get_id();
        auto it = policies_.find(id);
        if (it == policies_.end()) {
            std::unique_ptr<ScoringPolicy> policy;
            if (config_.policy == "external") {
                policy = std::make_unique<ExternalPolicy>(config_.policy_cmd);
            } else {
                policy = std::make_unique<BaselinePolicy>();
            }
            it = policies_.emplace(id, std::move(policy)).first;
        }
        return *it->second;
    }

private:
    const RunConfig& config_;
    std::mutex mutex_;
    std::map<std::thread::id, std::unique_ptr<ScoringPolicy>> policies_;
};

int cmd_index(RunConfig& config) {
    Dataset data = load_dataset(config);
    if (config.out.empty()) {
        std::cerr << "error: --out directory required for index\n";
        return 2;
    }
    fs::create_directories(config.out);
    for (const DatabaseSchema& schema : data.schemas) {
        std::string path = data.db_path(schema.db_id);
        if (!fs::exists(path)) {
            std::cerr << "error: database file missing: " << path << "\n";
            return 2;
        }
        SqliteDb db = SqliteDb::open_read_only(path);
        ValueIndex index = ValueIndex::build(db, schema);
        fs::path cache = fs::path(config.out) / (schema.db_id + ".index.json");
        std::ofstream out(cache);
        out << index.to_json();
        std::cout << schema.db_id << ": " << index.entry_count() << " keys -> " << cache.string()
                  << "\n";
    }
    return 0;
}

int cmd_translate(RunConfig& config, const std::string& question, const std::string& db_id,
                  const std::vector<std::string>& options) {
    Dataset data = load_dataset(config);
    const DatabaseSchema* schema = data.schema_of(db_id);
    if (!schema) {
        std::cerr << "error: unknown db_id " << db_id << "\n";
        return 2;
    }
    auto index = index_for(data, config, db_id);
    SqliteDb db = SqliteDb::open_read_only(data.db_path(db_id));

    std::optional<LightModeOptions> light;
    if (config.mode == "light") light = LightModeOptions{options};
    std::unique_ptr<ProcessEntityRecognizer> ner;
    if (!config.ner_cmd.empty()) ner = std::make_unique<ProcessEntityRecognizer>(config.ner_cmd);

    EncodingContext context = build_context(question, *schema, *index, &db, light, ner.get());
    if (config.show_candidates) {
        for (const ValueCandidate& cand : context.candidates.items) {
            nlohmann::json j;
            j["surface"] = cand.surface;
            j["origin"] = candidate_origin_name(cand.origin);
            j["validated"] = cand.validated;
            j["exempt"] = cand.exempt_from_validation;
            if (cand.location) {
                j["table"] = schema->tables[static_cast<std::size_t>(cand.location->table)];
                j["column"] =
                    schema->columns[static_cast<std::size_t>(cand.location->column)].name;
            }
            std::cout << j.dump() << "\n";
        }
    }
    PolicyPool pool(config);
    SearchConfig search{config.beam, 64};
    SynthesisResult synth = synthesize(context, pool.get(), search);
    if (!synth.ok()) {
        std::cerr << "translation failed: " << synth.failure << "\n";
        return 1;
    }
    try {
        CompiledQuery compiled =
            compile(*synth.tree, *schema, data.graphs[db_id], context.candidates);
        std::cout << compiled.sql << "\n";
    } catch (const std::exception& e) {
        std::cerr << "compile failed: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

int cmd_evaluate(RunConfig& config) {
    Dataset data = load_dataset(config);
    std::vector<std::string> ids = known_ids(data);
    std::vector<SampleRecord> samples = load_samples(config.samples, &ids);

    // share indexes across workers; they are immutable once built
    for (const SampleRecord& s : samples) {
        if (s.usable()) index_for(data, config, s.db_id);
    }
    PolicyPool pool(config);
    bool light = config.mode == "light";

    SystemUnderTest system = [&](const SampleRecord& sample, SampleVerdict& verdict) {
        const DatabaseSchema* schema = data.schema_of(sample.db_id);
        auto index = data.indexes.at(sample.db_id);
        SqliteDb db = SqliteDb::open_read_only(data.db_path(sample.db_id));

        std::optional<LightModeOptions> options;
        if (light) {
            ConvertResult converted =
                sql_to_semql(sample.gold_sql, *schema, data.graphs.at(sample.db_id));
            if (!converted.ok()) {
                verdict.failure = "light options unavailable (" + converted.reason + ")";
                return;
            }
            LightModeOptions opts;
            for (const GoldLiteral& lit : converted.literals) opts.options.push_back(lit.surface);
            options = std::move(opts);
        }
        ContextTimings timings;
        EncodingContext context =
            build_context(sample.question, *schema, *index, &db, options, nullptr, &timings);
        verdict.timings.pre_processing_ms = timings.pre_processing_ms;
        verdict.timings.value_lookup_ms = timings.value_lookup_ms;

        auto synth_start = std::chrono::steady_clock::now();
        SynthesisResult synth = synthesize(context, pool.get(), SearchConfig{config.beam, 64});
        verdict.timings.synthesis_ms =
            std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(
                std::chrono::steady_clock::now() - synth_start)
                .count();
        if (!synth.ok()) {
            verdict.failure = synth.failure;
            return;
        }
        auto compile_start = std::chrono::steady_clock::now();
        try {
            CompiledQuery compiled =
                compile(*synth.tree, *schema, data.graphs.at(sample.db_id), context.candidates);
            verdict.predicted_sql = compiled.sql;
        } catch (const std::exception& e) {
            verdict.failure = std::string("compile: ") + e.what();
        }
        verdict.timings.post_processing_ms =
            std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(
                std::chrono::steady_clock::now() - compile_start)
                .count();
    };

    EvalConfig eval_config;
    eval_config.execution.timeout = std::chrono::milliseconds(config.timeout_ms);
    eval_config.workers = std::max(1, config.workers);
    EvalReport report = evaluate_set(
        samples, system, [&](const std::string& id) { return SqliteDb::open_read_only(data.db_path(id)); },
        eval_config);

    std::cout << report.to_table();
    if (!config.out.empty()) {
        std::ofstream out(config.out);
        out << report.to_json() << "\n";
        std::ofstream csv(config.out + ".csv");
        csv << report.to_csv();
        std::cout << "wrote " << config.out << "\n";
    }
    for (const SampleVerdict& v : report.samples) {
        if (!v.failure.empty()) return 1;
    }
    return 0;
}

int cmd_roundtrip(RunConfig& config) {
    Dataset data = load_dataset(config);
    std::vector<std::string> ids = known_ids(data);
    std::vector<SampleRecord> samples = load_samples(config.samples, &ids);

    RoundtripConfig rt;
    rt.execution.timeout = std::chrono::milliseconds(config.timeout_ms);
    rt.fail_fast = config.fail_fast;
    RoundtripReport report = roundtrip_audit(
        samples, [&](const std::string& id) { return data.schema_of(id); },
        [&](const std::string& id) { return SqliteDb::open_read_only(data.db_path(id)); }, rt);

    std::cout << "samples: " << report.outcomes.size() << "  accepted: " << report.accepted
              << "  equivalent: " << report.equivalent << "\n";
    std::cout << "acceptance rate: " << report.acceptance_rate() << "\n";
    for (const auto& [reason, count] : report.rejection_reasons) {
        std::cout << "  " << reason << ": " << count << "\n";
    }
    if (!config.out.empty()) write_or_print(config.out, report.to_json());
    return report.equivalent == report.accepted ? 0 : 1;
}

int cmd_stats(RunConfig& config) {
    Dataset data = load_dataset(config);
    std::vector<std::string> ids = known_ids(data);
    std::vector<SampleRecord> samples = load_samples(config.samples, &ids);
    ValueStats stats = value_stats(samples);
    write_or_print(config.out, stats.to_json());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"natural-language-to-SQL toolkit"};
    app.set_config("--config");

    RunConfig config;
    app.add_option("--catalog", config.catalog, "schema catalog JSON")->envname("SEMQL_CATALOG");
    app.add_option("--samples", config.samples, "question/query samples JSON")
        ->envname("SEMQL_SAMPLES");
    app.add_option("--db-dir", config.db_dir, "directory of SQLite databases")
        ->envname("SEMQL_DB_DIR");
    app.add_option("--mode", config.mode, "full or light")->envname("SEMQL_MODE");
    app.add_option("--policy", config.policy, "baseline or external")->envname("SEMQL_POLICY");
    app.add_option("--policy-cmd", config.policy_cmd, "external policy command")
        ->envname("SEMQL_POLICY_CMD");
    app.add_option("--ner-cmd", config.ner_cmd, "external recognizer command")
        ->envname("SEMQL_NER_CMD");
    app.add_option("--index-cache", config.index_cache, "directory of cached value indexes")
        ->envname("SEMQL_INDEX_CACHE");
    app.add_option("--beam", config.beam, "beam width (1 = greedy)")->envname("SEMQL_BEAM");
    app.add_option("--timeout-ms", config.timeout_ms, "per-query execution timeout")
        ->envname("SEMQL_TIMEOUT_MS");
    app.add_option("--workers", config.workers, "evaluation workers")->envname("SEMQL_WORKERS");
    app.add_option("--out", config.out, "output path")->envname("SEMQL_OUT");
    app.add_flag("--show-candidates", config.show_candidates, "print the candidate set");
    app.add_flag("--fail-fast", config.fail_fast, "stop at first inequivalence");

    auto* index_cmd = app.add_subcommand("index", "build and cache value indexes");
    std::string question, db_id;
    std::vector<std::string> options;
    auto* translate_cmd = app.add_subcommand("translate", "translate one question");
    translate_cmd->add_option("question", question, "natural language question")->required();
    translate_cmd->add_option("--db", db_id, "database id")->required();
    translate_cmd->add_option("--option", options, "light-mode value option (repeatable)");
    auto* evaluate_cmd = app.add_subcommand("evaluate", "run execution-accuracy evaluation");
    auto* roundtrip_cmd = app.add_subcommand("roundtrip", "gold SQL -> tree -> SQL audit");
    auto* stats_cmd = app.add_subcommand("stats", "value distribution over gold queries");
    app.require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        if (index_cmd->parsed()) return cmd_index(config);
        if (translate_cmd->parsed()) return cmd_translate(config, question, db_id, options);
        if (evaluate_cmd->parsed()) return cmd_evaluate(config);
        if (roundtrip_cmd->parsed()) return cmd_roundtrip(config);
        if (stats_cmd->parsed()) return cmd_stats(config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
