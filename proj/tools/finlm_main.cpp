// finlm: corpus construction, synthetic rephrasing, desk-scale continual
// pre-training and benchmark evaluation for a financial LLM pipeline.
//
// Subcommands: ingest, format, synth, pack, stats, train, plan, eval,
// compare, report. Exit codes: 0 success, 2 usage error, 3 data error,
// 4 backend error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "finlm/clean.hpp"
#include "finlm/compare.hpp"
#include "finlm/corpus.hpp"
#include "finlm/decoding.hpp"
#include "finlm/dedupe.hpp"
#include "finlm/eval.hpp"
#include "finlm/http_backend.hpp"
#include "finlm/markdown.hpp"
#include "finlm/packing.hpp"
#include "finlm/pipeline_config.hpp"
#include "finlm/render.hpp"
#include "finlm/scoring.hpp"
#include "finlm/synthgen.hpp"
#include "finlm/tokenizer.hpp"
#include "finlm/train_plan.hpp"
#include "finlm/trainer.hpp"
#include "finlm/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace finlm;

namespace {

struct GlobalOptions {
    std::string config_path;
    std::uint64_t seed = 42;
    std::size_t workers = 1;
    bool no_timestamp = false;
    PipelineConfig config;

    RunMeta meta() const {
        RunMeta m;
        m.seed = seed;
        m.config_hash = config_hash(config);
        m.config = to_json(config);
        m.with_timestamp = !no_timestamp;
        return m;
    }
};

void load_effective_config(GlobalOptions& global, bool seed_given, bool workers_given) {
    if (!global.config_path.empty()) {
        global.config = load_pipeline_config(global.config_path);
        if (!seed_given) global.seed = global.config.seed;
        if (!workers_given) global.workers = global.config.workers;
    }
    global.config.seed = global.seed;
    global.config.workers = global.workers;
}

std::ofstream open_output(const std::string& path) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    return out;
}

// Backend spec grammar: mock:echo | mock:fixed:<text> | reference:<model.json>
// | http://... | https://...
std::unique_ptr<gen::GenerationBackend> make_backend(const std::string& spec, int retries,
                                                     int backoff_ms, int timeout_ms) {
    if (spec == "mock:echo") return std::make_unique<gen::MockBackend>(gen::MockBackend::echo(spec));
    if (spec.rfind("mock:fixed:", 0) == 0)
        return std::make_unique<gen::MockBackend>(gen::MockBackend::fixed("mock:fixed", spec.substr(11)));
    if (spec == "mock:fail")
        return std::make_unique<gen::MockBackend>(gen::MockBackend::failing(spec));
    if (spec.rfind("reference:", 0) == 0) {
        std::string model_path = spec.substr(10);
        std::ifstream in(model_path);
        if (!in) throw Error(ErrorCode::IoError, "cannot open model " + model_path);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw Error(ErrorCode::ParseError, std::string("model file: ") + e.what());
        }
        auto tokenizer = std::shared_ptr<const Tokenizer>(make_tokenizer("byte").release());
        return std::make_unique<gen::ReferenceBackend>("reference:" + model_path,
                                                       train::TinyLM::from_json(j), tokenizer);
    }
    if (spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0) {
        gen::RetryPolicy policy;
        policy.max_attempts = retries;
        policy.initial_backoff_ms = backoff_ms;
        policy.timeout_ms = timeout_ms;
        std::string token;
        if (const char* env = std::getenv("FINLM_AUTH_TOKEN")) token = env;
        return std::make_unique<gen::HttpBackend>(spec, "/generate", policy, token);
    }
    throw Error(ErrorCode::UsageError, "unknown backend spec: " + spec);
}

// ---------------------------------------------------------------------------
// ingest: manifest + raw files -> raw-documents JSONL

struct IngestArgs {
    std::string manifest;
    std::string out;
};

void run_ingest(const GlobalOptions& global, const IngestArgs& args) {
    auto docs = corpus::load_documents(args.manifest);
    auto out = open_output(args.out);
    out << jsonl_meta_line(global.meta()) << '\n';
    for (const auto& d : docs) out << corpus::to_json(d).dump() << '\n';
    std::cout << "ingested " << docs.size() << " documents -> " << args.out << "\n";
}

// ---------------------------------------------------------------------------
// format: raw documents -> corpus records in the six formats

struct FormatArgs {
    std::string docs;
    std::string out;
    std::vector<std::string> emit{"markdown"};
    int section_level = 2;
    bool strict_sections = false;
    std::string clean_config;
    std::string categories;
    std::string companies;
    std::string items;
    bool dedupe_exact = false;
    bool near_dup = false;
    double near_dup_threshold = 0.9;
};

corpus::CleaningConfig load_clean_config(const std::string& path) {
    corpus::CleaningConfig config;
    if (path.empty()) return config;
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("clean config: ") + e.what());
    }
    if (j.contains("boilerplate_patterns"))
        config.boilerplate_patterns = j.at("boilerplate_patterns").get<std::vector<std::string>>();
    return config;
}

void run_format(const GlobalOptions& global, const FormatArgs& args) {
    auto tokenizer = make_tokenizer(global.config.tokenizer);
    auto clean_config = load_clean_config(args.clean_config);
    std::vector<corpus::CorpusRecord> records;

    bool emit_markdown = false, emit_sections = false;
    for (const auto& kind : args.emit) {
        if (kind == "markdown") emit_markdown = true;
        else if (kind == "section") emit_sections = true;
        else throw Error(ErrorCode::UsageError, "--emit accepts markdown and/or section, got " + kind);
    }

    if (!args.docs.empty()) {
        auto docs = corpus::read_jsonl_file<corpus::RawDocument>(args.docs, corpus::raw_document_from_json);
        std::size_t skipped = 0;
        for (auto& doc : docs) {
            try {
                doc.body = corpus::clean_text_preserving_structure(doc.body, clean_config);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::EmptyAfterCleaning) throw;
                ++skipped;
                continue;
            }
            auto md = corpus::to_markdown(doc);
            if (emit_markdown) records.push_back(md);
            if (emit_sections) {
                std::string fallback = doc.metadata.count("title") ? doc.metadata.at("title") : doc.id;
                std::string title = corpus::derive_title(md.text, fallback);
                auto sections = corpus::consolidate_sections(
                    md.text, doc.id, title,
                    {.heading_level = args.section_level, .strict = args.strict_sections});
                records.insert(records.end(), sections.begin(), sections.end());
            }
        }
        if (skipped > 0) std::clog << "format: skipped " << skipped << " documents empty after cleaning\n";
    }

    if (!args.categories.empty()) {
        auto entries =
            corpus::read_jsonl_file<corpus::CategoryEntry>(args.categories, corpus::category_entry_from_json);
        for (std::size_t i = 0; i < entries.size(); ++i)
            records.push_back(corpus::render_category(entries[i], "category-" + std::to_string(i)));
    }

    if (!args.companies.empty()) {
        auto rows = corpus::read_jsonl_file<corpus::CompanyRow>(args.companies, corpus::company_row_from_json);
        records.push_back(corpus::render_company_list(rows, "company-list-0"));
    }

    if (!args.items.empty()) {
        auto results =
            corpus::read_jsonl_file<synth::RephraseResult>(args.items, synth::rephrase_result_from_json);
        for (const auto& r : results) {
            std::size_t k = 0;
            for (const auto& item : r.qa_items)
                records.push_back(corpus::render_synthetic(item, r.passage_id + "#qa" + std::to_string(k++),
                                                           {r.passage_id}));
            k = 0;
            for (const auto& item : r.mcq_items)
                records.push_back(corpus::render_synthetic(item, r.passage_id + "#mcq" + std::to_string(k++),
                                                           {r.passage_id}));
        }
    }

    if (args.dedupe_exact || args.near_dup) {
        corpus::DedupeConfig config;
        config.near_duplicates = args.near_dup;
        config.jaccard_threshold = args.near_dup_threshold;
        records = corpus::dedupe(records, config);
    }

    corpus::assign_token_counts(records, *tokenizer);
    auto out = open_output(args.out);
    out << jsonl_meta_line(global.meta()) << '\n';
    corpus::write_records(out, records);
    std::cout << "formatted " << records.size() << " records -> " << args.out << "\n";
}

// ---------------------------------------------------------------------------
// synth: passages -> rephrased QA / MCQ items via a backend

struct SynthArgs {
    std::string passages;
    std::string kind = "qa";
    std::string backend;
    std::string out;
    int max_items = 1;
    int failure_budget = 5;
    std::string qa_template;
    std::string mcq_template;
    int retries = 3;
    int backoff_ms = 100;
    int timeout_ms = 30000;
};

void run_synth(const GlobalOptions& global, const SynthArgs& args) {
    auto passages = corpus::read_jsonl_file<synth::Passage>(args.passages, [](const json& j) {
        return synth::Passage{j.value("id", std::string{}), j.at("text").get<std::string>()};
    });
    auto backend = make_backend(args.backend.empty() ? global.config.backend.spec : args.backend,
                                args.retries, args.backoff_ms, args.timeout_ms);
    synth::SynthConfig config;
    config.max_items = args.max_items;
    config.failure_budget = args.failure_budget;
    config.workers = global.workers;
    config.generation = global.config.generation;
    config.templates = synth::PromptTemplates::from_files(
        args.qa_template.empty() ? std::nullopt : std::optional(args.qa_template),
        args.mcq_template.empty() ? std::nullopt : std::optional(args.mcq_template));
    auto results =
        synth::generate_synthetic(passages, synth::rephrase_kind_from(args.kind), *backend, config);

    auto out = open_output(args.out);
    out << jsonl_meta_line(global.meta()) << '\n';
    for (const auto& r : results) out << synth::to_json(r).dump() << '\n';
    std::cout << "generated " << results.size() << " results from " << passages.size() << " passages -> "
              << args.out << "\n";
}

// ---------------------------------------------------------------------------
// pack: corpus records -> packed training sequences

struct PackArgs {
    std::string records;
    std::string out;
    std::size_t max_len = 2048;
    bool pad = false;
};

void run_pack(const GlobalOptions& global, const PackArgs& args) {
    auto records = corpus::read_records_file(args.records);
    auto tokenizer = make_tokenizer(global.config.tokenizer);
    train::PackPolicy policy;
    policy.pad_to_max = args.pad;
    auto packed = train::pack_records(records, *tokenizer, args.max_len, policy);
    auto out = open_output(args.out);
    out << comment_meta_line(global.meta()) << '\n';
    train::write_packed_file(out, packed, args.max_len, tokenizer->name());
    std::size_t tokens = 0;
    for (const auto& s : packed) tokens += s.non_pad_length();
    std::cout << "packed " << records.size() << " records into " << packed.size() << " sequences ("
              << tokens << " tokens) -> " << args.out << "\n";
}

// ---------------------------------------------------------------------------
// stats

void run_stats(const std::string& records_path) {
    auto records = corpus::read_records_file(records_path);
    auto stats = corpus::corpus_stats(records);
    std::cout << "doc_count=" << stats.doc_count << "\n";
    std::cout << "token_count=" << stats.token_count << "\n";
    for (const auto& [fmt, count] : stats.per_format) std::cout << "format." << fmt << "=" << count << "\n";
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
    std::string packed;
    std::string plan_path;
    std::string curve_out;
    std::string model_out;
    std::size_t model_dim = 16;
    bool mask_boundaries = false;
    bool analyze = true;
};

void run_train(const GlobalOptions& global, const TrainArgs& args) {
    auto file = train::read_packed_file(args.packed);
    train::TrainPlan plan = global.config.train_plan;
    if (!args.plan_path.empty()) {
        std::ifstream in(args.plan_path);
        if (!in) throw Error(ErrorCode::IoError, "cannot open plan " + args.plan_path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        plan = train::parse_training_plan(text);
    }
    train::TrainOptions options;
    options.model_dim = args.model_dim;
    options.mask_document_boundaries = args.mask_boundaries;
    auto result = train::train_reference(file.sequences, plan, global.seed, options);

    if (!args.curve_out.empty()) {
        auto out = open_output(args.curve_out);
        out << comment_meta_line(global.meta()) << '\n';
        out << train::loss_curve_csv(result.curve);
    }
    if (!args.model_out.empty()) {
        auto out = open_output(args.model_out);
        json j = result.model.to_json();
        j["finlm_meta"] = json::parse(jsonl_meta_line(global.meta())).at("finlm_meta");
        out << j.dump() << '\n';
    }

    std::cout << "trained " << result.total_steps << " steps over " << file.sequences.size()
              << " sequences\n";
    std::cout << "first_loss=" << util::format_double(result.curve.entries.front().loss)
              << " final_loss=" << util::format_double(result.curve.entries.back().loss) << "\n";
    if (args.analyze && result.curve.entries.size() >= train::AnalyzeConfig{}.spike_window + 1) {
        auto analysis = train::analyze_curve(result.curve);
        std::cout << "spikes=" << analysis.spikes.size() << " saturated="
                  << (analysis.saturated ? "true" : "false")
                  << " tail_slope=" << util::format_double(analysis.tail_slope) << "\n";
    }
}

// ---------------------------------------------------------------------------
// plan

struct PlanArgs {
    std::string out;
    std::string check;
    train::TrainPlan plan;
};

void run_plan(const GlobalOptions& global, const PlanArgs& args) {
    if (!args.check.empty()) {
        std::ifstream in(args.check);
        if (!in) throw Error(ErrorCode::IoError, "cannot open " + args.check);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        train::parse_training_plan(text);
        std::cout << "plan ok: " << args.check << "\n";
        return;
    }
    std::string manifest = train::emit_training_plan(args.plan);
    if (args.out.empty()) {
        std::cout << manifest;
    } else {
        auto out = open_output(args.out);
        out << comment_meta_line(global.meta()) << '\n' << manifest;
        std::cout << "plan -> " << args.out << "\n";
    }
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
    std::vector<std::string> tasks;  // name=path
    std::string backend;
    std::string report_out;
    std::string audit_out;
    std::string table_out;
    int fewshots = 0;
    int retries = 3;
    int backoff_ms = 100;
    int timeout_ms = 30000;
};

void run_eval(const GlobalOptions& global, const EvalArgs& args) {
    if (args.tasks.empty()) throw Error(ErrorCode::UsageError, "at least one --task name=path required");
    std::vector<eval::EvalTask> tasks;
    for (const auto& spec : args.tasks) {
        std::size_t eq = spec.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::UsageError, "--task expects name=path, got " + spec);
        tasks.push_back(eval::load_task(spec.substr(0, eq), spec.substr(eq + 1)));
    }
    auto backend = make_backend(args.backend.empty() ? global.config.backend.spec : args.backend,
                                args.retries, args.backoff_ms, args.timeout_ms);

    std::optional<std::ofstream> audit_file;
    if (!args.audit_out.empty()) {
        audit_file = open_output(args.audit_out);
        *audit_file << jsonl_meta_line(global.meta()) << '\n';
    }
    eval::BenchmarkOptions options;
    options.fewshots = args.fewshots;
    options.workers = global.workers;
    if (audit_file)
        options.audit = [&](const eval::AuditRecord& a) {
            *audit_file << eval::to_json(a).dump() << '\n';
            audit_file->flush();  // keep partial results on abort
        };

    eval::BenchmarkReport report;
    try {
        report = eval::run_benchmark(tasks, *backend, global.config.generation, options);
    } catch (...) {
        if (audit_file) audit_file->flush();
        throw;
    }

    if (!args.report_out.empty()) {
        auto out = open_output(args.report_out);
        json j = eval::to_json(report);
        j["finlm_meta"] = json::parse(jsonl_meta_line(global.meta())).at("finlm_meta");
        out << j.dump(2) << '\n';
    }
    if (!args.table_out.empty()) {
        auto out = open_output(args.table_out);
        out << comment_meta_line(global.meta()) << "\n\n" << eval::render_benchmark_table({report}, false);
    }
    std::cout << "overall=" << eval::format_score(report.overall) << " over " << tasks.size()
              << " tasks (" << report.model_id << ")\n";
    for (const auto& [name, score] : report.per_task) {
        std::cout << name << "=" << eval::format_score(score.value);
        if (score.stderr_value) std::cout << "±" << eval::format_score(*score.stderr_value);
        std::cout << " n=" << score.n << "\n";
    }
}

// ---------------------------------------------------------------------------
// compare

struct CompareArgs {
    std::string prompts;
    std::string backend_a;
    std::string backend_b;
    std::string out;
    std::string cases_out;
    int retries = 3;
    int backoff_ms = 100;
    int timeout_ms = 30000;
};

void run_compare(const GlobalOptions& global, const CompareArgs& args) {
    std::ifstream in(args.prompts);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + args.prompts);
    std::vector<std::string> prompts;
    std::string line;
    while (std::getline(in, line)) {
        std::string_view sv = util::trim(line);
        if (!sv.empty() && sv.front() != '#') prompts.emplace_back(sv);
    }
    if (prompts.empty()) throw Error(ErrorCode::EmptyInput, "no prompts in " + args.prompts);

    auto backend_a = make_backend(args.backend_a, args.retries, args.backoff_ms, args.timeout_ms);
    auto backend_b = make_backend(args.backend_b, args.retries, args.backoff_ms, args.timeout_ms);
    auto tokenizer = make_tokenizer(global.config.tokenizer);
    auto cases = cmp::compare_outputs(prompts, *backend_a, *backend_b, global.config.generation,
                                      *tokenizer, global.workers);

    auto out = open_output(args.out);
    out << comment_meta_line(global.meta()) << "\n\n" << cmp::render_comparison(cases);
    if (!args.cases_out.empty()) {
        auto cases_file = open_output(args.cases_out);
        cases_file << jsonl_meta_line(global.meta()) << '\n';
        for (const auto& c : cases) cases_file << cmp::to_json(c).dump() << '\n';
    }
    std::cout << "compared " << cases.size() << " prompts -> " << args.out << "\n";
}

// ---------------------------------------------------------------------------
// report: two eval reports -> side-by-side table + diff

struct ReportArgs {
    std::string tuned;
    std::string original;
    std::string out;
    std::string diff_out;
};

eval::BenchmarkReport load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("report: ") + e.what());
    }
    return eval::benchmark_report_from_json(j);
}

void run_report(const GlobalOptions& global, const ReportArgs& args) {
    auto tuned = load_report(args.tuned);
    auto original = load_report(args.original);
    std::string table = eval::render_benchmark_table({tuned, original}, true);
    if (args.out.empty()) {
        std::cout << table;
    } else {
        auto out = open_output(args.out);
        out << comment_meta_line(global.meta()) << "\n\n" << table;
        std::cout << "table -> " << args.out << "\n";
    }
    if (!args.diff_out.empty()) {
        auto d = eval::diff(tuned, original);
        json per = json::object();
        for (const auto& [name, delta] : d.per_task) per[name] = delta;
        json j{{"tuned", d.tuned_id}, {"original", d.original_id}, {"per_task", per}, {"overall", d.overall}};
        j["finlm_meta"] = json::parse(jsonl_meta_line(global.meta())).at("finlm_meta");
        auto out = open_output(args.diff_out);
        out << j.dump(2) << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finlm: financial-domain corpus, training and evaluation toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("finlm ") + kVersion);

    GlobalOptions global;
    auto* seed_opt = app.add_option("--seed", global.seed, "run seed, echoed in all outputs");
    auto* workers_opt = app.add_option("--workers", global.workers, "bounded parallelism (default 1)");
    app.add_option("--config", global.config_path, "pipeline config JSON");
    app.add_flag("--no-timestamp", global.no_timestamp, "omit timestamps for byte-reproducible outputs");

    IngestArgs ingest_args;
    auto* ingest = app.add_subcommand("ingest", "load manifest + raw files into a documents JSONL");
    ingest->add_option("--manifest", ingest_args.manifest, "manifest JSONL")->required();
    ingest->add_option("--out", ingest_args.out, "output documents JSONL")->required();

    FormatArgs format_args;
    auto* format = app.add_subcommand("format", "clean documents and render the six corpus formats");
    format->add_option("--docs", format_args.docs, "documents JSONL from ingest");
    format->add_option("--out", format_args.out, "output records JSONL")->required();
    format->add_option("--emit", format_args.emit, "per-document formats: markdown, section");
    format->add_option("--section-level", format_args.section_level, "heading level for sections");
    format->add_flag("--strict-sections", format_args.strict_sections, "error when no section heading");
    format->add_option("--clean-config", format_args.clean_config, "cleaning config JSON");
    format->add_option("--categories", format_args.categories, "CategoryEntry JSONL");
    format->add_option("--companies", format_args.companies, "CompanyRow JSONL");
    format->add_option("--items", format_args.items, "RephraseResult JSONL from synth");
    format->add_flag("--dedupe", format_args.dedupe_exact, "drop exact duplicate texts");
    format->add_flag("--near-dup", format_args.near_dup, "also drop near-duplicates");
    format->add_option("--near-dup-threshold", format_args.near_dup_threshold, "Jaccard threshold");

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand("synth", "rephrase passages into QA / MCQ items");
    synth_cmd->add_option("--passages", synth_args.passages, "passages JSONL (id, text)")->required();
    synth_cmd->add_option("--kind", synth_args.kind, "qa or mcq");
    synth_cmd->add_option("--backend", synth_args.backend, "backend spec");
    synth_cmd->add_option("--out", synth_args.out, "output results JSONL")->required();
    synth_cmd->add_option("--max-items", synth_args.max_items, "items per passage");
    synth_cmd->add_option("--failure-budget", synth_args.failure_budget, "consecutive failures allowed");
    synth_cmd->add_option("--qa-template", synth_args.qa_template, "QA prompt template file");
    synth_cmd->add_option("--mcq-template", synth_args.mcq_template, "MCQ prompt template file");
    synth_cmd->add_option("--retries", synth_args.retries, "HTTP attempt budget");
    synth_cmd->add_option("--backoff-ms", synth_args.backoff_ms, "HTTP initial backoff");
    synth_cmd->add_option("--timeout-ms", synth_args.timeout_ms, "HTTP timeout");

    PackArgs pack_args;
    auto* pack = app.add_subcommand("pack", "pack records into fixed-length training sequences");
    pack->add_option("--records", pack_args.records, "records JSONL")->required();
    pack->add_option("--out", pack_args.out, "packed sequences file")->required();
    pack->add_option("--max-len", pack_args.max_len, "max sequence length");
    pack->add_flag("--pad", pack_args.pad, "pad final sequences to max length");

    std::string stats_records;
    auto* stats = app.add_subcommand("stats", "corpus statistics");
    stats->add_option("--records", stats_records, "records JSONL")->required();

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "run the desk-scale reference trainer");
    train_cmd->add_option("--packed", train_args.packed, "packed sequences file")->required();
    train_cmd->add_option("--plan", train_args.plan_path, "plan manifest (defaults otherwise)");
    train_cmd->add_option("--curve", train_args.curve_out, "loss curve CSV output");
    train_cmd->add_option("--model", train_args.model_out, "trained model JSON output");
    train_cmd->add_option("--dim", train_args.model_dim, "model embedding dimension");
    train_cmd->add_flag("--mask-boundaries", train_args.mask_boundaries,
                        "exclude document-boundary targets from the loss");

    PlanArgs plan_args;
    auto* plan = app.add_subcommand("plan", "emit or check a training-plan manifest");
    plan->add_option("--out", plan_args.out, "output manifest path (stdout otherwise)");
    plan->add_option("--check", plan_args.check, "parse and validate an existing manifest");
    plan->add_option("--devices", plan_args.plan.devices, "device description");
    plan->add_option("--device-count", plan_args.plan.device_count, "device count");
    plan->add_option("--lr", plan_args.plan.lr_init, "initial learning rate");
    plan->add_option("--epochs", plan_args.plan.epochs, "epochs");
    plan->add_option("--global-batch", plan_args.plan.global_batch, "global batch size");
    plan->add_option("--per-device-batch", plan_args.plan.per_device_batch, "per-device batch size");
    plan->add_option("--max-seq-len", plan_args.plan.max_seq_len, "max sequence length");
    plan->add_option("--dtype", plan_args.plan.dtype, "numeric type tag");
    plan->add_option("--grad-accum", plan_args.plan.grad_accum, "gradient accumulation steps");

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "run the benchmark harness");
    eval_cmd->add_option("--task", eval_args.tasks, "task dataset as name=path (repeatable)");
    eval_cmd->add_option("--backend", eval_args.backend, "backend spec");
    eval_cmd->add_option("--report", eval_args.report_out, "report JSON output");
    eval_cmd->add_option("--audit", eval_args.audit_out, "per-item audit JSONL output");
    eval_cmd->add_option("--table", eval_args.table_out, "rendered table output");
    eval_cmd->add_option("--fewshots", eval_args.fewshots, "exemplars per prompt (default 0)");
    eval_cmd->add_option("--retries", eval_args.retries, "HTTP attempt budget");
    eval_cmd->add_option("--backoff-ms", eval_args.backoff_ms, "HTTP initial backoff");
    eval_cmd->add_option("--timeout-ms", eval_args.timeout_ms, "HTTP timeout");

    CompareArgs compare_args;
    auto* compare = app.add_subcommand("compare", "side-by-side outputs from two backends");
    compare->add_option("--prompts", compare_args.prompts, "prompt file, one per line")->required();
    compare->add_option("--backend-a", compare_args.backend_a, "first backend spec")->required();
    compare->add_option("--backend-b", compare_args.backend_b, "second backend spec")->required();
    compare->add_option("--out", compare_args.out, "markdown report output")->required();
    compare->add_option("--cases", compare_args.cases_out, "raw cases JSONL output");
    compare->add_option("--retries", compare_args.retries, "HTTP attempt budget");
    compare->add_option("--backoff-ms", compare_args.backoff_ms, "HTTP initial backoff");
    compare->add_option("--timeout-ms", compare_args.timeout_ms, "HTTP timeout");

    ReportArgs report_args;
    auto* report = app.add_subcommand("report", "render a models+diff table from two reports");
    report->add_option("--tuned", report_args.tuned, "tuned report JSON")->required();
    report->add_option("--original", report_args.original, "original report JSON")->required();
    report->add_option("--out", report_args.out, "table output (stdout otherwise)");
    report->add_option("--diff-json", report_args.diff_out, "diff JSON output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        std::cerr << app.help() << "\n";
        return 2;
    }

    try {
        load_effective_config(global, seed_opt->count() > 0, workers_opt->count() > 0);
        if (*ingest) run_ingest(global, ingest_args);
        else if (*format) run_format(global, format_args);
        else if (*synth_cmd) run_synth(global, synth_args);
        else if (*pack) run_pack(global, pack_args);
        else if (*stats) run_stats(stats_records);
        else if (*train_cmd) run_train(global, train_args);
        else if (*plan) run_plan(global, plan_args);
        else if (*eval_cmd) run_eval(global, eval_args);
        else if (*compare) run_compare(global, compare_args);
        else if (*report) run_report(global, report_args);
    } catch (const Error& e) {
        nlohmann::json err{{"error",
                            {{"category", std::string(category_name(e.category()))},
                             {"code", std::string(code_name(e.code()))},
                             {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        switch (e.category()) {
            case ErrorCategory::usage: return 2;
            case ErrorCategory::data: return 3;
            case ErrorCategory::backend: return 4;
        }
        return 3;
    } catch (const std::exception& e) {
        nlohmann::json err{{"error", {{"category", "data"}, {"code", "Unexpected"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 3;
    }
    return 0;
}
