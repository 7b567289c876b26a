#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "finlm/errors.hpp"
#include "finlm/generation.hpp"
#include "finlm/train_plan.hpp"
#include "finlm/util.hpp"
#include "finlm/version.hpp"

namespace finlm {

// Backend selector: "mock:echo", "mock:fixed:<text>", "http:<url>[:path]" or
// "reference:<model.json>".
struct BackendSpec {
    std::string spec = "mock:echo";
};

struct PipelineConfig {
    std::string manifest_path;
    std::string corpus_out;
    std::string packed_out;
    std::string reports_dir;
    std::string tokenizer = "byte";
    train::TrainPlan train_plan;
    gen::GenerationConfig generation;
    BackendSpec backend;
    std::uint64_t seed = 42;
    std::size_t workers = 1;
};

inline nlohmann::json to_json(const PipelineConfig& c) {
    return nlohmann::json{{"manifest", c.manifest_path},
                          {"corpus_out", c.corpus_out},
                          {"packed_out", c.packed_out},
                          {"reports_dir", c.reports_dir},
                          {"tokenizer", c.tokenizer},
                          {"train_plan", train::to_json(c.train_plan)},
                          {"generation", gen::to_json(c.generation)},
                          {"backend", c.backend.spec},
                          {"seed", c.seed},
                          {"workers", c.workers}};
}

inline PipelineConfig pipeline_config_from_json(const nlohmann::json& j) {
    PipelineConfig c;
    c.manifest_path = j.value("manifest", std::string{});
    c.corpus_out = j.value("corpus_out", std::string{});
    c.packed_out = j.value("packed_out", std::string{});
    c.reports_dir = j.value("reports_dir", std::string{});
    c.tokenizer = j.value("tokenizer", std::string("byte"));
    if (j.contains("train_plan")) c.train_plan = train::train_plan_from_json(j.at("train_plan"));
    if (j.contains("generation")) c.generation = gen::generation_config_from_json(j.at("generation"));
    if (j.contains("backend")) c.backend.spec = j.at("backend").get<std::string>();
    c.seed = j.value("seed", std::uint64_t{42});
    c.workers = j.value("workers", std::size_t{1});
    return c;
}

inline PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
    }
    return pipeline_config_from_json(j);
}

// Hash of the canonical (key-sorted, compact) config JSON.
inline std::string config_hash(const PipelineConfig& c) {
    return util::fnv1a64_hex(to_json(c).dump());
}

// ---------------------------------------------------------------------------
// Run-metadata headers. Timestamps live only here; --no-timestamp omits them
// so outputs are byte-reproducible.

struct RunMeta {
    std::uint64_t seed = 42;
    std::string config_hash;
    nlohmann::json config;  // effective config, echoed for round-tripping
    bool with_timestamp = true;
};

inline std::string iso_timestamp_utc() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

// Meta line for JSONL outputs; readers skip single-key "finlm_*" objects.
inline std::string jsonl_meta_line(const RunMeta& meta) {
    nlohmann::json inner{{"version", kVersion}, {"seed", meta.seed}, {"config_hash", meta.config_hash}};
    if (!meta.config.is_null()) inner["config"] = meta.config;
    if (meta.with_timestamp) inner["timestamp"] = iso_timestamp_utc();
    return nlohmann::json{{"finlm_meta", inner}}.dump();
}

// Comment header for CSV / markdown / manifest outputs.
inline std::string comment_meta_line(const RunMeta& meta) {
    std::string line = std::string("# finlm v") + kVersion + " seed=" + std::to_string(meta.seed) +
                       " config=" + meta.config_hash;
    if (meta.with_timestamp) line += " time=" + iso_timestamp_utc();
    return line;
}

}  // namespace finlm
