#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "finlm/errors.hpp"
#include "finlm/util.hpp"

namespace finlm::train {

enum class Schedule { linear_to_zero };

inline std::string to_string(Schedule s) {
    (void)s;
    return "linear_to_zero";
}

inline Schedule schedule_from(const std::string& s) {
    if (s == "linear_to_zero") return Schedule::linear_to_zero;
    throw Error(ErrorCode::InvalidPlan, "unknown schedule: " + s);
}

// Hyperparameter manifest for a continual pre-training run. Defaults are the
// full-scale setup; the reference trainer consumes the same plan at desk
// scale.
struct TrainPlan {
    std::string devices = "A100 80GB x4";
    int device_count = 4;
    double lr_init = 5e-7;
    Schedule schedule = Schedule::linear_to_zero;
    int epochs = 5;
    int global_batch = 24;
    int per_device_batch = 6;
    int max_seq_len = 2048;
    std::string dtype = "bf16";
    int grad_accum = 1;
    bool grad_checkpointing = true;

    bool operator==(const TrainPlan&) const = default;
};

inline void validate(const TrainPlan& plan) {
    if (plan.lr_init < 0) throw Error(ErrorCode::InvalidPlan, "lr_init must be >= 0");
    if (plan.epochs < 1) throw Error(ErrorCode::InvalidPlan, "epochs must be >= 1");
    if (plan.device_count < 1) throw Error(ErrorCode::InvalidPlan, "device_count must be >= 1");
    if (plan.per_device_batch < 1) throw Error(ErrorCode::InvalidPlan, "per_device_batch must be >= 1");
    if (plan.max_seq_len < 1) throw Error(ErrorCode::InvalidPlan, "max_seq_len must be >= 1");
    if (plan.grad_accum < 1) throw Error(ErrorCode::InvalidPlan, "grad_accum must be >= 1");
    if (plan.global_batch != plan.per_device_batch * plan.device_count)
        throw Error(ErrorCode::InvalidPlan,
                    "global_batch (" + std::to_string(plan.global_batch) + ") != per_device_batch x device_count (" +
                        std::to_string(plan.per_device_batch * plan.device_count) + ")");
}

// Flat key=value manifest, fixed key order, one field per line. Round-trips
// through parse_training_plan exactly.
inline std::string emit_training_plan(const TrainPlan& plan) {
    validate(plan);
    std::string out;
    out += "devices=" + plan.devices + "\n";
    out += "device_count=" + std::to_string(plan.device_count) + "\n";
    out += "lr_init=" + util::format_double(plan.lr_init) + "\n";
    out += "schedule=" + to_string(plan.schedule) + "\n";
    out += "epochs=" + std::to_string(plan.epochs) + "\n";
    out += "global_batch=" + std::to_string(plan.global_batch) + "\n";
    out += "per_device_batch=" + std::to_string(plan.per_device_batch) + "\n";
    out += "max_seq_len=" + std::to_string(plan.max_seq_len) + "\n";
    out += "dtype=" + plan.dtype + "\n";
    out += "grad_accum=" + std::to_string(plan.grad_accum) + "\n";
    out += std::string("grad_checkpointing=") + (plan.grad_checkpointing ? "true" : "false") + "\n";
    return out;
}

inline TrainPlan parse_training_plan(const std::string& manifest) {
    TrainPlan plan;
    for (const auto& line : util::split_lines(manifest)) {
        std::string_view sv = util::trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        std::size_t eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCode::InvalidPlan, "manifest line without '=': " + std::string(sv));
        std::string key(sv.substr(0, eq));
        std::string value(sv.substr(eq + 1));
        try {
            if (key == "devices") plan.devices = value;
            else if (key == "device_count") plan.device_count = std::stoi(value);
            else if (key == "lr_init") plan.lr_init = std::stod(value);
            else if (key == "schedule") plan.schedule = schedule_from(value);
            else if (key == "epochs") plan.epochs = std::stoi(value);
            else if (key == "global_batch") plan.global_batch = std::stoi(value);
            else if (key == "per_device_batch") plan.per_device_batch = std::stoi(value);
            else if (key == "max_seq_len") plan.max_seq_len = std::stoi(value);
            else if (key == "dtype") plan.dtype = value;
            else if (key == "grad_accum") plan.grad_accum = std::stoi(value);
            else if (key == "grad_checkpointing") plan.grad_checkpointing = (value == "true" || value == "1");
            else throw Error(ErrorCode::InvalidPlan, "unknown manifest key: " + key);
        } catch (const std::invalid_argument&) {
            throw Error(ErrorCode::InvalidPlan, "bad value for " + key + ": " + value);
        } catch (const std::out_of_range&) {
            throw Error(ErrorCode::InvalidPlan, "bad value for " + key + ": " + value);
        }
    }
    validate(plan);
    return plan;
}

inline nlohmann::json to_json(const TrainPlan& plan) {
    return nlohmann::json{{"devices", plan.devices},
                          {"device_count", plan.device_count},
                          {"lr_init", plan.lr_init},
                          {"schedule", to_string(plan.schedule)},
                          {"epochs", plan.epochs},
                          {"global_batch", plan.global_batch},
                          {"per_device_batch", plan.per_device_batch},
                          {"max_seq_len", plan.max_seq_len},
                          {"dtype", plan.dtype},
                          {"grad_accum", plan.grad_accum},
                          {"grad_checkpointing", plan.grad_checkpointing}};
}

inline TrainPlan train_plan_from_json(const nlohmann::json& j) {
    TrainPlan plan;
    plan.devices = j.value("devices", plan.devices);
    plan.device_count = j.value("device_count", plan.device_count);
    plan.lr_init = j.value("lr_init", plan.lr_init);
    if (j.contains("schedule")) plan.schedule = schedule_from(j.at("schedule").get<std::string>());
    plan.epochs = j.value("epochs", plan.epochs);
    plan.global_batch = j.value("global_batch", plan.global_batch);
    plan.per_device_batch = j.value("per_device_batch", plan.per_device_batch);
    plan.max_seq_len = j.value("max_seq_len", plan.max_seq_len);
    plan.dtype = j.value("dtype", plan.dtype);
    plan.grad_accum = j.value("grad_accum", plan.grad_accum);
    plan.grad_checkpointing = j.value("grad_checkpointing", plan.grad_checkpointing);
    validate(plan);
    return plan;
}

}  // namespace finlm::train
