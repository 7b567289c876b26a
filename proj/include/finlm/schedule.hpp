#pragma once

#include <cstdint>

#include "finlm/errors.hpp"

namespace finlm::train {

// Linear decay from lr_init at step 0 to exactly 0 at total_steps.
inline double lr_at(std::uint64_t step, std::uint64_t total_steps, double lr_init) {
    if (total_steps < 1) throw Error(ErrorCode::DomainError, "total_steps must be >= 1");
    if (step > total_steps) throw Error(ErrorCode::DomainError, "step out of range");
    if (step == total_steps) return 0.0;
    return lr_init * (1.0 - static_cast<double>(step) / static_cast<double>(total_steps));
}

}  // namespace finlm::train
