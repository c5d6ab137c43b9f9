/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DEBLOATFS_TESTS_CORPUS_HPP_
#define DEBLOATFS_TESTS_CORPUS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "debloatfs/convert.hpp"
#include "debloatfs/layer.hpp"
#include "debloatfs/trace.hpp"

namespace debloatfs::testing {

/**
 * One randomized fleet: up to 6 distinct image layers drawn from a shared
 * pool, at most 64 distinct paths with shadowing, symlinks (relative,
 * absolute, chained, dangling) and one trace per container.
 */
struct Instance {
    uint64_t                 seed = 0;
    std::vector<ContainerFs> fleet;
    std::vector<AccessTrace> traces;
    // Per-container base depth for semi-sharing.
    std::vector<size_t>      baseDepths;
    std::vector<std::string> payloads;
};

Instance MakeInstance(uint64_t seed);

/**
 * Outcome of pushing one instance through convert, profile, export and
 * verify in one mode. Each field is empty when its check holds, otherwise
 * it describes the first violation.
 */
struct CheckResult {
    std::string equivalence;
    std::string soundness;
    std::string minimality;
    std::string warmPath;
    std::string privacy;
    std::string conservation;
    size_t      events = 0;
};

CheckResult CheckInstance(const Instance& instance, ModeKind mode);

} // namespace debloatfs::testing

#endif
