/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DEBLOATFS_STATE_HPP_
#define DEBLOATFS_STATE_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "debloatfs/convert.hpp"
#include "debloatfs/layer.hpp"

namespace debloatfs {

/**
 * Converted fleet persisted between pipeline steps.
 *
 *   <dir>/state.json             mode, containers, layer graph, original sizes
 *   <dir>/blobs/sha256/<hex>     one tar per layer, current contents
 *
 * Layer ids and sharing survive a save/load cycle; image layers that were
 * never mutated keep their original blob bytes.
 */
struct EngineState {
    ConvertMode              mode;
    std::vector<ContainerFs> fleet;
    // Bottom layers kept as base image per container (semi-sharing).
    std::vector<size_t>   baseDepths;
    std::vector<uint64_t> originalSizes;
    uint64_t              originalTotal = 0;
    size_t                profileRuns   = 0;
};

bool IsStateDir(const std::filesystem::path& dir);

void        SaveState(const EngineState& state, const std::filesystem::path& dir);
EngineState LoadState(const std::filesystem::path& dir);

/**
 * Exclusive advisory lock on <dir>.lock for the lifetime of the object.
 * Throws Error(StateLocked) if another process holds it.
 */
class StateLock {
public:
    explicit StateLock(const std::filesystem::path& dir);
    ~StateLock();

    StateLock(const StateLock&)            = delete;
    StateLock& operator=(const StateLock&) = delete;

private:
    std::filesystem::path mPath;
    int                   mFd = -1;
};

} // namespace debloatfs

#endif
