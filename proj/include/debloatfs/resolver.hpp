/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DEBLOATFS_RESOLVER_HPP_
#define DEBLOATFS_RESOLVER_HPP_

#include <cstdint>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "debloatfs/error.hpp"
#include "debloatfs/layer.hpp"

namespace debloatfs {

enum class AccessOp { Read, Stat, List, Write };

std::string_view ToString(AccessOp op);

struct AccessEvent {
    AccessOp    op = AccessOp::Read;
    std::string path;
    // Serving layer; empty on a miss.
    std::string hitLayer;
    // Layers examined, counting debloating layers and each probed child.
    uint32_t probes = 0;
    // Probes spent inside the debloating layer that served the path; 0 when
    // a plain layer served it.
    uint32_t                 debloatProbes = 0;
    bool                     migrated      = false;
    std::optional<ErrorCode> error;
    // Index of the trace event that caused this access, set by replay.
    size_t traceIndex = 0;

    bool Hit() const { return !hitLayer.empty(); }
};

using AccessRecord = std::vector<AccessEvent>;

struct FileHandle {
    std::string layerId;
    std::string path;
    uint64_t    cursor = 0;
    FileEntry   entry;
};

struct DOpenResult {
    // Entry as it now sits in the debloating layer; nullopt when absent.
    std::optional<FileEntry> entry;
    uint32_t                 probes   = 0;
    bool                     migrated = false;
};

/**
 * Looks the path up in a debloating layer. On a miss, probes its children
 * top to bottom and moves the first hit (plus any missing parent
 * directories) into the debloating layer. Holds the layer's mutex for the
 * whole lookup-and-move.
 */
DOpenResult TryDOpen(Layer& debloating, std::string_view path);

// Throwing form of TryDOpen returning a handle on the debloating layer.
FileHandle DOpen(Layer& debloating, std::string_view path);

// Resolves a path without migrating anything.
std::optional<FileEntry> Peek(const ContainerFs& fs, std::string_view path);

/**
 * Layered file access over one container, recording every access.
 *
 * Lookup order is the write layer, then the root layers top to bottom.
 * Reads and stats through a debloating layer migrate the entry out of the
 * child layer that held it. Directory listings never migrate. All calls on
 * one Resolver are serialized.
 */
class Resolver {
public:
    explicit Resolver(ContainerFs& fs);

    // Reads up to capacity bytes, following a final-component symlink.
    std::string Read(std::string_view path, uint64_t capacity);

    FileHandle  Open(std::string_view path);
    std::string Read(FileHandle& handle, uint64_t capacity);

    // Metadata of the path itself (a symlink is not followed).
    FileEntry Stat(std::string_view path);

    std::set<std::string> ListDir(std::string_view path);

    // Creates or replaces a regular file in the write layer.
    void Write(std::string_view path, std::string bytes);

    const AccessRecord& Record() const { return mRecord; }
    AccessRecord        TakeRecord();

private:
    FileEntry Resolve(AccessOp op, const std::string& path);
    FileEntry OpenLocked(const std::string& path, int hops);
    [[noreturn]] void Fail(AccessEvent event, ErrorCode code, const std::string& message);

    ContainerFs& mFs;
    AccessRecord mRecord;
    std::mutex   mMutex;
};

} // namespace debloatfs

#endif
