/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DEBLOATFS_PIPELINE_HPP_
#define DEBLOATFS_PIPELINE_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "debloatfs/layer.hpp"
#include "debloatfs/resolver.hpp"
#include "debloatfs/trace.hpp"

namespace debloatfs {

/**
 * Replays a trace through a converted container. Files read or stat'ed
 * through a debloating layer migrate into it. Per-event failures are
 * recorded in the returned record and never abort the replay.
 */
AccessRecord Profile(ContainerFs& fs, const AccessTrace& trace);

/**
 * Profiles each container with its own trace. With parallel set, every
 * container runs on its own thread; shared debloating layers serialize
 * migrations internally.
 */
std::vector<AccessRecord> ProfileFleet(
    std::span<ContainerFs> fleet, std::span<const AccessTrace> traces, bool parallel = false);

// Number of events in a record that failed.
size_t CountFailures(const AccessRecord& record);

/**
 * Drops all child image layers and the write layer. Each debloating root
 * becomes a frozen image layer (same id, canonical digest). Plain image
 * roots, i.e. semi-sharing base layers, are kept as they are.
 * Throws Error(ExportBeforeConvert) if fs has no debloating root.
 */
ContainerFs Export(const ContainerFs& fs);

// Like Export, but a debloating layer shared by several containers freezes
// into one shared object.
std::vector<ContainerFs> ExportFleet(std::span<const ContainerFs> fleet);

struct VerifyFailure {
    size_t      index = 0;
    std::string path;
    ErrorCode   reason = ErrorCode::NotFound;

    bool operator==(const VerifyFailure&) const = default;
};

struct VerifyReport {
    bool                       passed = true;
    std::vector<VerifyFailure> failures;
};

// Replays a trace against a debloated (or original) image. Writes go to a
// scratch write layer; fs is not modified.
VerifyReport Verify(const ContainerFs& fs, const AccessTrace& trace);

std::string VerifyReportToJson(const VerifyReport& report);

// Writes the resolved, flattened tree of fs into dir (replacing it).
void Materialize(const ContainerFs& fs, const std::filesystem::path& dir);

} // namespace debloatfs

#endif
