/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DEBLOATFS_TRACE_HPP_
#define DEBLOATFS_TRACE_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "debloatfs/resolver.hpp"

namespace debloatfs {

struct TraceEvent {
    AccessOp    op = AccessOp::Read;
    std::string path;
    // Write payload.
    std::string payload;
    // Optional "sha256:<hex>" of the expected content.
    std::string expect;

    bool operator==(const TraceEvent&) const = default;
};

using AccessTrace = std::vector<TraceEvent>;

std::optional<AccessOp> ParseAccessOp(std::string_view text);

/**
 * Line-delimited JSON, one event per line:
 *
 *   {"op":"read","path":"/usr/bin/app","expect":"sha256:<hex>"}
 *   {"op":"write","path":"/tmp/x","data_b64":"aGVsbG8="}
 *
 * Blank lines are skipped. Paths must be absolute and are normalized.
 * Throws Error(BadTrace) naming the offending line.
 */
AccessTrace ParseTrace(std::string_view text);

AccessTrace LoadTrace(const std::filesystem::path& file);

std::string TraceToJsonl(const AccessTrace& trace);

} // namespace debloatfs

#endif
