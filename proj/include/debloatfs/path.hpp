/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DEBLOATFS_PATH_HPP_
#define DEBLOATFS_PATH_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace debloatfs::path {

/**
 * Normalizes a path into the absolute, `/`-separated form used by layers:
 * leading `/`, no trailing `/` (except the root), no empty, `.` or `..`
 * components. `..` at the root stays at the root. Relative input is taken
 * relative to `/`.
 */
std::string Normalize(std::string_view path);

bool IsNormalized(std::string_view path);

// Parent of a normalized path; the parent of "/" is "/".
std::string Parent(std::string_view path);

// Last component of a normalized path; empty for "/".
std::string BaseName(std::string_view path);

// Resolves a symlink target relative to the directory holding the link.
std::string ResolveLink(std::string_view linkPath, std::string_view target);

// Strict ancestors of a normalized path, outermost first, excluding "/".
std::vector<std::string> Ancestors(std::string_view path);

} // namespace debloatfs::path

#endif
