/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DEBLOATFS_TAR_HPP_
#define DEBLOATFS_TAR_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "debloatfs/layer.hpp"

namespace debloatfs::tar {

/**
 * Serializes entries into a canonical uncompressed tar stream.
 *
 * Entries are written in byte order of their path, with zero mtime,
 * uid/gid 0, empty user/group names and no device numbers. Names that do
 * not fit the ustar fields get a pax extended header. Equal entry sets
 * always produce byte-identical archives.
 */
std::string WriteCanonical(const EntryMap& entries);

/**
 * Parses a tar stream into entries keyed by normalized absolute path.
 *
 * Understands ustar, pax `path`/`linkpath` records and GNU long names.
 * Throws Error(CorruptBlob) on checksum failures, truncation, or entry
 * types outside {regular, directory, symlink}.
 */
EntryMap Read(std::string_view archive);

} // namespace debloatfs::tar

#endif
