/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DEBLOATFS_DIGEST_HPP_
#define DEBLOATFS_DIGEST_HPP_

#include <string>
#include <string_view>

namespace debloatfs {

// Lowercase hex SHA-256 of data, without the "sha256:" prefix.
std::string Sha256Hex(std::string_view data);

// "sha256:<hex>" form used in manifests, traces and reports.
std::string Sha256Digest(std::string_view data);

// Strips the "sha256:" prefix and validates 64 lowercase hex characters.
// Returns an empty string on malformed input.
std::string DigestHex(std::string_view digest);

std::string Base64Encode(std::string_view data);

// Throws Error(InvalidArgument) on malformed input.
std::string Base64Decode(std::string_view text);

} // namespace debloatfs

#endif
