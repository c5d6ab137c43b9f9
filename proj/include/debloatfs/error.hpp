/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DEBLOATFS_ERROR_HPP_
#define DEBLOATFS_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace debloatfs {

enum class ErrorCode {
    NotFound,
    IsDirectory,
    NotADirectory,
    TooManyLinks,
    MissingBlob,
    CorruptBlob,
    BadManifest,
    BadTrace,
    BadState,
    IoError,
    AlreadyConverted,
    NotConverted,
    ExportBeforeConvert,
    InvalidBaseDepth,
    InvalidArgument,
    AnalysisFailed,
    StateLocked,
    ContentMismatch,
};

std::string_view ToString(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(ToString(code)) + ": " + message)
        , mCode(code)
    {
    }

    ErrorCode Code() const noexcept { return mCode; }

private:
    ErrorCode mCode;
};

} // namespace debloatfs

#endif
