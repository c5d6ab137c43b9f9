/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "debloatfs/error.hpp"

namespace debloatfs {

std::string_view ToString(ErrorCode code)
{
    switch (code) {
    case ErrorCode::NotFound:
        return "NotFound";
    case ErrorCode::IsDirectory:
        return "IsDirectory";
    case ErrorCode::NotADirectory:
        return "NotADirectory";
    case ErrorCode::TooManyLinks:
        return "TooManyLinks";
    case ErrorCode::MissingBlob:
        return "MissingBlob";
    case ErrorCode::CorruptBlob:
        return "CorruptBlob";
    case ErrorCode::BadManifest:
        return "BadManifest";
    case ErrorCode::BadTrace:
        return "BadTrace";
    case ErrorCode::BadState:
        return "BadState";
    case ErrorCode::IoError:
        return "IoError";
    case ErrorCode::AlreadyConverted:
        return "AlreadyConverted";
    case ErrorCode::NotConverted:
        return "NotConverted";
    case ErrorCode::ExportBeforeConvert:
        return "ExportBeforeConvert";
    case ErrorCode::InvalidBaseDepth:
        return "InvalidBaseDepth";
    case ErrorCode::InvalidArgument:
        return "InvalidArgument";
    case ErrorCode::AnalysisFailed:
        return "AnalysisFailed";
    case ErrorCode::StateLocked:
        return "StateLocked";
    case ErrorCode::ContentMismatch:
        return "ContentMismatch";
    }

    return "Unknown";
}

} // namespace debloatfs
