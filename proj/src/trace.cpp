/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "debloatfs/trace.hpp"

#include <nlohmann/json.hpp>

#include "debloatfs/digest.hpp"
#include "debloatfs/image_io.hpp"
#include "debloatfs/path.hpp"

namespace debloatfs {

std::optional<AccessOp> ParseAccessOp(std::string_view text)
{
    for (auto op : {AccessOp::Read, AccessOp::Stat, AccessOp::List, AccessOp::Write}) {
        if (ToString(op) == text) {
            return op;
        }
    }

    return std::nullopt;
}

AccessTrace ParseTrace(std::string_view text)
{
    AccessTrace trace;
    size_t      lineNo = 0;
    size_t      pos    = 0;

    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }

        auto line = text.substr(pos, end - pos);
        pos       = end + 1;
        ++lineNo;

        if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
            continue;
        }

        auto bad = [&](const std::string& why) {
            return Error(ErrorCode::BadTrace, "line " + std::to_string(lineNo) + ": " + why);
        };

        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw bad(e.what());
        }

        if (!doc.is_object() || !doc.contains("op") || !doc["op"].is_string() || !doc.contains("path")
            || !doc["path"].is_string()) {
            throw bad("expected an object with string \"op\" and \"path\"");
        }

        TraceEvent event;

        auto op = ParseAccessOp(doc["op"].get<std::string>());
        if (!op) {
            throw bad("unknown op " + doc["op"].dump());
        }
        event.op = *op;

        auto rawPath = doc["path"].get<std::string>();
        if (rawPath.empty() || rawPath.front() != '/') {
            throw bad("path must be absolute: " + rawPath);
        }
        event.path = path::Normalize(rawPath);

        if (doc.contains("expect")) {
            if (!doc["expect"].is_string() || DigestHex(doc["expect"].get<std::string>()).empty()) {
                throw bad("expect must be \"sha256:<hex>\"");
            }
            event.expect = doc["expect"].get<std::string>();
        }

        if (event.op == AccessOp::Write) {
            if (!doc.contains("data_b64") || !doc["data_b64"].is_string()) {
                throw bad("write requires \"data_b64\"");
            }

            try {
                event.payload = Base64Decode(doc["data_b64"].get<std::string>());
            } catch (const Error& e) {
                throw bad(e.what());
            }
        }

        trace.push_back(std::move(event));
    }

    return trace;
}

AccessTrace LoadTrace(const std::filesystem::path& file)
{
    return ParseTrace(io::ReadFile(file));
}

std::string TraceToJsonl(const AccessTrace& trace)
{
    std::string out;

    for (const auto& event : trace) {
        nlohmann::ordered_json doc;

        doc["op"]   = ToString(event.op);
        doc["path"] = event.path;

        if (!event.expect.empty()) {
            doc["expect"] = event.expect;
        }
        if (event.op == AccessOp::Write) {
            doc["data_b64"] = Base64Encode(event.payload);
        }

        out += doc.dump() + "\n";
    }

    return out;
}

} // namespace debloatfs
