/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "debloatfs/state.hpp"

#include <map>
#include <unordered_map>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "debloatfs/digest.hpp"
#include "debloatfs/error.hpp"
#include "debloatfs/image_io.hpp"
#include "debloatfs/tar.hpp"

namespace fs = std::filesystem;

namespace debloatfs {

namespace {

constexpr int kStateVersion = 1;

std::optional<LayerRole> ParseRole(std::string_view text)
{
    for (auto role : {LayerRole::Image, LayerRole::Debloating, LayerRole::Write}) {
        if (ToString(role) == text) {
            return role;
        }
    }

    return std::nullopt;
}

fs::path NormalizedDir(const fs::path& dir)
{
    auto target = dir.lexically_normal();
    if (target.filename().empty()) {
        target = target.parent_path();
    }

    return target;
}

} // namespace

bool IsStateDir(const fs::path& dir)
{
    return fs::is_regular_file(dir / "state.json");
}

void SaveState(const EngineState& state, const fs::path& dir)
{
    nlohmann::ordered_json doc;

    doc["version"]        = kStateVersion;
    doc["mode"]           = std::string(ToString(state.mode.kind));
    doc["base_depth"]     = state.mode.baseDepth;
    doc["original_total"] = state.originalTotal;
    doc["profile_runs"]   = state.profileRuns;
    doc["containers"]     = nlohmann::json::array();
    doc["layers"]         = nlohmann::json::array();

    std::vector<LayerPtr>                  layers;
    std::unordered_map<const Layer*, bool> seen;

    auto visit = [&](const LayerPtr& layer) {
        if (seen.emplace(layer.get(), true).second) {
            layers.push_back(layer);
        }
    };

    for (size_t i = 0; i < state.fleet.size(); ++i) {
        const auto& container = state.fleet[i];

        nlohmann::ordered_json entry;
        entry["id"]            = container.id;
        entry["write"]         = container.writeLayer->Id();
        entry["roots"]         = nlohmann::json::array();
        entry["base_depth"]    = i < state.baseDepths.size() ? state.baseDepths[i] : 0;
        entry["original_size"] = i < state.originalSizes.size() ? state.originalSizes[i] : 0;

        for (const auto& layer : ReachableLayers(container)) {
            visit(layer);
        }
        for (const auto& root : container.roots) {
            entry["roots"].push_back(root->Id());
        }

        doc["containers"].push_back(std::move(entry));
    }

    auto target = NormalizedDir(dir);
    auto tmp    = io::TempSibling(target);

    std::error_code ec;
    if (!target.parent_path().empty()) {
        fs::create_directories(target.parent_path(), ec);
    }

    try {
        fs::create_directories(tmp / "blobs" / "sha256", ec);
        if (ec) {
            throw Error(ErrorCode::IoError, "cannot create " + tmp.string() + ": " + ec.message());
        }

        for (const auto& layer : layers) {
            std::unique_lock<std::mutex> lock(layer->Mutex());

            auto blob   = LayerBlob(*layer);
            auto digest = Sha256Digest(*blob);

            io::WriteFile(tmp / "blobs" / "sha256" / DigestHex(digest), *blob);

            nlohmann::ordered_json entry;
            entry["id"]       = layer->Id();
            entry["role"]     = std::string(ToString(layer->Role()));
            entry["digest"]   = layer->Digest();
            entry["blob"]     = digest;
            entry["children"] = nlohmann::json::array();

            for (const auto& child : layer->Children()) {
                entry["children"].push_back(child->Id());
            }

            doc["layers"].push_back(std::move(entry));
        }

        io::WriteFile(tmp / "state.json", doc.dump(2) + "\n");
        io::ReplaceWith(tmp, target);
    } catch (...) {
        fs::remove_all(tmp, ec);
        throw;
    }
}

EngineState LoadState(const fs::path& dir)
{
    if (!IsStateDir(dir)) {
        throw Error(ErrorCode::BadState, "no state.json in " + dir.string());
    }

    EngineState state;

    try {
        auto doc = nlohmann::json::parse(io::ReadFile(dir / "state.json"));

        if (doc.at("version").get<int>() != kStateVersion) {
            throw Error(ErrorCode::BadState, "unsupported state version " + doc.at("version").dump());
        }

        auto mode = ParseModeKind(doc.at("mode").get<std::string>());
        if (!mode) {
            throw Error(ErrorCode::BadState, "unknown mode " + doc.at("mode").dump());
        }

        state.mode          = {*mode, doc.at("base_depth").get<size_t>()};
        state.originalTotal = doc.at("original_total").get<uint64_t>();
        state.profileRuns   = doc.value("profile_runs", size_t {0});

        std::map<std::string, LayerPtr>                 byId;
        std::map<std::string, std::vector<std::string>> childIds;

        for (const auto& entry : doc.at("layers")) {
            auto id   = entry.at("id").get<std::string>();
            auto role = ParseRole(entry.at("role").get<std::string>());
            if (!role) {
                throw Error(ErrorCode::BadState, "unknown layer role " + entry.at("role").dump());
            }

            auto blobDigest = entry.at("blob").get<std::string>();
            auto blobPath   = dir / "blobs" / "sha256" / DigestHex(blobDigest);

            if (!fs::is_regular_file(blobPath)) {
                throw Error(ErrorCode::MissingBlob, blobDigest);
            }

            auto blob = std::make_shared<const std::string>(io::ReadFile(blobPath));
            if (Sha256Digest(*blob) != blobDigest) {
                throw Error(ErrorCode::CorruptBlob, blobDigest);
            }

            auto layer = Layer::Make(*role, id);
            for (auto& [_, file] : tar::Read(*blob)) {
                layer->Put(std::move(file));
            }

            layer->SetDigest(entry.at("digest").get<std::string>());
            if (*role == LayerRole::Image && layer->Digest() == blobDigest) {
                layer->SetSourceBlob(blob);
            }

            childIds[id] = entry.at("children").get<std::vector<std::string>>();
            byId.emplace(id, layer);
        }

        auto lookup = [&](const std::string& id) {
            auto it = byId.find(id);
            if (it == byId.end()) {
                throw Error(ErrorCode::BadState, "dangling layer reference " + id);
            }
            return it->second;
        };

        for (auto& [id, children] : childIds) {
            std::vector<LayerPtr> resolved;
            for (const auto& child : children) {
                resolved.push_back(lookup(child));
            }
            byId.at(id)->SetChildren(std::move(resolved));
        }

        for (const auto& entry : doc.at("containers")) {
            ContainerFs container {entry.at("id").get<std::string>(), {}, lookup(entry.at("write").get<std::string>())};

            for (const auto& root : entry.at("roots")) {
                container.roots.push_back(lookup(root.get<std::string>()));
            }

            ValidateContainer(container);

            state.fleet.push_back(std::move(container));
            state.baseDepths.push_back(entry.at("base_depth").get<size_t>());
            state.originalSizes.push_back(entry.at("original_size").get<uint64_t>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BadState, e.what());
    }

    return state;
}

StateLock::StateLock(const fs::path& dir)
    : mPath(NormalizedDir(dir).string() + ".lock")
{
    std::error_code ec;
    if (!mPath.parent_path().empty()) {
        fs::create_directories(mPath.parent_path(), ec);
    }

    mFd = ::open(mPath.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (mFd < 0) {
        throw Error(ErrorCode::IoError, "cannot open lock file " + mPath.string());
    }

    if (::flock(mFd, LOCK_EX | LOCK_NB) != 0) {
        ::close(mFd);
        mFd = -1;
        throw Error(ErrorCode::StateLocked, mPath.string());
    }
}

StateLock::~StateLock()
{
    if (mFd >= 0) {
        ::flock(mFd, LOCK_UN);
        ::close(mFd);
    }
}

} // namespace debloatfs
