/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "debloatfs/resolver.hpp"

#include <algorithm>

#include "debloatfs/path.hpp"

namespace debloatfs {

namespace {

constexpr int      kMaxLinkHops      = 40;
constexpr uint32_t kDefaultDirMode   = 0755;
constexpr uint32_t kDefaultWriteMode = 0644;

std::string CheckedPath(std::string_view path)
{
    auto normalized = path::Normalize(path);
    if (path.empty()) {
        throw Error(ErrorCode::InvalidArgument, "empty path");
    }

    return normalized;
}

uint32_t ParentMode(const Layer& source, const std::vector<LayerPtr>& children, const std::string& dir)
{
    if (const auto* entry = source.Find(dir); entry && entry->kind == FileKind::Directory) {
        return entry->mode;
    }

    for (const auto& child : children) {
        if (const auto* entry = child->Find(dir); entry && entry->kind == FileKind::Directory) {
            return entry->mode;
        }
    }

    return kDefaultDirMode;
}

} // namespace

std::string_view ToString(AccessOp op)
{
    switch (op) {
    case AccessOp::Read:
        return "read";
    case AccessOp::Stat:
        return "stat";
    case AccessOp::List:
        return "list";
    case AccessOp::Write:
        return "write";
    }

    return "unknown";
}

DOpenResult TryDOpen(Layer& debloating, std::string_view path)
{
    std::lock_guard lock(debloating.Mutex());

    DOpenResult result;

    result.probes = 1;
    if (const auto* entry = debloating.Find(path)) {
        result.entry = *entry;
        return result;
    }

    const auto& children = debloating.Children();

    for (const auto& child : children) {
        ++result.probes;

        if (!child->Contains(path)) {
            continue;
        }

        for (const auto& dir : path::Ancestors(path)) {
            if (!debloating.Contains(dir)) {
                debloating.Put(FileEntry::Directory(dir, ParentMode(*child, children, dir)));
            }
        }

        debloating.Put(*child->Take(path));

        result.entry    = *debloating.Find(path);
        result.migrated = true;

        return result;
    }

    return result;
}

FileHandle DOpen(Layer& debloating, std::string_view path)
{
    if (debloating.Role() != LayerRole::Debloating) {
        throw Error(ErrorCode::InvalidArgument, "dopen on a " + std::string(ToString(debloating.Role())) + " layer");
    }

    auto normalized = CheckedPath(path);
    auto result     = TryDOpen(debloating, normalized);

    if (!result.entry) {
        throw Error(ErrorCode::NotFound, normalized);
    }

    return FileHandle {debloating.Id(), normalized, 0, std::move(*result.entry)};
}

std::optional<FileEntry> Peek(const ContainerFs& fs, std::string_view rawPath)
{
    auto path = path::Normalize(rawPath);

    if (fs.writeLayer) {
        if (const auto* entry = fs.writeLayer->Find(path)) {
            return *entry;
        }
    }

    for (const auto& root : fs.roots) {
        std::unique_lock<std::mutex> lock;
        if (root->Role() == LayerRole::Debloating) {
            lock = std::unique_lock(root->Mutex());
        }

        if (const auto* entry = root->Find(path)) {
            return *entry;
        }

        if (root->Role() == LayerRole::Debloating) {
            for (const auto& child : root->Children()) {
                if (const auto* entry = child->Find(path)) {
                    return *entry;
                }
            }
        }
    }

    return std::nullopt;
}

Resolver::Resolver(ContainerFs& fs)
    : mFs(fs)
{
}

AccessRecord Resolver::TakeRecord()
{
    std::lock_guard lock(mMutex);

    return std::exchange(mRecord, {});
}

void Resolver::Fail(AccessEvent event, ErrorCode code, const std::string& message)
{
    event.error = code;
    mRecord.push_back(std::move(event));

    throw Error(code, message);
}

FileEntry Resolver::Resolve(AccessOp op, const std::string& path)
{
    AccessEvent event {op, path};

    ++event.probes;
    if (const auto* entry = mFs.writeLayer->Find(path)) {
        event.hitLayer = mFs.writeLayer->Id();
        mRecord.push_back(event);

        return *entry;
    }

    for (const auto& root : mFs.roots) {
        if (root->Role() == LayerRole::Debloating) {
            auto result = TryDOpen(*root, path);

            event.probes += result.probes;
            if (result.entry) {
                event.hitLayer      = root->Id();
                event.debloatProbes = result.probes;
                event.migrated      = result.migrated;
                mRecord.push_back(event);

                return std::move(*result.entry);
            }

            continue;
        }

        ++event.probes;
        if (const auto* entry = root->Find(path)) {
            event.hitLayer = root->Id();
            mRecord.push_back(event);

            return *entry;
        }
    }

    Fail(std::move(event), ErrorCode::NotFound, path);
}

FileEntry Resolver::OpenLocked(const std::string& path, int hops)
{
    auto entry = Resolve(AccessOp::Read, path);

    if (entry.kind == FileKind::Directory) {
        mRecord.back().error = ErrorCode::IsDirectory;
        throw Error(ErrorCode::IsDirectory, path);
    }

    if (entry.kind == FileKind::Symlink) {
        if (hops >= kMaxLinkHops) {
            mRecord.back().error = ErrorCode::TooManyLinks;
            throw Error(ErrorCode::TooManyLinks, path);
        }

        return OpenLocked(path::ResolveLink(path, entry.linkTarget), hops + 1);
    }

    return entry;
}

FileHandle Resolver::Open(std::string_view rawPath)
{
    std::lock_guard lock(mMutex);

    auto path  = CheckedPath(rawPath);
    auto entry = OpenLocked(path, 0);

    return FileHandle {mRecord.back().hitLayer, entry.path, 0, std::move(entry)};
}

std::string Resolver::Read(FileHandle& handle, uint64_t capacity)
{
    auto bytes = handle.entry.Bytes();
    if (handle.cursor >= bytes.size()) {
        return {};
    }

    auto n = std::min<uint64_t>(capacity, bytes.size() - handle.cursor);
    auto out = std::string(bytes.substr(handle.cursor, n));

    handle.cursor += n;

    return out;
}

std::string Resolver::Read(std::string_view path, uint64_t capacity)
{
    auto handle = Open(path);

    return Read(handle, capacity);
}

FileEntry Resolver::Stat(std::string_view rawPath)
{
    std::lock_guard lock(mMutex);

    return Resolve(AccessOp::Stat, CheckedPath(rawPath));
}

std::set<std::string> Resolver::ListDir(std::string_view rawPath)
{
    std::lock_guard lock(mMutex);

    auto path   = CheckedPath(rawPath);
    auto layers = ReachableLayers(mFs);
    auto prefix = path == "/" ? std::string("/") : path + "/";

    std::set<std::string> names;
    for (const auto& layer : layers) {
        std::unique_lock<std::mutex> layerLock;
        if (layer->Role() == LayerRole::Debloating) {
            layerLock = std::unique_lock(layer->Mutex());
        }

        const auto& entries = layer->Entries();
        for (auto it = entries.lower_bound(prefix); it != entries.end() && it->first.starts_with(prefix); ++it) {
            auto rest = std::string_view(it->first).substr(prefix.size());
            names.emplace(rest.substr(0, rest.find('/')));
        }
    }

    if (path == "/") {
        mRecord.push_back(AccessEvent {AccessOp::List, path, mFs.writeLayer->Id(), 1});
        return names;
    }

    // The directory itself counts as used; its children do not.
    try {
        auto entry = Resolve(AccessOp::List, path);

        if (entry.kind != FileKind::Directory) {
            mRecord.back().error = ErrorCode::NotADirectory;
            throw Error(ErrorCode::NotADirectory, path);
        }
    } catch (const Error& e) {
        // A directory implied only by its descendants still lists.
        if (e.Code() != ErrorCode::NotFound || names.empty()) {
            throw;
        }

        mRecord.back().error.reset();
    }

    return names;
}

void Resolver::Write(std::string_view rawPath, std::string bytes)
{
    std::lock_guard lock(mMutex);

    auto        path = CheckedPath(rawPath);
    AccessEvent event {AccessOp::Write, path};

    event.probes = 1;
    if (path == "/") {
        Fail(std::move(event), ErrorCode::IsDirectory, path);
    }

    auto mode     = kDefaultWriteMode;
    auto existing = Peek(mFs, path);

    if (existing) {
        if (existing->kind == FileKind::Directory) {
            Fail(std::move(event), ErrorCode::IsDirectory, path);
        }

        if (existing->kind == FileKind::Regular) {
            mode = existing->mode;
        }
    }

    mFs.writeLayer->Put(FileEntry::Regular(path, std::move(bytes), mode));

    event.hitLayer = mFs.writeLayer->Id();
    mRecord.push_back(std::move(event));
}

} // namespace debloatfs
