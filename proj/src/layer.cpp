/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "debloatfs/layer.hpp"

#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "debloatfs/digest.hpp"
#include "debloatfs/error.hpp"
#include "debloatfs/path.hpp"

namespace debloatfs {

std::string_view ToString(FileKind kind)
{
    switch (kind) {
    case FileKind::Regular:
        return "regular";
    case FileKind::Directory:
        return "directory";
    case FileKind::Symlink:
        return "symlink";
    }

    return "unknown";
}

std::string_view ToString(LayerRole role)
{
    switch (role) {
    case LayerRole::Image:
        return "image";
    case LayerRole::Debloating:
        return "debloating";
    case LayerRole::Write:
        return "write";
    }

    return "unknown";
}

FileEntry FileEntry::Regular(std::string path, std::string bytes, uint32_t mode)
{
    return Regular(std::move(path), std::make_shared<const std::string>(std::move(bytes)), mode);
}

FileEntry FileEntry::Regular(std::string path, std::shared_ptr<const std::string> bytes, uint32_t mode)
{
    FileEntry entry;

    entry.path          = std::move(path);
    entry.kind          = FileKind::Regular;
    entry.size          = bytes->size();
    entry.contentDigest = Sha256Digest(*bytes);
    entry.mode          = mode;
    entry.content       = std::move(bytes);

    return entry;
}

FileEntry FileEntry::Directory(std::string path, uint32_t mode)
{
    FileEntry entry;

    entry.path = std::move(path);
    entry.kind = FileKind::Directory;
    entry.mode = mode;

    return entry;
}

FileEntry FileEntry::Symlink(std::string path, std::string target, uint32_t mode)
{
    FileEntry entry;

    entry.path       = std::move(path);
    entry.kind       = FileKind::Symlink;
    entry.size       = target.size();
    entry.mode       = mode;
    entry.linkTarget = std::move(target);

    return entry;
}

bool FileEntry::operator==(const FileEntry& other) const
{
    return path == other.path && kind == other.kind && size == other.size && contentDigest == other.contentDigest
        && mode == other.mode && linkTarget == other.linkTarget;
}

std::string NewLayerId()
{
    thread_local std::mt19937_64 rng {std::random_device {}()};
    static constexpr char        kHex[] = "0123456789abcdef";

    auto        value = rng();
    std::string id    = "layer-";

    for (int i = 0; i < 16; ++i) {
        id += kHex[(value >> (4 * i)) & 0xf];
    }

    return id;
}

Layer::Layer(LayerRole role, std::string id)
    : mId(std::move(id))
    , mRole(role)
{
}

const FileEntry* Layer::Find(std::string_view path) const
{
    auto it = mEntries.find(path);

    return it == mEntries.end() ? nullptr : &it->second;
}

void Layer::Put(FileEntry entry)
{
    if (!path::IsNormalized(entry.path) || entry.path == "/") {
        throw Error(ErrorCode::InvalidArgument, "entry path is not a normalized non-root path: " + entry.path);
    }

    mSourceBlob.reset();

    auto key = entry.path;
    mEntries.insert_or_assign(std::move(key), std::move(entry));
}

std::optional<FileEntry> Layer::Take(std::string_view path)
{
    auto it = mEntries.find(path);
    if (it == mEntries.end()) {
        return std::nullopt;
    }

    mSourceBlob.reset();

    auto entry = std::move(it->second);
    mEntries.erase(it);

    return entry;
}

void Layer::SetChildren(std::vector<LayerPtr> children)
{
    mChildren = std::move(children);
}

LayerPtr Layer::CloneShallow() const
{
    auto copy = Make(mRole, mId);

    copy->mEntries    = mEntries;
    copy->mDigest     = mDigest;
    copy->mSourceBlob = mSourceBlob;

    return copy;
}

ContainerFs ContainerFs::FromImageLayers(std::string id, std::vector<LayerPtr> roots)
{
    return ContainerFs {std::move(id), std::move(roots), Layer::Make(LayerRole::Write)};
}

bool ContainerFs::IsConverted() const
{
    for (const auto& root : roots) {
        if (root->Role() == LayerRole::Debloating) {
            return true;
        }
    }

    return false;
}

std::vector<LayerPtr> ReachableLayers(const ContainerFs& fs)
{
    std::vector<LayerPtr>          out;
    std::unordered_set<const Layer*> seen;

    auto add = [&](const LayerPtr& layer) {
        if (layer && seen.insert(layer.get()).second) {
            out.push_back(layer);
        }
    };

    add(fs.writeLayer);

    for (const auto& root : fs.roots) {
        add(root);

        for (const auto& child : root->Children()) {
            add(child);
        }
    }

    return out;
}

void ValidateContainer(const ContainerFs& fs)
{
    auto fail = [&](const std::string& what) { throw Error(ErrorCode::BadState, fs.id + ": " + what); };

    if (!fs.writeLayer || fs.writeLayer->Role() != LayerRole::Write || !fs.writeLayer->Children().empty()) {
        fail("missing or malformed write layer");
    }

    std::set<std::string>          ids {fs.writeLayer->Id()};
    std::unordered_set<const Layer*> rootSet;

    for (const auto& root : fs.roots) {
        rootSet.insert(root.get());
    }

    for (const auto& root : fs.roots) {
        if (!ids.insert(root->Id()).second) {
            fail("layer appears twice: " + root->Id());
        }

        switch (root->Role()) {
        case LayerRole::Image:
            if (!root->Children().empty()) {
                fail("image layer with children: " + root->Id());
            }
            break;
        case LayerRole::Debloating:
            for (const auto& child : root->Children()) {
                if (child->Role() != LayerRole::Image) {
                    fail("debloating child is not an image layer: " + child->Id());
                }
                if (rootSet.count(child.get())) {
                    fail("root layer is also a child: " + child->Id());
                }
                if (!ids.insert(child->Id()).second) {
                    fail("layer appears twice: " + child->Id());
                }
            }
            break;
        case LayerRole::Write:
            fail("write layer in root stack: " + root->Id());
        }
    }
}

uint64_t LayerSize(const Layer& layer)
{
    uint64_t total = 0;

    for (const auto& [_, entry] : layer.Entries()) {
        total += entry.size;
    }

    return total;
}

SizeAccount AccountSizes(std::span<const ContainerFs> containers)
{
    SizeAccount                              account;
    std::unordered_map<std::string, uint64_t> distinct;

    for (const auto& fs : containers) {
        uint64_t size = 0;

        for (const auto& layer : ReachableLayers(fs)) {
            auto bytes = LayerSize(*layer);

            size += bytes;
            distinct.emplace(layer->Id(), bytes);
        }

        account.perContainer[fs.id] = size;
    }

    for (const auto& [_, bytes] : distinct) {
        account.total += bytes;
    }

    return account;
}

std::vector<ContainerFs> CloneFleet(std::span<const ContainerFs> fleet)
{
    std::unordered_map<const Layer*, LayerPtr> copies;

    std::function<LayerPtr(const LayerPtr&)> copyOf = [&](const LayerPtr& layer) -> LayerPtr {
        if (!layer) {
            return nullptr;
        }

        if (auto it = copies.find(layer.get()); it != copies.end()) {
            return it->second;
        }

        auto copy = layer->CloneShallow();
        copies.emplace(layer.get(), copy);

        std::vector<LayerPtr> children;
        for (const auto& child : layer->Children()) {
            children.push_back(copyOf(child));
        }
        copy->SetChildren(std::move(children));

        return copy;
    };

    std::vector<ContainerFs> out;

    for (const auto& fs : fleet) {
        ContainerFs clone {fs.id, {}, copyOf(fs.writeLayer)};

        for (const auto& root : fs.roots) {
            clone.roots.push_back(copyOf(root));
        }

        out.push_back(std::move(clone));
    }

    return out;
}

} // namespace debloatfs
