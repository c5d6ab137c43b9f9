/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DEBLOATFS_LAYER_HPP_
#define DEBLOATFS_LAYER_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace debloatfs {

enum class FileKind { Regular, Directory, Symlink };

std::string_view ToString(FileKind kind);

/**
 * One file system object inside a layer.
 *
 * Regular file content is held by a shared immutable buffer so moving an
 * entry between layers, or cloning a layer, never copies file bytes.
 */
struct FileEntry {
    std::string                        path;
    FileKind                           kind = FileKind::Regular;
    uint64_t                           size = 0;
    std::string                        contentDigest;
    uint32_t                           mode = 0644;
    std::string                        linkTarget;
    std::shared_ptr<const std::string> content;

    static FileEntry Regular(std::string path, std::string bytes, uint32_t mode = 0644);
    static FileEntry Regular(std::string path, std::shared_ptr<const std::string> bytes, uint32_t mode = 0644);
    static FileEntry Directory(std::string path, uint32_t mode = 0755);
    static FileEntry Symlink(std::string path, std::string target, uint32_t mode = 0777);

    std::string_view Bytes() const { return content ? std::string_view(*content) : std::string_view(); }

    // Compares metadata and content digest, not buffer identity.
    bool operator==(const FileEntry& other) const;
};

enum class LayerRole { Image, Debloating, Write };

std::string_view ToString(LayerRole role);

class Layer;

using LayerPtr = std::shared_ptr<Layer>;

using EntryMap = std::map<std::string, FileEntry, std::less<>>;

// Random identifier; layer ids stay stable across state persistence.
std::string NewLayerId();

/**
 * A named set of file entries.
 *
 * Image layers carry the digest of their canonical serialization and,
 * when loaded from disk, the original blob bytes. Any entry mutation drops
 * the cached blob so it can never be written out stale.
 */
class Layer {
public:
    explicit Layer(LayerRole role, std::string id = NewLayerId());

    Layer(const Layer&)            = delete;
    Layer& operator=(const Layer&) = delete;

    static LayerPtr Make(LayerRole role, std::string id = NewLayerId())
    {
        return std::make_shared<Layer>(role, std::move(id));
    }

    const std::string& Id() const { return mId; }
    LayerRole          Role() const { return mRole; }
    void               SetRole(LayerRole role) { mRole = role; }

    const EntryMap&  Entries() const { return mEntries; }
    const FileEntry* Find(std::string_view path) const;
    bool             Contains(std::string_view path) const { return Find(path) != nullptr; }

    // Inserts or replaces the entry at entry.path (must be normalized, not "/").
    void Put(FileEntry entry);

    // Removes and returns the entry at path.
    std::optional<FileEntry> Take(std::string_view path);

    const std::vector<LayerPtr>& Children() const { return mChildren; }
    void                         SetChildren(std::vector<LayerPtr> children);

    const std::string& Digest() const { return mDigest; }
    void               SetDigest(std::string digest) { mDigest = std::move(digest); }

    const std::shared_ptr<const std::string>& SourceBlob() const { return mSourceBlob; }
    void SetSourceBlob(std::shared_ptr<const std::string> blob) { mSourceBlob = std::move(blob); }

    // Serializes migrations into this layer across every container sharing it.
    std::mutex& Mutex() const { return mMutex; }

    // Copies id, role, entries, digest and blob; children are left to the caller.
    LayerPtr CloneShallow() const;

private:
    std::string                        mId;
    LayerRole                          mRole;
    EntryMap                           mEntries;
    std::vector<LayerPtr>              mChildren;
    std::string                        mDigest;
    std::shared_ptr<const std::string> mSourceBlob;
    mutable std::mutex                 mMutex;
};

/**
 * A container file system: write layer above an ordered stack of root
 * layers (top to bottom).
 */
struct ContainerFs {
    std::string           id;
    std::vector<LayerPtr> roots;
    LayerPtr              writeLayer;

    // Wraps image layers (top to bottom) with a fresh empty write layer.
    static ContainerFs FromImageLayers(std::string id, std::vector<LayerPtr> roots);

    bool IsConverted() const;
};

// Write layer, root layers and their children; each object once.
std::vector<LayerPtr> ReachableLayers(const ContainerFs& fs);

// Throws Error(BadState) if a ContainerFs invariant does not hold.
void ValidateContainer(const ContainerFs& fs);

uint64_t LayerSize(const Layer& layer);

struct SizeAccount {
    std::map<std::string, uint64_t> perContainer;
    uint64_t                        total = 0;
};

SizeAccount AccountSizes(std::span<const ContainerFs> containers);

// Deep copy that keeps layer sharing (by object) and layer ids.
std::vector<ContainerFs> CloneFleet(std::span<const ContainerFs> fleet);

} // namespace debloatfs

#endif
