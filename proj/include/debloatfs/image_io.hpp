/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DEBLOATFS_IMAGE_IO_HPP_
#define DEBLOATFS_IMAGE_IO_HPP_

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "debloatfs/layer.hpp"

namespace debloatfs {

/**
 * On-disk image layout:
 *
 *   <dir>/manifest.json          {"image_name", "layers": ["sha256:<hex>", ...], "base_depth"}
 *   <dir>/blobs/sha256/<hex>     canonical tar of one layer
 *
 * Layers are listed bottom to top. The bottom base_depth layers belong to
 * the base image.
 */
struct ImageManifest {
    std::string              imageName;
    std::vector<std::string> layerDigests;
    size_t                   baseDepth = 0;

    bool operator==(const ImageManifest&) const = default;
};

struct ImageBundle {
    ImageManifest                                                manifest;
    std::map<std::string, std::shared_ptr<const std::string>> blobs;
};

struct LoadedImage {
    ImageBundle bundle;
    ContainerFs fs;
};

// Makes repeated loads of the same blob digest return the same Layer object.
using LayerCache = std::map<std::string, LayerPtr>;

LoadedImage LoadImage(const std::filesystem::path& dir, LayerCache* cache = nullptr);

ImageManifest ReadManifest(const std::filesystem::path& dir);

/**
 * Writes every root layer of fs as an image. Unmodified loaded layers are
 * written from their original bytes; everything else is serialized
 * canonically. The directory is assembled under a temporary name and
 * renamed into place, replacing any previous content.
 */
ImageManifest StoreImage(const ContainerFs& fs, const std::filesystem::path& dir, size_t baseDepth = 0);

// Blob bytes StoreImage would write for this layer.
std::shared_ptr<const std::string> LayerBlob(const Layer& layer);

std::string   ManifestToJson(const ImageManifest& manifest);
ImageManifest ManifestFromJson(const std::string& text);

namespace io {

std::string ReadFile(const std::filesystem::path& file);
void        WriteFile(const std::filesystem::path& file, std::string_view data);

// Sibling temporary path used for write-then-rename.
std::filesystem::path TempSibling(const std::filesystem::path& target);

// Replaces target with source (directories or files).
void ReplaceWith(const std::filesystem::path& source, const std::filesystem::path& target);

} // namespace io

} // namespace debloatfs

#endif
