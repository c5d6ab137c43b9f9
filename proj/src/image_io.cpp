/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "debloatfs/image_io.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "debloatfs/digest.hpp"
#include "debloatfs/error.hpp"
#include "debloatfs/tar.hpp"

namespace fs = std::filesystem;

namespace debloatfs {

namespace io {

std::string ReadFile(const fs::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + file.string());
    }

    std::ostringstream buffer;
    buffer << in.rdbuf();

    if (in.bad()) {
        throw Error(ErrorCode::IoError, "cannot read " + file.string());
    }

    return std::move(buffer).str();
}

void WriteFile(const fs::path& file, std::string_view data)
{
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot create " + file.string());
    }

    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();

    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + file.string());
    }
}

fs::path TempSibling(const fs::path& target)
{
    thread_local std::mt19937_64 rng {std::random_device {}()};

    auto name = target.filename().string();
    if (name.empty()) {
        name = target.parent_path().filename().string();
    }

    return target.parent_path() / (".tmp-" + name + "-" + std::to_string(rng() % 1000000000));
}

void ReplaceWith(const fs::path& source, const fs::path& target)
{
    std::error_code ec;

    if (fs::exists(target, ec)) {
        auto old = TempSibling(target);

        fs::rename(target, old, ec);
        if (ec) {
            throw Error(ErrorCode::IoError, "cannot move aside " + target.string() + ": " + ec.message());
        }

        fs::rename(source, target, ec);
        if (ec) {
            fs::rename(old, target);
            throw Error(ErrorCode::IoError, "cannot rename into " + target.string() + ": " + ec.message());
        }

        fs::remove_all(old, ec);

        return;
    }

    fs::rename(source, target, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot rename into " + target.string() + ": " + ec.message());
    }
}

} // namespace io

std::string ManifestToJson(const ImageManifest& manifest)
{
    nlohmann::json doc;

    doc["image_name"] = manifest.imageName;
    doc["layers"]     = manifest.layerDigests;
    doc["base_depth"] = manifest.baseDepth;

    return doc.dump(2) + "\n";
}

ImageManifest ManifestFromJson(const std::string& text)
{
    ImageManifest manifest;

    try {
        auto doc = nlohmann::json::parse(text);

        if (!doc.is_object() || !doc.contains("layers") || !doc["layers"].is_array()) {
            throw Error(ErrorCode::BadManifest, "manifest must be an object with a \"layers\" array");
        }

        if (!doc.contains("image_name") || !doc["image_name"].is_string()
            || doc["image_name"].get<std::string>().empty()) {
            throw Error(ErrorCode::BadManifest, "manifest needs a non-empty \"image_name\" string");
        }
        manifest.imageName = doc["image_name"].get<std::string>();

        for (const auto& layer : doc["layers"]) {
            if (!layer.is_string() || DigestHex(layer.get<std::string>()).empty()) {
                throw Error(ErrorCode::BadManifest, "malformed layer digest " + layer.dump());
            }

            manifest.layerDigests.push_back(layer.get<std::string>());
        }

        if (doc.contains("base_depth")) {
            const auto& depth = doc["base_depth"];

            if (!depth.is_number_unsigned() || depth.get<size_t>() > manifest.layerDigests.size()) {
                throw Error(ErrorCode::BadManifest, "base_depth out of range: " + depth.dump());
            }

            manifest.baseDepth = depth.get<size_t>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BadManifest, e.what());
    }

    return manifest;
}

ImageManifest ReadManifest(const fs::path& dir)
{
    auto file = dir / "manifest.json";

    if (!fs::is_regular_file(file)) {
        throw Error(ErrorCode::BadManifest, "no manifest.json in " + dir.string());
    }

    return ManifestFromJson(io::ReadFile(file));
}

LoadedImage LoadImage(const fs::path& dir, LayerCache* cache)
{
    LoadedImage image;

    image.bundle.manifest = ReadManifest(dir);

    std::vector<LayerPtr> roots;

    for (const auto& digest : image.bundle.manifest.layerDigests) {
        auto blobPath = dir / "blobs" / "sha256" / DigestHex(digest);

        if (!fs::is_regular_file(blobPath)) {
            throw Error(ErrorCode::MissingBlob, digest);
        }

        auto blob = std::make_shared<const std::string>(io::ReadFile(blobPath));

        if (Sha256Digest(*blob) != digest) {
            throw Error(ErrorCode::CorruptBlob, digest);
        }

        image.bundle.blobs.emplace(digest, blob);

        LayerPtr layer;
        if (cache) {
            if (auto it = cache->find(digest); it != cache->end()) {
                layer = it->second;
            }
        }

        if (!layer) {
            layer = Layer::Make(LayerRole::Image);

            for (auto& [_, entry] : tar::Read(*blob)) {
                layer->Put(std::move(entry));
            }

            layer->SetDigest(digest);
            layer->SetSourceBlob(blob);

            if (cache) {
                cache->emplace(digest, layer);
            }
        }

        roots.push_back(std::move(layer));
    }

    std::reverse(roots.begin(), roots.end());

    image.fs = ContainerFs::FromImageLayers(image.bundle.manifest.imageName, std::move(roots));

    return image;
}

std::shared_ptr<const std::string> LayerBlob(const Layer& layer)
{
    if (layer.SourceBlob()) {
        return layer.SourceBlob();
    }

    return std::make_shared<const std::string>(tar::WriteCanonical(layer.Entries()));
}

ImageManifest StoreImage(const ContainerFs& container, const fs::path& dir, size_t baseDepth)
{
    if (baseDepth > container.roots.size()) {
        throw Error(ErrorCode::InvalidBaseDepth, "base depth exceeds layer count");
    }

    for (const auto& root : container.roots) {
        if (root->Role() != LayerRole::Image) {
            throw Error(ErrorCode::InvalidArgument,
                "cannot store a " + std::string(ToString(root->Role())) + " layer; export first");
        }
    }

    ImageManifest manifest {container.id, {}, baseDepth};

    auto target = dir.lexically_normal();
    if (target.filename().empty()) {
        target = target.parent_path();
    }

    std::error_code ec;
    if (!target.parent_path().empty()) {
        fs::create_directories(target.parent_path(), ec);
    }

    auto tmp = io::TempSibling(target);

    try {
        fs::create_directories(tmp / "blobs" / "sha256", ec);
        if (ec) {
            throw Error(ErrorCode::IoError, "cannot create " + tmp.string() + ": " + ec.message());
        }

        for (auto it = container.roots.rbegin(); it != container.roots.rend(); ++it) {
            auto blob   = LayerBlob(**it);
            auto digest = Sha256Digest(*blob);

            io::WriteFile(tmp / "blobs" / "sha256" / DigestHex(digest), *blob);
            manifest.layerDigests.push_back(digest);
        }

        io::WriteFile(tmp / "manifest.json", ManifestToJson(manifest));
        io::ReplaceWith(tmp, target);
    } catch (...) {
        fs::remove_all(tmp, ec);
        throw;
    }

    return manifest;
}

} // namespace debloatfs
