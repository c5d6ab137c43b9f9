/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "debloatfs/convert.hpp"

#include <algorithm>

#include "debloatfs/error.hpp"

namespace debloatfs {

namespace {

void RequireImageRoots(const ContainerFs& fs)
{
    for (const auto& root : fs.roots) {
        if (root->Role() == LayerRole::Debloating) {
            throw Error(ErrorCode::AlreadyConverted, fs.id);
        }

        if (root->Role() != LayerRole::Image) {
            throw Error(ErrorCode::BadState, fs.id + ": root layer " + root->Id() + " is not an image layer");
        }
    }
}

LayerPtr PrivateCopy(const LayerPtr& layer)
{
    auto copy = Layer::Make(LayerRole::Image);

    for (const auto& [_, entry] : layer->Entries()) {
        copy->Put(entry);
    }

    copy->SetDigest(layer->Digest());
    copy->SetSourceBlob(layer->SourceBlob());

    return copy;
}

LayerPtr WrapInDebloating(std::span<const LayerPtr> children)
{
    auto debloating = Layer::Make(LayerRole::Debloating);

    std::vector<LayerPtr> copies;
    for (const auto& child : children) {
        copies.push_back(PrivateCopy(child));
    }

    debloating->SetChildren(std::move(copies));

    return debloating;
}

} // namespace

std::string_view ToString(ModeKind kind)
{
    switch (kind) {
    case ModeKind::NoSharing:
        return "no-sharing";
    case ModeKind::FullySharing:
        return "fully-sharing";
    case ModeKind::SemiSharing:
        return "semi-sharing";
    }

    return "unknown";
}

std::optional<ModeKind> ParseModeKind(std::string_view text)
{
    if (text == "no-sharing" || text == "no_sharing") {
        return ModeKind::NoSharing;
    }
    if (text == "fully-sharing" || text == "fully_sharing") {
        return ModeKind::FullySharing;
    }
    if (text == "semi-sharing" || text == "semi_sharing") {
        return ModeKind::SemiSharing;
    }

    return std::nullopt;
}

ContainerFs ConvertNoSharing(const ContainerFs& fs)
{
    RequireImageRoots(fs);

    return ContainerFs {fs.id, {WrapInDebloating(fs.roots)}, fs.writeLayer};
}

std::vector<ContainerFs> ConvertFullySharing(std::span<const ContainerFs> fleet, WrapperRegistry& registry)
{
    for (const auto& fs : fleet) {
        RequireImageRoots(fs);
    }

    std::vector<ContainerFs> out;

    for (const auto& fs : fleet) {
        ContainerFs converted {fs.id, {}, fs.writeLayer};

        for (const auto& root : fs.roots) {
            auto key = root->Digest().empty() ? root->Id() : root->Digest();
            auto it  = registry.find(key);

            if (it == registry.end()) {
                auto wrapper = Layer::Make(LayerRole::Debloating);

                wrapper->SetChildren({PrivateCopy(root)});
                it = registry.emplace(key, wrapper).first;
            }

            // Identical layers within one image collapse into one wrapper.
            if (std::find(converted.roots.begin(), converted.roots.end(), it->second) == converted.roots.end()) {
                converted.roots.push_back(it->second);
            }
        }

        out.push_back(std::move(converted));
    }

    return out;
}

std::vector<ContainerFs> ConvertFullySharing(std::span<const ContainerFs> fleet)
{
    WrapperRegistry registry;

    return ConvertFullySharing(fleet, registry);
}

ContainerFs ConvertSemiSharing(const ContainerFs& fs, size_t baseDepth)
{
    RequireImageRoots(fs);

    auto n = fs.roots.size();
    if (baseDepth >= n) {
        throw Error(ErrorCode::InvalidBaseDepth,
            fs.id + ": base depth " + std::to_string(baseDepth) + " leaves no unique layer in a "
                + std::to_string(n) + "-layer image");
    }

    auto unique = n - baseDepth;

    ContainerFs converted {fs.id, {WrapInDebloating(std::span(fs.roots).first(unique))}, fs.writeLayer};

    for (size_t i = unique; i < n; ++i) {
        converted.roots.push_back(fs.roots[i]);
    }

    return converted;
}

std::vector<ContainerFs> Convert(std::span<const ContainerFs> fleet, const ConvertMode& mode)
{
    if (mode.kind == ModeKind::FullySharing) {
        return ConvertFullySharing(fleet);
    }

    std::vector<ContainerFs> out;

    for (const auto& fs : fleet) {
        out.push_back(mode.kind == ModeKind::NoSharing ? ConvertNoSharing(fs) : ConvertSemiSharing(fs, mode.baseDepth));
    }

    return out;
}

} // namespace debloatfs
