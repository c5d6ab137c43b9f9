/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DEBLOATFS_CONVERT_HPP_
#define DEBLOATFS_CONVERT_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "debloatfs/layer.hpp"

namespace debloatfs {

enum class ModeKind { NoSharing, FullySharing, SemiSharing };

std::string_view ToString(ModeKind kind);

// Accepts "no-sharing", "fully-sharing", "semi-sharing" (and '_' spellings).
std::optional<ModeKind> ParseModeKind(std::string_view text);

struct ConvertMode {
    ModeKind kind      = ModeKind::NoSharing;
    size_t   baseDepth = 0;

    // Number of unique top layers for an n-layer image.
    size_t UniqueDepth(size_t layerCount) const { return layerCount - baseDepth; }

    bool operator==(const ConvertMode&) const = default;
};

// Fleet-wide map from image layer digest to the debloating layer wrapping it.
using WrapperRegistry = std::map<std::string, LayerPtr>;

/**
 * One fresh debloating layer over all image layers. The children are
 * private copies of the original layers, so migrations never disturb other
 * containers that share the originals.
 */
ContainerFs ConvertNoSharing(const ContainerFs& fs);

/**
 * One debloating layer per image layer, shared fleet-wide by digest: every
 * container holding a layer with a given digest gets the same wrapper.
 * Layers without a digest are keyed by layer id. Each wrapped child is a
 * private copy; the input fleet is never mutated by later profiling.
 */
std::vector<ContainerFs> ConvertFullySharing(std::span<const ContainerFs> fleet, WrapperRegistry& registry);

std::vector<ContainerFs> ConvertFullySharing(std::span<const ContainerFs> fleet);

/**
 * A single debloating layer over the top n - baseDepth layers; the bottom
 * baseDepth base layers stay in place as the same objects.
 */
ContainerFs ConvertSemiSharing(const ContainerFs& fs, size_t baseDepth);

// Dispatches on mode; fully-sharing converts the fleet as a whole.
std::vector<ContainerFs> Convert(std::span<const ContainerFs> fleet, const ConvertMode& mode);

} // namespace debloatfs

#endif
