/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DEBLOATFS_FIXTURES_HPP_
#define DEBLOATFS_FIXTURES_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "debloatfs/layer.hpp"
#include "debloatfs/trace.hpp"

namespace debloatfs::fixtures {

constexpr uint64_t kMiB = uint64_t {1} << 20;

// Deterministic pseudo-random bytes keyed by name.
std::string Bytes(std::string_view name, uint64_t size);

// Builds an image layer and stamps it with its canonical digest.
LayerPtr MakeImageLayer(std::vector<FileEntry> entries);

/**
 * Two containers over the same two image layers: upper {/f1 1 MiB, /f2 2 MiB},
 * lower {/f3 3 MiB, /f4 4 MiB}. Both containers hold the same layer objects.
 */
std::vector<ContainerFs> TwoContainerFleet();

AccessTrace TraceOf(std::initializer_list<std::string> readPaths);

// [read /f1, read /f2] and [read /f2, read /f3].
std::vector<AccessTrace> TwoContainerTraces();

/**
 * Five-layer image whose bottom four layers form a base image; every layer
 * holds a handful of files under /layerN plus one shared-name file
 * (/etc/version) shadowed by each upper layer.
 */
ContainerFs FiveLayerImage();
constexpr size_t kFiveLayerBaseDepth = 4;

AccessTrace FiveLayerTrace();

// Web-server-like image: distro base, server install, config (~34 MiB).
ContainerFs WebServerImage();
constexpr size_t kWebServerBaseDepth = 1;

// Startup and request-serving accesses of the web server.
AccessTrace WebServerTrace();

/**
 * Writes every fixture as an image directory plus trace files:
 *
 *   pair-c1/ pair-c2/ pair-c1.trace pair-c2.trace
 *   semi5/ semi5.trace
 *   webserver/ webserver.trace
 */
void WriteAll(const std::filesystem::path& dir);

} // namespace debloatfs::fixtures

#endif
