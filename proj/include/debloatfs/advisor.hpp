/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DEBLOATFS_ADVISOR_HPP_
#define DEBLOATFS_ADVISOR_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "debloatfs/convert.hpp"
#include "debloatfs/layer.hpp"
#include "debloatfs/trace.hpp"

namespace debloatfs {

constexpr uint64_t kDefaultEpsilon   = 1;
constexpr double   kDefaultThreshold = 1.0;

/**
 * Sharing trade-off of a fleet debloated both ways.
 *
 *   alpha = sum(s_i) - t'           bytes duplicated by not sharing
 *   beta  = sum(s'_i - s_i)         bytes of unneeded files kept by sharing
 *   theta = alpha / beta, or alpha / epsilon when beta is 0
 *
 * s_i / t are the no-sharing per-container sizes and total, s'_i / t' the
 * fully-sharing ones. Fully-sharing is recommended when theta >= threshold.
 */
struct ModeReport {
    std::vector<std::string> containers;
    std::vector<uint64_t>    noSharingSizes;
    std::vector<uint64_t>    fullySharingSizes;
    uint64_t                 noSharingTotal    = 0;
    uint64_t                 fullySharingTotal = 0;
    int64_t                  alpha             = 0;
    int64_t                  beta              = 0;
    uint64_t                 epsilon           = kDefaultEpsilon;
    double                   theta             = 0.0;
    double                   threshold         = kDefaultThreshold;
    ModeKind                 recommendation    = ModeKind::NoSharing;
};

// Fills alpha, beta, theta and the recommendation from measured sizes.
ModeReport ComputeModeReport(std::vector<std::string> containers, std::vector<uint64_t> noSharingSizes,
    uint64_t noSharingTotal, std::vector<uint64_t> fullySharingSizes, uint64_t fullySharingTotal,
    uint64_t epsilon = kDefaultEpsilon, double threshold = kDefaultThreshold);

/**
 * Debloats clones of the fleet under no-sharing and fully-sharing, one
 * trace per container, and measures both outcomes. The caller's fleet is
 * left untouched. Throws Error(AnalysisFailed) when a trace event fails.
 */
ModeReport Analyze(std::span<const ContainerFs> fleet, std::span<const AccessTrace> traces,
    double threshold = kDefaultThreshold, uint64_t epsilon = kDefaultEpsilon);

// epsilon only stands in for a zero denominator; it never perturbs beta > 0.
double ComputeTheta(int64_t alpha, int64_t beta, uint64_t epsilon = kDefaultEpsilon);

ModeKind    SelectMode(double theta, double threshold = kDefaultThreshold);
ConvertMode SelectMode(const ModeReport& report, double threshold);

std::string ModeReportToJson(const ModeReport& report);

} // namespace debloatfs

#endif
