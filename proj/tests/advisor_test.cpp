/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "debloatfs/advisor.hpp"
#include "debloatfs/error.hpp"
#include "debloatfs/fixtures.hpp"

namespace debloatfs {
namespace {

using fixtures::kMiB;

TEST(Advisor, TwoContainerExample)
{
    auto fleet  = fixtures::TwoContainerFleet();
    auto report = Analyze(fleet, fixtures::TwoContainerTraces());

    EXPECT_EQ(report.containers, (std::vector<std::string> {"pair-c1", "pair-c2"}));
    EXPECT_EQ(report.noSharingSizes, (std::vector<uint64_t> {3 * kMiB, 5 * kMiB}));
    EXPECT_EQ(report.fullySharingSizes, (std::vector<uint64_t> {6 * kMiB, 6 * kMiB}));
    EXPECT_EQ(report.noSharingTotal, 8 * kMiB);
    EXPECT_EQ(report.fullySharingTotal, 6 * kMiB);
    EXPECT_EQ(report.alpha, static_cast<int64_t>(2 * kMiB));
    EXPECT_EQ(report.beta, static_cast<int64_t>(4 * kMiB));
    EXPECT_NEAR(report.theta, 0.5, 1e-9);
    EXPECT_EQ(report.recommendation, ModeKind::NoSharing);
}

TEST(Advisor, AnalysisLeavesTheFleetUntouched)
{
    auto fleet = fixtures::TwoContainerFleet();
    auto top   = fleet[0].roots[0]->Entries();

    Analyze(fleet, fixtures::TwoContainerTraces());
    EXPECT_EQ(fleet[0].roots[0]->Entries(), top);
    EXPECT_FALSE(fleet[0].IsConverted());
    EXPECT_TRUE(fleet[0].writeLayer->Entries().empty());
}

TEST(Advisor, FailingEventsAbortTheAnalysis)
{
    auto fleet = fixtures::TwoContainerFleet();
    std::vector<AccessTrace> traces {fixtures::TraceOf({"/f1"}), fixtures::TraceOf({"/missing"})};

    try {
        Analyze(fleet, traces);
        FAIL();
    } catch (const Error& err) {
        EXPECT_EQ(err.Code(), ErrorCode::AnalysisFailed);
    }

    std::vector<AccessTrace> tooFew {fixtures::TraceOf({"/f1"})};
    EXPECT_THROW(Analyze(fleet, tooFew), Error);
}

TEST(Advisor, IdenticalNeedsFavorSharing)
{
    auto fleet = fixtures::TwoContainerFleet();
    std::vector<AccessTrace> traces {fixtures::TraceOf({"/f1", "/f3"}), fixtures::TraceOf({"/f1", "/f3"})};

    auto report = Analyze(fleet, traces);
    EXPECT_EQ(report.beta, 0);
    EXPECT_EQ(report.alpha, static_cast<int64_t>(4 * kMiB));
    EXPECT_DOUBLE_EQ(report.theta, static_cast<double>(4 * kMiB));
    EXPECT_EQ(report.recommendation, ModeKind::FullySharing);
}

TEST(Advisor, SingleContainerGainsNothingFromSharing)
{
    auto fleet = fixtures::TwoContainerFleet();
    fleet.pop_back();
    std::vector<AccessTrace> traces {fixtures::TraceOf({"/f1"})};

    auto report = Analyze(fleet, traces);
    EXPECT_EQ(report.noSharingTotal, kMiB);
    EXPECT_EQ(report.fullySharingTotal, kMiB);
    EXPECT_EQ(report.alpha, 0);
    EXPECT_EQ(report.beta, 0);
    EXPECT_DOUBLE_EQ(report.theta, 0.0);
    EXPECT_EQ(report.recommendation, ModeKind::NoSharing);
}

TEST(Advisor, ThetaFromGivenSizes)
{
    auto report = ComputeModeReport({"a", "b"}, {3, 5}, 8, {6, 6}, 6);
    EXPECT_EQ(report.alpha, 2);
    EXPECT_EQ(report.beta, 4);
    EXPECT_DOUBLE_EQ(report.theta, 0.5);

    EXPECT_DOUBLE_EQ(ComputeTheta(3, 10), 0.3);
    EXPECT_DOUBLE_EQ(ComputeTheta(12, 2), 6.0);
    EXPECT_DOUBLE_EQ(ComputeTheta(7, 0, 1), 7.0);
    EXPECT_DOUBLE_EQ(ComputeTheta(7, 0, 2), 3.5);
}

TEST(Advisor, ThresholdDecidesTheMode)
{
    EXPECT_EQ(SelectMode(0.3), ModeKind::NoSharing);
    EXPECT_EQ(SelectMode(6.0), ModeKind::FullySharing);
    EXPECT_EQ(SelectMode(1.0), ModeKind::FullySharing);
    EXPECT_EQ(SelectMode(0.3, 0.2), ModeKind::FullySharing);
    EXPECT_EQ(SelectMode(-4.0), ModeKind::NoSharing);

    auto report = ComputeModeReport({"a"}, {1}, 1, {2}, 2);
    EXPECT_EQ(SelectMode(report, 1.0).kind, ModeKind::NoSharing);
}

TEST(Advisor, ReportSerializesEveryQuantity)
{
    auto report = ComputeModeReport({"a", "b"}, {3, 5}, 8, {6, 6}, 6);
    auto json   = nlohmann::json::parse(ModeReportToJson(report));

    EXPECT_EQ(json["alpha"], 2);
    EXPECT_EQ(json["beta"], 4);
    EXPECT_DOUBLE_EQ(json["theta"].get<double>(), 0.5);
    EXPECT_EQ(json["recommendation"], "no-sharing");
}

// Multiplying every file size by k scales both differences by k.
TEST(Advisor, RecommendationIsScaleInvariant)
{
    std::mt19937_64 rng(17);

    for (int round = 0; round < 30; ++round) {
        struct Spec {
            std::vector<std::vector<std::pair<std::string, uint64_t>>> layers;
            std::vector<std::vector<size_t>>                           containers;
            std::vector<std::vector<std::string>>                      reads;
        } shape;

        for (int l = 0, n = 1 + static_cast<int>(rng() % 4); l < n; ++l) {
            auto& files = shape.layers.emplace_back();
            for (int f = 0, m = 1 + static_cast<int>(rng() % 4); f < m; ++f) {
                files.emplace_back("/l" + std::to_string(l) + "f" + std::to_string(f), 1 + rng() % 50);
            }
        }
        for (int c = 0, n = 1 + static_cast<int>(rng() % 3); c < n; ++c) {
            std::set<size_t> picked;
            for (int k = 0, m = 1 + static_cast<int>(rng() % 3); k < m; ++k) {
                picked.insert(rng() % shape.layers.size());
            }
            shape.containers.emplace_back(picked.begin(), picked.end());

            auto& reads = shape.reads.emplace_back();
            for (auto l : picked) {
                for (const auto& [path, _] : shape.layers[l]) {
                    if (rng() % 2) {
                        reads.push_back(path);
                    }
                }
            }
        }

        auto build = [&](uint64_t k) {
            std::vector<LayerPtr> pool;
            for (const auto& files : shape.layers) {
                std::vector<FileEntry> entries;
                for (const auto& [path, size] : files) {
                    entries.push_back(FileEntry::Regular(path, std::string(size * k, 'b')));
                }
                pool.push_back(fixtures::MakeImageLayer(std::move(entries)));
            }

            std::vector<ContainerFs> fleet;
            std::vector<AccessTrace> traces;
            for (size_t c = 0; c < shape.containers.size(); ++c) {
                std::vector<LayerPtr> roots;
                for (auto l : shape.containers[c]) {
                    roots.push_back(pool[l]);
                }
                fleet.push_back(ContainerFs::FromImageLayers("c" + std::to_string(c), roots));

                AccessTrace trace;
                for (const auto& path : shape.reads[c]) {
                    trace.push_back({AccessOp::Read, path});
                }
                traces.push_back(std::move(trace));
            }
            return Analyze(fleet, traces);
        };

        auto base   = build(1);
        auto scaled = build(7);

        EXPECT_GE(base.beta, 0);
        EXPECT_EQ(scaled.alpha, 7 * base.alpha);
        EXPECT_EQ(scaled.beta, 7 * base.beta);
        if (base.beta != 0) {
            EXPECT_DOUBLE_EQ(scaled.theta, base.theta);
            EXPECT_EQ(scaled.recommendation, base.recommendation);
        }
    }
}

} // namespace
} // namespace debloatfs
