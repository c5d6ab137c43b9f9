/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "debloatfs/advisor.hpp"

#include <future>
#include <numeric>

#include <nlohmann/json.hpp>

#include "debloatfs/error.hpp"
#include "debloatfs/pipeline.hpp"

namespace debloatfs {

namespace {

struct Measured {
    std::vector<uint64_t> sizes;
    uint64_t              total = 0;
};

Measured Measure(const std::vector<ContainerFs>& exported)
{
    auto     account = AccountSizes(exported);
    Measured out;

    for (const auto& fs : exported) {
        out.sizes.push_back(account.perContainer.at(fs.id));
    }
    out.total = account.total;

    return out;
}

void RequireClean(const std::vector<AccessRecord>& records, std::string_view mode)
{
    for (const auto& record : records) {
        for (const auto& event : record) {
            if (event.error) {
                throw Error(ErrorCode::AnalysisFailed,
                    std::string(mode) + " replay: " + std::string(ToString(event.op)) + " " + event.path + " failed with "
                        + std::string(ToString(*event.error)));
            }
        }
    }
}

Measured RunNoSharing(std::span<const ContainerFs> fleet, std::span<const AccessTrace> traces)
{
    std::vector<ContainerFs> converted;

    for (const auto& fs : CloneFleet(fleet)) {
        converted.push_back(ConvertNoSharing(fs));
    }

    RequireClean(ProfileFleet(converted, traces), "no-sharing");

    return Measure(ExportFleet(converted));
}

Measured RunFullySharing(std::span<const ContainerFs> fleet, std::span<const AccessTrace> traces)
{
    auto clones    = CloneFleet(fleet);
    auto converted = ConvertFullySharing(clones);

    RequireClean(ProfileFleet(converted, traces), "fully-sharing");

    return Measure(ExportFleet(converted));
}

} // namespace

double ComputeTheta(int64_t alpha, int64_t beta, uint64_t epsilon)
{
    auto denominator = beta == 0 ? static_cast<double>(epsilon) : static_cast<double>(beta);

    return static_cast<double>(alpha) / denominator;
}

ModeKind SelectMode(double theta, double threshold)
{
    return theta < threshold ? ModeKind::NoSharing : ModeKind::FullySharing;
}

ConvertMode SelectMode(const ModeReport& report, double threshold)
{
    return ConvertMode {SelectMode(report.theta, threshold), 0};
}

ModeReport ComputeModeReport(std::vector<std::string> containers, std::vector<uint64_t> noSharingSizes,
    uint64_t noSharingTotal, std::vector<uint64_t> fullySharingSizes, uint64_t fullySharingTotal, uint64_t epsilon,
    double threshold)
{
    if (noSharingSizes.size() != fullySharingSizes.size() || containers.size() != noSharingSizes.size()) {
        throw Error(ErrorCode::InvalidArgument, "per-container size lists differ in length");
    }

    ModeReport report;

    auto sumS = std::accumulate(noSharingSizes.begin(), noSharingSizes.end(), int64_t {0},
        [](int64_t acc, uint64_t v) { return acc + static_cast<int64_t>(v); });

    report.alpha = sumS - static_cast<int64_t>(fullySharingTotal);
    for (size_t i = 0; i < noSharingSizes.size(); ++i) {
        report.beta += static_cast<int64_t>(fullySharingSizes[i]) - static_cast<int64_t>(noSharingSizes[i]);
    }

    report.containers        = std::move(containers);
    report.noSharingSizes    = std::move(noSharingSizes);
    report.fullySharingSizes = std::move(fullySharingSizes);
    report.noSharingTotal    = noSharingTotal;
    report.fullySharingTotal = fullySharingTotal;
    report.epsilon           = epsilon;
    report.threshold         = threshold;
    report.theta = ComputeTheta(report.alpha, report.beta, epsilon);
    report.recommendation = SelectMode(report.theta, threshold);

    return report;
}

ModeReport Analyze(
    std::span<const ContainerFs> fleet, std::span<const AccessTrace> traces, double threshold, uint64_t epsilon)
{
    if (fleet.size() != traces.size()) {
        throw Error(ErrorCode::InvalidArgument, "analyze needs exactly one trace per container");
    }

    auto noSharing = std::async(std::launch::async, [&] { return RunNoSharing(fleet, traces); });
    auto fully     = RunFullySharing(fleet, traces);
    auto separate  = noSharing.get();

    std::vector<std::string> ids;
    for (const auto& fs : fleet) {
        ids.push_back(fs.id);
    }

    return ComputeModeReport(std::move(ids), std::move(separate.sizes), separate.total, std::move(fully.sizes),
        fully.total, epsilon, threshold);
}

std::string ModeReportToJson(const ModeReport& report)
{
    nlohmann::ordered_json doc;

    doc["containers"]          = report.containers;
    doc["no_sharing_sizes"]    = report.noSharingSizes;
    doc["fully_sharing_sizes"] = report.fullySharingSizes;
    doc["no_sharing_total"]    = report.noSharingTotal;
    doc["fully_sharing_total"] = report.fullySharingTotal;
    doc["alpha"]               = report.alpha;
    doc["beta"]                = report.beta;
    doc["epsilon"]             = report.epsilon;
    doc["theta"]               = report.theta;
    doc["threshold"]           = report.threshold;
    doc["recommendation"]      = std::string(ToString(report.recommendation));

    return doc.dump(2) + "\n";
}

} // namespace debloatfs
