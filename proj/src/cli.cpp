/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "debloatfs/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "debloatfs/advisor.hpp"
#include "debloatfs/convert.hpp"
#include "debloatfs/image_io.hpp"
#include "debloatfs/pipeline.hpp"
#include "debloatfs/state.hpp"

namespace fs = std::filesystem;

namespace debloatfs::cli {

namespace {

std::string Trimmed(double value, int decimals)
{
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);

    std::string text = buffer;
    if (text.find('.') != std::string::npos) {
        text.erase(text.find_last_not_of('0') + 1);
        if (text.back() == '.') {
            text.pop_back();
        }
    }

    return text;
}

std::string Reduction(uint64_t original, uint64_t debloated)
{
    if (original == 0) {
        return "0% reduction";
    }

    auto percent = 100.0 * (static_cast<double>(original) - static_cast<double>(debloated)) / static_cast<double>(original);

    return Trimmed(percent, 1) + "% reduction";
}

std::string SizeLine(const std::string& label, uint64_t original, uint64_t debloated)
{
    std::ostringstream line;

    line << label << ": " << FormatMiB(original) << " -> " << FormatMiB(debloated) << " ("
         << Reduction(original, debloated) << ") [" << original << " -> " << debloated << " bytes]";

    return line.str();
}

fs::path DefaultStatePath(const fs::path& image)
{
    auto dir = image.lexically_normal();
    if (dir.filename().empty()) {
        dir = dir.parent_path();
    }

    return dir.string() + ".state";
}

void WriteReportFile(const fs::path& file, const std::string& text)
{
    std::error_code ec;
    if (!file.parent_path().empty()) {
        fs::create_directories(file.parent_path(), ec);
    }

    auto tmp = io::TempSibling(file);
    io::WriteFile(tmp, text);
    fs::rename(tmp, file, ec);

    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::IoError, "cannot write " + file.string());
    }
}

std::vector<AccessTrace> LoadTraces(const std::vector<std::string>& files)
{
    std::vector<AccessTrace> traces;

    for (const auto& file : files) {
        traces.push_back(LoadTrace(file));
    }

    return traces;
}

std::vector<ContainerFs> LoadFleet(const std::vector<std::string>& dirs, std::vector<ImageManifest>* manifests = nullptr)
{
    LayerCache               cache;
    std::vector<ContainerFs> fleet;

    for (const auto& dir : dirs) {
        if (IsStateDir(dir)) {
            throw Error(ErrorCode::AlreadyConverted, dir + " is a converted state bundle, not an image");
        }

        auto image = LoadImage(dir, &cache);

        for (const auto& other : fleet) {
            if (other.id == image.fs.id) {
                throw Error(ErrorCode::InvalidArgument, "duplicate image name " + image.fs.id);
            }
        }

        if (manifests) {
            manifests->push_back(image.bundle.manifest);
        }

        fleet.push_back(std::move(image.fs));
    }

    return fleet;
}

struct Options {
    std::vector<std::string> images;
    std::vector<std::string> traces;
    std::string              mode;
    std::optional<size_t>    baseDepth;
    std::string              state;
    std::string              out;
    std::string              report;
    double                   threshold = kDefaultThreshold;
    uint64_t                 epsilon   = kDefaultEpsilon;
};

int CmdConvert(const Options& opt, std::ostream& out)
{
    auto kind      = *ParseModeKind(opt.mode);
    auto statePath = opt.state.empty() ? DefaultStatePath(opt.images.front()) : fs::path(opt.state);

    if (IsStateDir(statePath)) {
        throw Error(ErrorCode::AlreadyConverted, statePath.string() + " already holds a converted state");
    }

    StateLock lock(statePath);

    std::vector<ImageManifest> manifests;
    auto                       fleet = LoadFleet(opt.images, &manifests);

    EngineState state;
    state.mode = {kind, opt.baseDepth.value_or(0)};

    auto original       = AccountSizes(fleet);
    state.originalTotal = original.total;

    for (size_t i = 0; i < fleet.size(); ++i) {
        state.originalSizes.push_back(original.perContainer.at(fleet[i].id));
        state.baseDepths.push_back(
            kind == ModeKind::SemiSharing ? opt.baseDepth.value_or(manifests[i].baseDepth) : 0);
    }

    if (kind == ModeKind::FullySharing) {
        state.fleet = ConvertFullySharing(fleet);
    } else {
        for (size_t i = 0; i < fleet.size(); ++i) {
            state.fleet.push_back(kind == ModeKind::NoSharing ? ConvertNoSharing(fleet[i])
                                                              : ConvertSemiSharing(fleet[i], state.baseDepths[i]));
        }
    }

    SaveState(state, statePath);

    for (const auto& container : state.fleet) {
        size_t children = 0;
        for (const auto& root : container.roots) {
            children += root->Children().size();
        }

        out << container.id << ": " << ToString(kind) << ", " << container.roots.size() << " root layer(s), "
            << children << " child image layer(s)\n";
    }
    out << "state: " << statePath.string() << "\n";

    return kExitOk;
}

int CmdProfile(const Options& opt, std::ostream& out)
{
    StateLock lock(opt.state);

    auto state  = LoadState(opt.state);
    auto traces = LoadTraces(opt.traces);

    if (traces.size() != state.fleet.size()) {
        throw Error(ErrorCode::InvalidArgument,
            "state holds " + std::to_string(state.fleet.size()) + " container(s) but " + std::to_string(traces.size())
                + " trace(s) were given");
    }

    auto records = ProfileFleet(state.fleet, traces);

    ++state.profileRuns;
    SaveState(state, opt.state);

    for (size_t i = 0; i < records.size(); ++i) {
        size_t migrated = 0;

        for (const auto& event : records[i]) {
            out << state.fleet[i].id << " #" << event.traceIndex << " " << ToString(event.op) << " " << event.path;

            if (event.error) {
                out << " -> " << (event.Hit() ? "hit " + event.hitLayer + " " : std::string("MISS ")) << "("
                    << ToString(*event.error) << ")";
            } else {
                out << " -> hit " << event.hitLayer;
            }

            if (event.migrated) {
                out << " [migrated]";
                ++migrated;
            }

            out << " probes=" << event.probes << "\n";
        }

        out << state.fleet[i].id << ": " << traces[i].size() << " event(s), " << migrated << " migrated, "
            << CountFailures(records[i]) << " failed\n";
    }

    return kExitOk;
}

int CmdExport(const Options& opt, std::ostream& out)
{
    StateLock lock(opt.state);

    auto state    = LoadState(opt.state);
    auto exported = ExportFleet(state.fleet);
    auto account  = AccountSizes(exported);

    fs::path target = fs::path(opt.out).lexically_normal();
    if (target.filename().empty()) {
        target = target.parent_path();
    }

    if (exported.size() == 1) {
        StoreImage(exported.front(), target, state.baseDepths.front());
    } else {
        std::error_code ec;
        if (!target.parent_path().empty()) {
            fs::create_directories(target.parent_path(), ec);
        }

        auto stage = io::TempSibling(target);
        try {
            for (size_t i = 0; i < exported.size(); ++i) {
                StoreImage(exported[i], stage / exported[i].id, state.baseDepths[i]);
            }
            io::ReplaceWith(stage, target);
        } catch (...) {
            fs::remove_all(stage, ec);
            throw;
        }
    }

    for (size_t i = 0; i < exported.size(); ++i) {
        out << SizeLine(exported[i].id, state.originalSizes[i], account.perContainer.at(exported[i].id)) << "\n";
    }
    if (exported.size() > 1) {
        out << SizeLine("total", state.originalTotal, account.total) << "\n";
    }
    out << "exported: " << target.string() << "\n";

    return kExitOk;
}

int CmdAnalyze(const Options& opt, std::ostream& out)
{
    if (opt.images.size() != opt.traces.size()) {
        throw Error(ErrorCode::InvalidArgument, "analyze needs one --trace per --image");
    }

    auto fleet  = LoadFleet(opt.images);
    auto traces = LoadTraces(opt.traces);
    auto report = Analyze(fleet, traces, opt.threshold, opt.epsilon);

    for (size_t i = 0; i < report.containers.size(); ++i) {
        out << report.containers[i] << ": no-sharing " << report.noSharingSizes[i] << " bytes, fully-sharing "
            << report.fullySharingSizes[i] << " bytes\n";
    }

    out << "total: no-sharing " << report.noSharingTotal << " bytes, fully-sharing " << report.fullySharingTotal
        << " bytes\n";
    out << "alpha=" << report.alpha << " beta=" << report.beta << " epsilon=" << report.epsilon << "\n";
    out << "theta=" << std::setprecision(10) << report.theta << " threshold=" << report.threshold << "\n";
    out << "recommendation: " << ToString(report.recommendation) << "\n";

    if (!opt.report.empty()) {
        WriteReportFile(opt.report, ModeReportToJson(report));
    }

    return kExitOk;
}

int CmdVerify(const Options& opt, std::ostream& out)
{
    auto image  = LoadImage(opt.images.front());
    auto trace  = LoadTrace(opt.traces.front());
    auto report = Verify(image.fs, trace);

    for (const auto& failure : report.failures) {
        out << "FAIL #" << failure.index << " " << ToString(trace[failure.index].op) << " " << failure.path << ": "
            << ToString(failure.reason) << "\n";
    }
    out << (report.passed ? "PASS" : "FAIL") << ": " << trace.size() - report.failures.size() << "/" << trace.size()
        << " event(s) succeeded\n";

    if (!opt.report.empty()) {
        WriteReportFile(opt.report, VerifyReportToJson(report));
    }

    return report.passed ? kExitOk : kExitVerifyFailed;
}

int CmdMaterialize(const Options& opt, std::ostream& out)
{
    if (!opt.state.empty()) {
        StateLock lock(opt.state);

        // A state materializes as its debloated result.
        auto state    = LoadState(opt.state);
        auto exported = ExportFleet(state.fleet);
        for (const auto& container : exported) {
            auto dir = exported.size() == 1 ? fs::path(opt.out) : fs::path(opt.out) / container.id;
            Materialize(container, dir);
            out << container.id << ": " << dir.string() << "\n";
        }

        return kExitOk;
    }

    auto image = LoadImage(opt.images.front());
    Materialize(image.fs, opt.out);
    out << image.fs.id << ": " << opt.out << "\n";

    return kExitOk;
}

} // namespace

int ExitCodeFor(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidBaseDepth:
    case ErrorCode::InvalidArgument:
        return kExitInvalidArgs;
    case ErrorCode::AlreadyConverted:
    case ErrorCode::NotConverted:
    case ErrorCode::ExportBeforeConvert:
    case ErrorCode::StateLocked:
        return kExitStateMisuse;
    default:
        return kExitBadInput;
    }
}

std::string FormatMiB(uint64_t bytes)
{
    return Trimmed(static_cast<double>(bytes) / static_cast<double>(uint64_t {1} << 20), 2) + " MB";
}

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app {"Layered-filesystem container debloater", "debloatfs"};
    app.require_subcommand(1);

    Options opt;

    const std::vector<std::string> modes = {"no-sharing", "fully-sharing", "semi-sharing"};

    auto* convert = app.add_subcommand("convert", "Load image(s) and insert debloating layers");
    convert->add_option("images", opt.images, "Image directories")->required()->check(CLI::ExistingDirectory);
    convert->add_option("--mode", opt.mode, "Conversion mode")->required()->check(CLI::IsMember(modes));
    convert->add_option("--base-depth", opt.baseDepth, "Bottom layers kept as base image (semi-sharing)");
    convert->add_option("--state", opt.state, "State bundle to create (default: <image>.state)");

    auto* profile = app.add_subcommand("profile", "Replay traces through a converted state");
    profile->add_option("--state", opt.state, "State bundle")->required()->check(CLI::ExistingDirectory);
    profile->add_option("--trace", opt.traces, "Trace file, one per container in state order")
        ->required()
        ->check(CLI::ExistingFile);

    auto* exportCmd = app.add_subcommand("export", "Write the debloated image(s)");
    exportCmd->add_option("--state", opt.state, "State bundle")->required()->check(CLI::ExistingDirectory);
    exportCmd->add_option("--out", opt.out, "Output image directory")->required();

    auto* analyze = app.add_subcommand("analyze", "Compare no-sharing and fully-sharing for a fleet");
    analyze->add_option("--image", opt.images, "Image directory (repeat per container)")
        ->required()
        ->check(CLI::ExistingDirectory);
    analyze->add_option("--trace", opt.traces, "Trace file (repeat, paired with --image)")
        ->required()
        ->check(CLI::ExistingFile);
    analyze->add_option("--threshold", opt.threshold, "Fully-sharing when theta >= threshold")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    analyze->add_option("--epsilon", opt.epsilon, "Denominator guard in bytes")->capture_default_str();
    analyze->add_option("--report", opt.report, "Write the report as JSON");

    auto* verify = app.add_subcommand("verify", "Replay a trace against a debloated image");
    verify->add_option("image", opt.images, "Image directory")->required()->expected(1)->check(CLI::ExistingDirectory);
    verify->add_option("--trace", opt.traces, "Trace file")->required()->expected(1)->check(CLI::ExistingFile);
    verify->add_option("--report", opt.report, "Write the report as JSON");

    auto* materialize = app.add_subcommand("materialize", "Write the resolved file tree to a host directory");
    auto* matImage    = materialize->add_option("--image", opt.images, "Image directory")->expected(1);
    auto* matState    = materialize->add_option("--state", opt.state, "State bundle (writes the debloated tree)");
    materialize->add_option("--out", opt.out, "Output directory")->required();
    matImage->excludes(matState);
    materialize->require_option(2);

    std::vector<std::string> reversed(args.rbegin(), args.rend());

    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalidArgs;
    }

    try {
        if (convert->parsed()) {
            return CmdConvert(opt, out);
        }
        if (profile->parsed()) {
            return CmdProfile(opt, out);
        }
        if (exportCmd->parsed()) {
            return CmdExport(opt, out);
        }
        if (analyze->parsed()) {
            return CmdAnalyze(opt, out);
        }
        if (verify->parsed()) {
            return CmdVerify(opt, out);
        }
        if (materialize->parsed()) {
            return CmdMaterialize(opt, out);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return ExitCodeFor(e.Code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitBadInput;
    }

    return kExitInvalidArgs;
}

} // namespace debloatfs::cli
