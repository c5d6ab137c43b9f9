/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "debloatfs/pipeline.hpp"

#include <limits>
#include <set>
#include <thread>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "debloatfs/digest.hpp"
#include "debloatfs/image_io.hpp"
#include "debloatfs/tar.hpp"

namespace fs = std::filesystem;

namespace debloatfs {

namespace {

constexpr uint64_t kWholeFile = std::numeric_limits<uint64_t>::max();

// Runs one trace event; errors are already in the resolver's record.
void Replay(Resolver& resolver, const TraceEvent& event)
{
    try {
        switch (event.op) {
        case AccessOp::Read:
            resolver.Read(event.path, kWholeFile);
            break;
        case AccessOp::Stat:
            resolver.Stat(event.path);
            break;
        case AccessOp::List:
            resolver.ListDir(event.path);
            break;
        case AccessOp::Write:
            resolver.Write(event.path, event.payload);
            break;
        }
    } catch (const Error&) {
    }
}

LayerPtr Freeze(const Layer& debloating)
{
    auto frozen = Layer::Make(LayerRole::Image, debloating.Id());

    {
        std::lock_guard lock(debloating.Mutex());

        for (const auto& [_, entry] : debloating.Entries()) {
            frozen->Put(entry);
        }
    }

    frozen->SetDigest(Sha256Digest(tar::WriteCanonical(frozen->Entries())));

    return frozen;
}

} // namespace

AccessRecord Profile(ContainerFs& fs, const AccessTrace& trace)
{
    if (!fs.IsConverted()) {
        throw Error(ErrorCode::NotConverted, fs.id + ": profile requires a converted container");
    }

    Resolver     resolver(fs);
    AccessRecord record;

    for (size_t i = 0; i < trace.size(); ++i) {
        Replay(resolver, trace[i]);

        for (auto& event : resolver.TakeRecord()) {
            event.traceIndex = i;
            record.push_back(std::move(event));
        }
    }

    return record;
}

std::vector<AccessRecord> ProfileFleet(std::span<ContainerFs> fleet, std::span<const AccessTrace> traces, bool parallel)
{
    if (fleet.size() != traces.size()) {
        throw Error(ErrorCode::InvalidArgument,
            "fleet has " + std::to_string(fleet.size()) + " containers but " + std::to_string(traces.size())
                + " traces were given");
    }

    std::vector<AccessRecord> records(fleet.size());

    if (!parallel) {
        for (size_t i = 0; i < fleet.size(); ++i) {
            records[i] = Profile(fleet[i], traces[i]);
        }

        return records;
    }

    std::vector<std::exception_ptr> errors(fleet.size());
    std::vector<std::thread>        workers;

    for (size_t i = 0; i < fleet.size(); ++i) {
        workers.emplace_back([&, i] {
            try {
                records[i] = Profile(fleet[i], traces[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        });
    }

    for (auto& worker : workers) {
        worker.join();
    }

    for (const auto& error : errors) {
        if (error) {
            std::rethrow_exception(error);
        }
    }

    return records;
}

size_t CountFailures(const AccessRecord& record)
{
    std::set<size_t> failed;

    for (const auto& event : record) {
        if (event.error) {
            failed.insert(event.traceIndex);
        }
    }

    return failed.size();
}

std::vector<ContainerFs> ExportFleet(std::span<const ContainerFs> fleet)
{
    std::unordered_map<const Layer*, LayerPtr> frozen;
    std::vector<ContainerFs>                   out;

    for (const auto& container : fleet) {
        if (!container.IsConverted()) {
            throw Error(ErrorCode::ExportBeforeConvert, container.id);
        }

        auto exported = ContainerFs::FromImageLayers(container.id, {});

        for (const auto& root : container.roots) {
            if (root->Role() != LayerRole::Debloating) {
                exported.roots.push_back(root);
                continue;
            }

            auto it = frozen.find(root.get());
            if (it == frozen.end()) {
                it = frozen.emplace(root.get(), Freeze(*root)).first;
            }

            exported.roots.push_back(it->second);
        }

        out.push_back(std::move(exported));
    }

    return out;
}

ContainerFs Export(const ContainerFs& fs)
{
    return std::move(ExportFleet(std::span(&fs, 1)).front());
}

VerifyReport Verify(const ContainerFs& image, const AccessTrace& trace)
{
    if (image.IsConverted()) {
        throw Error(ErrorCode::InvalidArgument, image.id + ": verify runs on exported images, not converted ones");
    }

    auto     scratch = ContainerFs::FromImageLayers(image.id, image.roots);
    Resolver resolver(scratch);

    VerifyReport report;

    for (size_t i = 0; i < trace.size(); ++i) {
        const auto& event = trace[i];

        try {
            switch (event.op) {
            case AccessOp::Read: {
                auto bytes = resolver.Read(event.path, kWholeFile);
                if (!event.expect.empty() && Sha256Digest(bytes) != event.expect) {
                    throw Error(ErrorCode::ContentMismatch, event.path);
                }
                break;
            }
            case AccessOp::Stat: {
                auto entry = resolver.Stat(event.path);
                if (!event.expect.empty() && entry.contentDigest != event.expect) {
                    throw Error(ErrorCode::ContentMismatch, event.path);
                }
                break;
            }
            case AccessOp::List:
                resolver.ListDir(event.path);
                break;
            case AccessOp::Write:
                resolver.Write(event.path, event.payload);
                break;
            }
        } catch (const Error& e) {
            report.failures.push_back({i, event.path, e.Code()});
        }
    }

    report.passed = report.failures.empty();

    return report;
}

std::string VerifyReportToJson(const VerifyReport& report)
{
    nlohmann::ordered_json doc;

    doc["passed"]   = report.passed;
    doc["failures"] = nlohmann::json::array();

    for (const auto& failure : report.failures) {
        doc["failures"].push_back(
            {{"index", failure.index}, {"path", failure.path}, {"reason", std::string(ToString(failure.reason))}});
    }

    return doc.dump(2) + "\n";
}

void Materialize(const ContainerFs& container, const fs::path& dir)
{
    std::set<std::string> paths;

    for (const auto& layer : ReachableLayers(container)) {
        std::unique_lock<std::mutex> lock;
        if (layer->Role() == LayerRole::Debloating) {
            lock = std::unique_lock(layer->Mutex());
        }

        for (const auto& [path, _] : layer->Entries()) {
            paths.insert(path);
        }
    }

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
        if (!fs::create_directories(tmp, ec) || ec) {
            throw Error(ErrorCode::IoError, "cannot create " + tmp.string());
        }

        std::vector<std::pair<fs::path, uint32_t>> dirModes;

        for (const auto& path : paths) {
            auto entry = Peek(container, path);
            auto host  = tmp / path.substr(1);

            fs::create_directories(host.parent_path(), ec);

            switch (entry->kind) {
            case FileKind::Directory:
                fs::create_directories(host, ec);
                dirModes.emplace_back(host, entry->mode);
                break;
            case FileKind::Regular:
                io::WriteFile(host, entry->Bytes());
                fs::permissions(host, static_cast<fs::perms>(entry->mode & 07777), ec);
                break;
            case FileKind::Symlink:
                fs::create_symlink(entry->linkTarget, host, ec);
                break;
            }

            if (ec) {
                throw Error(ErrorCode::IoError, "cannot materialize " + path + ": " + ec.message());
            }
        }

        // Deepest first so restrictive modes do not block the rest.
        for (auto it = dirModes.rbegin(); it != dirModes.rend(); ++it) {
            fs::permissions(it->first, static_cast<fs::perms>(it->second & 07777), ec);
        }

        io::ReplaceWith(tmp, target);
    } catch (...) {
        fs::remove_all(tmp, ec);
        throw;
    }
}

} // namespace debloatfs
