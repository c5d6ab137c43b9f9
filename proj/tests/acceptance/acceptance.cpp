/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>

#include "debloatfs/advisor.hpp"
#include "debloatfs/convert.hpp"
#include "debloatfs/digest.hpp"
#include "debloatfs/error.hpp"
#include "debloatfs/fixtures.hpp"
#include "debloatfs/image_io.hpp"
#include "debloatfs/pipeline.hpp"

#include "support/corpus.hpp"
#include "support/scratch.hpp"

namespace {

using namespace debloatfs;
using fixtures::kMiB;

constexpr uint64_t kCorpusSize = 1000;

// Collects mismatches for one criterion.
class Check {
public:
    void Expect(bool ok, const std::string& what)
    {
        if (!ok && mFirst.empty()) {
            mFirst = what;
        }
        mOk = mOk && ok;
    }

    template <typename A, typename B>
    void Equal(const A& actual, const B& expected, const std::string& what)
    {
        std::ostringstream msg;
        msg << what << ": got " << actual << ", expected " << expected;
        Expect(actual == expected, msg.str());
    }

    bool               Ok() const { return mOk; }
    const std::string& First() const { return mFirst; }

private:
    bool        mOk = true;
    std::string mFirst;
};

std::set<std::string> RegularPaths(const Layer& layer)
{
    std::set<std::string> paths;
    for (const auto& [path, entry] : layer.Entries()) {
        if (entry.kind == FileKind::Regular) {
            paths.insert(path);
        }
    }
    return paths;
}

std::vector<ContainerFs> RunPipeline(ModeKind kind)
{
    auto fleet     = fixtures::TwoContainerFleet();
    auto converted = Convert(fleet, {kind});
    ProfileFleet(converted, fixtures::TwoContainerTraces());
    return ExportFleet(converted);
}

Check TwoContainerNoSharing()
{
    Check check;
    auto  start    = std::chrono::steady_clock::now();
    auto  exported = RunPipeline(ModeKind::NoSharing);
    auto  account  = AccountSizes(exported);
    auto  elapsed  = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    auto original = fixtures::TwoContainerFleet();
    auto before   = AccountSizes(original);

    check.Equal(account.perContainer.at("pair-c1"), 3 * kMiB, "C1 bytes");
    check.Equal(account.perContainer.at("pair-c2"), 5 * kMiB, "C2 bytes");
    check.Equal(account.total, 8 * kMiB, "fleet bytes");
    check.Equal(before.perContainer.at("pair-c1"), 10 * kMiB, "C1 original bytes");
    check.Equal(before.total, 10 * kMiB, "fleet original bytes");

    // 70%, 50% and 20% reductions follow from the byte counts.
    check.Equal(100 - 100 * account.perContainer.at("pair-c1") / before.perContainer.at("pair-c1"), 70u, "C1 %");
    check.Equal(100 - 100 * account.perContainer.at("pair-c2") / before.perContainer.at("pair-c2"), 50u, "C2 %");
    check.Equal(100 - 100 * account.total / before.total, 20u, "fleet %");
    check.Expect(elapsed < 5.0, "runtime " + std::to_string(elapsed) + " s");
    return check;
}

Check TwoContainerFullySharing()
{
    Check check;
    auto  exported = RunPipeline(ModeKind::FullySharing);
    auto  account  = AccountSizes(exported);

    check.Equal(account.perContainer.at("pair-c1"), 6 * kMiB, "C1 bytes");
    check.Equal(account.perContainer.at("pair-c2"), 6 * kMiB, "C2 bytes");
    check.Equal(account.total, 6 * kMiB, "fleet bytes");
    check.Expect(exported[0].roots.size() == 2 && exported[0].roots == exported[1].roots, "D1, D2 shared");
    if (exported[0].roots.size() == 2) {
        check.Expect(RegularPaths(*exported[0].roots[0]) == std::set<std::string> {"/f1", "/f2"}, "D1 = {f1, f2}");
        check.Expect(RegularPaths(*exported[0].roots[1]) == std::set<std::string> {"/f3"}, "D2 = {f3}");
    }
    return check;
}

Check ModeSelection()
{
    Check check;
    auto  fleet  = fixtures::TwoContainerFleet();
    auto  report = Analyze(fleet, fixtures::TwoContainerTraces(), kDefaultThreshold, 1);

    check.Equal(report.alpha, static_cast<int64_t>(2 * kMiB), "alpha");
    check.Equal(report.beta, static_cast<int64_t>(4 * kMiB), "beta");
    check.Expect(std::abs(report.theta - 0.5) <= 1e-9, "theta " + std::to_string(report.theta));
    check.Expect(report.recommendation == ModeKind::NoSharing, "recommendation");
    check.Expect(SelectMode(0.3) == ModeKind::NoSharing, "theta 0.3");
    check.Expect(SelectMode(6.0) == ModeKind::FullySharing, "theta 6");
    return check;
}

// Criteria 4, 5, 7 and 8 share one pass over the randomized corpus.
struct CorpusChecks {
    Check  equivalence;
    Check  soundness;
    Check  warmPath;
    Check  privacy;
    size_t events = 0;
};

CorpusChecks RunCorpus()
{
    CorpusChecks checks;

    for (uint64_t seed = 0; seed < kCorpusSize; ++seed) {
        auto instance = testing::MakeInstance(seed);

        for (auto mode : {ModeKind::NoSharing, ModeKind::FullySharing, ModeKind::SemiSharing}) {
            auto result = testing::CheckInstance(instance, mode);

            checks.events += result.events;
            checks.equivalence.Expect(result.equivalence.empty() && result.conservation.empty(),
                result.equivalence + result.conservation);
            checks.soundness.Expect(result.soundness.empty() && result.minimality.empty(),
                result.soundness + (result.soundness.empty() ? "" : "; ") + result.minimality);
            checks.warmPath.Expect(result.warmPath.empty(), result.warmPath);
            checks.privacy.Expect(result.privacy.empty(), result.privacy);
        }
    }
    return checks;
}

Check SemiSharingDigests()
{
    Check               check;
    testing::ScratchDir dir("acceptance-semi");

    StoreImage(fixtures::FiveLayerImage(), dir / "in", fixtures::kFiveLayerBaseDepth);
    auto loaded = LoadImage(dir / "in");
    auto fs     = ConvertSemiSharing(loaded.fs, fixtures::kFiveLayerBaseDepth);
    Profile(fs, fixtures::FiveLayerTrace());
    auto after  = StoreImage(Export(fs), dir / "out", fixtures::kFiveLayerBaseDepth);
    auto before = ReadManifest(dir / "in");

    check.Equal(after.layerDigests.size(), size_t {5}, "layer count");
    for (size_t i = 0; i < 4 && i < after.layerDigests.size(); ++i) {
        check.Equal(after.layerDigests[i], before.layerDigests[i], "digest " + std::to_string(i));
        auto blob = "blobs/sha256/" + DigestHex(before.layerDigests[i]);
        check.Expect(io::ReadFile(dir / "out" / blob) == io::ReadFile(dir / "in" / blob), "blob bytes " + blob);
    }
    return check;
}

Check WebServerCli()
{
    Check               check;
    testing::ScratchDir dir("acceptance-web");
    fixtures::WriteAll(dir.Path());

    auto run = [&](const std::string& args) {
        auto cmd    = std::string(DEBLOATFS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
        auto status = std::system(cmd.c_str());
        auto code   = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        check.Equal(code, 0, "exit code of '" + args + "'");
    };

    auto image = (dir / "webserver").string();
    auto state = (dir / "web.state").string();
    auto trace = (dir / "webserver.trace").string();
    auto out   = (dir / "web.slim").string();

    run("convert " + image + " --mode no-sharing --state " + state);
    run("profile --state " + state + " --trace " + trace);
    run("export --state " + state + " --out " + out);
    run("verify " + out + " --trace " + trace);

    if (check.Ok()) {
        std::vector<ContainerFs> before {LoadImage(image).fs};
        std::vector<ContainerFs> after {LoadImage(out).fs};

        auto original = AccountSizes(before).total;
        auto slim     = AccountSizes(after).total;
        auto removed  = 100.0 * static_cast<double>(original - slim) / static_cast<double>(original);

        std::ostringstream msg;
        msg << "removed " << removed << "% of " << original << " bytes";
        check.Expect(original > slim && removed >= 60.0, msg.str());
    }
    return check;
}

bool Report(int number, const std::string& title, const std::function<Check()>& fn)
{
    Check check;
    try {
        check = fn();
    } catch (const std::exception& e) {
        check.Expect(false, std::string("exception: ") + e.what());
    }

    std::cout << (check.Ok() ? "PASS" : "FAIL") << " criterion " << number << ": " << title;
    if (!check.Ok()) {
        std::cout << " (" << check.First() << ")";
    }
    std::cout << std::endl;
    return check.Ok();
}

} // namespace

int main()
{
    bool ok = true;

    ok &= Report(1, "two-container no-sharing sizes 3/5/8 MB", TwoContainerNoSharing);
    ok &= Report(2, "two-container fully-sharing sizes 6/6/6 MB", TwoContainerFullySharing);
    ok &= Report(3, "mode selection alpha/beta/theta", ModeSelection);

    CorpusChecks corpus;
    std::string  corpusError;
    try {
        corpus = RunCorpus();
    } catch (const std::exception& e) {
        corpusError = e.what();
    }
    auto fromCorpus = [&](Check check) {
        return [check, &corpusError]() mutable {
            if (!corpusError.empty()) {
                check.Expect(false, "corpus aborted: " + corpusError);
            }
            return check;
        };
    };

    auto instances = std::to_string(kCorpusSize) + " instances x 3 modes, " + std::to_string(corpus.events) + " events";
    ok &= Report(4, "resolution matches flattened oracle (" + instances + ")", fromCorpus(corpus.equivalence));
    ok &= Report(5, "export is sound and minimal", fromCorpus(corpus.soundness));
    ok &= Report(6, "semi-sharing keeps the 4 base digests", SemiSharingDigests);
    ok &= Report(7, "warm accesses take one debloating probe", fromCorpus(corpus.warmPath));
    ok &= Report(8, "written bytes never reach exported layers", fromCorpus(corpus.privacy));
    ok &= Report(9, "web-server fixture via CLI removes >= 60% of bytes", WebServerCli);

    return ok ? 0 : 1;
}
