/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <thread>

#include <gtest/gtest.h>

#include "debloatfs/convert.hpp"
#include "debloatfs/digest.hpp"
#include "debloatfs/error.hpp"
#include "debloatfs/fixtures.hpp"
#include "debloatfs/resolver.hpp"

namespace debloatfs {
namespace {

using fixtures::kMiB;

// D over [L1{/f1,/f2}, L2{/f3,/f4}], the running two-layer example.
ContainerFs ConvertedExample()
{
    return ConvertNoSharing(fixtures::TwoContainerFleet()[0]);
}

Layer& Debloating(ContainerFs& fs)
{
    return *fs.roots.front();
}

template <typename Fn>
ErrorCode CodeOf(Fn&& fn)
{
    try {
        fn();
    } catch (const Error& err) {
        return err.Code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::InvalidArgument;
}

TEST(DOpen, FirstAccessMigratesFromTheChild)
{
    auto fs = ConvertedExample();
    auto& d = Debloating(fs);
    ASSERT_TRUE(d.Entries().empty());

    auto handle = DOpen(d, "/f3");
    EXPECT_EQ(handle.layerId, d.Id());
    EXPECT_EQ(handle.entry.size, 3 * kMiB);
    EXPECT_TRUE(d.Contains("/f3"));
    EXPECT_FALSE(d.Children()[1]->Contains("/f3"));
    EXPECT_TRUE(d.Children()[1]->Contains("/f4"));
}

TEST(DOpen, SecondAccessIsServedByTheDebloatingLayer)
{
    auto fs = ConvertedExample();
    auto& d = Debloating(fs);

    auto first  = TryDOpen(d, "/f3");
    auto second = TryDOpen(d, "/f3");

    EXPECT_TRUE(first.migrated);
    EXPECT_EQ(first.probes, 3u);
    EXPECT_FALSE(second.migrated);
    EXPECT_EQ(second.probes, 1u);
    EXPECT_EQ(first.entry, second.entry);
}

TEST(DOpen, OnlyTheTopmostHolderIsMoved)
{
    auto upper = fixtures::MakeImageLayer({FileEntry::Regular("/a", "upper")});
    auto lower = fixtures::MakeImageLayer({FileEntry::Regular("/a", "lower")});
    auto fs    = ConvertNoSharing(ContainerFs::FromImageLayers("c", {upper, lower}));
    auto& d    = Debloating(fs);

    auto handle = DOpen(d, "/a");
    EXPECT_EQ(handle.entry.Bytes(), "upper");
    EXPECT_FALSE(d.Children()[0]->Contains("/a"));
    EXPECT_TRUE(d.Children()[1]->Contains("/a"));
}

TEST(DOpen, MissingPathAndWrongLayerRole)
{
    auto fs = ConvertedExample();
    EXPECT_EQ(CodeOf([&] { DOpen(Debloating(fs), "/nope"); }), ErrorCode::NotFound);
    EXPECT_FALSE(TryDOpen(Debloating(fs), "/nope").entry);
    EXPECT_EQ(TryDOpen(Debloating(fs), "/nope").probes, 3u);

    auto image = fixtures::MakeImageLayer({FileEntry::Regular("/a", "x")});
    EXPECT_EQ(CodeOf([&] { DOpen(*image, "/a"); }), ErrorCode::InvalidArgument);
}

TEST(DOpen, MigratedFilesBringTheirParentDirectories)
{
    auto layer = fixtures::MakeImageLayer({
        FileEntry::Directory("/usr", 0711),
        FileEntry::Directory("/usr/lib", 0700),
        FileEntry::Regular("/usr/lib/libz.so", "z"),
    });
    auto fs = ConvertNoSharing(ContainerFs::FromImageLayers("c", {layer}));
    auto& d = Debloating(fs);

    DOpen(d, "/usr/lib/libz.so");
    ASSERT_TRUE(d.Contains("/usr/lib"));
    EXPECT_EQ(d.Find("/usr")->mode, 0711u);
    EXPECT_EQ(d.Find("/usr/lib")->mode, 0700u);
    EXPECT_EQ(d.Find("/usr/lib")->kind, FileKind::Directory);
}

TEST(Resolver, ReadReturnsTheBytesAndRecordsTheHit)
{
    auto     fs = ConvertedExample();
    Resolver resolver(fs);

    auto bytes = resolver.Read("/f1", UINT64_MAX);
    EXPECT_EQ(bytes.size(), kMiB);
    EXPECT_EQ(Sha256Digest(bytes), fixtures::TwoContainerFleet()[0].roots[0]->Find("/f1")->contentDigest);

    ASSERT_EQ(resolver.Record().size(), 1u);
    const auto& event = resolver.Record().front();
    EXPECT_EQ(event.hitLayer, Debloating(fs).Id());
    EXPECT_TRUE(event.migrated);
    // Write layer, debloating layer, first child.
    EXPECT_EQ(event.probes, 3u);
    EXPECT_EQ(event.debloatProbes, 2u);

    resolver.Read("/f1", 16);
    EXPECT_EQ(resolver.Record().back().probes, 2u);
    EXPECT_EQ(resolver.Record().back().debloatProbes, 1u);
    EXPECT_FALSE(resolver.Record().back().migrated);
}

TEST(Resolver, ReadHonorsTheCapacity)
{
    auto     fs = ConvertedExample();
    Resolver resolver(fs);
    EXPECT_EQ(resolver.Read("/f2", 100).size(), 100u);
    EXPECT_EQ(resolver.Read("/f2", 0).size(), 0u);
}

TEST(Resolver, HandlesReadSequentially)
{
    auto layer = fixtures::MakeImageLayer({FileEntry::Regular("/msg", "hello world")});
    auto fs    = ConvertNoSharing(ContainerFs::FromImageLayers("c", {layer}));

    Resolver resolver(fs);
    auto     handle = resolver.Open("/msg");
    EXPECT_EQ(resolver.Read(handle, 5), "hello");
    EXPECT_EQ(resolver.Read(handle, 100), " world");
    EXPECT_EQ(resolver.Read(handle, 100), "");
}

TEST(Resolver, MissWalksEveryLayer)
{
    auto     fs = ConvertedExample();
    Resolver resolver(fs);

    EXPECT_EQ(CodeOf([&] { resolver.Read("/nope", 1); }), ErrorCode::NotFound);
    const auto& event = resolver.Record().back();
    EXPECT_FALSE(event.Hit());
    EXPECT_EQ(event.error, ErrorCode::NotFound);
    EXPECT_EQ(event.probes, 4u);
    EXPECT_TRUE(Debloating(fs).Entries().empty());
}

TEST(Resolver, UpperLayerShadowsLower)
{
    auto upper = fixtures::MakeImageLayer({FileEntry::Regular("/etc/os-release", "new")});
    auto lower = fixtures::MakeImageLayer({FileEntry::Regular("/etc/os-release", "old")});
    auto fs    = ConvertNoSharing(ContainerFs::FromImageLayers("c", {upper, lower}));

    Resolver resolver(fs);
    EXPECT_EQ(resolver.Read("/etc/os-release", 64), "new");
    EXPECT_EQ(resolver.Read("/etc/os-release", 64), "new");
}

TEST(Resolver, DirectoriesCannotBeRead)
{
    auto layer = fixtures::MakeImageLayer({FileEntry::Directory("/etc"), FileEntry::Regular("/etc/a", "a")});
    auto fs    = ConvertNoSharing(ContainerFs::FromImageLayers("c", {layer}));

    Resolver resolver(fs);
    EXPECT_EQ(CodeOf([&] { resolver.Read("/etc", 1); }), ErrorCode::IsDirectory);
    EXPECT_EQ(CodeOf([&] { resolver.Read("/etc/a/b", 1); }), ErrorCode::NotFound);
}

TEST(Resolver, StatMigratesLikeRead)
{
    auto     fs = ConvertedExample();
    Resolver resolver(fs);

    auto entry = resolver.Stat("/f4");
    EXPECT_EQ(entry.size, 4 * kMiB);
    EXPECT_TRUE(Debloating(fs).Contains("/f4"));
    EXPECT_TRUE(resolver.Record().back().migrated);
}

TEST(Resolver, ListSeesEveryLayerButMovesNoChildren)
{
    auto     fs = ConvertedExample();
    Resolver resolver(fs);

    resolver.Read("/f1", 1);
    auto names = resolver.ListDir("/");
    EXPECT_EQ(names, (std::set<std::string> {"f1", "f2", "f3", "f4"}));
    EXPECT_EQ(Debloating(fs).Entries().size(), 1u);

    EXPECT_EQ(CodeOf([&] { resolver.ListDir("/f2"); }), ErrorCode::NotADirectory);
    EXPECT_EQ(CodeOf([&] { resolver.ListDir("/missing"); }), ErrorCode::NotFound);
}

TEST(Resolver, ListMigratesOnlyTheDirectoryItself)
{
    auto layer = fixtures::MakeImageLayer({
        FileEntry::Directory("/conf.d", 0750),
        FileEntry::Regular("/conf.d/a.conf", "a"),
        FileEntry::Regular("/conf.d/b.conf", "b"),
    });
    auto fs = ConvertNoSharing(ContainerFs::FromImageLayers("c", {layer}));

    Resolver resolver(fs);
    EXPECT_EQ(resolver.ListDir("/conf.d"), (std::set<std::string> {"a.conf", "b.conf"}));

    auto& d = Debloating(fs);
    ASSERT_TRUE(d.Contains("/conf.d"));
    EXPECT_EQ(d.Find("/conf.d")->mode, 0750u);
    EXPECT_FALSE(d.Contains("/conf.d/a.conf"));
}

TEST(Resolver, WritesStayInTheWriteLayer)
{
    auto     fs = ConvertedExample();
    Resolver resolver(fs);

    resolver.Write("/new", "fresh");
    EXPECT_EQ(resolver.Record().back().hitLayer, fs.writeLayer->Id());
    EXPECT_EQ(resolver.Record().back().probes, 1u);
    EXPECT_EQ(resolver.Read("/new", 64), "fresh");
    EXPECT_EQ(resolver.Record().back().hitLayer, fs.writeLayer->Id());

    // Copy-on-write: the image copy is untouched and hidden.
    resolver.Write("/f2", "patched");
    EXPECT_EQ(resolver.Read("/f2", 64), "patched");
    EXPECT_EQ(Debloating(fs).Children()[0]->Find("/f2")->size, 2 * kMiB);
    EXPECT_FALSE(Debloating(fs).Contains("/f2"));
}

TEST(Resolver, WritesOntoDirectoriesFail)
{
    auto layer = fixtures::MakeImageLayer({FileEntry::Directory("/var"), FileEntry::Regular("/var/x", "x")});
    auto fs    = ConvertNoSharing(ContainerFs::FromImageLayers("c", {layer}));

    Resolver resolver(fs);
    EXPECT_EQ(CodeOf([&] { resolver.Write("/var", "x"); }), ErrorCode::IsDirectory);
    EXPECT_TRUE(fs.writeLayer->Entries().empty());
}

TEST(Resolver, SymlinksAreFollowedAndBothEndsMigrate)
{
    auto layer = fixtures::MakeImageLayer({
        FileEntry::Directory("/lib"),
        FileEntry::Regular("/lib/libssl.so.3", "ssl"),
        FileEntry::Symlink("/lib/libssl.so", "libssl.so.3"),
        FileEntry::Symlink("/lib/abs", "/lib/libssl.so"),
        FileEntry::Symlink("/loop-a", "/loop-b"),
        FileEntry::Symlink("/loop-b", "/loop-a"),
        FileEntry::Symlink("/dangling", "/nowhere"),
    });
    auto fs = ConvertNoSharing(ContainerFs::FromImageLayers("c", {layer}));
    auto& d = Debloating(fs);

    Resolver resolver(fs);
    EXPECT_EQ(resolver.Read("/lib/abs", 64), "ssl");
    EXPECT_TRUE(d.Contains("/lib/abs"));
    EXPECT_TRUE(d.Contains("/lib/libssl.so"));
    EXPECT_TRUE(d.Contains("/lib/libssl.so.3"));
    EXPECT_EQ(resolver.Record().size(), 3u);

    EXPECT_EQ(CodeOf([&] { resolver.Read("/loop-a", 1); }), ErrorCode::TooManyLinks);
    EXPECT_EQ(CodeOf([&] { resolver.Read("/dangling", 1); }), ErrorCode::NotFound);
    EXPECT_TRUE(d.Contains("/dangling"));

    // Stat describes the link itself.
    auto link = resolver.Stat("/loop-b");
    EXPECT_EQ(link.kind, FileKind::Symlink);
    EXPECT_EQ(link.linkTarget, "/loop-a");
}

TEST(Peek, ResolvesWithoutMigrating)
{
    auto fs = ConvertedExample();

    auto entry = Peek(fs, "/f3");
    ASSERT_TRUE(entry);
    EXPECT_EQ(entry->size, 3 * kMiB);
    EXPECT_FALSE(Peek(fs, "/nope"));
    EXPECT_TRUE(Debloating(fs).Entries().empty());
}

TEST(Resolver, ConcurrentReadersOfASharedLayerMigrateOnce)
{
    auto fleet     = fixtures::TwoContainerFleet();
    auto converted = ConvertFullySharing(fleet);
    ASSERT_EQ(converted[0].roots, converted[1].roots);

    std::vector<std::thread> threads;
    std::atomic<int>         migrations {0};

    for (auto& fs : converted) {
        threads.emplace_back([&fs, &migrations] {
            Resolver resolver(fs);
            for (int i = 0; i < 50; ++i) {
                resolver.Read("/f2", 8);
                resolver.Read("/f3", 8);
            }
            for (const auto& event : resolver.Record()) {
                migrations += event.migrated ? 1 : 0;
            }
        });
    }
    for (auto& thread : threads) {
        thread.join();
    }

    EXPECT_EQ(migrations.load(), 2);
    EXPECT_TRUE(converted[0].roots[0]->Contains("/f2"));
    EXPECT_TRUE(converted[0].roots[1]->Contains("/f3"));
}

} // namespace
} // namespace debloatfs
