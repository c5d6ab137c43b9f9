/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "debloatfs/fixtures.hpp"

#include <random>
#include <set>

#include "debloatfs/digest.hpp"
#include "debloatfs/image_io.hpp"
#include "debloatfs/path.hpp"
#include "debloatfs/tar.hpp"

namespace fs = std::filesystem;

namespace debloatfs::fixtures {

namespace {

uint64_t Fnv1a(std::string_view text)
{
    uint64_t hash = 1469598103934665603ull;

    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }

    return hash;
}

FileEntry File(const std::string& path, uint64_t size, uint32_t mode = 0644)
{
    return FileEntry::Regular(path, Bytes(path, size), mode);
}

FileEntry Text(const std::string& path, std::string text, uint32_t mode = 0644)
{
    return FileEntry::Regular(path, std::move(text), mode);
}

// Adds directory entries for every ancestor not already present.
std::vector<FileEntry> WithParents(std::vector<FileEntry> entries)
{
    std::set<std::string> have;
    for (const auto& entry : entries) {
        have.insert(entry.path);
    }

    std::vector<FileEntry> out = entries;
    for (const auto& entry : entries) {
        for (const auto& dir : path::Ancestors(entry.path)) {
            if (have.insert(dir).second) {
                out.push_back(FileEntry::Directory(dir));
            }
        }
    }

    return out;
}

void WriteTrace(const fs::path& file, const AccessTrace& trace)
{
    io::WriteFile(file, TraceToJsonl(trace));
}

} // namespace

std::string Bytes(std::string_view name, uint64_t size)
{
    std::mt19937_64 rng(Fnv1a(name));
    std::string     out(size, '\0');

    for (uint64_t i = 0; i < size; i += 8) {
        auto word = rng();
        for (uint64_t j = 0; j < 8 && i + j < size; ++j) {
            out[i + j] = static_cast<char>((word >> (8 * j)) & 0xff);
        }
    }

    return out;
}

LayerPtr MakeImageLayer(std::vector<FileEntry> entries)
{
    auto layer = Layer::Make(LayerRole::Image);

    for (auto& entry : entries) {
        layer->Put(std::move(entry));
    }

    layer->SetDigest(Sha256Digest(tar::WriteCanonical(layer->Entries())));

    return layer;
}

std::vector<ContainerFs> TwoContainerFleet()
{
    auto upper = MakeImageLayer({File("/f1", 1 * kMiB), File("/f2", 2 * kMiB)});
    auto lower = MakeImageLayer({File("/f3", 3 * kMiB), File("/f4", 4 * kMiB)});

    return {
        ContainerFs::FromImageLayers("pair-c1", {upper, lower}),
        ContainerFs::FromImageLayers("pair-c2", {upper, lower}),
    };
}

AccessTrace TraceOf(std::initializer_list<std::string> readPaths)
{
    AccessTrace trace;

    for (const auto& path : readPaths) {
        trace.push_back({AccessOp::Read, path});
    }

    return trace;
}

std::vector<AccessTrace> TwoContainerTraces()
{
    return {TraceOf({"/f1", "/f2"}), TraceOf({"/f2", "/f3"})};
}

ContainerFs FiveLayerImage()
{
    std::vector<LayerPtr> bottomUp;

    for (int n = 1; n <= 5; ++n) {
        auto                   dir = "/layer" + std::to_string(n);
        std::vector<FileEntry> entries;

        for (int k = 0; k < 4; ++k) {
            entries.push_back(File(dir + "/file" + std::to_string(k), 4096 * static_cast<uint64_t>(n + k)));
        }
        entries.push_back(Text("/etc/version", "layer " + std::to_string(n) + "\n"));

        bottomUp.push_back(MakeImageLayer(WithParents(std::move(entries))));
    }

    return ContainerFs::FromImageLayers("semi5", {bottomUp.rbegin(), bottomUp.rend()});
}

AccessTrace FiveLayerTrace()
{
    return {
        {AccessOp::Read, "/etc/version"},
        {AccessOp::Read, "/layer5/file0"},
        {AccessOp::Stat, "/layer5/file2"},
        {AccessOp::Read, "/layer1/file1"},
        {AccessOp::List, "/layer3"},
    };
}

ContainerFs WebServerImage()
{
    const std::string lib = "/lib/x86_64-linux-gnu";

    std::vector<FileEntry> base = {
        File("/bin/sh", 125 * 1024, 0755),
        File("/bin/bash", 1180 * 1024, 0755),
        File("/bin/ls", 138 * 1024, 0755),
        File("/bin/cat", 35 * 1024, 0755),
        File("/bin/tar", 520 * 1024, 0755),
        File("/usr/bin/perl", 3400 * 1024, 0755),
        File("/usr/bin/apt", 18 * 1024, 0755),
        File(lib + "/libc.so.6", 2160 * 1024),
        File(lib + "/libm.so.6", 920 * 1024),
        File(lib + "/libcrypt.so.1", 200 * 1024),
        File(lib + "/libpcre2-8.so.0", 600 * 1024),
        File(lib + "/libz.so.1", 120 * 1024),
        File(lib + "/libssl.so.3", 680 * 1024),
        File(lib + "/libcrypto.so.3", 4400 * 1024),
        File(lib + "/libstdc++.so.6", 2200 * 1024),
        FileEntry::Symlink(lib + "/libssl.so", "libssl.so.3"),
        FileEntry::Symlink(lib + "/libcrypto.so", "libcrypto.so.3"),
        Text("/etc/passwd", "root:x:0:0:root:/root:/bin/bash\nnginx:x:101:101:nginx:/nonexistent:/bin/false\n"),
        Text("/etc/group", "root:x:0:\nnginx:x:101:\n"),
        Text("/etc/nsswitch.conf", "passwd: files\ngroup: files\nhosts: files dns\n"),
        File("/var/lib/dpkg/status", 380 * 1024),
        FileEntry::Directory("/tmp", 01777),
    };
    for (int i = 0; i < 40; ++i) {
        base.push_back(File("/usr/share/perl5/Module" + std::to_string(i) + ".pm", 100 * 1024));
        base.push_back(File("/usr/lib/python3/dist-packages/pkg" + std::to_string(i) + "/__init__.py", 160 * 1024));
    }
    for (int i = 0; i < 120; ++i) {
        base.push_back(File("/usr/share/zoneinfo/Zone" + std::to_string(i), 12 * 1024));
    }
    for (int i = 0; i < 24; ++i) {
        base.push_back(File("/usr/share/doc/pkg" + std::to_string(i) + "/copyright", 6 * 1024));
        base.push_back(File("/usr/share/locale/l" + std::to_string(i) + "/LC_MESSAGES/coreutils.mo", 48 * 1024));
    }

    std::vector<FileEntry> server = {
        File("/usr/sbin/nginx", 1300 * 1024, 0755),
        File("/usr/lib/nginx/modules/ngx_http_geoip_module.so", 40 * 1024),
        File("/usr/lib/nginx/modules/ngx_http_image_filter_module.so", 44 * 1024),
        File("/usr/lib/nginx/modules/ngx_http_js_module.so", 1500 * 1024),
        File("/usr/lib/nginx/modules/ngx_http_xslt_filter_module.so", 40 * 1024),
        File("/usr/lib/nginx/modules/ngx_stream_js_module.so", 1400 * 1024),
        Text("/etc/nginx/nginx.conf", "user nginx;\nworker_processes auto;\nevents { worker_connections 1024; }\n"
                                      "http { include /etc/nginx/mime.types; include /etc/nginx/conf.d/*.conf; }\n"),
        File("/etc/nginx/mime.types", 5 * 1024),
        Text("/etc/nginx/conf.d/default.conf", "server { listen 80; root /usr/share/nginx/html; }\n"),
        Text("/usr/share/nginx/html/index.html", "<html><body><h1>Hello, NGINX!</h1></body></html>\n"),
        Text("/usr/share/nginx/html/50x.html", "<html><body>error</body></html>\n"),
        File("/usr/share/man/man8/nginx.8.gz", 12 * 1024),
        FileEntry::Directory("/var/cache/nginx", 0700),
        FileEntry::Symlink("/var/log/nginx/access.log", "/dev/stdout"),
        FileEntry::Symlink("/var/log/nginx/error.log", "/dev/stderr"),
    };

    std::vector<FileEntry> config = {
        Text("/docker-entrypoint.sh", "#!/bin/sh\nset -e\nexec \"$@\"\n", 0755),
        Text("/docker-entrypoint.d/10-listen-on-ipv6-by-default.sh", "#!/bin/sh\nexit 0\n", 0755),
        Text("/docker-entrypoint.d/20-envsubst-on-templates.sh", "#!/bin/sh\nexit 0\n", 0755),
        Text("/etc/nginx/conf.d/default.conf",
            "server {\n  listen 80;\n  location / { root /usr/share/nginx/html; index index.html; }\n"
            "  location /proxy { proxy_pass http://127.0.0.1:8080; }\n}\n"),
    };

    return ContainerFs::FromImageLayers("webserver",
        {
            MakeImageLayer(WithParents(std::move(config))),
            MakeImageLayer(WithParents(std::move(server))),
            MakeImageLayer(WithParents(std::move(base))),
        });
}

AccessTrace WebServerTrace()
{
    const std::string lib = "/lib/x86_64-linux-gnu";

    AccessTrace trace = {
        {AccessOp::Read, "/docker-entrypoint.sh"},
        {AccessOp::Read, "/bin/sh"},
        {AccessOp::List, "/docker-entrypoint.d"},
        {AccessOp::Read, "/docker-entrypoint.d/10-listen-on-ipv6-by-default.sh"},
        {AccessOp::Read, "/docker-entrypoint.d/20-envsubst-on-templates.sh"},
        {AccessOp::Read, "/usr/sbin/nginx"},
        {AccessOp::Read, lib + "/libc.so.6"},
        {AccessOp::Read, lib + "/libcrypt.so.1"},
        {AccessOp::Read, lib + "/libpcre2-8.so.0"},
        {AccessOp::Read, lib + "/libssl.so"},
        {AccessOp::Read, lib + "/libcrypto.so"},
        {AccessOp::Read, lib + "/libz.so.1"},
        {AccessOp::Read, "/etc/nsswitch.conf"},
        {AccessOp::Read, "/etc/passwd"},
        {AccessOp::Read, "/etc/group"},
        {AccessOp::Read, "/etc/nginx/nginx.conf"},
        {AccessOp::Read, "/etc/nginx/mime.types"},
        {AccessOp::List, "/etc/nginx/conf.d"},
        {AccessOp::Read, "/etc/nginx/conf.d/default.conf"},
        {AccessOp::Stat, "/var/cache/nginx"},
        {AccessOp::Stat, "/var/log/nginx/access.log"},
        {AccessOp::Stat, "/var/log/nginx/error.log"},
        {AccessOp::Write, "/var/run/nginx.pid", "1\n"},
        {AccessOp::Read, "/usr/share/nginx/html/index.html"},
        {AccessOp::Read, "/usr/share/nginx/html/50x.html"},
    };

    return trace;
}

void WriteAll(const fs::path& dir)
{
    fs::create_directories(dir);

    auto fleet  = TwoContainerFleet();
    auto traces = TwoContainerTraces();

    for (size_t i = 0; i < fleet.size(); ++i) {
        StoreImage(fleet[i], dir / fleet[i].id);
        WriteTrace(dir / (fleet[i].id + ".trace"), traces[i]);
    }

    StoreImage(FiveLayerImage(), dir / "semi5", kFiveLayerBaseDepth);
    WriteTrace(dir / "semi5.trace", FiveLayerTrace());

    StoreImage(WebServerImage(), dir / "webserver", kWebServerBaseDepth);
    WriteTrace(dir / "webserver.trace", WebServerTrace());
}

} // namespace debloatfs::fixtures
