/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "debloatfs/tar.hpp"

#include <algorithm>
#include <cstring>
#include <optional>

#include "debloatfs/error.hpp"
#include "debloatfs/path.hpp"

namespace debloatfs::tar {

namespace {

constexpr size_t kBlock = 512;

constexpr size_t kNameOff     = 0;
constexpr size_t kNameLen     = 100;
constexpr size_t kModeOff     = 100;
constexpr size_t kUidOff      = 108;
constexpr size_t kGidOff      = 116;
constexpr size_t kSizeOff     = 124;
constexpr size_t kMtimeOff    = 136;
constexpr size_t kChksumOff   = 148;
constexpr size_t kTypeOff     = 156;
constexpr size_t kLinkOff     = 157;
constexpr size_t kLinkLen     = 100;
constexpr size_t kMagicOff    = 257;
constexpr size_t kVersionOff  = 263;
constexpr size_t kDevMajorOff = 329;
constexpr size_t kDevMinorOff = 337;
constexpr size_t kPrefixOff   = 345;
constexpr size_t kPrefixLen   = 155;

constexpr char kTypeRegular   = '0';
constexpr char kTypeSymlink   = '2';
constexpr char kTypeDirectory = '5';
constexpr char kTypePax       = 'x';
constexpr char kTypePaxGlobal = 'g';
constexpr char kTypeGnuLong   = 'L';
constexpr char kTypeGnuLink   = 'K';

// Octal field of width-1 digits followed by NUL.
void PutOctal(char* field, size_t width, uint64_t value)
{
    std::string digits(width - 1, '0');

    for (size_t i = width - 1; i-- > 0 && value > 0;) {
        digits[i] = static_cast<char>('0' + (value & 7));
        value >>= 3;
    }

    if (value != 0) {
        throw Error(ErrorCode::InvalidArgument, "value does not fit a tar header field");
    }

    std::memcpy(field, digits.data(), width - 1);
    field[width - 1] = '\0';
}

void PutString(char* field, size_t width, std::string_view value)
{
    std::memcpy(field, value.data(), std::min(width, value.size()));
}

void FinishHeader(char* header)
{
    std::memset(header + kChksumOff, ' ', 8);

    uint64_t sum = 0;
    for (size_t i = 0; i < kBlock; ++i) {
        sum += static_cast<unsigned char>(header[i]);
    }

    PutOctal(header + kChksumOff, 7, sum);
    header[kChksumOff + 7] = ' ';
}

std::string Header(std::string_view name, char type, uint32_t mode, uint64_t size, std::string_view link)
{
    std::string block(kBlock, '\0');
    char*       h = block.data();

    PutString(h + kNameOff, kNameLen, name);
    PutOctal(h + kModeOff, 8, mode & 07777);
    PutOctal(h + kUidOff, 8, 0);
    PutOctal(h + kGidOff, 8, 0);
    PutOctal(h + kSizeOff, 12, size);
    PutOctal(h + kMtimeOff, 12, 0);
    h[kTypeOff] = type;
    PutString(h + kLinkOff, kLinkLen, link);
    std::memcpy(h + kMagicOff, "ustar", 6);
    std::memcpy(h + kVersionOff, "00", 2);
    PutOctal(h + kDevMajorOff, 8, 0);
    PutOctal(h + kDevMinorOff, 8, 0);

    FinishHeader(h);

    return block;
}

void Pad(std::string& out)
{
    if (auto rem = out.size() % kBlock; rem != 0) {
        out.append(kBlock - rem, '\0');
    }
}

std::string PaxRecord(std::string_view key, std::string_view value)
{
    // "<len> <key>=<value>\n" where <len> counts itself.
    size_t body = key.size() + value.size() + 3;
    size_t len  = body + 1;

    while (std::to_string(len).size() + body != len) {
        len = std::to_string(len).size() + body;
    }

    return std::to_string(len) + " " + std::string(key) + "=" + std::string(value) + "\n";
}

std::string ArchiveName(const FileEntry& entry)
{
    auto name = entry.path.substr(1);
    if (entry.kind == FileKind::Directory) {
        name += '/';
    }

    return name;
}

uint64_t ParseOctal(std::string_view field)
{
    uint64_t value = 0;
    size_t   i     = 0;

    while (i < field.size() && field[i] == ' ') {
        ++i;
    }

    for (; i < field.size() && field[i] >= '0' && field[i] <= '7'; ++i) {
        value = (value << 3) | static_cast<uint64_t>(field[i] - '0');
    }

    return value;
}

std::string_view CString(std::string_view field)
{
    return field.substr(0, std::min(field.size(), field.find('\0')));
}

struct PaxOverrides {
    std::optional<std::string> path;
    std::optional<std::string> linkPath;
};

void ParsePax(std::string_view data, PaxOverrides& out)
{
    while (!data.empty()) {
        auto space = data.find(' ');
        if (space == std::string_view::npos) {
            throw Error(ErrorCode::CorruptBlob, "malformed pax record");
        }

        auto len = static_cast<size_t>(std::stoull(std::string(data.substr(0, space))));
        if (len <= space + 1 || len > data.size()) {
            throw Error(ErrorCode::CorruptBlob, "malformed pax record length");
        }

        auto record = data.substr(space + 1, len - space - 2);
        auto eq     = record.find('=');

        if (eq != std::string_view::npos) {
            auto key   = record.substr(0, eq);
            auto value = std::string(record.substr(eq + 1));

            if (key == "path") {
                out.path = value;
            } else if (key == "linkpath") {
                out.linkPath = value;
            }
        }

        data.remove_prefix(len);
    }
}

} // namespace

std::string WriteCanonical(const EntryMap& entries)
{
    std::string out;

    for (const auto& [path, entry] : entries) {
        auto name = ArchiveName(entry);
        char type = entry.kind == FileKind::Regular ? kTypeRegular
            : entry.kind == FileKind::Directory     ? kTypeDirectory
                                                    : kTypeSymlink;

        bool longName = name.size() > kNameLen;
        bool longLink = entry.linkTarget.size() > kLinkLen;

        if (longName || longLink) {
            std::string pax;

            if (longName) {
                pax += PaxRecord("path", name);
            }
            if (longLink) {
                pax += PaxRecord("linkpath", entry.linkTarget);
            }

            out += Header("././@PaxHeader", kTypePax, 0644, pax.size(), {});
            out += pax;
            Pad(out);
        }

        auto size = entry.kind == FileKind::Regular ? entry.size : 0;

        out += Header(longName ? std::string_view(name).substr(0, kNameLen) : std::string_view(name), type,
            entry.mode, size, longLink ? std::string_view(entry.linkTarget).substr(0, kLinkLen) : entry.linkTarget);

        if (entry.kind == FileKind::Regular) {
            out += entry.Bytes();
            Pad(out);
        }
    }

    out.append(2 * kBlock, '\0');

    return out;
}

EntryMap Read(std::string_view archive)
{
    EntryMap     entries;
    PaxOverrides pending;
    size_t       pos        = 0;
    bool         terminated = false;

    while (pos + kBlock <= archive.size()) {
        auto header = archive.substr(pos, kBlock);

        if (std::all_of(header.begin(), header.end(), [](char c) { return c == '\0'; })) {
            terminated = true;
            break;
        }

        uint64_t sum = 0;
        for (size_t i = 0; i < kBlock; ++i) {
            sum += (i >= kChksumOff && i < kChksumOff + 8) ? ' ' : static_cast<unsigned char>(header[i]);
        }

        if (sum != ParseOctal(header.substr(kChksumOff, 8))) {
            throw Error(ErrorCode::CorruptBlob, "tar header checksum mismatch at offset " + std::to_string(pos));
        }

        auto size = ParseOctal(header.substr(kSizeOff, 12));
        auto type = header[kTypeOff];

        pos += kBlock;
        if (pos + size > archive.size()) {
            throw Error(ErrorCode::CorruptBlob, "truncated tar entry");
        }

        auto data = archive.substr(pos, size);
        pos += (size + kBlock - 1) / kBlock * kBlock;

        if (type == kTypePax) {
            ParsePax(data, pending);
            continue;
        }
        if (type == kTypePaxGlobal) {
            continue;
        }
        if (type == kTypeGnuLong) {
            pending.path = std::string(CString(data));
            continue;
        }
        if (type == kTypeGnuLink) {
            pending.linkPath = std::string(CString(data));
            continue;
        }

        std::string name;
        if (pending.path) {
            name = *pending.path;
        } else {
            auto prefix = CString(header.substr(kPrefixOff, kPrefixLen));
            auto base   = CString(header.substr(kNameOff, kNameLen));

            name = prefix.empty() ? std::string(base) : std::string(prefix) + "/" + std::string(base);
        }

        auto link = pending.linkPath ? *pending.linkPath : std::string(CString(header.substr(kLinkOff, kLinkLen)));
        auto mode = static_cast<uint32_t>(ParseOctal(header.substr(kModeOff, 8)) & 07777);

        pending = {};

        auto path = path::Normalize(name);
        if (path == "/") {
            continue;
        }

        switch (type) {
        case kTypeRegular:
        case '\0':
        case '7':
            entries.insert_or_assign(path, FileEntry::Regular(path, std::string(data), mode));
            break;
        case kTypeDirectory:
            entries.insert_or_assign(path, FileEntry::Directory(path, mode));
            break;
        case kTypeSymlink:
            entries.insert_or_assign(path, FileEntry::Symlink(path, link, mode));
            break;
        default:
            throw Error(ErrorCode::CorruptBlob, std::string("unsupported tar entry type '") + type + "' for " + path);
        }
    }

    // A missing end marker means the archive was cut short.
    if (!terminated) {
        throw Error(ErrorCode::CorruptBlob, "tar archive ends without an end-of-archive marker");
    }

    return entries;
}

} // namespace debloatfs::tar
