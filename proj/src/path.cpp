/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "debloatfs/path.hpp"

namespace debloatfs::path {

std::string Normalize(std::string_view input)
{
    std::vector<std::string_view> parts;
    size_t                        pos = 0;

    while (pos <= input.size()) {
        auto next = input.find('/', pos);
        if (next == std::string_view::npos) {
            next = input.size();
        }

        auto part = input.substr(pos, next - pos);
        if (part == "..") {
            if (!parts.empty()) {
                parts.pop_back();
            }
        } else if (!part.empty() && part != ".") {
            parts.push_back(part);
        }

        pos = next + 1;
    }

    if (parts.empty()) {
        return "/";
    }

    std::string out;
    for (auto part : parts) {
        out += '/';
        out += part;
    }

    return out;
}

bool IsNormalized(std::string_view path)
{
    return !path.empty() && path.front() == '/' && Normalize(path) == path;
}

std::string Parent(std::string_view path)
{
    auto pos = path.rfind('/');
    if (pos == std::string_view::npos || pos == 0) {
        return "/";
    }

    return std::string(path.substr(0, pos));
}

std::string BaseName(std::string_view path)
{
    auto pos = path.rfind('/');
    if (pos == std::string_view::npos) {
        return std::string(path);
    }

    return std::string(path.substr(pos + 1));
}

std::string ResolveLink(std::string_view linkPath, std::string_view target)
{
    if (!target.empty() && target.front() == '/') {
        return Normalize(target);
    }

    return Normalize(Parent(linkPath) + "/" + std::string(target));
}

std::vector<std::string> Ancestors(std::string_view path)
{
    std::vector<std::string> out;

    for (auto pos = path.find('/', 1); pos != std::string_view::npos; pos = path.find('/', pos + 1)) {
        out.emplace_back(path.substr(0, pos));
    }

    return out;
}

} // namespace debloatfs::path
