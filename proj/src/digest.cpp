/*
 * Copyright (C) 2026 The debloatfs Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "debloatfs/digest.hpp"

#include <array>
#include <vector>

#include <openssl/evp.h>

#include "debloatfs/error.hpp"

namespace debloatfs {

namespace {

constexpr std::string_view kSha256Prefix = "sha256:";

} // namespace

std::string Sha256Hex(std::string_view data)
{
    std::array<unsigned char, EVP_MAX_MD_SIZE> md {};
    unsigned int                               len = 0;

    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::IoError, "sha256 computation failed");
    }

    static constexpr char kHex[] = "0123456789abcdef";
    std::string           hex(2 * len, '0');

    for (unsigned int i = 0; i < len; ++i) {
        hex[2 * i]     = kHex[md[i] >> 4];
        hex[2 * i + 1] = kHex[md[i] & 0xf];
    }

    return hex;
}

std::string Sha256Digest(std::string_view data)
{
    return std::string(kSha256Prefix) + Sha256Hex(data);
}

std::string DigestHex(std::string_view digest)
{
    if (digest.substr(0, kSha256Prefix.size()) != kSha256Prefix) {
        return {};
    }

    auto hex = digest.substr(kSha256Prefix.size());
    if (hex.size() != 64) {
        return {};
    }

    for (char c : hex) {
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) {
            return {};
        }
    }

    return std::string(hex);
}

std::string Base64Encode(std::string_view data)
{
    std::string out(4 * ((data.size() + 2) / 3), '\0');
    int         n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                reinterpret_cast<const unsigned char*>(data.data()), static_cast<int>(data.size()));

    out.resize(static_cast<size_t>(n));

    return out;
}

std::string Base64Decode(std::string_view text)
{
    if (text.size() % 4 != 0) {
        throw Error(ErrorCode::InvalidArgument, "base64 length is not a multiple of 4");
    }

    std::string out(3 * text.size() / 4, '\0');
    int         n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                reinterpret_cast<const unsigned char*>(text.data()), static_cast<int>(text.size()));

    if (n < 0) {
        throw Error(ErrorCode::InvalidArgument, "malformed base64");
    }

    // EVP_DecodeBlock does not account for padding.
    size_t padding = 0;
    if (!text.empty() && text.back() == '=') {
        ++padding;
        if (text.size() >= 2 && text[text.size() - 2] == '=') {
            ++padding;
        }
    }

    out.resize(static_cast<size_t>(n) - padding);

    return out;
}

} // namespace debloatfs
