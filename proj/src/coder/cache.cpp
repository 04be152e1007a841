// SPDX-License-Identifier: Apache-2.0
#include "synergy/coder.hpp"

#include "synergy/error.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

namespace synergy::coder {

std::string cache_key(std::string_view prompt_text, std::string_view model_name, double temperature) {
    char temp[32];
    std::snprintf(temp, sizeof temp, "%.17g", temperature);

    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 unavailable");
    const char sep = '\x1f';
    EVP_DigestUpdate(ctx.get(), prompt_text.data(), prompt_text.size());
    EVP_DigestUpdate(ctx.get(), &sep, 1);
    EVP_DigestUpdate(ctx.get(), model_name.data(), model_name.size());
    EVP_DigestUpdate(ctx.get(), &sep, 1);
    EVP_DigestUpdate(ctx.get(), temp, std::char_traits<char>::length(temp));
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);

    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec)
        throw Error(ErrorKind::Io, "cannot create cache directory " + dir_.string() + ": " + ec.message());
}

std::mutex& ResponseCache::lock_for(const std::string& key) const {
    return stripes_[std::hash<std::string>{}(key) % stripes_.size()];
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
    std::lock_guard lock(lock_for(key));
    std::ifstream in(dir_ / key, std::ios::binary);
    if (!in)
        return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void ResponseCache::put(const std::string& key, const std::string& body) const {
    std::lock_guard lock(lock_for(key));
    std::ostringstream tmp_name;
    tmp_name << key << ".tmp." << std::this_thread::get_id();
    const auto tmp = dir_ / tmp_name.str();
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorKind::Io, "cannot write cache entry " + tmp.string());
        out << body;
    }
    std::filesystem::rename(tmp, dir_ / key);
}

} // namespace synergy::coder
