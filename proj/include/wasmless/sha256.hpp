#pragma once

#include <openssl/evp.h>

#include <stdexcept>

#include "wasmless/bytes.hpp"

namespace wasmless {

/// Hex-encoded SHA-256 digest.
inline std::string sha256_hex(ByteView data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256: EVP_Digest failed");
    }
    return to_hex(ByteView(digest, len));
}

}  // namespace wasmless
