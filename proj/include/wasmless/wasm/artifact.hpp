#pragma once

#include <cstdint>
#include <string>

#include "wasmless/bytes.hpp"

namespace wasmless::wasm {

/// A deployed function's bytes in both forms, keyed by the hash of the
/// raw upload.
struct ModuleArtifact {
    Bytes raw_bytes;
    Bytes instrumented_bytes;        // empty until instrument() ran
    std::string content_hash;        // sha-256 of raw_bytes, hex
    uint64_t instruction_count_static = 0;

    bool instrumented() const { return !instrumented_bytes.empty(); }
};

/// Parse + validate `bytes` as a core wasm 1.0 module and derive the
/// artifact metadata. Throws NotWasm / MalformedModule / UnsupportedFeature.
ModuleArtifact validate(ByteView bytes);

}  // namespace wasmless::wasm
