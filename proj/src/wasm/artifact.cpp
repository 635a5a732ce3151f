#include "wasmless/wasm/artifact.hpp"

#include "wasmless/sha256.hpp"
#include "wasmless/wasm/module.hpp"

namespace wasmless::wasm {

ModuleArtifact validate(ByteView bytes) {
    Module mod = read_module(bytes);
    ModuleArtifact art;
    art.raw_bytes.assign(bytes.begin(), bytes.end());
    art.content_hash = sha256_hex(bytes);
    art.instruction_count_static = mod.instruction_count;
    return art;
}

}  // namespace wasmless::wasm
