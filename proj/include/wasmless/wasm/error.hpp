#pragma once

#include <stdexcept>
#include <string>

namespace wasmless::wasm {

/// Base class for everything the module tools can reject.
struct WasmError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input does not start with the `\0asm` magic / version 1 header.
struct NotWasm : WasmError {
    using WasmError::WasmError;
};

/// Header is fine but the section or body structure is invalid.
struct MalformedModule : WasmError {
    using WasmError::WasmError;
};

/// Instruction outside the supported core 1.0 set.
struct UnsupportedFeature : WasmError {
    using WasmError::WasmError;
};

/// A straight-line segment's static cost exceeds 2^32.
struct TransformOverflow : WasmError {
    using WasmError::WasmError;
};

}  // namespace wasmless::wasm
