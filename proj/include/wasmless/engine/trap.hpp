#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wasmless::engine {

enum class TrapKind {
    generic,          // wasm-level trap (unreachable, div by zero, OOB, ...)
    fuel_exhausted,   // injected fuel counter went negative
    memory_exceeded,  // guest tried to grow past the platform limit
    timeout,          // watchdog aborted the run
    host,             // host-side fault (unresolved import, I/O error, ...)
};

struct Trap : std::runtime_error {
    TrapKind kind;
    explicit Trap(TrapKind k, const std::string& what) : std::runtime_error(what), kind(k) {}
};

/// Thrown by proc_exit; unwinds the interpreter without being an error.
struct GuestExit {
    int32_t code;
};

/// Module is structurally valid but the engine cannot take it.
struct EngineReject : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace wasmless::engine
