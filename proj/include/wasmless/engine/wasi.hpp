#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wasmless/bytes.hpp"

namespace wasmless::engine {

class Instance;

struct Preopen {
    std::string host_dir;
    std::string guest_path;  // absolute, e.g. "/data"
};

struct WasiConfig {
    std::vector<std::string> argv;
    std::vector<std::pair<std::string, std::string>> env;
    Bytes stdin_bytes;
    std::vector<Preopen> preopens;
};

/// Per-invocation WASI preview1 state: the fd table, capability-scoped
/// preopens, buffered stdio. File descriptors never leak across instances.
class WasiContext {
  public:
    explicit WasiContext(WasiConfig cfg);
    ~WasiContext();
    WasiContext(const WasiContext&) = delete;
    WasiContext& operator=(const WasiContext&) = delete;

    Bytes stdout_bytes;
    Bytes stderr_bytes;

    /// WASI preview1 functions all return their errno as the single i32
    /// result; any other output goes through guest memory.
    using HostFn = uint32_t (*)(Instance&, const uint64_t* args);

    struct HostEntry {
        HostFn fn;
        uint8_t params;
        uint8_t results;          // 0 (proc_exit) or 1 (errno)
        uint32_t i64_param_mask;  // bit i set -> param i is i64, otherwise i32
    };

    /// nullptr when (module, name) is not a WASI preview1 function we host.
    static const HostEntry* resolve(const std::string& module, const std::string& name);

    // -- implementation state, used by the host functions ----------------
    struct FdEntry {
        enum Kind : uint8_t { empty, stdin_k, stdout_k, stderr_k, dir, file } kind = empty;
        int host_fd = -1;
        uint32_t preopen = 0;  // kind == dir
    };

    WasiConfig cfg;
    std::vector<FdEntry> fds;
    size_t stdin_pos = 0;

    int32_t alloc_fd(FdEntry e);
};

}  // namespace wasmless::engine
