#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "wasmless/engine/compiled.hpp"
#include "wasmless/engine/trap.hpp"
#include "wasmless/engine/wasi.hpp"

namespace wasmless::engine {

constexpr uint32_t kPageSize = 65536;
constexpr uint32_t kMaxPages = 65536;

/// One sandboxed execution context: fresh linear memory, globals, table and
/// WASI state. Never reused across invocations.
class Instance {
  public:
    /// `mod` must outlive the instance.
    Instance(const CompiledModule& mod, WasiConfig wasi_cfg, uint32_t memory_limit_pages,
             std::shared_ptr<std::atomic<bool>> abort_flag);

    /// Set the injected fuel counter (no-op for uninstrumented modules).
    void set_fuel(int64_t fuel);
    int64_t fuel() const;
    bool metered() const { return mod_.fuel_global >= 0; }

    /// Run the module's start section (if any) followed by the WASI
    /// `_start` entry. Throws Trap / GuestExit.
    void run_main();

    /// Call a defined-or-exported function directly (tests and tooling).
    /// Returns the single result, or 0 for void functions.
    uint64_t call(uint32_t func_index, const std::vector<uint64_t>& args);

    uint32_t memory_pages() const { return static_cast<uint32_t>(memory_.size() / kPageSize); }
    uint32_t memory_peak_pages() const { return peak_pages_; }

    WasiContext& wasi() { return wasi_; }
    const CompiledModule& compiled() const { return mod_; }

    // -- interpreter/WASI surface --------------------------------------
    Bytes memory_;
    std::vector<uint64_t> globals_;
    std::vector<uint32_t> table_;  // function indices, UINT32_MAX = null
    uint32_t memory_limit_pages_;
    uint32_t peak_pages_ = 0;
    std::atomic<bool>* abort_ = nullptr;

    /// Bounds-checked view into guest memory; null when out of range.
    uint8_t* mem(uint32_t addr, uint32_t len) {
        uint64_t end = static_cast<uint64_t>(addr) + len;
        if (end > memory_.size()) return nullptr;
        return memory_.data() + addr;
    }

    /// memory.grow semantics plus the platform cap: growth beyond the
    /// module's own max fails with -1, growth beyond the platform limit
    /// aborts the invocation.
    int32_t grow_memory(uint32_t delta_pages);

    const std::vector<WasiContext::HostFn>& host_fns() const { return host_fns_; }

  private:
    const CompiledModule& mod_;
    std::shared_ptr<std::atomic<bool>> abort_owner_;
    WasiContext wasi_;
    std::vector<WasiContext::HostFn> host_fns_;
    uint32_t module_max_pages_ = kMaxPages;

    void init_globals();
    void init_table();
    void init_memory();
    void resolve_imports();
};

/// Run one function (full index space) to completion on a fresh value
/// stack. Nested wasm calls are handled iteratively inside.
uint64_t interp_call(Instance& inst, uint32_t func_index, const uint64_t* args, uint32_t nargs);

}  // namespace wasmless::engine
