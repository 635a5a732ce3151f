#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <queue>
#include <string>
#include <thread>
#include <vector>

#include "wasmless/engine/compiled.hpp"
#include "wasmless/engine/wasi.hpp"
#include "wasmless/wasm/artifact.hpp"

namespace wasmless::engine {

struct ResourceLimits {
    uint64_t fuel_limit = 1'000'000'000;
    uint32_t memory_limit_pages = 1024;  // 64 MiB
    uint32_t wall_timeout_ms = 60'000;

    void check() const;  // throws std::invalid_argument
};

struct SandboxSpec {
    std::vector<std::string> argv;  // argv[0] = function name
    std::vector<std::pair<std::string, std::string>> env;
    Bytes stdin_bytes;
    std::vector<Preopen> preopens;
};

enum class StartMode { cold, warm };

struct ExitStatus {
    enum Kind { exited, trapped, fuel_exhausted, timeout, memory_exceeded } kind = exited;
    int32_t code = 0;      // kind == exited
    std::string reason;    // kind == trapped

    bool ok() const { return kind == exited && code == 0; }
    std::string_view class_name() const;  // "ok" / "trap" / "fuel_exhausted" / ...
};

struct InvocationResult {
    ExitStatus status;
    Bytes stdout_bytes;
    Bytes stderr_bytes;
    uint64_t t_setup_us = 0;  // compile (cold) + instantiate
    uint64_t t_exec_us = 0;   // guest execution
    uint64_t t_total_us = 0;  // one clock bracketing the whole invocation
    uint64_t fuel_consumed = 0;
    uint32_t memory_peak_pages = 0;
    StartMode start_mode = StartMode::cold;
};

struct PoolStats {
    size_t size = 0;
    uint64_t hits = 0;
    uint64_t misses = 0;
};

/// Everything invoke() needs to run a deployed function. Byte buffers are
/// shared so pooled modules keep them alive without copying.
struct FunctionSource {
    std::string content_hash;
    std::shared_ptr<const Bytes> raw_bytes;
    std::shared_ptr<const Bytes> instrumented_bytes;
};

/// Arms per-invocation wall deadlines on a single background thread.
class DeadlineQueue {
  public:
    DeadlineQueue();
    ~DeadlineQueue();

    void arm(std::chrono::steady_clock::time_point due, std::weak_ptr<std::atomic<bool>> flag);

  private:
    struct Entry {
        std::chrono::steady_clock::time_point due;
        std::weak_ptr<std::atomic<bool>> flag;
        bool operator>(const Entry& o) const { return due > o.due; }
    };

    void loop();

    std::mutex mu_;
    std::condition_variable cv_;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue_;
    bool stop_ = false;
    std::thread thread_;
};

/// Runs instrumented modules in fresh WASI sandboxes and keeps an LRU pool
/// of compiled modules for the warm path. Thread-safe.
class Executor {
  public:
    explicit Executor(size_t pool_capacity = 64);

    /// Engine-ready form of an instrumented artifact, keyed by content_hash.
    std::shared_ptr<const CompiledModule> compile(const wasm::ModuleArtifact& artifact) const;

    /// Run one invocation in a fresh instance. Cold re-decodes the module
    /// bytes inside the timed window; warm pays instantiation only.
    InvocationResult execute(const std::shared_ptr<const CompiledModule>& module, const SandboxSpec& spec,
                             const ResourceLimits& limits, StartMode mode) const;

    /// Pool-routed invocation. Warm consults the LRU pool (miss compiles
    /// from the stored instrumented bytes); cold runs the full
    /// validate+instrument+compile pipeline from the raw bytes inside the
    /// timed window. Both leave the compiled module pooled.
    InvocationResult invoke(const FunctionSource& source, const SandboxSpec& spec, const ResourceLimits& limits,
                            StartMode mode);

    PoolStats pool_stats() const;

  private:
    struct RunOutcome {
        InvocationResult result;
        uint64_t instantiate_us = 0;
    };

    RunOutcome run_instance(const CompiledModule& module, const SandboxSpec& spec,
                            const ResourceLimits& limits) const;

    std::shared_ptr<const CompiledModule> pool_get(const std::string& hash);
    void pool_put(const std::string& hash, std::shared_ptr<const CompiledModule> module);

    mutable std::mutex pool_mu_;
    size_t pool_capacity_;
    std::list<std::string> lru_;  // front = most recent
    std::map<std::string, std::pair<std::shared_ptr<const CompiledModule>, std::list<std::string>::iterator>> pool_;
    uint64_t hits_ = 0;
    uint64_t misses_ = 0;

    mutable DeadlineQueue deadlines_;
};

}  // namespace wasmless::engine
