#include "wasmless/engine/executor.hpp"

#include <chrono>
#include <stdexcept>

#include "wasmless/engine/instance.hpp"
#include "wasmless/wasm/instrument.hpp"

namespace wasmless::engine {

using Clock = std::chrono::steady_clock;

namespace {

uint64_t us_between(Clock::time_point a, Clock::time_point b) {
    return static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::microseconds>(b - a).count());
}

constexpr int64_t kMaxFuel = INT64_MAX;

}  // namespace

void ResourceLimits::check() const {
    if (fuel_limit == 0) throw std::invalid_argument("fuel_limit must be positive");
    if (memory_limit_pages == 0) throw std::invalid_argument("memory_limit_pages must be positive");
    if (wall_timeout_ms == 0 || wall_timeout_ms > 3'600'000) {
        throw std::invalid_argument("wall_timeout_ms must be in (0, 3600000]");
    }
}

std::string_view ExitStatus::class_name() const {
    switch (kind) {
        case exited: return code == 0 ? "ok" : "trap";
        case trapped: return "trap";
        case fuel_exhausted: return "fuel_exhausted";
        case timeout: return "timeout";
        case memory_exceeded: return "memory_exceeded";
    }
    return "trap";
}

// --- DeadlineQueue -----------------------------------------------------------

DeadlineQueue::DeadlineQueue() : thread_([this] { loop(); }) {}

DeadlineQueue::~DeadlineQueue() {
    {
        std::lock_guard lock(mu_);
        stop_ = true;
    }
    cv_.notify_all();
    thread_.join();
}

void DeadlineQueue::arm(Clock::time_point due, std::weak_ptr<std::atomic<bool>> flag) {
    {
        std::lock_guard lock(mu_);
        queue_.push(Entry{due, std::move(flag)});
    }
    cv_.notify_all();
}

void DeadlineQueue::loop() {
    std::unique_lock lock(mu_);
    while (!stop_) {
        if (queue_.empty()) {
            cv_.wait(lock, [this] { return stop_ || !queue_.empty(); });
            continue;
        }
        auto due = queue_.top().due;
        if (Clock::now() < due) {
            cv_.wait_until(lock, due);
            continue;
        }
        Entry e = queue_.top();
        queue_.pop();
        if (auto flag = e.flag.lock()) flag->store(true, std::memory_order_relaxed);
    }
}

// --- Executor ----------------------------------------------------------------

Executor::Executor(size_t pool_capacity) : pool_capacity_(pool_capacity == 0 ? 1 : pool_capacity) {}

std::shared_ptr<const CompiledModule> Executor::compile(const wasm::ModuleArtifact& artifact) const {
    if (!artifact.instrumented()) throw EngineReject("compile: artifact is not instrumented");
    wasm::Module mod = wasm::read_module(ByteView(artifact.instrumented_bytes));
    return compile_module(std::move(mod), artifact.content_hash);
}

Executor::RunOutcome Executor::run_instance(const CompiledModule& module, const SandboxSpec& spec,
                                            const ResourceLimits& limits) const {
    limits.check();
    RunOutcome out;
    InvocationResult& r = out.result;

    WasiConfig wcfg;
    wcfg.argv = spec.argv;
    wcfg.env = spec.env;
    wcfg.stdin_bytes = spec.stdin_bytes;
    wcfg.preopens = spec.preopens;

    auto abort_flag = std::make_shared<std::atomic<bool>>(false);
    int64_t fuel_before = static_cast<int64_t>(std::min<uint64_t>(limits.fuel_limit, kMaxFuel));

    auto t0 = Clock::now();
    std::unique_ptr<Instance> inst;
    try {
        inst = std::make_unique<Instance>(module, std::move(wcfg), limits.memory_limit_pages, abort_flag);
    } catch (const Trap& t) {
        auto now = Clock::now();
        out.instantiate_us = us_between(t0, now);
        r.t_setup_us = out.instantiate_us;
        r.t_total_us = r.t_setup_us;
        r.status.kind = t.kind == TrapKind::memory_exceeded ? ExitStatus::memory_exceeded : ExitStatus::trapped;
        r.status.reason = t.what();
        return out;
    }
    inst->set_fuel(fuel_before);
    auto t1 = Clock::now();
    out.instantiate_us = us_between(t0, t1);

    deadlines_.arm(t1 + std::chrono::milliseconds(limits.wall_timeout_ms), abort_flag);

    try {
        inst->run_main();
        r.status.kind = ExitStatus::exited;
        r.status.code = 0;
    } catch (const GuestExit& e) {
        r.status.kind = ExitStatus::exited;
        r.status.code = e.code;
    } catch (const Trap& t) {
        switch (t.kind) {
            case TrapKind::memory_exceeded:
                r.status.kind = ExitStatus::memory_exceeded;
                break;
            case TrapKind::timeout:
                r.status.kind = ExitStatus::timeout;
                break;
            default:
                // A generic trap with a drained fuel counter is an
                // exhaustion: the injected check traps via `unreachable`.
                if (inst->metered() && inst->fuel() < 0) {
                    r.status.kind = ExitStatus::fuel_exhausted;
                } else {
                    r.status.kind = ExitStatus::trapped;
                }
                break;
        }
        r.status.reason = t.what();
    }
    auto t2 = Clock::now();

    r.t_exec_us = us_between(t1, t2);
    if (inst->metered()) {
        int64_t left = inst->fuel();
        if (r.status.kind == ExitStatus::fuel_exhausted || left < 0) {
            r.fuel_consumed = limits.fuel_limit;
            r.status.kind = ExitStatus::fuel_exhausted;
            r.status.reason.clear();
        } else {
            r.fuel_consumed = static_cast<uint64_t>(fuel_before - left);
        }
    }
    r.memory_peak_pages = inst->memory_peak_pages();
    r.stdout_bytes = std::move(inst->wasi().stdout_bytes);
    r.stderr_bytes = std::move(inst->wasi().stderr_bytes);
    return out;
}

InvocationResult Executor::execute(const std::shared_ptr<const CompiledModule>& module, const SandboxSpec& spec,
                                   const ResourceLimits& limits, StartMode mode) const {
    auto t0 = Clock::now();
    if (mode == StartMode::cold) {
        // Re-decode inside the timed window; the caller's module supplies
        // the already-instrumented bytes via its parsed form.
        wasm::Module remod = wasm::read_module(module->module.bytes);
        auto fresh = compile_module(std::move(remod), module->content_hash);
        RunOutcome out = run_instance(*fresh, spec, limits);
        auto t1 = Clock::now();
        out.result.start_mode = StartMode::cold;
        out.result.t_total_us = us_between(t0, t1);
        out.result.t_setup_us = out.result.t_total_us - out.result.t_exec_us;
        return out.result;
    }
    RunOutcome out = run_instance(*module, spec, limits);
    auto t1 = Clock::now();
    out.result.start_mode = StartMode::warm;
    out.result.t_total_us = us_between(t0, t1);
    out.result.t_setup_us = out.instantiate_us;
    return out.result;
}

InvocationResult Executor::invoke(const FunctionSource& source, const SandboxSpec& spec,
                                  const ResourceLimits& limits, StartMode mode) {
    auto t0 = Clock::now();
    std::shared_ptr<const CompiledModule> cm;
    StartMode actual = StartMode::warm;

    if (mode == StartMode::cold) {
        // Full pipeline in the timed window: validate + instrument +
        // compile, exactly what a first-touch deployment pays.
        wasm::ModuleArtifact art = wasm::validate(*source.raw_bytes);
        art = wasm::instrument(std::move(art));
        cm = compile(art);
        pool_put(source.content_hash, cm);
        actual = StartMode::cold;
    } else {
        cm = pool_get(source.content_hash);
        if (!cm) {
            wasm::Module mod = wasm::read_module(source.instrumented_bytes);
            cm = compile_module(std::move(mod), source.content_hash);
            pool_put(source.content_hash, cm);
            actual = StartMode::cold;  // a compile happened in-window
        }
    }

    RunOutcome out = run_instance(*cm, spec, limits);
    auto t1 = Clock::now();
    out.result.start_mode = actual;
    out.result.t_total_us = us_between(t0, t1);
    out.result.t_setup_us = out.result.t_total_us - out.result.t_exec_us;
    return out.result;
}

PoolStats Executor::pool_stats() const {
    std::lock_guard lock(pool_mu_);
    return PoolStats{pool_.size(), hits_, misses_};
}

std::shared_ptr<const CompiledModule> Executor::pool_get(const std::string& hash) {
    std::lock_guard lock(pool_mu_);
    auto it = pool_.find(hash);
    if (it == pool_.end()) {
        ++misses_;
        return nullptr;
    }
    ++hits_;
    lru_.splice(lru_.begin(), lru_, it->second.second);
    return it->second.first;
}

void Executor::pool_put(const std::string& hash, std::shared_ptr<const CompiledModule> module) {
    std::lock_guard lock(pool_mu_);
    auto it = pool_.find(hash);
    if (it != pool_.end()) {
        it->second.first = std::move(module);  // concurrent compiles: last write wins
        lru_.splice(lru_.begin(), lru_, it->second.second);
        return;
    }
    lru_.push_front(hash);
    pool_.emplace(hash, std::make_pair(std::move(module), lru_.begin()));
    while (pool_.size() > pool_capacity_) {
        pool_.erase(lru_.back());
        lru_.pop_back();
    }
}

}  // namespace wasmless::engine
