#include <cstring>

#include "wasmless/engine/instance.hpp"

namespace wasmless::engine {

namespace {
std::atomic<bool> g_never_aborted{false};
}

Instance::Instance(const CompiledModule& mod, WasiConfig wasi_cfg, uint32_t memory_limit_pages,
                   std::shared_ptr<std::atomic<bool>> abort_flag)
    : memory_limit_pages_(memory_limit_pages),
      mod_(mod),
      abort_owner_(std::move(abort_flag)),
      wasi_(std::move(wasi_cfg)) {
    abort_ = abort_owner_ ? abort_owner_.get() : &g_never_aborted;
    resolve_imports();
    init_globals();
    init_memory();
    init_table();
}

void Instance::resolve_imports() {
    host_fns_.reserve(mod_.host_imports.size());
    for (const HostImport& im : mod_.host_imports) {
        const WasiContext::HostEntry* entry = WasiContext::resolve(im.module, im.name);
        if (!entry) {
            throw Trap(TrapKind::host, "unresolved import " + im.module + "." + im.name);
        }
        const wasm::FuncType& ft = mod_.module.types[im.type_index];
        bool sig_ok = ft.params.size() == entry->params && ft.results.size() == entry->results;
        if (sig_ok) {
            for (size_t i = 0; i < ft.params.size(); ++i) {
                wasm::ValType expect =
                    (entry->i64_param_mask >> i) & 1 ? wasm::ValType::i64 : wasm::ValType::i32;
                if (ft.params[i] != expect) sig_ok = false;
            }
            if (!ft.results.empty() && ft.results[0] != wasm::ValType::i32) sig_ok = false;
        }
        if (!sig_ok) {
            throw Trap(TrapKind::host, "import signature mismatch for " + im.module + "." + im.name);
        }
        host_fns_.push_back(entry->fn);
    }
}

void Instance::init_globals() {
    const wasm::Module& m = mod_.module;
    globals_.resize(m.globals.size());
    for (size_t i = 0; i < m.globals.size(); ++i) {
        // Only const initializers can appear here: global imports were
        // rejected at compile time.
        globals_[i] = m.globals[i].init.bits;
    }
}

void Instance::init_memory() {
    const wasm::Module& m = mod_.module;
    if (!m.memory) return;
    uint32_t pages = m.memory->min;
    module_max_pages_ = m.memory->has_max ? std::min(m.memory->max, kMaxPages) : kMaxPages;
    if (pages > memory_limit_pages_) {
        throw Trap(TrapKind::memory_exceeded, "initial memory exceeds the configured limit");
    }
    memory_.assign(static_cast<size_t>(pages) * kPageSize, 0);
    peak_pages_ = pages;

    for (const wasm::DataSegment& seg : m.datas) {
        uint64_t offset = static_cast<uint32_t>(seg.offset.bits);
        uint64_t len = seg.bytes_end - seg.bytes_begin;
        if (offset + len > memory_.size()) throw Trap(TrapKind::generic, "data segment out of bounds");
        std::memcpy(memory_.data() + offset, m.bytes->data() + seg.bytes_begin, len);
    }
}

void Instance::init_table() {
    const wasm::Module& m = mod_.module;
    if (!m.table) return;
    table_.assign(m.table->min, UINT32_MAX);
    for (const wasm::ElemSegment& seg : m.elems) {
        uint64_t offset = static_cast<uint32_t>(seg.offset.bits);
        if (offset + seg.func_indices.size() > table_.size()) {
            throw Trap(TrapKind::generic, "element segment out of bounds");
        }
        for (size_t i = 0; i < seg.func_indices.size(); ++i) {
            table_[offset + i] = seg.func_indices[i];
        }
    }
}

void Instance::set_fuel(int64_t fuel) {
    if (mod_.fuel_global >= 0) globals_[mod_.fuel_global] = static_cast<uint64_t>(fuel);
}

int64_t Instance::fuel() const {
    return mod_.fuel_global >= 0 ? static_cast<int64_t>(globals_[mod_.fuel_global]) : 0;
}

int32_t Instance::grow_memory(uint32_t delta_pages) {
    uint32_t cur = memory_pages();
    uint64_t want = static_cast<uint64_t>(cur) + delta_pages;
    if (want > module_max_pages_) return -1;
    if (want > memory_limit_pages_) {
        throw Trap(TrapKind::memory_exceeded, "memory limit exceeded");
    }
    memory_.resize(static_cast<size_t>(want) * kPageSize, 0);
    peak_pages_ = static_cast<uint32_t>(want);
    return static_cast<int32_t>(cur);
}

void Instance::run_main() {
    // The start section is guest code and burns fuel like everything else.
    if (mod_.module.start) interp_call(*this, *mod_.module.start, nullptr, 0);
    if (mod_.start_func < 0) {
        throw Trap(TrapKind::host, "module has no _start export of type [] -> []");
    }
    if (static_cast<uint32_t>(mod_.start_func) < mod_.host_imports.size()) {
        throw Trap(TrapKind::host, "_start resolves to a host import");
    }
    interp_call(*this, static_cast<uint32_t>(mod_.start_func), nullptr, 0);
}

uint64_t Instance::call(uint32_t func_index, const std::vector<uint64_t>& args) {
    return interp_call(*this, func_index, args.data(), static_cast<uint32_t>(args.size()));
}

}  // namespace wasmless::engine
