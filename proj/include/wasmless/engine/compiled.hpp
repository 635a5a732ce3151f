#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "wasmless/wasm/module.hpp"

namespace wasmless::engine {

// Internal opcodes. Plain numeric/memory instructions keep their wasm byte;
// control flow is rewritten to resolved jumps and everything structural
// (block/loop/end/nop) is elided at decode time.
enum IOp : uint16_t {
    iop_br = 0x100,         // unconditional forward jump
    iop_br_if = 0x101,      // jump if top != 0 (forward)
    iop_br_ifz = 0x102,     // jump if top == 0 (if-false edge)
    iop_br_back = 0x103,    // backward jump, polls the abort flag
    iop_br_if_back = 0x104,
    iop_br_table = 0x105,
    iop_ret = 0x106,
    iop_call = 0x107,        // defined function
    iop_call_host = 0x108,   // imported function
    iop_call_indirect = 0x109,
    iop_const64 = 0x10A,     // push immediate (all four const ops)
    iop_fuel_charge = 0x10B, // fused instrumentation sequence
};

/// One decoded instruction, 16 bytes.
/// Branches: a = target pc, arity = values carried, b = operand-stack height
/// (relative to the frame) to unwind to. Calls: a = function / type index.
/// Memory ops: b = static offset. const64: b = raw value bits.
struct CInstr {
    uint16_t op = 0;
    uint16_t arity = 0;
    uint32_t a = 0;
    uint64_t b = 0;
};
static_assert(sizeof(CInstr) == 16);

struct BranchTarget {
    uint32_t pc;
    uint32_t height;
    uint16_t arity;
};

struct CompiledFunction {
    uint32_t type_index = 0;
    uint32_t params = 0;
    uint32_t locals = 0;   // beyond params
    uint32_t results = 0;  // 0 or 1
    uint32_t max_stack = 0;
    std::vector<CInstr> code;

    uint32_t frame_slots() const { return params + locals + max_stack; }
};

struct HostImport {
    std::string module;
    std::string name;
    uint32_t type_index;
};

/// Engine-ready module: parsed metadata plus pre-decoded function bodies.
/// Immutable after compile; shared freely between concurrent instances.
struct CompiledModule {
    std::string content_hash;
    wasm::Module module;
    std::vector<CompiledFunction> functions;   // defined only
    std::vector<HostImport> host_imports;      // imported functions, in index order
    std::vector<std::vector<BranchTarget>> br_tables;
    std::vector<uint32_t> type_canon;          // structural id per type, for call_indirect
    int32_t fuel_global = -1;                  // resolved __fuel_remaining export
    int32_t start_func = -1;                   // exported `_start` of type [] -> []

    size_t code_size() const {
        size_t n = 0;
        for (const auto& f : functions) n += f.code.size();
        return n;
    }
};

/// Pre-decode a validated module. Throws EngineReject for modules the
/// engine cannot host (non-function imports).
std::shared_ptr<const CompiledModule> compile_module(wasm::Module mod, std::string content_hash);

}  // namespace wasmless::engine
