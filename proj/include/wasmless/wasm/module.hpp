#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wasmless/bytes.hpp"
#include "wasmless/wasm/error.hpp"
#include "wasmless/wasm/opcodes.hpp"

namespace wasmless::wasm {

enum class ValType : uint8_t {
    i32 = 0x7F,
    i64 = 0x7E,
    f32 = 0x7D,
    f64 = 0x7C,
};

std::string_view valtype_name(ValType t);

struct FuncType {
    std::vector<ValType> params;
    std::vector<ValType> results;

    bool operator==(const FuncType&) const = default;
};

enum class ExternalKind : uint8_t {
    func = 0,
    table = 1,
    memory = 2,
    global = 3,
};

struct Limits {
    uint32_t min = 0;
    uint32_t max = 0;
    bool has_max = false;
};

struct GlobalType {
    ValType type;
    bool mut = false;
};

struct Import {
    std::string module;
    std::string name;
    ExternalKind kind;
    uint32_t func_type = 0;   // kind == func
    Limits limits;            // kind == table / memory
    GlobalType global;        // kind == global
};

/// Constant initializer: one const instruction or a get of an imported
/// immutable global, as allowed in 1.0.
struct InitExpr {
    uint8_t op = op_i32_const;
    uint64_t bits = 0;        // const payload, raw
    uint32_t global_index = 0;
};

struct Global {
    GlobalType type;
    InitExpr init;
};

struct Export {
    std::string name;
    ExternalKind kind;
    uint32_t index;
};

struct ElemSegment {
    InitExpr offset;
    std::vector<uint32_t> func_indices;
};

struct DataSegment {
    InitExpr offset;
    uint32_t bytes_begin = 0;  // range into the module's raw bytes
    uint32_t bytes_end = 0;
};

/// One decoded instruction. `begin`/`end` delimit its raw encoding so the
/// instrumenter can splice original bytes verbatim.
struct Instr {
    uint8_t op = 0;
    uint32_t begin = 0;
    uint32_t end = 0;
    uint32_t a = 0;    // label / index / align / block type
    uint64_t b = 0;    // const payload / memarg offset
    uint32_t aux = 0;  // br_table: index into Module::br_tables
};

struct FuncBody {
    std::vector<std::pair<uint32_t, ValType>> local_decls;  // run-length encoded
    uint32_t locals_total = 0;                              // excluding params
    uint32_t locals_begin = 0;  // raw range of the locals vector
    uint32_t instrs_begin = 0;  // raw range of the instruction stream (incl. final end)
    uint32_t instrs_end = 0;
    std::vector<Instr> instrs;
    uint32_t max_stack = 0;  // operand slots, computed by the validator
};

struct Section {
    uint8_t id = 0;
    uint32_t header_begin = 0;   // first byte of the section id
    uint32_t payload_begin = 0;
    uint32_t payload_end = 0;
};

/// A fully parsed and validated core module. Offsets index into `bytes`,
/// which the struct keeps alive.
struct Module {
    std::shared_ptr<const Bytes> bytes;

    std::vector<FuncType> types;
    std::vector<Import> imports;
    uint32_t imported_funcs = 0;
    uint32_t imported_globals = 0;
    std::vector<uint32_t> functions;  // type index per defined function
    std::optional<Limits> table;
    bool table_imported = false;
    std::optional<Limits> memory;
    bool memory_imported = false;
    std::vector<Global> globals;
    std::vector<Export> exports;
    std::optional<uint32_t> start;
    std::vector<ElemSegment> elems;
    std::vector<DataSegment> datas;
    std::vector<FuncBody> codes;
    std::vector<std::vector<uint32_t>> br_tables;
    std::vector<Section> sections;
    uint64_t instruction_count = 0;

    uint32_t total_funcs() const { return imported_funcs + static_cast<uint32_t>(functions.size()); }
    uint32_t total_globals() const { return imported_globals + static_cast<uint32_t>(globals.size()); }

    const FuncType& func_type(uint32_t func_index) const;
    GlobalType global_type(uint32_t global_index) const;
    ByteView raw(uint32_t begin, uint32_t end) const { return ByteView(bytes->data() + begin, end - begin); }
};

/// Parse and fully validate a binary module. Throws NotWasm, MalformedModule
/// or UnsupportedFeature.
Module read_module(ByteView data);
Module read_module(std::shared_ptr<const Bytes> data);

}  // namespace wasmless::wasm
