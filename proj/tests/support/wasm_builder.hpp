#pragma once

// Hand-assembly of small test modules. Kept deliberately separate from the
// production emitter so corpus construction does not depend on the code
// under test.

#include <cstdint>
#include <string>
#include <vector>

#include "wasmless/bytes.hpp"

namespace testsupport {

using wasmless::Bytes;

inline void put_leb_u(Bytes& out, uint64_t v) {
    do {
        uint8_t b = v & 0x7f;
        v >>= 7;
        if (v) b |= 0x80;
        out.push_back(b);
    } while (v);
}

inline void put_leb_s(Bytes& out, int64_t v) {
    bool more = true;
    while (more) {
        uint8_t b = v & 0x7f;
        v >>= 7;
        if ((v == 0 && !(b & 0x40)) || (v == -1 && (b & 0x40))) more = false;
        else b |= 0x80;
        out.push_back(b);
    }
}

/// Instruction-stream builder with the handful of opcodes the test corpus
/// needs; call .bytes() for the finished body (without the locals vector).
struct Code {
    Bytes out;

    Code& op(uint8_t byte) { out.push_back(byte); return *this; }
    Code& i32_const(int32_t v) { out.push_back(0x41); put_leb_s(out, v); return *this; }
    Code& i64_const(int64_t v) { out.push_back(0x42); put_leb_s(out, v); return *this; }
    Code& i32_add() { return op(0x6A); }
    Code& i32_sub() { return op(0x6B); }
    Code& i32_mul() { return op(0x6C); }
    Code& i32_eqz() { return op(0x45); }
    Code& i32_lt_s() { return op(0x48); }
    Code& i32_lt_u() { return op(0x49); }
    Code& drop() { return op(0x1A); }
    Code& local_get(uint32_t i) { out.push_back(0x20); put_leb_u(out, i); return *this; }
    Code& local_set(uint32_t i) { out.push_back(0x21); put_leb_u(out, i); return *this; }
    Code& local_tee(uint32_t i) { out.push_back(0x22); put_leb_u(out, i); return *this; }
    Code& global_get(uint32_t i) { out.push_back(0x23); put_leb_u(out, i); return *this; }
    Code& global_set(uint32_t i) { out.push_back(0x24); put_leb_u(out, i); return *this; }
    Code& block_void() { out.push_back(0x02); out.push_back(0x40); return *this; }
    Code& block(uint8_t valtype) { out.push_back(0x02); out.push_back(valtype); return *this; }
    Code& loop_void() { out.push_back(0x03); out.push_back(0x40); return *this; }
    Code& if_void() { out.push_back(0x04); out.push_back(0x40); return *this; }
    Code& else_() { return op(0x05); }
    Code& end() { return op(0x0B); }
    Code& br(uint32_t d) { out.push_back(0x0C); put_leb_u(out, d); return *this; }
    Code& br_if(uint32_t d) { out.push_back(0x0D); put_leb_u(out, d); return *this; }
    Code& ret() { return op(0x0F); }
    Code& call(uint32_t f) { out.push_back(0x10); put_leb_u(out, f); return *this; }
    Code& call_indirect(uint32_t type_idx) {
        out.push_back(0x11);
        put_leb_u(out, type_idx);
        out.push_back(0x00);
        return *this;
    }
    Code& unreachable() { return op(0x00); }
    Code& nop() { return op(0x01); }
    Code& i32_load(uint32_t align, uint32_t offset) {
        out.push_back(0x28);
        put_leb_u(out, align);
        put_leb_u(out, offset);
        return *this;
    }
    Code& i32_store(uint32_t align, uint32_t offset) {
        out.push_back(0x36);
        put_leb_u(out, align);
        put_leb_u(out, offset);
        return *this;
    }
    Code& memory_grow() { out.push_back(0x40); out.push_back(0x00); return *this; }
    Code& memory_size() { out.push_back(0x3F); out.push_back(0x00); return *this; }

    const Bytes& bytes() const { return out; }
};

struct WasmBuilder {
    struct FuncDef {
        uint32_t type_index;
        std::vector<std::pair<uint32_t, uint8_t>> locals;  // (count, valtype byte)
        Bytes body;                                        // instruction stream incl. final end
    };
    struct ImportDef {
        std::string module, name;
        uint32_t type_index;
    };
    struct ExportDef {
        std::string name;
        uint8_t kind;
        uint32_t index;
    };
    struct GlobalDef {
        uint8_t valtype;
        bool mut;
        int64_t init;
    };

    std::vector<std::pair<std::vector<uint8_t>, std::vector<uint8_t>>> types;  // params, results
    std::vector<ImportDef> func_imports;
    std::vector<FuncDef> funcs;
    std::vector<ExportDef> exports;
    std::vector<GlobalDef> globals;
    std::vector<uint32_t> elem_funcs;  // table[i] = elem_funcs[i], table auto-sized
    bool has_memory = false;
    uint32_t memory_min = 0;
    uint32_t memory_max = 0;
    bool memory_has_max = false;
    Bytes data_bytes;
    uint32_t data_offset = 0;
    bool has_start = false;
    uint32_t start_func = 0;

    uint32_t add_type(std::vector<uint8_t> params, std::vector<uint8_t> results) {
        types.emplace_back(std::move(params), std::move(results));
        return static_cast<uint32_t>(types.size() - 1);
    }

    uint32_t import_func(std::string module, std::string name, uint32_t type_index) {
        func_imports.push_back({std::move(module), std::move(name), type_index});
        return static_cast<uint32_t>(func_imports.size() - 1);
    }

    uint32_t add_func(uint32_t type_index, std::vector<std::pair<uint32_t, uint8_t>> locals, Bytes body) {
        funcs.push_back({type_index, std::move(locals), std::move(body)});
        return static_cast<uint32_t>(func_imports.size() + funcs.size() - 1);
    }

    void export_func(std::string name, uint32_t index) { exports.push_back({std::move(name), 0, index}); }
    void export_memory(std::string name) { exports.push_back({std::move(name), 2, 0}); }
    void export_global(std::string name, uint32_t index) { exports.push_back({std::move(name), 3, index}); }

    uint32_t add_global(uint8_t valtype, bool mut, int64_t init) {
        globals.push_back({valtype, mut, init});
        return static_cast<uint32_t>(globals.size() - 1);
    }

    void memory(uint32_t min_pages, int64_t max_pages = -1) {
        has_memory = true;
        memory_min = min_pages;
        if (max_pages >= 0) {
            memory_has_max = true;
            memory_max = static_cast<uint32_t>(max_pages);
        }
    }

    void data(uint32_t offset, Bytes bytes) {
        data_offset = offset;
        data_bytes = std::move(bytes);
    }

    void start(uint32_t func_index) {
        has_start = true;
        start_func = func_index;
    }

    Bytes build() const {
        Bytes m = {0x00, 0x61, 0x73, 0x6D, 0x01, 0x00, 0x00, 0x00};
        auto section = [&m](uint8_t id, const Bytes& payload) {
            m.push_back(id);
            put_leb_u(m, payload.size());
            m.insert(m.end(), payload.begin(), payload.end());
        };

        if (!types.empty()) {
            Bytes p;
            put_leb_u(p, types.size());
            for (const auto& [params, results] : types) {
                p.push_back(0x60);
                put_leb_u(p, params.size());
                p.insert(p.end(), params.begin(), params.end());
                put_leb_u(p, results.size());
                p.insert(p.end(), results.begin(), results.end());
            }
            section(1, p);
        }
        if (!func_imports.empty()) {
            Bytes p;
            put_leb_u(p, func_imports.size());
            for (const auto& im : func_imports) {
                put_leb_u(p, im.module.size());
                p.insert(p.end(), im.module.begin(), im.module.end());
                put_leb_u(p, im.name.size());
                p.insert(p.end(), im.name.begin(), im.name.end());
                p.push_back(0x00);
                put_leb_u(p, im.type_index);
            }
            section(2, p);
        }
        if (!funcs.empty()) {
            Bytes p;
            put_leb_u(p, funcs.size());
            for (const auto& f : funcs) put_leb_u(p, f.type_index);
            section(3, p);
        }
        if (!elem_funcs.empty()) {
            Bytes p;
            put_leb_u(p, 1);
            p.push_back(0x70);
            p.push_back(0x00);
            put_leb_u(p, elem_funcs.size());
            section(4, p);
        }
        if (has_memory) {
            Bytes p;
            put_leb_u(p, 1);
            p.push_back(memory_has_max ? 0x01 : 0x00);
            put_leb_u(p, memory_min);
            if (memory_has_max) put_leb_u(p, memory_max);
            section(5, p);
        }
        if (!globals.empty()) {
            Bytes p;
            put_leb_u(p, globals.size());
            for (const auto& g : globals) {
                p.push_back(g.valtype);
                p.push_back(g.mut ? 0x01 : 0x00);
                p.push_back(g.valtype == 0x7E ? 0x42 : 0x41);
                put_leb_s(p, g.init);
                p.push_back(0x0B);
            }
            section(6, p);
        }
        if (!exports.empty()) {
            Bytes p;
            put_leb_u(p, exports.size());
            for (const auto& e : exports) {
                put_leb_u(p, e.name.size());
                p.insert(p.end(), e.name.begin(), e.name.end());
                p.push_back(e.kind);
                put_leb_u(p, e.index);
            }
            section(7, p);
        }
        if (has_start) {
            Bytes p;
            put_leb_u(p, start_func);
            section(8, p);
        }
        if (!elem_funcs.empty()) {
            Bytes p;
            put_leb_u(p, 1);
            put_leb_u(p, 0);
            p.push_back(0x41);
            put_leb_s(p, 0);
            p.push_back(0x0B);
            put_leb_u(p, elem_funcs.size());
            for (uint32_t f : elem_funcs) put_leb_u(p, f);
            section(9, p);
        }
        if (!funcs.empty()) {
            Bytes p;
            put_leb_u(p, funcs.size());
            for (const auto& f : funcs) {
                Bytes body;
                put_leb_u(body, f.locals.size());
                for (const auto& [n, t] : f.locals) {
                    put_leb_u(body, n);
                    body.push_back(t);
                }
                body.insert(body.end(), f.body.begin(), f.body.end());
                put_leb_u(p, body.size());
                p.insert(p.end(), body.begin(), body.end());
            }
            section(10, p);
        }
        if (!data_bytes.empty()) {
            Bytes p;
            put_leb_u(p, 1);
            put_leb_u(p, 0);
            p.push_back(0x41);
            put_leb_s(p, data_offset);
            p.push_back(0x0B);
            put_leb_u(p, data_bytes.size());
            p.insert(p.end(), data_bytes.begin(), data_bytes.end());
            section(11, p);
        }
        return m;
    }
};

}  // namespace testsupport
