#include <algorithm>
#include <cstring>
#include <optional>

#include "wasmless/wasm/leb.hpp"
#include "wasmless/wasm/module.hpp"

namespace wasmless::wasm {

namespace {

constexpr uint32_t kMaxPages = 65536;
constexpr uint32_t kMaxLocals = 50000;
constexpr uint32_t kMaxFunctionParams = 1000;

bool is_valtype(uint8_t b) { return b >= 0x7C && b <= 0x7F; }

ValType valtype(uint8_t b) {
    if (!is_valtype(b)) throw MalformedModule("invalid value type 0x" + to_hex(ByteView(&b, 1)));
    return static_cast<ValType>(b);
}

bool valid_utf8(ByteView s) {
    size_t i = 0;
    while (i < s.size()) {
        uint8_t c = s[i];
        size_t n;
        uint32_t cp;
        if (c < 0x80) { n = 0; cp = c; }
        else if ((c & 0xE0) == 0xC0) { n = 1; cp = c & 0x1F; }
        else if ((c & 0xF0) == 0xE0) { n = 2; cp = c & 0x0F; }
        else if ((c & 0xF8) == 0xF0) { n = 3; cp = c & 0x07; }
        else return false;
        if (i + n > s.size() - 1) return false;
        for (size_t k = 1; k <= n; ++k) {
            uint8_t cc = s[i + k];
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        if (n == 1 && cp < 0x80) return false;
        if (n == 2 && cp < 0x800) return false;
        if (n == 3 && cp < 0x10000) return false;
        if (cp > 0x10FFFF) return false;
        if (cp >= 0xD800 && cp <= 0xDFFF) return false;
        i += n + 1;
    }
    return true;
}

std::string read_name(ByteReader& r) {
    uint32_t len = r.leb_u32();
    ByteView raw = r.bytes(len);
    if (!valid_utf8(raw)) throw MalformedModule("invalid UTF-8 in name");
    return to_string(raw);
}

Limits read_limits(ByteReader& r, uint32_t hard_max, const char* what) {
    uint8_t flags = r.byte();
    if (flags > 1) throw MalformedModule(std::string("invalid limits flags for ") + what);
    Limits lim;
    lim.min = r.leb_u32();
    lim.has_max = flags == 1;
    if (lim.has_max) {
        lim.max = r.leb_u32();
        if (lim.max < lim.min) throw MalformedModule(std::string(what) + " limits: max below min");
    }
    if (lim.min > hard_max || (lim.has_max && lim.max > hard_max)) {
        throw MalformedModule(std::string(what) + " limits exceed implementation bound");
    }
    return lim;
}

InitExpr read_init_expr(ByteReader& r, const Module& mod, ValType expected) {
    InitExpr init;
    init.op = r.byte();
    switch (init.op) {
        case op_i32_const: {
            if (expected != ValType::i32) throw MalformedModule("init expr type mismatch");
            init.bits = static_cast<uint64_t>(static_cast<uint32_t>(r.leb_s32()));
            break;
        }
        case op_i64_const: {
            if (expected != ValType::i64) throw MalformedModule("init expr type mismatch");
            init.bits = static_cast<uint64_t>(r.leb_s64());
            break;
        }
        case op_f32_const: {
            if (expected != ValType::f32) throw MalformedModule("init expr type mismatch");
            float v = r.f32();
            uint32_t u;
            std::memcpy(&u, &v, 4);
            init.bits = u;
            break;
        }
        case op_f64_const: {
            if (expected != ValType::f64) throw MalformedModule("init expr type mismatch");
            double v = r.f64();
            std::memcpy(&init.bits, &v, 8);
            break;
        }
        case op_global_get: {
            init.global_index = r.leb_u32();
            if (init.global_index >= mod.imported_globals) {
                throw MalformedModule("init expr may only reference imported globals");
            }
            GlobalType g = mod.global_type(init.global_index);
            if (g.mut) throw MalformedModule("init expr references mutable global");
            if (g.type != expected) throw MalformedModule("init expr type mismatch");
            break;
        }
        default:
            throw MalformedModule("unsupported instruction in init expr");
    }
    if (r.byte() != op_end) throw MalformedModule("init expr missing end");
    return init;
}

// --- function body validation -----------------------------------------------

// Natural alignment exponent for each memory instruction.
int natural_align(uint8_t op) {
    switch (op) {
        case op_i32_load8_s: case op_i32_load8_u:
        case op_i64_load8_s: case op_i64_load8_u:
        case op_i32_store8: case op_i64_store8:
            return 0;
        case op_i32_load16_s: case op_i32_load16_u:
        case op_i64_load16_s: case op_i64_load16_u:
        case op_i32_store16: case op_i64_store16:
            return 1;
        case op_i32_load: case op_f32_load: case op_i32_store: case op_f32_store:
        case op_i64_load32_s: case op_i64_load32_u: case op_i64_store32:
            return 2;
        case op_i64_load: case op_f64_load: case op_i64_store: case op_f64_store:
            return 3;
        default:
            return -1;
    }
}

class BodyValidator {
  public:
    BodyValidator(const Module& mod, uint32_t func_index, const std::vector<ValType>& locals)
        : mod_(mod), locals_(locals) {
        const FuncType& ft = mod.func_type(func_index);
        result_ = ft.results.empty() ? std::nullopt : std::optional<ValType>(ft.results[0]);
        push_ctrl(op_block, result_);
    }

    // Returns max operand stack height seen.
    uint32_t max_stack() const { return max_stack_; }
    bool finished() const { return ctrls_.empty(); }

    void op_const(ValType t) { push(t); }

    void unreachable_here() {
        truncate_to(cur().height);
        cur().unreachable = true;
    }

    void visit(uint8_t op, Instr& ins, ByteReader& r, std::vector<std::vector<uint32_t>>& br_tables);

  private:
    struct Ctrl {
        uint8_t opcode;
        std::optional<ValType> result;
        uint32_t height;
        bool unreachable = false;
    };

    using MaybeType = std::optional<ValType>;  // nullopt = polymorphic

    const Module& mod_;
    const std::vector<ValType>& locals_;
    std::optional<ValType> result_;
    std::vector<ValType> stack_;
    std::vector<Ctrl> ctrls_;
    uint32_t max_stack_ = 0;

    Ctrl& cur() {
        if (ctrls_.empty()) throw MalformedModule("instruction after function end");
        return ctrls_.back();
    }

    void push(ValType t) {
        stack_.push_back(t);
        max_stack_ = std::max<uint32_t>(max_stack_, static_cast<uint32_t>(stack_.size()));
    }

    MaybeType pop() {
        Ctrl& c = cur();
        if (stack_.size() == c.height) {
            if (c.unreachable) return std::nullopt;
            throw MalformedModule("type mismatch: operand stack underflow");
        }
        ValType t = stack_.back();
        stack_.pop_back();
        return t;
    }

    void pop(ValType expected) {
        MaybeType t = pop();
        if (t && *t != expected) {
            throw MalformedModule(std::string("type mismatch: expected ") + std::string(valtype_name(expected)) +
                                  ", got " + std::string(valtype_name(*t)));
        }
    }

    void truncate_to(uint32_t h) { stack_.resize(h); }

    void push_ctrl(uint8_t opcode, std::optional<ValType> result) {
        ctrls_.push_back(Ctrl{opcode, result, static_cast<uint32_t>(stack_.size()), false});
    }

    Ctrl pop_ctrl() {
        Ctrl c = cur();
        if (c.result) pop(*c.result);
        if (stack_.size() != c.height) throw MalformedModule("type mismatch: values left on stack at end of block");
        ctrls_.pop_back();
        return c;
    }

    const Ctrl& label(uint32_t depth) {
        if (depth >= ctrls_.size()) throw MalformedModule("branch depth out of range");
        return ctrls_[ctrls_.size() - 1 - depth];
    }

    // Values a branch to this label carries.
    std::optional<ValType> label_arity(const Ctrl& c) {
        if (c.opcode == op_loop) return std::nullopt;  // loop labels take no values
        return c.result;
    }

    std::optional<ValType> read_blocktype(ByteReader& r) {
        uint8_t b = r.peek();
        if (b == 0x40) {
            r.byte();
            return std::nullopt;
        }
        if (is_valtype(b)) {
            r.byte();
            return valtype(b);
        }
        // Multi-value encodes a type index here; we stop at core 1.0.
        throw UnsupportedFeature("multi-value block type");
    }

    ValType local_type(uint32_t idx) {
        if (idx >= locals_.size()) throw MalformedModule("local index out of range");
        return locals_[idx];
    }
};

void BodyValidator::visit(uint8_t op, Instr& ins, ByteReader& r, std::vector<std::vector<uint32_t>>& br_tables) {
    switch (op) {
        case op_unreachable:
            unreachable_here();
            break;
        case op_nop:
            break;
        case op_block:
        case op_loop: {
            auto bt = read_blocktype(r);
            ins.a = bt ? static_cast<uint32_t>(*bt) : 0x40;
            push_ctrl(op, bt);
            break;
        }
        case op_if: {
            auto bt = read_blocktype(r);
            ins.a = bt ? static_cast<uint32_t>(*bt) : 0x40;
            pop(ValType::i32);
            push_ctrl(op, bt);
            break;
        }
        case op_else: {
            Ctrl c = cur();
            if (c.opcode != op_if) throw MalformedModule("else without if");
            pop_ctrl();
            push_ctrl(op_else, c.result);
            break;
        }
        case op_end: {
            Ctrl c = cur();
            if (c.opcode == op_if && c.result) {
                throw MalformedModule("type mismatch: if with result requires else");
            }
            pop_ctrl();
            if (c.result) push(*c.result);
            break;
        }
        case op_br: {
            uint32_t depth = ins.a = r.leb_u32();
            auto arity = label_arity(label(depth));
            if (arity) pop(*arity);
            unreachable_here();
            break;
        }
        case op_br_if: {
            uint32_t depth = ins.a = r.leb_u32();
            pop(ValType::i32);
            auto arity = label_arity(label(depth));
            if (arity) {
                pop(*arity);
                push(*arity);
            }
            break;
        }
        case op_br_table: {
            uint32_t count = r.leb_u32();
            std::vector<uint32_t> targets(count + 1);
            for (uint32_t i = 0; i < count; ++i) targets[i] = r.leb_u32();
            targets[count] = r.leb_u32();  // default
            pop(ValType::i32);
            auto def_arity = label_arity(label(targets[count]));
            for (uint32_t t : targets) {
                if (label_arity(label(t)) != def_arity) {
                    throw MalformedModule("br_table targets have mismatched arity");
                }
            }
            if (def_arity) pop(*def_arity);
            unreachable_here();
            ins.aux = static_cast<uint32_t>(br_tables.size());
            br_tables.push_back(std::move(targets));
            break;
        }
        case op_return: {
            if (result_) pop(*result_);
            unreachable_here();
            break;
        }
        case op_call: {
            uint32_t fidx = ins.a = r.leb_u32();
            if (fidx >= mod_.total_funcs()) throw MalformedModule("call: function index out of range");
            const FuncType& ft = mod_.func_type(fidx);
            for (auto it = ft.params.rbegin(); it != ft.params.rend(); ++it) pop(*it);
            for (ValType t : ft.results) push(t);
            break;
        }
        case op_call_indirect: {
            uint32_t tidx = ins.a = r.leb_u32();
            if (r.byte() != 0x00) throw MalformedModule("call_indirect reserved byte must be zero");
            if (!mod_.table) throw MalformedModule("call_indirect without table");
            if (tidx >= mod_.types.size()) throw MalformedModule("call_indirect: type index out of range");
            pop(ValType::i32);
            const FuncType& ft = mod_.types[tidx];
            for (auto it = ft.params.rbegin(); it != ft.params.rend(); ++it) pop(*it);
            for (ValType t : ft.results) push(t);
            break;
        }
        case op_drop:
            pop();
            break;
        case op_select: {
            pop(ValType::i32);
            MaybeType a = pop();
            MaybeType b = pop();
            if (a && b && *a != *b) throw MalformedModule("select operands differ in type");
            if (a) push(*a);
            else if (b) push(*b);
            else push(ValType::i32);  // fully polymorphic; dead code anyway
            break;
        }
        case op_local_get: {
            uint32_t idx = ins.a = r.leb_u32();
            push(local_type(idx));
            break;
        }
        case op_local_set: {
            uint32_t idx = ins.a = r.leb_u32();
            pop(local_type(idx));
            break;
        }
        case op_local_tee: {
            uint32_t idx = ins.a = r.leb_u32();
            ValType t = local_type(idx);
            pop(t);
            push(t);
            break;
        }
        case op_global_get: {
            uint32_t idx = ins.a = r.leb_u32();
            if (idx >= mod_.total_globals()) throw MalformedModule("global index out of range");
            push(mod_.global_type(idx).type);
            break;
        }
        case op_global_set: {
            uint32_t idx = ins.a = r.leb_u32();
            if (idx >= mod_.total_globals()) throw MalformedModule("global index out of range");
            GlobalType g = mod_.global_type(idx);
            if (!g.mut) throw MalformedModule("global.set of immutable global");
            pop(g.type);
            break;
        }
        case op_memory_size: {
            if (r.byte() != 0x00) throw MalformedModule("memory.size reserved byte must be zero");
            if (!mod_.memory) throw MalformedModule("memory instruction without memory");
            push(ValType::i32);
            break;
        }
        case op_memory_grow: {
            if (r.byte() != 0x00) throw MalformedModule("memory.grow reserved byte must be zero");
            if (!mod_.memory) throw MalformedModule("memory instruction without memory");
            pop(ValType::i32);
            push(ValType::i32);
            break;
        }
        case op_i32_const:
            ins.b = static_cast<uint64_t>(static_cast<uint32_t>(r.leb_s32()));
            push(ValType::i32);
            break;
        case op_i64_const:
            ins.b = static_cast<uint64_t>(r.leb_s64());
            push(ValType::i64);
            break;
        case op_f32_const: {
            float v = r.f32();
            uint32_t u;
            std::memcpy(&u, &v, 4);
            ins.b = u;
            push(ValType::f32);
            break;
        }
        case op_f64_const: {
            double v = r.f64();
            std::memcpy(&ins.b, &v, 8);
            push(ValType::f64);
            break;
        }
        default: {
            // Memory access?
            int nat = natural_align(op);
            if (nat >= 0) {
                if (!mod_.memory) throw MalformedModule("memory instruction without memory");
                uint32_t align = r.leb_u32();
                uint64_t offset = r.leb_u32();
                if (align > static_cast<uint32_t>(nat)) {
                    throw MalformedModule("alignment larger than natural alignment");
                }
                ins.a = align;
                ins.b = offset;
                bool store = op >= op_i32_store && op <= op_i64_store32;
                ValType val;
                switch (op) {
                    case op_f32_load: case op_f32_store: val = ValType::f32; break;
                    case op_f64_load: case op_f64_store: val = ValType::f64; break;
                    case op_i64_load: case op_i64_store:
                    case op_i64_load8_s: case op_i64_load8_u:
                    case op_i64_load16_s: case op_i64_load16_u:
                    case op_i64_load32_s: case op_i64_load32_u:
                    case op_i64_store8: case op_i64_store16: case op_i64_store32:
                        val = ValType::i64; break;
                    default: val = ValType::i32; break;
                }
                if (store) {
                    pop(val);
                    pop(ValType::i32);
                } else {
                    pop(ValType::i32);
                    push(val);
                }
                break;
            }
            // Numeric families.
            auto pop2push = [&](ValType in, ValType out) { pop(in); pop(in); push(out); };
            auto pop1push = [&](ValType in, ValType out) { pop(in); push(out); };
            if (op == op_i32_eqz) pop1push(ValType::i32, ValType::i32);
            else if (op >= op_i32_eq && op <= op_i32_ge_u) pop2push(ValType::i32, ValType::i32);
            else if (op == op_i64_eqz) pop1push(ValType::i64, ValType::i32);
            else if (op >= op_i64_eq && op <= op_i64_ge_u) pop2push(ValType::i64, ValType::i32);
            else if (op >= op_f32_eq && op <= op_f32_ge) pop2push(ValType::f32, ValType::i32);
            else if (op >= op_f64_eq && op <= op_f64_ge) pop2push(ValType::f64, ValType::i32);
            else if (op >= op_i32_clz && op <= op_i32_popcnt) pop1push(ValType::i32, ValType::i32);
            else if (op >= op_i32_add && op <= op_i32_rotr) pop2push(ValType::i32, ValType::i32);
            else if (op >= op_i64_clz && op <= op_i64_popcnt) pop1push(ValType::i64, ValType::i64);
            else if (op >= op_i64_add && op <= op_i64_rotr) pop2push(ValType::i64, ValType::i64);
            else if (op >= op_f32_abs && op <= op_f32_sqrt) pop1push(ValType::f32, ValType::f32);
            else if (op >= op_f32_add && op <= op_f32_copysign) pop2push(ValType::f32, ValType::f32);
            else if (op >= op_f64_abs && op <= op_f64_sqrt) pop1push(ValType::f64, ValType::f64);
            else if (op >= op_f64_add && op <= op_f64_copysign) pop2push(ValType::f64, ValType::f64);
            else if (op == op_i32_wrap_i64) pop1push(ValType::i64, ValType::i32);
            else if (op == op_i32_trunc_f32_s || op == op_i32_trunc_f32_u) pop1push(ValType::f32, ValType::i32);
            else if (op == op_i32_trunc_f64_s || op == op_i32_trunc_f64_u) pop1push(ValType::f64, ValType::i32);
            else if (op == op_i64_extend_i32_s || op == op_i64_extend_i32_u) pop1push(ValType::i32, ValType::i64);
            else if (op == op_i64_trunc_f32_s || op == op_i64_trunc_f32_u) pop1push(ValType::f32, ValType::i64);
            else if (op == op_i64_trunc_f64_s || op == op_i64_trunc_f64_u) pop1push(ValType::f64, ValType::i64);
            else if (op == op_f32_convert_i32_s || op == op_f32_convert_i32_u) pop1push(ValType::i32, ValType::f32);
            else if (op == op_f32_convert_i64_s || op == op_f32_convert_i64_u) pop1push(ValType::i64, ValType::f32);
            else if (op == op_f32_demote_f64) pop1push(ValType::f64, ValType::f32);
            else if (op == op_f64_convert_i32_s || op == op_f64_convert_i32_u) pop1push(ValType::i32, ValType::f64);
            else if (op == op_f64_convert_i64_s || op == op_f64_convert_i64_u) pop1push(ValType::i64, ValType::f64);
            else if (op == op_f64_promote_f32) pop1push(ValType::f32, ValType::f64);
            else if (op == op_i32_reinterpret_f32) pop1push(ValType::f32, ValType::i32);
            else if (op == op_i64_reinterpret_f64) pop1push(ValType::f64, ValType::i64);
            else if (op == op_f32_reinterpret_i32) pop1push(ValType::i32, ValType::f32);
            else if (op == op_f64_reinterpret_i64) pop1push(ValType::i64, ValType::f64);
            else {
                char buf[8];
                std::snprintf(buf, sizeof buf, "0x%02x", op);
                throw UnsupportedFeature(std::string("unsupported opcode ") + buf);
            }
        }
    }
}

}  // namespace

std::string_view valtype_name(ValType t) {
    switch (t) {
        case ValType::i32: return "i32";
        case ValType::i64: return "i64";
        case ValType::f32: return "f32";
        case ValType::f64: return "f64";
    }
    return "?";
}

const FuncType& Module::func_type(uint32_t func_index) const {
    if (func_index < imported_funcs) {
        uint32_t seen = 0;
        for (const Import& im : imports) {
            if (im.kind != ExternalKind::func) continue;
            if (seen == func_index) return types[im.func_type];
            ++seen;
        }
        throw MalformedModule("function index out of range");
    }
    uint32_t defined = func_index - imported_funcs;
    if (defined >= functions.size()) throw MalformedModule("function index out of range");
    return types[functions[defined]];
}

GlobalType Module::global_type(uint32_t global_index) const {
    if (global_index < imported_globals) {
        uint32_t seen = 0;
        for (const Import& im : imports) {
            if (im.kind != ExternalKind::global) continue;
            if (seen == global_index) return im.global;
            ++seen;
        }
        throw MalformedModule("global index out of range");
    }
    uint32_t defined = global_index - imported_globals;
    if (defined >= globals.size()) throw MalformedModule("global index out of range");
    return globals[defined].type;
}

namespace {

void parse_type_section(Module& mod, ByteReader& r) {
    uint32_t count = r.leb_u32();
    mod.types.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        if (r.byte() != 0x60) throw MalformedModule("type section: expected func type (0x60)");
        FuncType ft;
        uint32_t np = r.leb_u32();
        if (np > kMaxFunctionParams) throw MalformedModule("too many function parameters");
        ft.params.reserve(np);
        for (uint32_t k = 0; k < np; ++k) ft.params.push_back(valtype(r.byte()));
        uint32_t nr = r.leb_u32();
        if (nr > 1) throw UnsupportedFeature("multi-value function results");
        for (uint32_t k = 0; k < nr; ++k) ft.results.push_back(valtype(r.byte()));
        mod.types.push_back(std::move(ft));
    }
}

void parse_import_section(Module& mod, ByteReader& r) {
    uint32_t count = r.leb_u32();
    for (uint32_t i = 0; i < count; ++i) {
        Import im;
        im.module = read_name(r);
        im.name = read_name(r);
        uint8_t kind = r.byte();
        switch (kind) {
            case 0:
                im.kind = ExternalKind::func;
                im.func_type = r.leb_u32();
                if (im.func_type >= mod.types.size()) throw MalformedModule("import: type index out of range");
                ++mod.imported_funcs;
                break;
            case 1: {
                im.kind = ExternalKind::table;
                if (r.byte() != 0x70) throw UnsupportedFeature("non-funcref table");
                im.limits = read_limits(r, UINT32_MAX, "table");
                if (mod.table) throw MalformedModule("multiple tables");
                mod.table = im.limits;
                mod.table_imported = true;
                break;
            }
            case 2: {
                im.kind = ExternalKind::memory;
                im.limits = read_limits(r, kMaxPages, "memory");
                if (mod.memory) throw MalformedModule("multiple memories");
                mod.memory = im.limits;
                mod.memory_imported = true;
                break;
            }
            case 3: {
                im.kind = ExternalKind::global;
                im.global.type = valtype(r.byte());
                uint8_t mut = r.byte();
                if (mut > 1) throw MalformedModule("invalid global mutability");
                im.global.mut = mut == 1;
                ++mod.imported_globals;
                break;
            }
            default:
                throw MalformedModule("invalid import kind");
        }
        mod.imports.push_back(std::move(im));
    }
}

void parse_function_section(Module& mod, ByteReader& r) {
    uint32_t count = r.leb_u32();
    mod.functions.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        uint32_t tidx = r.leb_u32();
        if (tidx >= mod.types.size()) throw MalformedModule("function section: type index out of range");
        mod.functions.push_back(tidx);
    }
}

void parse_table_section(Module& mod, ByteReader& r) {
    uint32_t count = r.leb_u32();
    if (count > 1 || (count == 1 && mod.table)) throw MalformedModule("multiple tables");
    if (count == 1) {
        if (r.byte() != 0x70) throw UnsupportedFeature("non-funcref table");
        mod.table = read_limits(r, UINT32_MAX, "table");
    }
}

void parse_memory_section(Module& mod, ByteReader& r) {
    uint32_t count = r.leb_u32();
    if (count > 1 || (count == 1 && mod.memory)) throw MalformedModule("multiple memories");
    if (count == 1) mod.memory = read_limits(r, kMaxPages, "memory");
}

void parse_global_section(Module& mod, ByteReader& r) {
    uint32_t count = r.leb_u32();
    mod.globals.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        Global g;
        g.type.type = valtype(r.byte());
        uint8_t mut = r.byte();
        if (mut > 1) throw MalformedModule("invalid global mutability");
        g.type.mut = mut == 1;
        g.init = read_init_expr(r, mod, g.type.type);
        mod.globals.push_back(g);
    }
}

void parse_export_section(Module& mod, ByteReader& r) {
    uint32_t count = r.leb_u32();
    mod.exports.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        Export ex;
        ex.name = read_name(r);
        uint8_t kind = r.byte();
        if (kind > 3) throw MalformedModule("invalid export kind");
        ex.kind = static_cast<ExternalKind>(kind);
        ex.index = r.leb_u32();
        switch (ex.kind) {
            case ExternalKind::func:
                if (ex.index >= mod.total_funcs()) throw MalformedModule("export: function index out of range");
                break;
            case ExternalKind::table:
                if (!mod.table || ex.index != 0) throw MalformedModule("export: table index out of range");
                break;
            case ExternalKind::memory:
                if (!mod.memory || ex.index != 0) throw MalformedModule("export: memory index out of range");
                break;
            case ExternalKind::global:
                if (ex.index >= mod.total_globals()) throw MalformedModule("export: global index out of range");
                break;
        }
        for (const Export& prev : mod.exports) {
            if (prev.name == ex.name) throw MalformedModule("duplicate export name: " + ex.name);
        }
        mod.exports.push_back(std::move(ex));
    }
}

void parse_start_section(Module& mod, ByteReader& r) {
    uint32_t idx = r.leb_u32();
    if (idx >= mod.total_funcs()) throw MalformedModule("start: function index out of range");
    const FuncType& ft = mod.func_type(idx);
    if (!ft.params.empty() || !ft.results.empty()) throw MalformedModule("start function must have type [] -> []");
    mod.start = idx;
}

void parse_element_section(Module& mod, ByteReader& r) {
    uint32_t count = r.leb_u32();
    mod.elems.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        uint32_t table_index = r.leb_u32();
        if (table_index != 0) throw UnsupportedFeature("element segment with non-zero table index");
        if (!mod.table) throw MalformedModule("element segment without table");
        ElemSegment seg;
        seg.offset = read_init_expr(r, mod, ValType::i32);
        uint32_t n = r.leb_u32();
        seg.func_indices.reserve(n);
        for (uint32_t k = 0; k < n; ++k) {
            uint32_t fidx = r.leb_u32();
            if (fidx >= mod.total_funcs()) throw MalformedModule("element segment: function index out of range");
            seg.func_indices.push_back(fidx);
        }
        mod.elems.push_back(std::move(seg));
    }
}

void parse_data_section(Module& mod, ByteReader& r, uint32_t payload_begin) {
    uint32_t count = r.leb_u32();
    mod.datas.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        uint32_t mem_index = r.leb_u32();
        if (mem_index != 0) throw UnsupportedFeature("data segment with non-zero memory index");
        if (!mod.memory) throw MalformedModule("data segment without memory");
        DataSegment seg;
        seg.offset = read_init_expr(r, mod, ValType::i32);
        uint32_t n = r.leb_u32();
        seg.bytes_begin = payload_begin + static_cast<uint32_t>(r.offset());
        r.skip(n);
        seg.bytes_end = seg.bytes_begin + n;
        mod.datas.push_back(seg);
    }
}

void parse_code_section(Module& mod, ByteReader& r, uint32_t payload_begin) {
    uint32_t count = r.leb_u32();
    if (count != mod.functions.size()) {
        throw MalformedModule("code section count does not match function section");
    }
    mod.codes.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        uint32_t body_size = r.leb_u32();
        uint32_t body_begin = payload_begin + static_cast<uint32_t>(r.offset());
        ByteView body = r.bytes(body_size);
        ByteReader br(body);

        FuncBody fb;
        fb.locals_begin = body_begin;
        const FuncType& ft = mod.types[mod.functions[i]];
        std::vector<ValType> locals(ft.params.begin(), ft.params.end());

        uint32_t decl_count = br.leb_u32();
        uint64_t total = 0;
        for (uint32_t k = 0; k < decl_count; ++k) {
            uint32_t n = br.leb_u32();
            ValType t = valtype(br.byte());
            total += n;
            if (total + locals.size() > kMaxLocals) throw MalformedModule("too many locals");
            fb.local_decls.emplace_back(n, t);
            locals.insert(locals.end(), n, t);
        }
        fb.locals_total = static_cast<uint32_t>(total);
        fb.instrs_begin = body_begin + static_cast<uint32_t>(br.offset());

        BodyValidator v(mod, mod.imported_funcs + i, locals);
        while (!v.finished()) {
            if (br.done()) throw MalformedModule("function body ends without end");
            Instr ins;
            ins.begin = body_begin + static_cast<uint32_t>(br.offset());
            ins.op = br.byte();
            v.visit(ins.op, ins, br, mod.br_tables);
            ins.end = body_begin + static_cast<uint32_t>(br.offset());
            fb.instrs.push_back(ins);
        }
        if (!br.done()) throw MalformedModule("trailing bytes after function body");
        fb.instrs_end = body_begin + body_size;
        fb.max_stack = v.max_stack();
        mod.instruction_count += fb.instrs.size();
        mod.codes.push_back(std::move(fb));
    }
}

}  // namespace

Module read_module(std::shared_ptr<const Bytes> data) {
    const Bytes& bytes = *data;
    if (bytes.size() < 8 || bytes[0] != 0x00 || bytes[1] != 0x61 || bytes[2] != 0x73 || bytes[3] != 0x6D) {
        throw NotWasm("missing \\0asm magic");
    }
    if (bytes[4] != 0x01 || bytes[5] != 0x00 || bytes[6] != 0x00 || bytes[7] != 0x00) {
        throw NotWasm("unsupported wasm version (want 1)");
    }

    Module mod;
    mod.bytes = data;

    ByteReader r(ByteView(bytes).subspan(8));
    int last_id = 0;
    bool saw_function_section = false;
    while (!r.done()) {
        uint32_t header_begin = 8 + static_cast<uint32_t>(r.offset());
        uint8_t id = r.byte();
        if (id > 11) throw MalformedModule("unknown section id");
        uint32_t size = r.leb_u32();
        uint32_t payload_begin = 8 + static_cast<uint32_t>(r.offset());
        ByteView payload = r.bytes(size);
        if (id != 0) {
            if (id <= last_id) throw MalformedModule("section out of order or duplicated");
            last_id = id;
        }
        mod.sections.push_back(Section{id, header_begin, payload_begin, payload_begin + size});

        ByteReader pr(payload);
        switch (id) {
            case 0: {
                read_name(pr);  // custom section name must be well-formed
                continue;       // content opaque; size check below not applicable
            }
            case 1: parse_type_section(mod, pr); break;
            case 2: parse_import_section(mod, pr); break;
            case 3:
                parse_function_section(mod, pr);
                saw_function_section = true;
                break;
            case 4: parse_table_section(mod, pr); break;
            case 5: parse_memory_section(mod, pr); break;
            case 6: parse_global_section(mod, pr); break;
            case 7: parse_export_section(mod, pr); break;
            case 8: parse_start_section(mod, pr); break;
            case 9: parse_element_section(mod, pr); break;
            case 10: parse_code_section(mod, pr, payload_begin); break;
            case 11: parse_data_section(mod, pr, payload_begin); break;
            default: break;
        }
        if (!pr.done()) throw MalformedModule("section size mismatch");
    }
    if (!mod.functions.empty() && mod.codes.empty()) throw MalformedModule("function section without code section");
    if (!saw_function_section && !mod.codes.empty()) throw MalformedModule("code section without function section");
    return mod;
}

Module read_module(ByteView data) {
    return read_module(std::make_shared<const Bytes>(data.begin(), data.end()));
}

}  // namespace wasmless::wasm
