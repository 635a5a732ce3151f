#include <bit>
#include <cmath>
#include <cstring>

#include "wasmless/engine/instance.hpp"

namespace wasmless::engine {

namespace {

constexpr size_t kInitialStackSlots = 4096;
constexpr size_t kMaxStackSlots = 1u << 22;  // 32 MiB of value stack
constexpr size_t kMaxFrames = 65536;

inline float as_f32(uint64_t v) {
    float f;
    uint32_t u = static_cast<uint32_t>(v);
    std::memcpy(&f, &u, 4);
    return f;
}

inline uint64_t from_f32(float f) {
    uint32_t u;
    std::memcpy(&u, &f, 4);
    return u;
}

inline double as_f64(uint64_t v) {
    double d;
    std::memcpy(&d, &v, 8);
    return d;
}

inline uint64_t from_f64(double d) {
    uint64_t u;
    std::memcpy(&u, &d, 8);
    return u;
}

[[noreturn]] void trap(const char* what) { throw Trap(TrapKind::generic, what); }

// wasm float min/max: NaN-propagating, -0 < +0.
template <typename T>
T fmin_wasm(T a, T b) {
    if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<T>::quiet_NaN();
    if (a < b) return a;
    if (b < a) return b;
    return std::signbit(a) ? a : b;
}

template <typename T>
T fmax_wasm(T a, T b) {
    if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<T>::quiet_NaN();
    if (a < b) return b;
    if (b < a) return a;
    return std::signbit(a) ? b : a;
}

template <typename D>
D trunc_checked(double v, double lo, double hi) {
    if (std::isnan(v)) trap("invalid conversion to integer");
    if (!(v >= lo && v < hi)) trap("integer overflow");
    return static_cast<D>(v);
}

uint64_t trunc_f_to_u64(double v) {
    if (std::isnan(v)) trap("invalid conversion to integer");
    if (!(v > -1.0 && v < 18446744073709551616.0)) trap("integer overflow");
    if (v >= 9223372036854775808.0) {
        return static_cast<uint64_t>(static_cast<int64_t>(v - 9223372036854775808.0)) + 0x8000000000000000ull;
    }
    return static_cast<uint64_t>(static_cast<int64_t>(v));
}

uint32_t trunc_f_to_u32(double v) {
    if (std::isnan(v)) trap("invalid conversion to integer");
    if (!(v > -1.0 && v < 4294967296.0)) trap("integer overflow");
    return static_cast<uint32_t>(static_cast<int64_t>(v));
}

}  // namespace

uint64_t interp_call(Instance& inst, uint32_t func_index, const uint64_t* args, uint32_t nargs) {
    const CompiledModule& cm = inst.compiled();
    const uint32_t host_count = static_cast<uint32_t>(cm.host_imports.size());
    if (func_index < host_count) throw Trap(TrapKind::host, "entry point is a host import");
    const CompiledFunction* fn = &cm.functions[func_index - host_count];
    if (fn->params != nargs) throw Trap(TrapKind::host, "entry argument count mismatch");

    std::vector<uint64_t> stack(std::max<size_t>(kInitialStackSlots, fn->frame_slots()));
    uint64_t* S = stack.data();

    struct Frame {
        const CompiledFunction* fn;
        uint32_t ret_pc;
        uint32_t base;
    };
    std::vector<Frame> frames;
    frames.reserve(64);

    auto ensure = [&](size_t need) {
        if (need > stack.size()) {
            if (need > kMaxStackSlots) trap("call stack exhausted");
            stack.resize(std::max(need, stack.size() * 2));
            S = stack.data();
        }
    };

    uint32_t base = 0;
    std::memcpy(S, args, nargs * 8);
    std::memset(S + fn->params, 0, fn->locals * 8);
    uint32_t opbase = base + fn->params + fn->locals;
    uint32_t sp = opbase;

    const CInstr* code = fn->code.data();
    uint32_t pc = 0;

    uint8_t* M = inst.memory_.data();
    uint64_t msize = inst.memory_.size();
    uint64_t* G = inst.globals_.data();
    std::atomic<bool>* abort_flag = inst.abort_;

    auto check_abort = [&] {
        if (abort_flag->load(std::memory_order_relaxed)) throw Trap(TrapKind::timeout, "aborted by deadline");
    };

    // Branch unwinding: carry `arity` top values down to operand height `h`.
    auto unwind = [&](uint32_t h, uint32_t arity) {
        uint32_t target = opbase + h;
        if (arity) S[target] = S[sp - 1];  // arity is 0 or 1 in core wasm
        sp = target + arity;
    };

    auto enter = [&](const CompiledFunction* callee) {
        if (frames.size() >= kMaxFrames) trap("call stack exhausted");
        uint32_t new_base = sp - callee->params;
        ensure(static_cast<size_t>(new_base) + callee->frame_slots());
        std::memset(S + new_base + callee->params, 0, callee->locals * 8);
        frames.push_back(Frame{fn, pc, base});
        fn = callee;
        base = new_base;
        opbase = base + fn->params + fn->locals;
        sp = opbase;
        code = fn->code.data();
        pc = 0;
    };

    auto call_host = [&](uint32_t import_index) {
        const wasm::FuncType& ft = cm.module.types[cm.host_imports[import_index].type_index];
        uint32_t np = static_cast<uint32_t>(ft.params.size());
        check_abort();
        uint32_t ret = inst.host_fns()[import_index](inst, S + sp - np);
        sp -= np;
        if (!ft.results.empty()) S[sp++] = ret;
        M = inst.memory_.data();
        msize = inst.memory_.size();
    };

#define PUSH(v) (S[sp++] = (v))
#define TOP S[sp - 1]
#define I32_1(expr)                                     \
    {                                                   \
        uint32_t a = static_cast<uint32_t>(TOP);        \
        TOP = static_cast<uint32_t>(expr);              \
        break;                                          \
    }
#define I32_2(expr)                                     \
    {                                                   \
        uint32_t b = static_cast<uint32_t>(S[--sp]);    \
        uint32_t a = static_cast<uint32_t>(TOP);        \
        TOP = static_cast<uint32_t>(expr);              \
        break;                                          \
    }
#define I64_1(expr)                                     \
    {                                                   \
        uint64_t a = TOP;                               \
        TOP = static_cast<uint64_t>(expr);              \
        break;                                          \
    }
#define I64_2(expr)                                     \
    {                                                   \
        uint64_t b = S[--sp];                           \
        uint64_t a = TOP;                               \
        TOP = static_cast<uint64_t>(expr);              \
        break;                                          \
    }
#define F32_1(expr)                                     \
    {                                                   \
        float a = as_f32(TOP);                          \
        TOP = from_f32(expr);                           \
        break;                                          \
    }
#define F32_2(expr)                                     \
    {                                                   \
        float b = as_f32(S[--sp]);                      \
        float a = as_f32(TOP);                          \
        TOP = from_f32(expr);                           \
        break;                                          \
    }
#define F32_CMP(expr)                                   \
    {                                                   \
        float b = as_f32(S[--sp]);                      \
        float a = as_f32(TOP);                          \
        TOP = (expr) ? 1 : 0;                           \
        break;                                          \
    }
#define F64_1(expr)                                     \
    {                                                   \
        double a = as_f64(TOP);                         \
        TOP = from_f64(expr);                           \
        break;                                          \
    }
#define F64_2(expr)                                     \
    {                                                   \
        double b = as_f64(S[--sp]);                     \
        double a = as_f64(TOP);                         \
        TOP = from_f64(expr);                           \
        break;                                          \
    }
#define F64_CMP(expr)                                   \
    {                                                   \
        double b = as_f64(S[--sp]);                     \
        double a = as_f64(TOP);                         \
        TOP = (expr) ? 1 : 0;                           \
        break;                                          \
    }
#define LOAD(ctype, stype, push_as)                                             \
    {                                                                           \
        uint64_t addr = static_cast<uint32_t>(TOP) + in.b;                      \
        if (addr + sizeof(ctype) > msize) trap("out of bounds memory access");  \
        ctype v;                                                                \
        std::memcpy(&v, M + addr, sizeof(ctype));                               \
        TOP = static_cast<uint64_t>(static_cast<push_as>(static_cast<stype>(v))); \
        break;                                                                  \
    }
#define STORE(ctype)                                                            \
    {                                                                           \
        ctype v = static_cast<ctype>(S[--sp]);                                  \
        uint64_t addr = static_cast<uint32_t>(S[--sp]) + in.b;                  \
        if (addr + sizeof(ctype) > msize) trap("out of bounds memory access");  \
        std::memcpy(M + addr, &v, sizeof(ctype));                               \
        break;                                                                  \
    }

    for (;;) {
        const CInstr in = code[pc++];
        switch (in.op) {
            case iop_const64:
                PUSH(in.b);
                break;
            case wasm::op_local_get:
                PUSH(S[base + in.a]);
                break;
            case wasm::op_local_set:
                S[base + in.a] = S[--sp];
                break;
            case wasm::op_local_tee:
                S[base + in.a] = TOP;
                break;
            case wasm::op_global_get:
                PUSH(G[in.a]);
                break;
            case wasm::op_global_set:
                G[in.a] = S[--sp];
                break;

            case iop_fuel_charge: {
                int64_t left = static_cast<int64_t>(G[in.a]) - static_cast<int64_t>(in.b);
                G[in.a] = static_cast<uint64_t>(left);
                if (left < 0) trap("unreachable");
                break;
            }

            case iop_br:
                unwind(static_cast<uint32_t>(in.b), in.arity);
                pc = in.a;
                break;
            case iop_br_if:
                if (S[--sp]) {
                    unwind(static_cast<uint32_t>(in.b), in.arity);
                    pc = in.a;
                }
                break;
            case iop_br_ifz:
                if (!S[--sp]) {
                    unwind(static_cast<uint32_t>(in.b), in.arity);
                    pc = in.a;
                }
                break;
            case iop_br_back:
                check_abort();
                unwind(static_cast<uint32_t>(in.b), in.arity);
                pc = in.a;
                break;
            case iop_br_if_back:
                if (S[--sp]) {
                    check_abort();
                    unwind(static_cast<uint32_t>(in.b), in.arity);
                    pc = in.a;
                }
                break;
            case iop_br_table: {
                check_abort();
                const auto& table = cm.br_tables[in.a];
                uint32_t idx = static_cast<uint32_t>(S[--sp]);
                const BranchTarget& t = table[idx < table.size() ? idx : table.size() - 1];
                unwind(t.height, t.arity);
                pc = t.pc;
                break;
            }

            case iop_ret: {
                uint32_t arity = in.arity;
                if (arity) S[base] = S[sp - 1];
                sp = base + arity;
                if (frames.empty()) return arity ? S[base] : 0;
                Frame f = frames.back();
                frames.pop_back();
                fn = f.fn;
                pc = f.ret_pc;
                base = f.base;
                opbase = base + fn->params + fn->locals;
                code = fn->code.data();
                break;
            }

            case iop_call:
                check_abort();
                enter(&cm.functions[in.a]);
                break;
            case iop_call_host:
                call_host(in.a);
                break;
            case iop_call_indirect: {
                check_abort();
                uint32_t elem = static_cast<uint32_t>(S[--sp]);
                if (elem >= inst.table_.size()) trap("undefined table element");
                uint32_t fidx = inst.table_[elem];
                if (fidx == UINT32_MAX) trap("uninitialized table element");
                uint32_t actual_type = fidx < host_count ? cm.host_imports[fidx].type_index
                                                         : cm.functions[fidx - host_count].type_index;
                if (cm.type_canon[actual_type] != cm.type_canon[in.a]) trap("indirect call type mismatch");
                if (fidx < host_count) call_host(fidx);
                else enter(&cm.functions[fidx - host_count]);
                break;
            }

            case wasm::op_unreachable:
                trap("unreachable");
            case wasm::op_drop:
                --sp;
                break;
            case wasm::op_select: {
                uint64_t c = S[--sp];
                uint64_t v2 = S[--sp];
                if (!c) TOP = v2;
                break;
            }

            case wasm::op_i32_load: LOAD(uint32_t, uint32_t, uint32_t)
            case wasm::op_i64_load: LOAD(uint64_t, uint64_t, uint64_t)
            case wasm::op_f32_load: LOAD(uint32_t, uint32_t, uint32_t)
            case wasm::op_f64_load: LOAD(uint64_t, uint64_t, uint64_t)
            case wasm::op_i32_load8_s: LOAD(uint8_t, int8_t, uint32_t)
            case wasm::op_i32_load8_u: LOAD(uint8_t, uint8_t, uint32_t)
            case wasm::op_i32_load16_s: LOAD(uint16_t, int16_t, uint32_t)
            case wasm::op_i32_load16_u: LOAD(uint16_t, uint16_t, uint32_t)
            case wasm::op_i64_load8_s: LOAD(uint8_t, int8_t, int64_t)
            case wasm::op_i64_load8_u: LOAD(uint8_t, uint8_t, uint64_t)
            case wasm::op_i64_load16_s: LOAD(uint16_t, int16_t, int64_t)
            case wasm::op_i64_load16_u: LOAD(uint16_t, uint16_t, uint64_t)
            case wasm::op_i64_load32_s: LOAD(uint32_t, int32_t, int64_t)
            case wasm::op_i64_load32_u: LOAD(uint32_t, uint32_t, uint64_t)
            case wasm::op_i32_store: STORE(uint32_t)
            case wasm::op_i64_store: STORE(uint64_t)
            case wasm::op_f32_store: STORE(uint32_t)
            case wasm::op_f64_store: STORE(uint64_t)
            case wasm::op_i32_store8: STORE(uint8_t)
            case wasm::op_i32_store16: STORE(uint16_t)
            case wasm::op_i64_store8: STORE(uint8_t)
            case wasm::op_i64_store16: STORE(uint16_t)
            case wasm::op_i64_store32: STORE(uint32_t)

            case wasm::op_memory_size:
                PUSH(msize / kPageSize);
                break;
            case wasm::op_memory_grow: {
                uint32_t delta = static_cast<uint32_t>(TOP);
                int32_t prev = inst.grow_memory(delta);
                M = inst.memory_.data();
                msize = inst.memory_.size();
                TOP = static_cast<uint64_t>(static_cast<uint32_t>(prev));
                break;
            }

            case wasm::op_i32_eqz: I32_1(a == 0)
            case wasm::op_i32_eq: I32_2(a == b)
            case wasm::op_i32_ne: I32_2(a != b)
            case wasm::op_i32_lt_s: I32_2(static_cast<int32_t>(a) < static_cast<int32_t>(b))
            case wasm::op_i32_lt_u: I32_2(a < b)
            case wasm::op_i32_gt_s: I32_2(static_cast<int32_t>(a) > static_cast<int32_t>(b))
            case wasm::op_i32_gt_u: I32_2(a > b)
            case wasm::op_i32_le_s: I32_2(static_cast<int32_t>(a) <= static_cast<int32_t>(b))
            case wasm::op_i32_le_u: I32_2(a <= b)
            case wasm::op_i32_ge_s: I32_2(static_cast<int32_t>(a) >= static_cast<int32_t>(b))
            case wasm::op_i32_ge_u: I32_2(a >= b)
            case wasm::op_i64_eqz: I64_1(a == 0 ? 1 : 0)
            case wasm::op_i64_eq: I64_2(a == b ? 1 : 0)
            case wasm::op_i64_ne: I64_2(a != b ? 1 : 0)
            case wasm::op_i64_lt_s: I64_2(static_cast<int64_t>(a) < static_cast<int64_t>(b) ? 1 : 0)
            case wasm::op_i64_lt_u: I64_2(a < b ? 1 : 0)
            case wasm::op_i64_gt_s: I64_2(static_cast<int64_t>(a) > static_cast<int64_t>(b) ? 1 : 0)
            case wasm::op_i64_gt_u: I64_2(a > b ? 1 : 0)
            case wasm::op_i64_le_s: I64_2(static_cast<int64_t>(a) <= static_cast<int64_t>(b) ? 1 : 0)
            case wasm::op_i64_le_u: I64_2(a <= b ? 1 : 0)
            case wasm::op_i64_ge_s: I64_2(static_cast<int64_t>(a) >= static_cast<int64_t>(b) ? 1 : 0)
            case wasm::op_i64_ge_u: I64_2(a >= b ? 1 : 0)
            case wasm::op_f32_eq: F32_CMP(a == b)
            case wasm::op_f32_ne: F32_CMP(a != b)
            case wasm::op_f32_lt: F32_CMP(a < b)
            case wasm::op_f32_gt: F32_CMP(a > b)
            case wasm::op_f32_le: F32_CMP(a <= b)
            case wasm::op_f32_ge: F32_CMP(a >= b)
            case wasm::op_f64_eq: F64_CMP(a == b)
            case wasm::op_f64_ne: F64_CMP(a != b)
            case wasm::op_f64_lt: F64_CMP(a < b)
            case wasm::op_f64_gt: F64_CMP(a > b)
            case wasm::op_f64_le: F64_CMP(a <= b)
            case wasm::op_f64_ge: F64_CMP(a >= b)

            case wasm::op_i32_clz: I32_1(std::countl_zero(a))
            case wasm::op_i32_ctz: I32_1(std::countr_zero(a))
            case wasm::op_i32_popcnt: I32_1(std::popcount(a))
            case wasm::op_i32_add: I32_2(a + b)
            case wasm::op_i32_sub: I32_2(a - b)
            case wasm::op_i32_mul: I32_2(a * b)
            case wasm::op_i32_div_s: {
                int32_t b = static_cast<int32_t>(S[--sp]);
                int32_t a = static_cast<int32_t>(TOP);
                if (b == 0) trap("integer divide by zero");
                if (a == INT32_MIN && b == -1) trap("integer overflow");
                TOP = static_cast<uint32_t>(a / b);
                break;
            }
            case wasm::op_i32_div_u: {
                uint32_t b = static_cast<uint32_t>(S[--sp]);
                uint32_t a = static_cast<uint32_t>(TOP);
                if (b == 0) trap("integer divide by zero");
                TOP = a / b;
                break;
            }
            case wasm::op_i32_rem_s: {
                int32_t b = static_cast<int32_t>(S[--sp]);
                int32_t a = static_cast<int32_t>(TOP);
                if (b == 0) trap("integer divide by zero");
                TOP = static_cast<uint32_t>(b == -1 ? 0 : a % b);
                break;
            }
            case wasm::op_i32_rem_u: {
                uint32_t b = static_cast<uint32_t>(S[--sp]);
                uint32_t a = static_cast<uint32_t>(TOP);
                if (b == 0) trap("integer divide by zero");
                TOP = a % b;
                break;
            }
            case wasm::op_i32_and: I32_2(a & b)
            case wasm::op_i32_or: I32_2(a | b)
            case wasm::op_i32_xor: I32_2(a ^ b)
            case wasm::op_i32_shl: I32_2(a << (b & 31))
            case wasm::op_i32_shr_s: I32_2(static_cast<int32_t>(a) >> (b & 31))
            case wasm::op_i32_shr_u: I32_2(a >> (b & 31))
            case wasm::op_i32_rotl: I32_2(std::rotl(a, static_cast<int>(b & 31)))
            case wasm::op_i32_rotr: I32_2(std::rotr(a, static_cast<int>(b & 31)))

            case wasm::op_i64_clz: I64_1(std::countl_zero(a))
            case wasm::op_i64_ctz: I64_1(std::countr_zero(a))
            case wasm::op_i64_popcnt: I64_1(std::popcount(a))
            case wasm::op_i64_add: I64_2(a + b)
            case wasm::op_i64_sub: I64_2(a - b)
            case wasm::op_i64_mul: I64_2(a * b)
            case wasm::op_i64_div_s: {
                int64_t b = static_cast<int64_t>(S[--sp]);
                int64_t a = static_cast<int64_t>(TOP);
                if (b == 0) trap("integer divide by zero");
                if (a == INT64_MIN && b == -1) trap("integer overflow");
                TOP = static_cast<uint64_t>(a / b);
                break;
            }
            case wasm::op_i64_div_u: {
                uint64_t b = S[--sp];
                uint64_t a = TOP;
                if (b == 0) trap("integer divide by zero");
                TOP = a / b;
                break;
            }
            case wasm::op_i64_rem_s: {
                int64_t b = static_cast<int64_t>(S[--sp]);
                int64_t a = static_cast<int64_t>(TOP);
                if (b == 0) trap("integer divide by zero");
                TOP = static_cast<uint64_t>(b == -1 ? 0 : a % b);
                break;
            }
            case wasm::op_i64_rem_u: {
                uint64_t b = S[--sp];
                uint64_t a = TOP;
                if (b == 0) trap("integer divide by zero");
                TOP = a % b;
                break;
            }
            case wasm::op_i64_and: I64_2(a & b)
            case wasm::op_i64_or: I64_2(a | b)
            case wasm::op_i64_xor: I64_2(a ^ b)
            case wasm::op_i64_shl: I64_2(a << (b & 63))
            case wasm::op_i64_shr_s: I64_2(static_cast<int64_t>(a) >> (b & 63))
            case wasm::op_i64_shr_u: I64_2(a >> (b & 63))
            case wasm::op_i64_rotl: I64_2(std::rotl(a, static_cast<int>(b & 63)))
            case wasm::op_i64_rotr: I64_2(std::rotr(a, static_cast<int>(b & 63)))

            case wasm::op_f32_abs: F32_1(std::fabs(a))
            case wasm::op_f32_neg: F32_1(-a)
            case wasm::op_f32_ceil: F32_1(std::ceil(a))
            case wasm::op_f32_floor: F32_1(std::floor(a))
            case wasm::op_f32_trunc: F32_1(std::trunc(a))
            case wasm::op_f32_nearest: F32_1(std::nearbyint(a))
            case wasm::op_f32_sqrt: F32_1(std::sqrt(a))
            case wasm::op_f32_add: F32_2(a + b)
            case wasm::op_f32_sub: F32_2(a - b)
            case wasm::op_f32_mul: F32_2(a * b)
            case wasm::op_f32_div: F32_2(a / b)
            case wasm::op_f32_min: F32_2(fmin_wasm(a, b))
            case wasm::op_f32_max: F32_2(fmax_wasm(a, b))
            case wasm::op_f32_copysign: F32_2(std::copysign(a, b))

            case wasm::op_f64_abs: F64_1(std::fabs(a))
            case wasm::op_f64_neg: F64_1(-a)
            case wasm::op_f64_ceil: F64_1(std::ceil(a))
            case wasm::op_f64_floor: F64_1(std::floor(a))
            case wasm::op_f64_trunc: F64_1(std::trunc(a))
            case wasm::op_f64_nearest: F64_1(std::nearbyint(a))
            case wasm::op_f64_sqrt: F64_1(std::sqrt(a))
            case wasm::op_f64_add: F64_2(a + b)
            case wasm::op_f64_sub: F64_2(a - b)
            case wasm::op_f64_mul: F64_2(a * b)
            case wasm::op_f64_div: F64_2(a / b)
            case wasm::op_f64_min: F64_2(fmin_wasm(a, b))
            case wasm::op_f64_max: F64_2(fmax_wasm(a, b))
            case wasm::op_f64_copysign: F64_2(std::copysign(a, b))

            case wasm::op_i32_wrap_i64:
                TOP = static_cast<uint32_t>(TOP);
                break;
            case wasm::op_i32_trunc_f32_s:
                TOP = static_cast<uint32_t>(trunc_checked<int32_t>(as_f32(TOP), -2147483649.0, 2147483648.0));
                break;
            case wasm::op_i32_trunc_f32_u:
                TOP = trunc_f_to_u32(as_f32(TOP));
                break;
            case wasm::op_i32_trunc_f64_s:
                TOP = static_cast<uint32_t>(trunc_checked<int32_t>(as_f64(TOP), -2147483649.0, 2147483648.0));
                break;
            case wasm::op_i32_trunc_f64_u:
                TOP = trunc_f_to_u32(as_f64(TOP));
                break;
            case wasm::op_i64_extend_i32_s:
                TOP = static_cast<uint64_t>(static_cast<int64_t>(static_cast<int32_t>(TOP)));
                break;
            case wasm::op_i64_extend_i32_u:
                TOP = static_cast<uint32_t>(TOP);
                break;
            case wasm::op_i64_trunc_f32_s:
                TOP = static_cast<uint64_t>(
                    trunc_checked<int64_t>(as_f32(TOP), -9223372036854775808.0, 9223372036854775808.0));
                break;
            case wasm::op_i64_trunc_f32_u:
                TOP = trunc_f_to_u64(as_f32(TOP));
                break;
            case wasm::op_i64_trunc_f64_s:
                TOP = static_cast<uint64_t>(
                    trunc_checked<int64_t>(as_f64(TOP), -9223372036854775808.0, 9223372036854775808.0));
                break;
            case wasm::op_i64_trunc_f64_u:
                TOP = trunc_f_to_u64(as_f64(TOP));
                break;
            case wasm::op_f32_convert_i32_s:
                TOP = from_f32(static_cast<float>(static_cast<int32_t>(TOP)));
                break;
            case wasm::op_f32_convert_i32_u:
                TOP = from_f32(static_cast<float>(static_cast<uint32_t>(TOP)));
                break;
            case wasm::op_f32_convert_i64_s:
                TOP = from_f32(static_cast<float>(static_cast<int64_t>(TOP)));
                break;
            case wasm::op_f32_convert_i64_u:
                TOP = from_f32(static_cast<float>(TOP));
                break;
            case wasm::op_f32_demote_f64:
                TOP = from_f32(static_cast<float>(as_f64(TOP)));
                break;
            case wasm::op_f64_convert_i32_s:
                TOP = from_f64(static_cast<double>(static_cast<int32_t>(TOP)));
                break;
            case wasm::op_f64_convert_i32_u:
                TOP = from_f64(static_cast<double>(static_cast<uint32_t>(TOP)));
                break;
            case wasm::op_f64_convert_i64_s:
                TOP = from_f64(static_cast<double>(static_cast<int64_t>(TOP)));
                break;
            case wasm::op_f64_convert_i64_u:
                TOP = from_f64(static_cast<double>(TOP));
                break;
            case wasm::op_f64_promote_f32:
                TOP = from_f64(static_cast<double>(as_f32(TOP)));
                break;
            case wasm::op_i32_reinterpret_f32:
            case wasm::op_f32_reinterpret_i32:
            case wasm::op_i64_reinterpret_f64:
            case wasm::op_f64_reinterpret_i64:
                break;  // identical bit pattern on our stack

            default:
                trap("engine: invalid internal opcode");
        }
    }

#undef PUSH
#undef TOP
#undef I32_1
#undef I32_2
#undef I64_1
#undef I64_2
#undef F32_1
#undef F32_2
#undef F32_CMP
#undef F64_1
#undef F64_2
#undef F64_CMP
#undef LOAD
#undef STORE
}

}  // namespace wasmless::engine
