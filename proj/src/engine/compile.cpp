#include <limits>

#include "wasmless/engine/compiled.hpp"
#include "wasmless/engine/trap.hpp"
#include "wasmless/wasm/instrument.hpp"

namespace wasmless::engine {

namespace {

using wasm::Instr;
using wasm::op_name;

// Operand-stack delta of a plain (non-control) instruction.
int stack_delta(const Instr& ins) {
    using namespace wasm;
    uint8_t op = ins.op;
    if (op == op_i32_const || op == op_i64_const || op == op_f32_const || op == op_f64_const) return 1;
    if (op == op_local_get || op == op_global_get || op == op_memory_size) return 1;
    if (op == op_local_set || op == op_global_set || op == op_drop) return -1;
    if (op == op_local_tee || op == op_memory_grow) return 0;
    if (op == op_select) return -2;
    if (op >= op_i32_load && op <= op_i64_load32_u) return 0;
    if (op >= op_i32_store && op <= op_i64_store32) return -2;
    if (op == op_i32_eqz || op == op_i64_eqz) return 0;
    if ((op >= op_i32_eq && op <= op_i64_ge_u) || (op >= op_f32_eq && op <= op_f64_ge)) return -1;
    if ((op >= op_i32_clz && op <= op_i32_popcnt) || (op >= op_i64_clz && op <= op_i64_popcnt)) return 0;
    if ((op >= op_i32_add && op <= op_i32_rotr) || (op >= op_i64_add && op <= op_i64_rotr)) return -1;
    if ((op >= op_f32_abs && op <= op_f32_sqrt) || (op >= op_f64_abs && op <= op_f64_sqrt)) return 0;
    if ((op >= op_f32_add && op <= op_f32_copysign) || (op >= op_f64_add && op <= op_f64_copysign)) return -1;
    if (op >= op_i32_wrap_i64 && op <= op_f64_reinterpret_i64) return 0;
    throw EngineReject(std::string("engine: unhandled opcode ") + std::string(op_name(op)));
}

class FunctionCompiler {
  public:
    FunctionCompiler(const wasm::Module& mod, CompiledModule& out, uint32_t defined_index)
        : mod_(mod), out_(out), body_(mod.codes[defined_index]) {
        const wasm::FuncType& ft = mod.types[mod.functions[defined_index]];
        fn_.type_index = mod.functions[defined_index];
        fn_.params = static_cast<uint32_t>(ft.params.size());
        fn_.locals = body_.locals_total;
        fn_.results = static_cast<uint32_t>(ft.results.size());
        fn_.max_stack = body_.max_stack + 2;  // headroom for charge temporaries
    }

    CompiledFunction run();

  private:
    struct Ctl {
        uint8_t opcode;        // op_block / op_loop / op_if / op_else; op_nop = function frame
        uint16_t arity;        // values the block yields
        uint16_t label_arity;  // values a branch to this label carries
        uint32_t height;       // operand height at entry
        uint32_t entry_pc = 0; // loop only
        bool dead_at_entry = false;
        bool if_alive = false;
        bool has_else = false;
        uint32_t iffalse_fixup = UINT32_MAX;
        std::vector<uint32_t> fixups;
        std::vector<std::pair<uint32_t, uint32_t>> table_fixups;
    };

    const wasm::Module& mod_;
    CompiledModule& out_;
    const wasm::FuncBody& body_;
    CompiledFunction fn_;
    std::vector<Ctl> ctl_;
    int64_t height_ = 0;
    bool dead_ = false;

    uint32_t pc() const { return static_cast<uint32_t>(fn_.code.size()); }

    CInstr& emit(uint16_t op, uint16_t arity = 0, uint32_t a = 0, uint64_t b = 0) {
        fn_.code.push_back(CInstr{op, arity, a, b});
        return fn_.code.back();
    }

    Ctl& label(uint32_t depth) { return ctl_[ctl_.size() - 1 - depth]; }

    static uint16_t block_arity(uint32_t encoded) { return encoded == 0x40 ? 0 : 1; }

    void patch(uint32_t at, uint32_t target, uint16_t arity, uint32_t height) {
        fn_.code[at].a = target;
        fn_.code[at].arity = arity;
        fn_.code[at].b = height;
    }

    bool try_fuse_charge(size_t i);
    void branch_to(uint32_t depth, bool conditional);
    void handle_end();
};

// Recognize the exact charge sequence the instrumenter injects and collapse
// it into one internal instruction. Semantics are identical to executing
// the ten instructions.
bool FunctionCompiler::try_fuse_charge(size_t i) {
    const auto& ins = body_.instrs;
    if (i + 10 > ins.size()) return false;
    using namespace wasm;
    if (ins[i].op != op_global_get) return false;
    uint32_t g = ins[i].a;
    if (ins[i + 1].op != op_i64_const) return false;
    int64_t cost = static_cast<int64_t>(ins[i + 1].b);
    if (cost < 0) return false;
    if (ins[i + 2].op != op_i64_sub) return false;
    if (ins[i + 3].op != op_global_set || ins[i + 3].a != g) return false;
    if (ins[i + 4].op != op_global_get || ins[i + 4].a != g) return false;
    if (ins[i + 5].op != op_i64_const || ins[i + 5].b != 0) return false;
    if (ins[i + 6].op != op_i64_lt_s) return false;
    if (ins[i + 7].op != op_if || ins[i + 7].a != 0x40) return false;
    if (ins[i + 8].op != op_unreachable) return false;
    if (ins[i + 9].op != op_end) return false;
    emit(iop_fuel_charge, 0, g, static_cast<uint64_t>(cost));
    return true;
}

void FunctionCompiler::branch_to(uint32_t depth, bool conditional) {
    Ctl& c = label(depth);
    if (c.opcode == wasm::op_loop) {
        emit(conditional ? iop_br_if_back : iop_br_back, 0, c.entry_pc, c.height);
    } else {
        emit(conditional ? iop_br_if : iop_br, c.label_arity, 0, 0);
        c.fixups.push_back(pc() - 1);
    }
}

void FunctionCompiler::handle_end() {
    Ctl c = ctl_.back();
    ctl_.pop_back();

    if (c.opcode == wasm::op_if && !c.has_else && c.iffalse_fixup != UINT32_MAX) {
        patch(c.iffalse_fixup, pc(), 0, c.height);
    }
    bool has_incoming = !c.fixups.empty() || !c.table_fixups.empty();
    for (uint32_t at : c.fixups) patch(at, pc(), c.label_arity, c.height);
    for (auto [t, e] : c.table_fixups) {
        out_.br_tables[t][e] = BranchTarget{pc(), c.height, c.label_arity};
    }

    bool alive_after = !dead_ || has_incoming ||
                       (c.opcode == wasm::op_if && !c.has_else && c.if_alive);
    if (c.opcode == wasm::op_loop) alive_after = !dead_;
    dead_ = !alive_after;
    height_ = static_cast<int64_t>(c.height) + (dead_ ? 0 : c.arity);

    if (ctl_.empty()) {
        // Function end; branches to the function label land on this ret.
        emit(iop_ret, fn_.results);
    }
}

CompiledFunction FunctionCompiler::run() {
    using namespace wasm;
    ctl_.push_back(Ctl{op_nop, static_cast<uint16_t>(fn_.results), static_cast<uint16_t>(fn_.results),
                       0, 0, false, true, false, UINT32_MAX, {}, {}});

    const auto& ins = body_.instrs;
    for (size_t i = 0; i < ins.size(); ++i) {
        if (ctl_.empty()) throw EngineReject("engine: instructions after function end");
        if (!dead_ && try_fuse_charge(i)) {
            i += 9;
            continue;
        }
        uint8_t op = ins[i].op;
        switch (op) {
            case op_block:
                ctl_.push_back(Ctl{op_block, block_arity(ins[i].a), block_arity(ins[i].a),
                                   static_cast<uint32_t>(height_), 0, dead_, !dead_, false, UINT32_MAX, {}, {}});
                break;
            case op_loop:
                ctl_.push_back(Ctl{op_loop, block_arity(ins[i].a), 0, static_cast<uint32_t>(height_),
                                   pc(), dead_, !dead_, false, UINT32_MAX, {}, {}});
                break;
            case op_if: {
                if (!dead_) height_ -= 1;
                Ctl c{op_if, block_arity(ins[i].a), block_arity(ins[i].a), static_cast<uint32_t>(height_),
                      0, dead_, !dead_, false, UINT32_MAX, {}, {}};
                if (!dead_) {
                    emit(iop_br_ifz);
                    c.iffalse_fixup = pc() - 1;
                }
                ctl_.push_back(std::move(c));
                break;
            }
            case op_else: {
                Ctl& c = ctl_.back();
                if (!dead_) {
                    emit(iop_br, c.label_arity, 0, 0);
                    c.fixups.push_back(pc() - 1);
                }
                if (c.iffalse_fixup != UINT32_MAX) patch(c.iffalse_fixup, pc(), 0, c.height);
                c.has_else = true;
                dead_ = !c.if_alive;
                height_ = c.height;
                break;
            }
            case op_end:
                handle_end();
                break;
            case op_br:
                if (!dead_) {
                    branch_to(ins[i].a, false);
                    dead_ = true;
                }
                break;
            case op_br_if:
                if (!dead_) {
                    height_ -= 1;
                    branch_to(ins[i].a, true);
                }
                break;
            case op_br_table: {
                if (dead_) break;
                height_ -= 1;
                const std::vector<uint32_t>& depths = mod_.br_tables[ins[i].aux];
                uint32_t table_index = static_cast<uint32_t>(out_.br_tables.size());
                out_.br_tables.emplace_back(depths.size());
                for (size_t k = 0; k < depths.size(); ++k) {
                    Ctl& c = label(depths[k]);
                    if (c.opcode == op_loop) {
                        out_.br_tables[table_index][k] = BranchTarget{c.entry_pc, c.height, 0};
                    } else {
                        c.table_fixups.emplace_back(table_index, static_cast<uint32_t>(k));
                    }
                }
                emit(iop_br_table, 0, table_index);
                dead_ = true;
                break;
            }
            case op_return:
                if (!dead_) {
                    emit(iop_ret, fn_.results);
                    dead_ = true;
                }
                break;
            case op_unreachable:
                if (!dead_) {
                    emit(op_unreachable);
                    dead_ = true;
                }
                break;
            case op_call: {
                if (dead_) break;
                uint32_t fidx = ins[i].a;
                const FuncType& ft = mod_.func_type(fidx);
                if (fidx < mod_.imported_funcs) {
                    emit(iop_call_host, 0, fidx);
                } else {
                    emit(iop_call, 0, fidx - mod_.imported_funcs);
                }
                height_ += static_cast<int64_t>(ft.results.size()) - static_cast<int64_t>(ft.params.size());
                break;
            }
            case op_call_indirect: {
                if (dead_) break;
                const FuncType& ft = mod_.types[ins[i].a];
                emit(iop_call_indirect, 0, ins[i].a);
                height_ += static_cast<int64_t>(ft.results.size()) - static_cast<int64_t>(ft.params.size()) - 1;
                break;
            }
            case op_nop:
                break;
            case op_i32_const:
            case op_i64_const:
            case op_f32_const:
            case op_f64_const:
                if (!dead_) {
                    emit(iop_const64, 0, 0, ins[i].b);
                    height_ += 1;
                }
                break;
            default:
                if (!dead_) {
                    emit(op, 0, ins[i].a, ins[i].b);
                    height_ += stack_delta(ins[i]);
                }
                break;
        }
    }
    if (!ctl_.empty()) throw EngineReject("engine: unterminated function body");
    fn_.code.shrink_to_fit();
    return std::move(fn_);
}

}  // namespace

std::shared_ptr<const CompiledModule> compile_module(wasm::Module mod, std::string content_hash) {
    auto cm = std::make_shared<CompiledModule>();
    cm->content_hash = std::move(content_hash);

    for (const wasm::Import& im : mod.imports) {
        if (im.kind != wasm::ExternalKind::func) {
            throw EngineReject("engine: only function imports are supported (import " + im.module + "." + im.name +
                               ")");
        }
        cm->host_imports.push_back(HostImport{im.module, im.name, im.func_type});
    }

    cm->type_canon.resize(mod.types.size());
    for (size_t i = 0; i < mod.types.size(); ++i) {
        cm->type_canon[i] = static_cast<uint32_t>(i);
        for (size_t j = 0; j < i; ++j) {
            if (mod.types[j] == mod.types[i]) {
                cm->type_canon[i] = static_cast<uint32_t>(j);
                break;
            }
        }
    }

    for (const wasm::Export& ex : mod.exports) {
        if (ex.kind == wasm::ExternalKind::global && ex.name == wasm::kFuelGlobalName) {
            wasm::GlobalType g = mod.global_type(ex.index);
            if (g.type == wasm::ValType::i64 && g.mut) cm->fuel_global = static_cast<int32_t>(ex.index);
        }
        if (ex.kind == wasm::ExternalKind::func && ex.name == "_start") {
            const wasm::FuncType& ft = mod.func_type(ex.index);
            if (ft.params.empty() && ft.results.empty()) cm->start_func = static_cast<int32_t>(ex.index);
        }
    }

    cm->functions.reserve(mod.functions.size());
    for (uint32_t i = 0; i < mod.functions.size(); ++i) {
        FunctionCompiler fc(mod, *cm, i);
        cm->functions.push_back(fc.run());
    }

    cm->module = std::move(mod);
    return cm;
}

}  // namespace wasmless::engine
