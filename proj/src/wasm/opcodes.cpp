#include "wasmless/wasm/opcodes.hpp"

#include <array>

namespace wasmless::wasm {

namespace {

constexpr std::array<std::string_view, 256> make_names() {
    std::array<std::string_view, 256> n{};
    n[op_unreachable] = "unreachable";
    n[op_nop] = "nop";
    n[op_block] = "block";
    n[op_loop] = "loop";
    n[op_if] = "if";
    n[op_else] = "else";
    n[op_end] = "end";
    n[op_br] = "br";
    n[op_br_if] = "br_if";
    n[op_br_table] = "br_table";
    n[op_return] = "return";
    n[op_call] = "call";
    n[op_call_indirect] = "call_indirect";
    n[op_drop] = "drop";
    n[op_select] = "select";
    n[op_local_get] = "local.get";
    n[op_local_set] = "local.set";
    n[op_local_tee] = "local.tee";
    n[op_global_get] = "global.get";
    n[op_global_set] = "global.set";
    n[op_i32_load] = "i32.load";
    n[op_i64_load] = "i64.load";
    n[op_f32_load] = "f32.load";
    n[op_f64_load] = "f64.load";
    n[op_i32_load8_s] = "i32.load8_s";
    n[op_i32_load8_u] = "i32.load8_u";
    n[op_i32_load16_s] = "i32.load16_s";
    n[op_i32_load16_u] = "i32.load16_u";
    n[op_i64_load8_s] = "i64.load8_s";
    n[op_i64_load8_u] = "i64.load8_u";
    n[op_i64_load16_s] = "i64.load16_s";
    n[op_i64_load16_u] = "i64.load16_u";
    n[op_i64_load32_s] = "i64.load32_s";
    n[op_i64_load32_u] = "i64.load32_u";
    n[op_i32_store] = "i32.store";
    n[op_i64_store] = "i64.store";
    n[op_f32_store] = "f32.store";
    n[op_f64_store] = "f64.store";
    n[op_i32_store8] = "i32.store8";
    n[op_i32_store16] = "i32.store16";
    n[op_i64_store8] = "i64.store8";
    n[op_i64_store16] = "i64.store16";
    n[op_i64_store32] = "i64.store32";
    n[op_memory_size] = "memory.size";
    n[op_memory_grow] = "memory.grow";
    n[op_i32_const] = "i32.const";
    n[op_i64_const] = "i64.const";
    n[op_f32_const] = "f32.const";
    n[op_f64_const] = "f64.const";
    n[op_i32_eqz] = "i32.eqz";
    n[op_i32_eq] = "i32.eq";
    n[op_i32_ne] = "i32.ne";
    n[op_i32_lt_s] = "i32.lt_s";
    n[op_i32_lt_u] = "i32.lt_u";
    n[op_i32_gt_s] = "i32.gt_s";
    n[op_i32_gt_u] = "i32.gt_u";
    n[op_i32_le_s] = "i32.le_s";
    n[op_i32_le_u] = "i32.le_u";
    n[op_i32_ge_s] = "i32.ge_s";
    n[op_i32_ge_u] = "i32.ge_u";
    n[op_i64_eqz] = "i64.eqz";
    n[op_i64_eq] = "i64.eq";
    n[op_i64_ne] = "i64.ne";
    n[op_i64_lt_s] = "i64.lt_s";
    n[op_i64_lt_u] = "i64.lt_u";
    n[op_i64_gt_s] = "i64.gt_s";
    n[op_i64_gt_u] = "i64.gt_u";
    n[op_i64_le_s] = "i64.le_s";
    n[op_i64_le_u] = "i64.le_u";
    n[op_i64_ge_s] = "i64.ge_s";
    n[op_i64_ge_u] = "i64.ge_u";
    n[op_f32_eq] = "f32.eq";
    n[op_f32_ne] = "f32.ne";
    n[op_f32_lt] = "f32.lt";
    n[op_f32_gt] = "f32.gt";
    n[op_f32_le] = "f32.le";
    n[op_f32_ge] = "f32.ge";
    n[op_f64_eq] = "f64.eq";
    n[op_f64_ne] = "f64.ne";
    n[op_f64_lt] = "f64.lt";
    n[op_f64_gt] = "f64.gt";
    n[op_f64_le] = "f64.le";
    n[op_f64_ge] = "f64.ge";
    n[op_i32_clz] = "i32.clz";
    n[op_i32_ctz] = "i32.ctz";
    n[op_i32_popcnt] = "i32.popcnt";
    n[op_i32_add] = "i32.add";
    n[op_i32_sub] = "i32.sub";
    n[op_i32_mul] = "i32.mul";
    n[op_i32_div_s] = "i32.div_s";
    n[op_i32_div_u] = "i32.div_u";
    n[op_i32_rem_s] = "i32.rem_s";
    n[op_i32_rem_u] = "i32.rem_u";
    n[op_i32_and] = "i32.and";
    n[op_i32_or] = "i32.or";
    n[op_i32_xor] = "i32.xor";
    n[op_i32_shl] = "i32.shl";
    n[op_i32_shr_s] = "i32.shr_s";
    n[op_i32_shr_u] = "i32.shr_u";
    n[op_i32_rotl] = "i32.rotl";
    n[op_i32_rotr] = "i32.rotr";
    n[op_i64_clz] = "i64.clz";
    n[op_i64_ctz] = "i64.ctz";
    n[op_i64_popcnt] = "i64.popcnt";
    n[op_i64_add] = "i64.add";
    n[op_i64_sub] = "i64.sub";
    n[op_i64_mul] = "i64.mul";
    n[op_i64_div_s] = "i64.div_s";
    n[op_i64_div_u] = "i64.div_u";
    n[op_i64_rem_s] = "i64.rem_s";
    n[op_i64_rem_u] = "i64.rem_u";
    n[op_i64_and] = "i64.and";
    n[op_i64_or] = "i64.or";
    n[op_i64_xor] = "i64.xor";
    n[op_i64_shl] = "i64.shl";
    n[op_i64_shr_s] = "i64.shr_s";
    n[op_i64_shr_u] = "i64.shr_u";
    n[op_i64_rotl] = "i64.rotl";
    n[op_i64_rotr] = "i64.rotr";
    n[op_f32_abs] = "f32.abs";
    n[op_f32_neg] = "f32.neg";
    n[op_f32_ceil] = "f32.ceil";
    n[op_f32_floor] = "f32.floor";
    n[op_f32_trunc] = "f32.trunc";
    n[op_f32_nearest] = "f32.nearest";
    n[op_f32_sqrt] = "f32.sqrt";
    n[op_f32_add] = "f32.add";
    n[op_f32_sub] = "f32.sub";
    n[op_f32_mul] = "f32.mul";
    n[op_f32_div] = "f32.div";
    n[op_f32_min] = "f32.min";
    n[op_f32_max] = "f32.max";
    n[op_f32_copysign] = "f32.copysign";
    n[op_f64_abs] = "f64.abs";
    n[op_f64_neg] = "f64.neg";
    n[op_f64_ceil] = "f64.ceil";
    n[op_f64_floor] = "f64.floor";
    n[op_f64_trunc] = "f64.trunc";
    n[op_f64_nearest] = "f64.nearest";
    n[op_f64_sqrt] = "f64.sqrt";
    n[op_f64_add] = "f64.add";
    n[op_f64_sub] = "f64.sub";
    n[op_f64_mul] = "f64.mul";
    n[op_f64_div] = "f64.div";
    n[op_f64_min] = "f64.min";
    n[op_f64_max] = "f64.max";
    n[op_f64_copysign] = "f64.copysign";
    n[op_i32_wrap_i64] = "i32.wrap_i64";
    n[op_i32_trunc_f32_s] = "i32.trunc_f32_s";
    n[op_i32_trunc_f32_u] = "i32.trunc_f32_u";
    n[op_i32_trunc_f64_s] = "i32.trunc_f64_s";
    n[op_i32_trunc_f64_u] = "i32.trunc_f64_u";
    n[op_i64_extend_i32_s] = "i64.extend_i32_s";
    n[op_i64_extend_i32_u] = "i64.extend_i32_u";
    n[op_i64_trunc_f32_s] = "i64.trunc_f32_s";
    n[op_i64_trunc_f32_u] = "i64.trunc_f32_u";
    n[op_i64_trunc_f64_s] = "i64.trunc_f64_s";
    n[op_i64_trunc_f64_u] = "i64.trunc_f64_u";
    n[op_f32_convert_i32_s] = "f32.convert_i32_s";
    n[op_f32_convert_i32_u] = "f32.convert_i32_u";
    n[op_f32_convert_i64_s] = "f32.convert_i64_s";
    n[op_f32_convert_i64_u] = "f32.convert_i64_u";
    n[op_f32_demote_f64] = "f32.demote_f64";
    n[op_f64_convert_i32_s] = "f64.convert_i32_s";
    n[op_f64_convert_i32_u] = "f64.convert_i32_u";
    n[op_f64_convert_i64_s] = "f64.convert_i64_s";
    n[op_f64_convert_i64_u] = "f64.convert_i64_u";
    n[op_f64_promote_f32] = "f64.promote_f32";
    n[op_i32_reinterpret_f32] = "i32.reinterpret_f32";
    n[op_i64_reinterpret_f64] = "i64.reinterpret_f64";
    n[op_f32_reinterpret_i32] = "f32.reinterpret_i32";
    n[op_f64_reinterpret_i64] = "f64.reinterpret_i64";
    return n;
}

constexpr auto kNames = make_names();

}  // namespace

std::string_view op_name(uint8_t op) { return kNames[op]; }

}  // namespace wasmless::wasm
