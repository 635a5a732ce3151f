#pragma once

#include <cstdint>
#include <string_view>

namespace wasmless::wasm {

// Core WebAssembly 1.0 opcode space. Everything not listed here (including
// the 0xFC/0xFD/0xFE prefixes and the sign-extension block at 0xC0..0xC4)
// is rejected as UnsupportedFeature.
enum Op : uint8_t {
    op_unreachable = 0x00,
    op_nop = 0x01,
    op_block = 0x02,
    op_loop = 0x03,
    op_if = 0x04,
    op_else = 0x05,
    op_end = 0x0B,
    op_br = 0x0C,
    op_br_if = 0x0D,
    op_br_table = 0x0E,
    op_return = 0x0F,
    op_call = 0x10,
    op_call_indirect = 0x11,
    op_drop = 0x1A,
    op_select = 0x1B,
    op_local_get = 0x20,
    op_local_set = 0x21,
    op_local_tee = 0x22,
    op_global_get = 0x23,
    op_global_set = 0x24,
    op_i32_load = 0x28,
    op_i64_load = 0x29,
    op_f32_load = 0x2A,
    op_f64_load = 0x2B,
    op_i32_load8_s = 0x2C,
    op_i32_load8_u = 0x2D,
    op_i32_load16_s = 0x2E,
    op_i32_load16_u = 0x2F,
    op_i64_load8_s = 0x30,
    op_i64_load8_u = 0x31,
    op_i64_load16_s = 0x32,
    op_i64_load16_u = 0x33,
    op_i64_load32_s = 0x34,
    op_i64_load32_u = 0x35,
    op_i32_store = 0x36,
    op_i64_store = 0x37,
    op_f32_store = 0x38,
    op_f64_store = 0x39,
    op_i32_store8 = 0x3A,
    op_i32_store16 = 0x3B,
    op_i64_store8 = 0x3C,
    op_i64_store16 = 0x3D,
    op_i64_store32 = 0x3E,
    op_memory_size = 0x3F,
    op_memory_grow = 0x40,
    op_i32_const = 0x41,
    op_i64_const = 0x42,
    op_f32_const = 0x43,
    op_f64_const = 0x44,
    op_i32_eqz = 0x45,
    op_i32_eq = 0x46,
    op_i32_ne = 0x47,
    op_i32_lt_s = 0x48,
    op_i32_lt_u = 0x49,
    op_i32_gt_s = 0x4A,
    op_i32_gt_u = 0x4B,
    op_i32_le_s = 0x4C,
    op_i32_le_u = 0x4D,
    op_i32_ge_s = 0x4E,
    op_i32_ge_u = 0x4F,
    op_i64_eqz = 0x50,
    op_i64_eq = 0x51,
    op_i64_ne = 0x52,
    op_i64_lt_s = 0x53,
    op_i64_lt_u = 0x54,
    op_i64_gt_s = 0x55,
    op_i64_gt_u = 0x56,
    op_i64_le_s = 0x57,
    op_i64_le_u = 0x58,
    op_i64_ge_s = 0x59,
    op_i64_ge_u = 0x5A,
    op_f32_eq = 0x5B,
    op_f32_ne = 0x5C,
    op_f32_lt = 0x5D,
    op_f32_gt = 0x5E,
    op_f32_le = 0x5F,
    op_f32_ge = 0x60,
    op_f64_eq = 0x61,
    op_f64_ne = 0x62,
    op_f64_lt = 0x63,
    op_f64_gt = 0x64,
    op_f64_le = 0x65,
    op_f64_ge = 0x66,
    op_i32_clz = 0x67,
    op_i32_ctz = 0x68,
    op_i32_popcnt = 0x69,
    op_i32_add = 0x6A,
    op_i32_sub = 0x6B,
    op_i32_mul = 0x6C,
    op_i32_div_s = 0x6D,
    op_i32_div_u = 0x6E,
    op_i32_rem_s = 0x6F,
    op_i32_rem_u = 0x70,
    op_i32_and = 0x71,
    op_i32_or = 0x72,
    op_i32_xor = 0x73,
    op_i32_shl = 0x74,
    op_i32_shr_s = 0x75,
    op_i32_shr_u = 0x76,
    op_i32_rotl = 0x77,
    op_i32_rotr = 0x78,
    op_i64_clz = 0x79,
    op_i64_ctz = 0x7A,
    op_i64_popcnt = 0x7B,
    op_i64_add = 0x7C,
    op_i64_sub = 0x7D,
    op_i64_mul = 0x7E,
    op_i64_div_s = 0x7F,
    op_i64_div_u = 0x80,
    op_i64_rem_s = 0x81,
    op_i64_rem_u = 0x82,
    op_i64_and = 0x83,
    op_i64_or = 0x84,
    op_i64_xor = 0x85,
    op_i64_shl = 0x86,
    op_i64_shr_s = 0x87,
    op_i64_shr_u = 0x88,
    op_i64_rotl = 0x89,
    op_i64_rotr = 0x8A,
    op_f32_abs = 0x8B,
    op_f32_neg = 0x8C,
    op_f32_ceil = 0x8D,
    op_f32_floor = 0x8E,
    op_f32_trunc = 0x8F,
    op_f32_nearest = 0x90,
    op_f32_sqrt = 0x91,
    op_f32_add = 0x92,
    op_f32_sub = 0x93,
    op_f32_mul = 0x94,
    op_f32_div = 0x95,
    op_f32_min = 0x96,
    op_f32_max = 0x97,
    op_f32_copysign = 0x98,
    op_f64_abs = 0x99,
    op_f64_neg = 0x9A,
    op_f64_ceil = 0x9B,
    op_f64_floor = 0x9C,
    op_f64_trunc = 0x9D,
    op_f64_nearest = 0x9E,
    op_f64_sqrt = 0x9F,
    op_f64_add = 0xA0,
    op_f64_sub = 0xA1,
    op_f64_mul = 0xA2,
    op_f64_div = 0xA3,
    op_f64_min = 0xA4,
    op_f64_max = 0xA5,
    op_f64_copysign = 0xA6,
    op_i32_wrap_i64 = 0xA7,
    op_i32_trunc_f32_s = 0xA8,
    op_i32_trunc_f32_u = 0xA9,
    op_i32_trunc_f64_s = 0xAA,
    op_i32_trunc_f64_u = 0xAB,
    op_i64_extend_i32_s = 0xAC,
    op_i64_extend_i32_u = 0xAD,
    op_i64_trunc_f32_s = 0xAE,
    op_i64_trunc_f32_u = 0xAF,
    op_i64_trunc_f64_s = 0xB0,
    op_i64_trunc_f64_u = 0xB1,
    op_f32_convert_i32_s = 0xB2,
    op_f32_convert_i32_u = 0xB3,
    op_f32_convert_i64_s = 0xB4,
    op_f32_convert_i64_u = 0xB5,
    op_f32_demote_f64 = 0xB6,
    op_f64_convert_i32_s = 0xB7,
    op_f64_convert_i32_u = 0xB8,
    op_f64_convert_i64_s = 0xB9,
    op_f64_convert_i64_u = 0xBA,
    op_f64_promote_f32 = 0xBB,
    op_i32_reinterpret_f32 = 0xBC,
    op_i64_reinterpret_f64 = 0xBD,
    op_f32_reinterpret_i32 = 0xBE,
    op_f64_reinterpret_i64 = 0xBF,
};

/// Mnemonic for a supported opcode, empty view if the byte is not in the
/// core 1.0 set. Mnemonics double as fuel-schedule class names.
std::string_view op_name(uint8_t op);

/// True for the instructions that delimit straight-line segments.
constexpr bool is_segment_delimiter(uint8_t op) {
    switch (op) {
        case op_block:
        case op_loop:
        case op_if:
        case op_else:
        case op_end:
        case op_br:
        case op_br_if:
        case op_br_table:
        case op_return:
        case op_call:
        case op_call_indirect:
        case op_unreachable:
            return true;
        default:
            return false;
    }
}

}  // namespace wasmless::wasm
