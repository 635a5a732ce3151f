#include <doctest.h>

#include "support/trace_oracle.hpp"
#include "support/wasm_builder.hpp"
#include "wasmless/engine/instance.hpp"
#include "wasmless/sha256.hpp"
#include "wasmless/wasm/instrument.hpp"

using namespace wasmless;
using namespace testsupport;
using engine::Instance;
using engine::Trap;
using engine::WasiConfig;

namespace {

std::shared_ptr<const engine::CompiledModule> compile_bytes(const Bytes& b) {
    return engine::compile_module(wasm::read_module(ByteView(b)), sha256_hex(b));
}

std::shared_ptr<const engine::CompiledModule> compile_instrumented(const Bytes& raw,
                                                                   const wasm::FuelSchedule& sched = {}) {
    wasm::ModuleArtifact art = wasm::instrument(wasm::validate(raw), sched);
    return engine::compile_module(wasm::read_module(ByteView(art.instrumented_bytes)), art.content_hash);
}

uint32_t find_export(const engine::CompiledModule& cm, const std::string& name) {
    for (const auto& ex : cm.module.exports) {
        if (ex.name == name && ex.kind == wasm::ExternalKind::func) return ex.index;
    }
    throw std::runtime_error("no export " + name);
}

/// Run an exported function on the instrumented build and report the fuel
/// it consumed.
uint64_t measure_fuel(const Bytes& raw, const std::string& name, const std::vector<uint64_t>& args = {},
                      const wasm::FuelSchedule& sched = {}) {
    auto cm = compile_instrumented(raw, sched);
    Instance inst(*cm, WasiConfig{}, 1024, nullptr);
    constexpr int64_t budget = 1'000'000'000;
    inst.set_fuel(budget);
    inst.call(find_export(*cm, name), args);
    return static_cast<uint64_t>(budget - inst.fuel());
}

}  // namespace

TEST_CASE("arithmetic and locals") {
    WasmBuilder b;
    uint32_t t = b.add_type({0x7F, 0x7F}, {0x7F});
    uint32_t f = b.add_func(t, {{1, 0x7F}},
                            Code().local_get(0).local_get(1).i32_add().local_tee(2).local_get(2).i32_mul().end().bytes());
    b.export_func("addsq", f);
    auto cm = compile_bytes(b.build());
    Instance inst(*cm, WasiConfig{}, 16, nullptr);
    CHECK(inst.call(find_export(*cm, "addsq"), {3, 4}) == 49);
}

TEST_CASE("if/else picks the right arm") {
    WasmBuilder b;
    uint32_t t = b.add_type({0x7F}, {0x7F});
    // if (p) 11 else 22
    uint32_t f = b.add_func(t, {{1, 0x7F}},
                            Code()
                                .local_get(0)
                                .if_void()
                                .i32_const(11)
                                .local_set(1)
                                .else_()
                                .i32_const(22)
                                .local_set(1)
                                .end()
                                .local_get(1)
                                .end()
                                .bytes());
    b.export_func("pick", f);
    auto cm = compile_bytes(b.build());
    Instance inst(*cm, WasiConfig{}, 16, nullptr);
    CHECK(inst.call(find_export(*cm, "pick"), {1}) == 11);
    CHECK(inst.call(find_export(*cm, "pick"), {0}) == 22);
}

TEST_CASE("counted loop") {
    // sum 1..n with a br_if backedge
    WasmBuilder b;
    uint32_t t = b.add_type({0x7F}, {0x7F});
    uint32_t f = b.add_func(t, {{2, 0x7F}},
                            Code()
                                .loop_void()
                                .local_get(1)
                                .local_get(0)
                                .i32_add()
                                .local_set(1)  // acc += n
                                .local_get(0)
                                .i32_const(1)
                                .i32_sub()
                                .local_tee(0)  // n -= 1
                                .br_if(0)
                                .end()
                                .local_get(1)
                                .end()
                                .bytes());
    b.export_func("sum", f);
    auto cm = compile_bytes(b.build());
    Instance inst(*cm, WasiConfig{}, 16, nullptr);
    CHECK(inst.call(find_export(*cm, "sum"), {100}) == 5050);
}

TEST_CASE("calls and recursion") {
    WasmBuilder b;
    uint32_t t = b.add_type({0x7F}, {0x7F});
    // fact(n) = n < 2 ? 1 : n * fact(n-1)
    uint32_t f = b.add_func(t, {},
                            Code()
                                .local_get(0)
                                .i32_const(2)
                                .i32_lt_u()
                                .if_void()
                                .i32_const(1)
                                .ret()
                                .end()
                                .local_get(0)
                                .local_get(0)
                                .i32_const(1)
                                .i32_sub()
                                .call(0)
                                .i32_mul()
                                .end()
                                .bytes());
    b.export_func("fact", f);
    auto cm = compile_bytes(b.build());
    Instance inst(*cm, WasiConfig{}, 16, nullptr);
    CHECK(inst.call(find_export(*cm, "fact"), {10}) == 3628800);
}

TEST_CASE("call_indirect dispatches through the table") {
    WasmBuilder b;
    uint32_t binop = b.add_type({0x7F, 0x7F}, {0x7F});
    uint32_t seltype = b.add_type({0x7F, 0x7F, 0x7F}, {0x7F});
    uint32_t add = b.add_func(binop, {}, Code().local_get(0).local_get(1).i32_add().end().bytes());
    uint32_t mul = b.add_func(binop, {}, Code().local_get(0).local_get(1).i32_mul().end().bytes());
    uint32_t sel = b.add_func(seltype, {},
                              Code().local_get(1).local_get(2).local_get(0).call_indirect(binop).end().bytes());
    b.elem_funcs = {add, mul};
    b.export_func("sel", sel);
    auto cm = compile_bytes(b.build());
    Instance inst(*cm, WasiConfig{}, 16, nullptr);
    uint32_t s = find_export(*cm, "sel");
    CHECK(inst.call(s, {0, 6, 7}) == 13);
    CHECK(inst.call(s, {1, 6, 7}) == 42);
    CHECK_THROWS_AS(inst.call(s, {2, 6, 7}), Trap);  // out of table bounds
}

TEST_CASE("memory load/store and data segments") {
    WasmBuilder b;
    b.memory(1, 2);
    b.data(16, {0x2A, 0x00, 0x00, 0x00});
    uint32_t t = b.add_type({}, {0x7F});
    uint32_t f = b.add_func(t, {},
                            Code()
                                .i32_const(32)
                                .i32_const(16)
                                .i32_load(2, 0)
                                .i32_store(2, 0)  // mem[32] = mem[16]
                                .i32_const(0)
                                .i32_load(2, 32)
                                .end()
                                .bytes());
    b.export_func("copy", f);
    auto cm = compile_bytes(b.build());
    Instance inst(*cm, WasiConfig{}, 16, nullptr);
    CHECK(inst.call(find_export(*cm, "copy"), {}) == 42);
}

TEST_CASE("memory.grow respects module max and platform limit") {
    WasmBuilder b;
    b.memory(1, 4);
    uint32_t t = b.add_type({}, {0x7F});
    uint32_t f = b.add_func(t, {}, Code().i32_const(1).memory_grow().drop().memory_size().end().bytes());
    b.export_func("grow1", f);
    Bytes bytes = b.build();

    SUBCASE("within both limits") {
        auto cm = compile_bytes(bytes);
        Instance inst(*cm, WasiConfig{}, 16, nullptr);
        CHECK(inst.call(find_export(*cm, "grow1"), {}) == 2);
        CHECK(inst.memory_peak_pages() == 2);
    }
    SUBCASE("beyond module max returns -1") {
        WasmBuilder b2;
        b2.memory(1, 2);
        uint32_t t2 = b2.add_type({}, {0x7F});
        uint32_t f2 = b2.add_func(t2, {}, Code().i32_const(5).memory_grow().end().bytes());
        b2.export_func("overgrow", f2);
        auto cm = compile_bytes(b2.build());
        Instance inst(*cm, WasiConfig{}, 16, nullptr);
        CHECK(static_cast<int32_t>(inst.call(find_export(*cm, "overgrow"), {})) == -1);
    }
    SUBCASE("beyond the platform limit traps") {
        auto cm = compile_bytes(bytes);
        Instance inst(*cm, WasiConfig{}, 1, nullptr);
        try {
            inst.call(find_export(*cm, "grow1"), {});
            FAIL("expected trap");
        } catch (const Trap& t) {
            CHECK(t.kind == engine::TrapKind::memory_exceeded);
        }
    }
}

TEST_CASE("wasm traps carry reasons") {
    WasmBuilder b;
    uint32_t t = b.add_type({0x7F, 0x7F}, {0x7F});
    uint32_t div = b.add_func(t, {}, Code().local_get(0).local_get(1).op(0x6D).end().bytes());  // i32.div_s
    b.export_func("div", div);
    b.memory(1, 1);
    uint32_t t2 = b.add_type({}, {0x7F});
    uint32_t oob = b.add_func(t2, {}, Code().i32_const(65536).i32_load(2, 0).end().bytes());
    b.export_func("oob", oob);
    uint32_t boom = b.add_func(t2, {}, Code().unreachable().end().bytes());
    b.export_func("boom", boom);

    auto cm = compile_bytes(b.build());
    Instance inst(*cm, WasiConfig{}, 16, nullptr);
    CHECK(inst.call(find_export(*cm, "div"), {7, 2}) == 3);
    CHECK_THROWS_WITH_AS(inst.call(find_export(*cm, "div"), {7, 0}), "integer divide by zero", Trap);
    CHECK_THROWS_WITH_AS(inst.call(find_export(*cm, "div"),
                                   {0x80000000ull, 0xFFFFFFFFull}),
                         "integer overflow", Trap);
    CHECK_THROWS_WITH_AS(inst.call(find_export(*cm, "oob"), {}), "out of bounds memory access", Trap);
    CHECK_THROWS_WITH_AS(inst.call(find_export(*cm, "boom"), {}), "unreachable", Trap);
}

TEST_CASE("runaway recursion exhausts the call stack, not the host") {
    WasmBuilder b;
    uint32_t t = b.add_type({}, {});
    b.add_func(t, {}, Code().call(0).end().bytes());
    b.export_func("spin", 0);
    auto cm = compile_bytes(b.build());
    Instance inst(*cm, WasiConfig{}, 16, nullptr);
    CHECK_THROWS_WITH_AS(inst.call(find_export(*cm, "spin"), {}), "call stack exhausted", Trap);
}

// --- fuel accounting against the independent trace oracle -------------------

namespace corpus {

// 1. straight-line arithmetic
Bytes straight_line() {
    WasmBuilder b;
    uint32_t t = b.add_type({}, {});
    uint32_t f = b.add_func(t, {}, Code().i32_const(1).i32_const(2).i32_add().drop().end().bytes());
    b.export_func("main", f);
    return b.build();
}

// 2. straight-line through locals
Bytes locals_chain() {
    WasmBuilder b;
    uint32_t t = b.add_type({}, {0x7F});
    uint32_t f = b.add_func(t, {{2, 0x7F}},
                            Code()
                                .i32_const(5)
                                .local_set(0)
                                .local_get(0)
                                .local_get(0)
                                .i32_mul()
                                .local_tee(1)
                                .end()
                                .bytes());
    b.export_func("main", f);
    return b.build();
}

// 3. counted loop: 4 instructions per iteration plus the br_if backedge
Bytes counted_loop(int32_t m) {
    WasmBuilder b;
    uint32_t t = b.add_type({}, {});
    uint32_t f = b.add_func(t, {{1, 0x7F}},
                            Code()
                                .i32_const(m)
                                .local_set(0)
                                .loop_void()
                                .local_get(0)
                                .i32_const(1)
                                .i32_sub()
                                .local_tee(0)
                                .br_if(0)
                                .end()
                                .end()
                                .bytes());
    b.export_func("main", f);
    return b.build();
}

// 4. if/else in a loop: both arms exercised
Bytes alternating(int32_t m) {
    WasmBuilder b;
    uint32_t t = b.add_type({}, {});
    uint32_t f = b.add_func(t, {{2, 0x7F}},
                            Code()
                                .i32_const(m)
                                .local_set(0)
                                .loop_void()
                                .local_get(0)
                                .i32_const(1)
                                .op(0x71)  // i32.and
                                .if_void()
                                .local_get(1)
                                .i32_const(3)
                                .i32_add()
                                .local_set(1)
                                .else_()
                                .local_get(1)
                                .i32_const(1)
                                .i32_sub()
                                .local_set(1)
                                .end()
                                .local_get(0)
                                .i32_const(1)
                                .i32_sub()
                                .local_tee(0)
                                .br_if(0)
                                .end()
                                .end()
                                .bytes());
    b.export_func("main", f);
    return b.build();
}

// 5. call in a loop
Bytes call_loop(int32_t m) {
    WasmBuilder b;
    uint32_t t0 = b.add_type({0x7F}, {0x7F});
    uint32_t helper = b.add_func(t0, {}, Code().local_get(0).i32_const(7).i32_add().end().bytes());
    uint32_t t1 = b.add_type({}, {0x7F});
    uint32_t f = b.add_func(t1, {{2, 0x7F}},
                            Code()
                                .i32_const(m)
                                .local_set(0)
                                .loop_void()
                                .local_get(1)
                                .call(helper)
                                .local_set(1)
                                .local_get(0)
                                .i32_const(1)
                                .i32_sub()
                                .local_tee(0)
                                .br_if(0)
                                .end()
                                .local_get(1)
                                .end()
                                .bytes());
    b.export_func("main", f);
    return b.build();
}

// 6. early return out of a block
Bytes early_return() {
    WasmBuilder b;
    uint32_t t = b.add_type({}, {0x7F});
    uint32_t f = b.add_func(t, {},
                            Code()
                                .block_void()
                                .i32_const(1)
                                .br_if(0)
                                .i32_const(99)
                                .ret()
                                .end()
                                .i32_const(5)
                                .end()
                                .bytes());
    b.export_func("main", f);
    return b.build();
}

}  // namespace corpus

TEST_CASE("fuel equals the oracle's retired-instruction count") {
    auto check_module = [](const Bytes& raw, const char* label) {
        CAPTURE(label);
        TraceOracle oracle(raw);
        uint64_t expected = oracle.run("main");
        uint64_t actual = measure_fuel(raw, "main");
        CHECK(actual == expected);
    };

    check_module(corpus::straight_line(), "straight-line");
    check_module(corpus::locals_chain(), "locals chain");
    check_module(corpus::counted_loop(10), "counted loop m=10");
    check_module(corpus::counted_loop(1), "counted loop m=1");
    check_module(corpus::alternating(9), "if/else loop");
    check_module(corpus::call_loop(10), "call loop");
    check_module(corpus::early_return(), "early return");
}

TEST_CASE("loop fuel grows linearly: setup + m*k") {
    // iteration = 4 body instructions + br_if = 5 per loop pass
    TraceOracle o1(corpus::counted_loop(1));
    TraceOracle o10(corpus::counted_loop(10));
    uint64_t f1 = o1.run("main");
    uint64_t f10 = o10.run("main");
    CHECK(f10 - f1 == 9 * 5);

    CHECK(measure_fuel(corpus::counted_loop(1), "main") == f1);
    CHECK(measure_fuel(corpus::counted_loop(10), "main") == f10);
    uint64_t f100 = measure_fuel(corpus::counted_loop(100), "main");
    CHECK(f100 - f10 == 90 * 5);
}

TEST_CASE("schedule overrides weight the count") {
    wasm::FuelSchedule sched;
    sched.overrides["i32.add"] = 10;

    Bytes raw = corpus::straight_line();
    TraceOracle oracle(raw, sched);
    uint64_t expected = oracle.run("main");
    CHECK(expected == 4 + 10);  // const+const+drop+end at 1, add at 10
    CHECK(measure_fuel(raw, "main", {}, sched) == expected);
}

TEST_CASE("fuel determinism across repeated runs") {
    Bytes raw = corpus::alternating(50);
    uint64_t first = measure_fuel(raw, "main");
    for (int i = 0; i < 5; ++i) CHECK(measure_fuel(raw, "main") == first);
}

TEST_CASE("exhaustion traps with a drained counter") {
    Bytes raw = corpus::counted_loop(1000);
    auto cm = compile_instrumented(raw);
    Instance inst(*cm, WasiConfig{}, 16, nullptr);
    inst.set_fuel(10);  // far below requirement
    CHECK_THROWS_AS(inst.call(find_export(*cm, "main"), {}), Trap);
    CHECK(inst.fuel() < 0);
}

TEST_CASE("instrumentation transparency: same results with ample fuel") {
    WasmBuilder b;
    uint32_t t = b.add_type({0x7F}, {0x7F});
    uint32_t f = b.add_func(t, {{1, 0x7F}},
                            Code()
                                .loop_void()
                                .local_get(1)
                                .local_get(0)
                                .i32_add()
                                .local_set(1)
                                .local_get(0)
                                .i32_const(1)
                                .i32_sub()
                                .local_tee(0)
                                .br_if(0)
                                .end()
                                .local_get(1)
                                .end()
                                .bytes());
    b.export_func("sum", f);
    Bytes raw = b.build();

    auto plain = compile_bytes(raw);
    Instance pi(*plain, WasiConfig{}, 16, nullptr);
    uint64_t want = pi.call(find_export(*plain, "sum"), {250});

    auto metered = compile_instrumented(raw);
    Instance mi(*metered, WasiConfig{}, 16, nullptr);
    mi.set_fuel(1'000'000);
    CHECK(mi.call(find_export(*metered, "sum"), {250}) == want);
}
