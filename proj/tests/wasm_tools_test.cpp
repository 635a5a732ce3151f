#include <doctest.h>

#include "support/wasm_builder.hpp"
#include "wasmless/wasm/artifact.hpp"
#include "wasmless/wasm/instrument.hpp"
#include "wasmless/wasm/module.hpp"

using namespace wasmless;
using namespace testsupport;

namespace {

const Bytes kEmptyModule = {0x00, 0x61, 0x73, 0x6D, 0x01, 0x00, 0x00, 0x00};

Bytes arith_module() {
    // (func (export "main") i32.const 1; i32.const 2; i32.add; drop; end)
    WasmBuilder b;
    uint32_t t = b.add_type({}, {});
    uint32_t f = b.add_func(t, {}, Code().i32_const(1).i32_const(2).i32_add().drop().end().bytes());
    b.export_func("main", f);
    return b.build();
}

}  // namespace

TEST_CASE("empty module validates with zero instructions") {
    wasm::ModuleArtifact art = wasm::validate(kEmptyModule);
    CHECK(art.instruction_count_static == 0);
    CHECK(art.content_hash.size() == 64);
    CHECK(!art.instrumented());
}

TEST_CASE("non-wasm bytes are rejected as NotWasm") {
    Bytes hello = to_bytes("hello");
    CHECK_THROWS_AS(wasm::validate(hello), wasm::NotWasm);

    Bytes bad_version = kEmptyModule;
    bad_version[4] = 0x02;
    CHECK_THROWS_AS(wasm::validate(bad_version), wasm::NotWasm);

    CHECK_THROWS_AS(wasm::validate(Bytes{}), wasm::NotWasm);
}

TEST_CASE("straight-line body counts five instructions") {
    wasm::ModuleArtifact art = wasm::validate(arith_module());
    CHECK(art.instruction_count_static == 5);
}

TEST_CASE("validation is idempotent") {
    Bytes m = arith_module();
    wasm::ModuleArtifact a = wasm::validate(m);
    wasm::ModuleArtifact b = wasm::validate(m);
    CHECK(a.content_hash == b.content_hash);
    CHECK(a.instruction_count_static == b.instruction_count_static);
    CHECK(a.raw_bytes == b.raw_bytes);
}

TEST_CASE("malformed structures are rejected") {
    SUBCASE("truncated section") {
        Bytes m = kEmptyModule;
        m.push_back(1);   // type section
        m.push_back(10);  // claims 10 bytes, has none
        CHECK_THROWS_AS(wasm::validate(m), wasm::MalformedModule);
    }
    SUBCASE("section out of order") {
        WasmBuilder b;
        b.add_type({}, {});
        Bytes m = b.build();
        // duplicate the type section after itself
        Bytes dup(m.begin() + 8, m.end());
        m.insert(m.end(), dup.begin(), dup.end());
        CHECK_THROWS_AS(wasm::validate(m), wasm::MalformedModule);
    }
    SUBCASE("body type mismatch") {
        WasmBuilder b;
        uint32_t t = b.add_type({}, {});
        b.add_func(t, {}, Code().i32_const(1).i32_add().drop().end().bytes());  // add needs two operands
        CHECK_THROWS_AS(wasm::validate(b.build()), wasm::MalformedModule);
    }
    SUBCASE("value left on stack") {
        WasmBuilder b;
        uint32_t t = b.add_type({}, {});
        b.add_func(t, {}, Code().i32_const(1).end().bytes());
        CHECK_THROWS_AS(wasm::validate(b.build()), wasm::MalformedModule);
    }
    SUBCASE("branch depth out of range") {
        WasmBuilder b;
        uint32_t t = b.add_type({}, {});
        b.add_func(t, {}, Code().br(3).end().bytes());
        CHECK_THROWS_AS(wasm::validate(b.build()), wasm::MalformedModule);
    }
    SUBCASE("duplicate export name") {
        WasmBuilder b;
        uint32_t t = b.add_type({}, {});
        uint32_t f = b.add_func(t, {}, Code().end().bytes());
        b.export_func("x", f);
        b.export_func("x", f);
        CHECK_THROWS_AS(wasm::validate(b.build()), wasm::MalformedModule);
    }
}

TEST_CASE("unsupported opcodes are reported with the opcode") {
    WasmBuilder b;
    uint32_t t = b.add_type({}, {});

    SUBCASE("sign extension (0xC0)") {
        b.add_func(t, {}, Code().i32_const(1).op(0xC0).drop().end().bytes());
        CHECK_THROWS_WITH_AS(wasm::validate(b.build()), doctest::Contains("0xc0"), wasm::UnsupportedFeature);
    }
    SUBCASE("simd prefix (0xFD)") {
        b.add_func(t, {}, Code().op(0xFD).end().bytes());
        CHECK_THROWS_AS(wasm::validate(b.build()), wasm::UnsupportedFeature);
    }
    SUBCASE("bulk memory prefix (0xFC)") {
        b.add_func(t, {}, Code().op(0xFC).end().bytes());
        CHECK_THROWS_AS(wasm::validate(b.build()), wasm::UnsupportedFeature);
    }
}

TEST_CASE("padded leb encodings from linkers are accepted") {
    WasmBuilder b;
    uint32_t t = b.add_type({}, {});
    // global.get 0 / drop with the 5-byte padded index encoding wasm-ld emits
    Bytes body = {0x23, 0x80, 0x80, 0x80, 0x80, 0x00, 0x1A, 0x0B};
    b.add_global(0x7F, false, 7);
    b.add_func(t, {}, body);
    CHECK(wasm::validate(b.build()).instruction_count_static == 3);
}

TEST_CASE("instrumenting an empty module only adds the fuel global") {
    wasm::ModuleArtifact art = wasm::instrument(wasm::validate(kEmptyModule));
    CHECK(art.instrumented());

    wasm::Module mod = wasm::read_module(ByteView(art.instrumented_bytes));
    REQUIRE(mod.globals.size() == 1);
    CHECK(mod.globals[0].type.type == wasm::ValType::i64);
    CHECK(mod.globals[0].type.mut);
    REQUIRE(mod.exports.size() == 1);
    CHECK(mod.exports[0].name == wasm::kFuelGlobalName);
    CHECK(mod.exports[0].kind == wasm::ExternalKind::global);
    CHECK(mod.codes.empty());
}

TEST_CASE("instrumented module validates and keeps original exports") {
    wasm::ModuleArtifact art = wasm::instrument(wasm::validate(arith_module()));
    wasm::Module mod = wasm::read_module(ByteView(art.instrumented_bytes));

    REQUIRE(mod.exports.size() == 2);
    CHECK(mod.exports[0].name == "main");
    CHECK(mod.exports[1].name == wasm::kFuelGlobalName);
    // fuel global appended after any original globals
    CHECK(mod.exports[1].index == mod.total_globals() - 1);
    // one charge sequence (10 instructions) for the single segment
    CHECK(mod.instruction_count == 5 + 10);
}

TEST_CASE("instrumentation leaves raw bytes and hash untouched") {
    wasm::ModuleArtifact before = wasm::validate(arith_module());
    wasm::ModuleArtifact after = wasm::instrument(before);
    CHECK(after.raw_bytes == before.raw_bytes);
    CHECK(after.content_hash == before.content_hash);
    CHECK(after.instruction_count_static == before.instruction_count_static);
}

TEST_CASE("re-instrumenting an instrumented module is rejected") {
    wasm::ModuleArtifact art = wasm::instrument(wasm::validate(arith_module()));
    wasm::ModuleArtifact fake = wasm::validate(art.instrumented_bytes);
    CHECK_THROWS_AS(wasm::instrument(fake), wasm::MalformedModule);
}

TEST_CASE("segment splitting charges every instruction exactly once") {
    // loop with a conditional backedge: three charge groups expected
    WasmBuilder b;
    uint32_t t = b.add_type({}, {});
    uint32_t f = b.add_func(
        t, {{1, 0x7F}},
        Code()
            .loop_void()
            .local_get(0)
            .i32_const(1)
            .i32_add()
            .local_tee(0)
            .i32_const(10)
            .i32_lt_s()
            .br_if(0)
            .end()
            .end()
            .bytes());
    b.export_func("main", f);

    wasm::ModuleArtifact art = wasm::instrument(wasm::validate(b.build()));
    wasm::Module mod = wasm::read_module(ByteView(art.instrumented_bytes));
    // groups: [loop], [7 body instrs + br_if], [end], [end]  -> 4 charges
    CHECK(mod.instruction_count == 10 + 4 * 10);
}

TEST_CASE("schedule overrides change per-opcode cost") {
    wasm::FuelSchedule sched;
    sched.default_cost = 1;
    sched.overrides["i32.add"] = 5;
    CHECK(sched.cost_of(wasm::op_i32_add) == 5);
    CHECK(sched.cost_of(wasm::op_i32_sub) == 1);
    sched.overrides["memory.grow"] = 0;
    CHECK(sched.cost_of(wasm::op_memory_grow) == 0);
}
