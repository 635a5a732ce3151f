#include "wasmless/wasm/instrument.hpp"

#include "wasmless/wasm/leb.hpp"
#include "wasmless/wasm/module.hpp"

namespace wasmless::wasm {

namespace {

struct ChargePoint {
    size_t instr_index;  // group head; charge goes immediately before it
    uint64_t cost;
};

// Split a body into straight-line segments: each group is a maximal run of
// plain instructions plus the delimiting control instruction that follows
// it. The charge for the whole group lands at its head, so a group must
// never be entered mid-way — branch targets (loop bodies, post-end,
// post-else continuations) always coincide with group heads.
std::vector<ChargePoint> charge_points(const FuncBody& body, const FuelSchedule& schedule) {
    std::vector<ChargePoint> points;
    size_t group_start = 0;
    uint64_t cost = 0;
    for (size_t i = 0; i < body.instrs.size(); ++i) {
        cost += schedule.cost_of(body.instrs[i].op);
        if (cost > (uint64_t(1) << 32)) {
            throw TransformOverflow("segment cost exceeds 2^32");
        }
        if (is_segment_delimiter(body.instrs[i].op)) {
            if (cost > 0) points.push_back(ChargePoint{group_start, cost});
            group_start = i + 1;
            cost = 0;
        }
    }
    // A valid body always ends with `end`, itself a delimiter.
    return points;
}

void emit_charge(ByteWriter& w, uint32_t fuel_index, uint64_t cost) {
    w.byte(op_global_get);
    w.leb_u(fuel_index);
    w.byte(op_i64_const);
    w.leb_s(static_cast<int64_t>(cost));
    w.byte(op_i64_sub);
    w.byte(op_global_set);
    w.leb_u(fuel_index);
    w.byte(op_global_get);
    w.leb_u(fuel_index);
    w.byte(op_i64_const);
    w.leb_s(0);
    w.byte(op_i64_lt_s);
    w.byte(op_if);
    w.byte(0x40);  // void block type
    w.byte(op_unreachable);
    w.byte(op_end);
}

void emit_section(ByteWriter& w, uint8_t id, const Bytes& payload) {
    w.byte(id);
    w.leb_u(payload.size());
    w.raw(payload);
}

Bytes build_global_section(const Module& mod, const Section* orig) {
    ByteWriter payload;
    if (orig) {
        ByteReader pr(mod.raw(orig->payload_begin, orig->payload_end));
        uint32_t count = pr.leb_u32();
        payload.leb_u(count + 1);
        payload.raw(mod.raw(orig->payload_begin + static_cast<uint32_t>(pr.offset()), orig->payload_end));
    } else {
        payload.leb_u(1);
    }
    payload.byte(static_cast<uint8_t>(ValType::i64));
    payload.byte(0x01);  // mutable
    payload.byte(op_i64_const);
    payload.leb_s(0);
    payload.byte(op_end);
    return payload.take();
}

Bytes build_export_section(const Module& mod, const Section* orig, uint32_t fuel_index) {
    ByteWriter payload;
    if (orig) {
        ByteReader pr(mod.raw(orig->payload_begin, orig->payload_end));
        uint32_t count = pr.leb_u32();
        payload.leb_u(count + 1);
        payload.raw(mod.raw(orig->payload_begin + static_cast<uint32_t>(pr.offset()), orig->payload_end));
    } else {
        payload.leb_u(1);
    }
    payload.name(kFuelGlobalName);
    payload.byte(static_cast<uint8_t>(ExternalKind::global));
    payload.leb_u(fuel_index);
    return payload.take();
}

Bytes build_code_section(const Module& mod, uint32_t fuel_index, const FuelSchedule& schedule) {
    ByteWriter payload;
    payload.leb_u(mod.codes.size());
    for (const FuncBody& body : mod.codes) {
        ByteWriter out;
        out.raw(mod.raw(body.locals_begin, body.instrs_begin));

        std::vector<ChargePoint> points = charge_points(body, schedule);
        size_t next_point = 0;
        size_t copied_from = 0;  // instruction index raw copy has reached
        auto flush_upto = [&](size_t instr_index) {
            if (copied_from < instr_index) {
                out.raw(mod.raw(body.instrs[copied_from].begin, body.instrs[instr_index - 1].end));
                copied_from = instr_index;
            }
        };
        for (const ChargePoint& p : points) {
            flush_upto(p.instr_index);
            emit_charge(out, fuel_index, p.cost);
        }
        flush_upto(body.instrs.size());

        payload.leb_u(out.size());
        payload.raw(out.data());
    }
    return payload.take();
}

}  // namespace

ModuleArtifact instrument(ModuleArtifact artifact, const FuelSchedule& schedule) {
    auto raw = std::make_shared<const Bytes>(artifact.raw_bytes);
    Module mod = read_module(raw);

    for (const Export& ex : mod.exports) {
        if (ex.name == kFuelGlobalName) {
            throw MalformedModule("module already exports " + std::string(kFuelGlobalName));
        }
    }
    uint32_t fuel_index = mod.total_globals();

    const Section* global_sec = nullptr;
    const Section* export_sec = nullptr;
    for (const Section& s : mod.sections) {
        if (s.id == 6) global_sec = &s;
        if (s.id == 7) export_sec = &s;
    }

    ByteWriter w;
    w.raw(ByteView(raw->data(), 8));  // magic + version

    bool globals_done = false;
    bool exports_done = false;
    auto emit_globals = [&] {
        emit_section(w, 6, build_global_section(mod, global_sec));
        globals_done = true;
    };
    auto emit_exports = [&] {
        emit_section(w, 7, build_export_section(mod, export_sec, fuel_index));
        exports_done = true;
    };

    for (const Section& s : mod.sections) {
        if (s.id != 0) {
            if (!globals_done && s.id > 6) emit_globals();
            if (!exports_done && s.id > 7) emit_exports();
        }
        switch (s.id) {
            case 6: emit_globals(); break;
            case 7: emit_exports(); break;
            case 10: emit_section(w, 10, build_code_section(mod, fuel_index, schedule)); break;
            default: w.raw(mod.raw(s.header_begin, s.payload_end)); break;
        }
    }
    if (!globals_done) emit_globals();
    if (!exports_done) emit_exports();

    artifact.instrumented_bytes = w.take();
    read_module(ByteView(artifact.instrumented_bytes));  // transform must yield a valid module
    return artifact;
}

}  // namespace wasmless::wasm
