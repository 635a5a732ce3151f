#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "wasmless/wasm/opcodes.hpp"

namespace wasmless::wasm {

/// Per-instruction fuel prices, fixed at instrumentation time. Override
/// keys are instruction mnemonics ("i32.add", "memory.grow", ...).
struct FuelSchedule {
    uint64_t default_cost = 1;
    std::map<std::string, uint64_t> overrides;

    uint64_t cost_of(uint8_t op) const {
        if (!overrides.empty()) {
            auto it = overrides.find(std::string(op_name(op)));
            if (it != overrides.end()) return it->second;
        }
        return default_cost;
    }
};

}  // namespace wasmless::wasm
