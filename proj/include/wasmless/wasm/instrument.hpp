#pragma once

#include "wasmless/wasm/artifact.hpp"
#include "wasmless/wasm/schedule.hpp"

namespace wasmless::wasm {

/// Name under which the injected fuel counter is exported.
inline constexpr char kFuelGlobalName[] = "__fuel_remaining";

/// Rewrite the module so that every straight-line segment decrements an
/// injected, exported i64 global by the segment's static cost and traps
/// when it goes negative. Returns the artifact with instrumented_bytes
/// populated; the raw bytes and hash are untouched.
ModuleArtifact instrument(ModuleArtifact artifact, const FuelSchedule& schedule = {});

}  // namespace wasmless::wasm
