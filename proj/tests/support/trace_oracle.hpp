#pragma once

// Independent retired-instruction counter used to cross-check fuel
// accounting. Walks the *uninstrumented* module bytes directly with its own
// tiny decoder and evaluator, sharing no code with the production parser,
// instrumenter or engine. Supports the integer/control subset the oracle
// corpus is written in.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "wasmless/bytes.hpp"
#include "wasmless/wasm/schedule.hpp"

namespace testsupport {

class TraceOracle {
  public:
    explicit TraceOracle(wasmless::Bytes raw_module, const wasmless::wasm::FuelSchedule& schedule = {})
        : bytes_(std::move(raw_module)), schedule_(schedule) {
        parse();
    }

    /// Execute exported function `name` with i64-packed args; returns the
    /// schedule-weighted count of retired instructions.
    uint64_t run(const std::string& name, const std::vector<uint64_t>& args = {}) {
        auto it = exports_.find(name);
        if (it == exports_.end()) throw std::runtime_error("oracle: no export " + name);
        fuel_ = 0;
        call(it->second, args);
        return fuel_;
    }

  private:
    struct Func {
        uint32_t nparams = 0;
        uint32_t nresults = 0;
        uint32_t nlocals = 0;
        size_t body_begin = 0;
        size_t body_end = 0;
    };

    wasmless::Bytes bytes_;
    wasmless::wasm::FuelSchedule schedule_;
    std::vector<Func> funcs_;
    std::vector<std::pair<uint32_t, uint32_t>> types_;  // (nparams, nresults)
    std::vector<uint32_t> func_types_;
    std::map<std::string, uint32_t> exports_;
    uint64_t fuel_ = 0;

    size_t pos_ = 0;

    uint8_t byte() { return bytes_.at(pos_++); }

    uint64_t leb_u() {
        uint64_t v = 0;
        int shift = 0;
        for (;;) {
            uint8_t b = byte();
            v |= static_cast<uint64_t>(b & 0x7f) << shift;
            if (!(b & 0x80)) return v;
            shift += 7;
        }
    }

    int64_t leb_s() {
        int64_t v = 0;
        int shift = 0;
        for (;;) {
            uint8_t b = byte();
            v |= static_cast<int64_t>(static_cast<uint64_t>(b & 0x7f) << shift);
            shift += 7;
            if (!(b & 0x80)) {
                if (shift < 64 && (b & 0x40)) v |= -(int64_t(1) << shift);
                return v;
            }
        }
    }

    void parse() {
        pos_ = 8;  // skip magic/version (caller guarantees a valid module)
        uint32_t code_seen = 0;
        while (pos_ < bytes_.size()) {
            uint8_t id = byte();
            uint64_t size = leb_u();
            size_t end = pos_ + size;
            switch (id) {
                case 1: {  // types
                    uint64_t n = leb_u();
                    for (uint64_t i = 0; i < n; ++i) {
                        byte();  // 0x60
                        uint32_t np = static_cast<uint32_t>(leb_u());
                        for (uint32_t k = 0; k < np; ++k) byte();
                        uint32_t nr = static_cast<uint32_t>(leb_u());
                        for (uint32_t k = 0; k < nr; ++k) byte();
                        types_.emplace_back(np, nr);
                    }
                    break;
                }
                case 3: {  // functions
                    uint64_t n = leb_u();
                    for (uint64_t i = 0; i < n; ++i) func_types_.push_back(static_cast<uint32_t>(leb_u()));
                    break;
                }
                case 7: {  // exports
                    uint64_t n = leb_u();
                    for (uint64_t i = 0; i < n; ++i) {
                        uint64_t len = leb_u();
                        std::string name(bytes_.begin() + pos_, bytes_.begin() + pos_ + len);
                        pos_ += len;
                        uint8_t kind = byte();
                        uint64_t index = leb_u();
                        if (kind == 0) exports_[name] = static_cast<uint32_t>(index);
                    }
                    break;
                }
                case 10: {  // code
                    uint64_t n = leb_u();
                    for (uint64_t i = 0; i < n; ++i) {
                        uint64_t body_size = leb_u();
                        size_t body_end = pos_ + body_size;
                        Func f;
                        f.nparams = types_[func_types_[code_seen]].first;
                        f.nresults = types_[func_types_[code_seen]].second;
                        uint64_t decls = leb_u();
                        for (uint64_t k = 0; k < decls; ++k) {
                            f.nlocals += static_cast<uint32_t>(leb_u());
                            byte();
                        }
                        f.body_begin = pos_;
                        f.body_end = body_end;
                        funcs_.push_back(f);
                        ++code_seen;
                        pos_ = body_end;
                    }
                    break;
                }
                default:
                    break;
            }
            pos_ = end;
        }
    }

    void skip_immediates(uint8_t op) {
        switch (op) {
            case 0x02: case 0x03: case 0x04:  // block/loop/if: blocktype byte
                byte();
                break;
            case 0x0C: case 0x0D: case 0x10:  // br/br_if/call
            case 0x20: case 0x21: case 0x22: case 0x23: case 0x24:
                leb_u();
                break;
            case 0x11:  // call_indirect
                leb_u();
                byte();
                break;
            case 0x0E: {  // br_table
                uint64_t n = leb_u();
                for (uint64_t i = 0; i <= n; ++i) leb_u();
                break;
            }
            case 0x41: case 0x42:
                leb_s();
                break;
            case 0x43: pos_ += 4; break;
            case 0x44: pos_ += 8; break;
            case 0x3F: case 0x40: byte(); break;
            default:
                if (op >= 0x28 && op <= 0x3E) {  // memarg
                    leb_u();
                    leb_u();
                }
                break;
        }
    }

    // Find the matching else (or 0) and end for the structured op at `at`
    // (position of the byte after the opcode+blocktype).
    void match_block(size_t at, size_t& else_pos, size_t& end_pos) {
        size_t save = pos_;
        pos_ = at;
        int depth = 0;
        else_pos = 0;
        for (;;) {
            uint8_t op = byte();
            if (op == 0x02 || op == 0x03 || op == 0x04) {
                ++depth;
                byte();
                continue;
            }
            if (op == 0x05 && depth == 0) {
                else_pos = pos_;  // first byte after `else`
                continue;
            }
            if (op == 0x0B) {
                if (depth == 0) {
                    end_pos = pos_;  // first byte after `end`
                    break;
                }
                --depth;
                continue;
            }
            skip_immediates(op);
        }
        pos_ = save;
    }

    void charge(uint8_t op) { fuel_ += schedule_.cost_of(op); }

    struct Label {
        bool is_loop;
        size_t branch_target;  // loop: body start; block/if: after end
    };

    uint64_t call(uint32_t func_index, const std::vector<uint64_t>& args) {
        const Func& f = funcs_.at(func_index);
        std::vector<uint64_t> locals(args);
        locals.resize(f.nparams + f.nlocals, 0);
        std::vector<uint64_t> stack;
        std::vector<Label> labels;

        size_t save = pos_;
        pos_ = f.body_begin;

        auto pop = [&] {
            uint64_t v = stack.back();
            stack.pop_back();
            return v;
        };
        auto branch = [&](uint32_t depth) {
            Label l = labels[labels.size() - 1 - depth];
            labels.resize(labels.size() - 1 - depth + (l.is_loop ? 1 : 0));
            pos_ = l.branch_target;
        };

        for (;;) {
            uint8_t op = byte();
            switch (op) {
                case 0x01:  // nop
                    charge(op);
                    break;
                case 0x02: {  // block
                    charge(op);
                    byte();
                    size_t els, end;
                    match_block(pos_, els, end);
                    labels.push_back({false, end});
                    break;
                }
                case 0x03: {  // loop
                    charge(op);
                    byte();
                    labels.push_back({true, pos_});
                    break;
                }
                case 0x04: {  // if
                    charge(op);
                    byte();
                    size_t els, end;
                    match_block(pos_, els, end);
                    if (pop()) {
                        labels.push_back({false, end});  // run then-arm
                    } else if (els) {
                        labels.push_back({false, end});
                        pos_ = els;  // run else-arm
                    } else {
                        pos_ = end;  // skip the whole if, end included
                    }
                    break;
                }
                case 0x05: {  // else: then-arm finished, skip over the else-arm
                    charge(op);
                    branch(0);
                    break;
                }
                case 0x0B:  // end
                    charge(op);
                    if (labels.empty()) {  // function end
                        pos_ = save;
                        return f.nresults ? stack.back() : 0;
                    }
                    labels.pop_back();
                    break;
                case 0x0C: {  // br
                    charge(op);
                    branch(static_cast<uint32_t>(leb_u()));
                    break;
                }
                case 0x0D: {  // br_if
                    charge(op);
                    uint32_t depth = static_cast<uint32_t>(leb_u());
                    if (pop()) branch(depth);
                    break;
                }
                case 0x0F: {  // return
                    charge(op);
                    uint64_t r = f.nresults ? stack.back() : 0;
                    pos_ = save;
                    return r;
                }
                case 0x10: {  // call
                    charge(op);
                    uint32_t callee = static_cast<uint32_t>(leb_u());
                    const Func& cf = funcs_.at(callee);
                    std::vector<uint64_t> cargs(cf.nparams);
                    for (uint32_t i = cf.nparams; i-- > 0;) cargs[i] = pop();
                    uint64_t r = call(callee, cargs);
                    if (cf.nresults) stack.push_back(r);
                    break;
                }
                case 0x1A:  // drop
                    charge(op);
                    pop();
                    break;
                case 0x20:  // local.get
                    charge(op);
                    stack.push_back(locals.at(leb_u()));
                    break;
                case 0x21:  // local.set
                    charge(op);
                    locals.at(leb_u()) = pop();
                    break;
                case 0x22:  // local.tee
                    charge(op);
                    locals.at(leb_u()) = stack.back();
                    break;
                case 0x41:  // i32.const
                    charge(op);
                    stack.push_back(static_cast<uint32_t>(static_cast<int32_t>(leb_s())));
                    break;
                case 0x45:  // i32.eqz
                    charge(op);
                    stack.push_back(pop() == 0);
                    break;
                case 0x46: {  // i32.eq
                    charge(op);
                    uint32_t b = static_cast<uint32_t>(pop()), a = static_cast<uint32_t>(pop());
                    stack.push_back(a == b);
                    break;
                }
                case 0x48: {  // i32.lt_s
                    charge(op);
                    int32_t b = static_cast<int32_t>(pop()), a = static_cast<int32_t>(pop());
                    stack.push_back(a < b);
                    break;
                }
                case 0x49: {  // i32.lt_u
                    charge(op);
                    uint32_t b = static_cast<uint32_t>(pop()), a = static_cast<uint32_t>(pop());
                    stack.push_back(a < b);
                    break;
                }
                case 0x6A: {  // i32.add
                    charge(op);
                    uint32_t b = static_cast<uint32_t>(pop()), a = static_cast<uint32_t>(pop());
                    stack.push_back(static_cast<uint32_t>(a + b));
                    break;
                }
                case 0x6B: {  // i32.sub
                    charge(op);
                    uint32_t b = static_cast<uint32_t>(pop()), a = static_cast<uint32_t>(pop());
                    stack.push_back(static_cast<uint32_t>(a - b));
                    break;
                }
                case 0x6C: {  // i32.mul
                    charge(op);
                    uint32_t b = static_cast<uint32_t>(pop()), a = static_cast<uint32_t>(pop());
                    stack.push_back(static_cast<uint32_t>(a * b));
                    break;
                }
                case 0x71: {  // i32.and
                    charge(op);
                    uint32_t b = static_cast<uint32_t>(pop()), a = static_cast<uint32_t>(pop());
                    stack.push_back(a & b);
                    break;
                }
                case 0x72: {  // i32.or
                    charge(op);
                    uint32_t b = static_cast<uint32_t>(pop()), a = static_cast<uint32_t>(pop());
                    stack.push_back(a | b);
                    break;
                }
                default:
                    throw std::runtime_error("oracle: opcode not in oracle subset");
            }
        }
    }
};

}  // namespace testsupport
