#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <utility>

#include "pim/core/types.hpp"

namespace pim {

// Instructions per element-operation, indexed by (operation class, data type).
class InstructionCostTable {
  public:
    InstructionCostTable() {
        for (DataType dt : kAllDataTypes) {
            const std::uint32_t width = is_wide(dt) ? 2 : 1;
            set_unchecked(OpClass::add, dt, width);
            set_unchecked(OpClass::sub, dt, width);
            set_unchecked(OpClass::compare, dt, width);
            set_unchecked(OpClass::bitwise, dt, width);
            set_unchecked(OpClass::wram_load, dt, 1);
            set_unchecked(OpClass::wram_store, dt, 1);
            set_unchecked(OpClass::address_calc, dt, 1);
            set_unchecked(OpClass::branch, dt, 1);
            set_unchecked(OpClass::move, dt, width);
        }
        // mul_step/div_step sequences: 32 instructions per loop iteration in total.
        for (DataType dt : {DataType::int32, DataType::uint32}) {
            set_unchecked(OpClass::mul, dt, 27);
            set_unchecked(OpClass::div, dt, 27);
        }
        // __muldi3 / __divdi3
        for (DataType dt : {DataType::int64, DataType::uint64}) {
            set_unchecked(OpClass::mul, dt, 123);
            set_unchecked(OpClass::div, dt, 191);
        }
        // Software floating point. Entry + 5 loop instructions = round(350 MHz / measured MOPS).
        set_unchecked(OpClass::add, DataType::float32, 66);
        set_unchecked(OpClass::sub, DataType::float32, 71);
        set_unchecked(OpClass::mul, DataType::float32, 178);
        set_unchecked(OpClass::div, DataType::float32, 1024);
        set_unchecked(OpClass::compare, DataType::float32, 12);
        set_unchecked(OpClass::add, DataType::float64, 100);
        set_unchecked(OpClass::sub, DataType::float64, 108);
        set_unchecked(OpClass::mul, DataType::float64, 655);
        set_unchecked(OpClass::div, DataType::float64, 2183);
        set_unchecked(OpClass::compare, DataType::float64, 20);
    }

    std::uint32_t operator()(OpClass op, DataType dt) const { return cost_[index(op, dt)]; }

    // Only emulated entries may change; see is_configurable.
    void set(OpClass op, DataType dt, std::uint32_t instructions) {
        if (!is_configurable(op, dt))
            throw ParseError("cost entry " + std::string(name(op)) + "/" + std::string(name(dt)) +
                             " is fixed");
        if (instructions < 1) throw ParseError("cost entry must be at least 1 instruction");
        set_unchecked(op, dt, instructions);
    }

    static constexpr bool is_configurable(OpClass op, DataType dt) {
        if (is_float(dt))
            return op == OpClass::add || op == OpClass::sub || op == OpClass::mul ||
                   op == OpClass::div || op == OpClass::compare;
        return op == OpClass::mul || op == OpClass::div;
    }

    friend bool operator==(const InstructionCostTable&, const InstructionCostTable&) = default;

  private:
    static constexpr std::size_t index(OpClass op, DataType dt) {
        return static_cast<std::size_t>(op) * kDataTypeCount + static_cast<std::size_t>(dt);
    }
    void set_unchecked(OpClass op, DataType dt, std::uint32_t v) { cost_[index(op, dt)] = v; }

    std::array<std::uint32_t, kOpClassCount * kDataTypeCount> cost_{};
};

// Loop instructions of the read-modify-write microbenchmark:
// load + op + store + address_calc + index add + branch.
inline std::uint32_t loop_instruction_count(OpClass op, DataType dt, const InstructionCostTable& table) {
    return table(OpClass::wram_load, dt) + table(op, dt) + table(OpClass::wram_store, dt) +
           table(OpClass::address_calc, DataType::int32) + table(OpClass::add, DataType::int32) +
           table(OpClass::branch, DataType::int32);
}

// Element-operation counts of one tasklet.
class InstructionMix {
  public:
    InstructionMix& add(OpClass op, DataType dt, std::uint64_t count = 1) {
        counts_[index(op, dt)] += count;
        return *this;
    }

    // One iteration = address_calc + index add + branch.
    InstructionMix& loop_overhead(std::uint64_t iterations) {
        add(OpClass::address_calc, DataType::int32, iterations);
        add(OpClass::add, DataType::int32, iterations);
        add(OpClass::branch, DataType::int32, iterations);
        return *this;
    }

    std::uint64_t count(OpClass op, DataType dt) const { return counts_[index(op, dt)]; }

    std::uint64_t instructions(const InstructionCostTable& table) const {
        std::uint64_t total = 0;
        for (OpClass op : kAllOpClasses)
            for (DataType dt : kAllDataTypes) total += count(op, dt) * table(op, dt);
        return total;
    }

    std::uint64_t operations() const { return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0}); }

    InstructionMix& operator+=(const InstructionMix& o) {
        for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += o.counts_[i];
        return *this;
    }

    friend bool operator==(const InstructionMix&, const InstructionMix&) = default;

  private:
    static constexpr std::size_t index(OpClass op, DataType dt) {
        return static_cast<std::size_t>(op) * kDataTypeCount + static_cast<std::size_t>(dt);
    }
    std::array<std::uint64_t, kOpClassCount * kDataTypeCount> counts_{};
};

}  // namespace pim
