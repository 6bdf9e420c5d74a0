#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pim {

enum class OpClass : std::uint8_t {
    add, sub, mul, div, compare, bitwise,
    wram_load, wram_store, address_calc, branch, move,
};

enum class DataType : std::uint8_t { int32, int64, uint32, uint64, float32, float64 };

inline constexpr std::size_t kOpClassCount = 11;
inline constexpr std::size_t kDataTypeCount = 6;

inline constexpr std::array<OpClass, kOpClassCount> kAllOpClasses = {
    OpClass::add, OpClass::sub, OpClass::mul, OpClass::div, OpClass::compare, OpClass::bitwise,
    OpClass::wram_load, OpClass::wram_store, OpClass::address_calc, OpClass::branch, OpClass::move,
};

inline constexpr std::array<DataType, kDataTypeCount> kAllDataTypes = {
    DataType::int32, DataType::int64, DataType::uint32,
    DataType::uint64, DataType::float32, DataType::float64,
};

inline constexpr std::string_view name(OpClass op) {
    constexpr std::array<std::string_view, kOpClassCount> names = {
        "add", "sub", "mul", "div", "compare", "bitwise",
        "wram_load", "wram_store", "address_calc", "branch", "move",
    };
    return names[static_cast<std::size_t>(op)];
}

inline constexpr std::string_view name(DataType dt) {
    constexpr std::array<std::string_view, kDataTypeCount> names = {
        "int32", "int64", "uint32", "uint64", "float32", "float64",
    };
    return names[static_cast<std::size_t>(dt)];
}

inline constexpr bool is_float(DataType dt) {
    return dt == DataType::float32 || dt == DataType::float64;
}

inline constexpr bool is_wide(DataType dt) {
    return dt == DataType::int64 || dt == DataType::uint64 || dt == DataType::float64;
}

inline constexpr std::size_t size_of(DataType dt) { return is_wide(dt) ? 8 : 4; }

class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline OpClass parse_op_class(std::string_view s) {
    for (OpClass op : kAllOpClasses)
        if (name(op) == s) return op;
    throw ParseError("unknown operation class '" + std::string(s) + "'");
}

inline DataType parse_data_type(std::string_view s) {
    for (DataType dt : kAllDataTypes)
        if (name(dt) == s) return dt;
    throw ParseError("unknown data type '" + std::string(s) + "'");
}

// Capacity violations: WRAM, MRAM, IRAM, tasklet count.
class CapacityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace pim
