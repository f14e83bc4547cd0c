#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace tickerlab {

// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

// Fixed six-decimal rendering used for price columns.
std::string format_price(double value);

// 64-bit FNV-1a, used for file checksums and run fingerprints.
class Fnv1a {
public:
    void update(std::span<const std::uint8_t> bytes);
    void update(std::string_view text);
    void update(std::span<const double> values);
    void update(std::uint64_t value);
    std::uint64_t digest() const noexcept { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string to_hex(std::uint64_t value);

}  // namespace tickerlab
