#include "tickerlab/util.h"

#include <bit>
#include <charconv>
#include <cstdio>

namespace tickerlab {

std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

std::string format_price(double value) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return buf;
}

void Fnv1a::update(std::span<const std::uint8_t> bytes) {
    for (std::uint8_t b : bytes) {
        state_ ^= b;
        state_ *= 0x100000001b3ULL;
    }
}

void Fnv1a::update(std::string_view text) {
    update(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void Fnv1a::update(std::uint64_t value) {
    std::uint8_t bytes[8];
    for (int i = 0; i < 8; ++i) {
        bytes[i] = static_cast<std::uint8_t>(value >> (8 * i));
    }
    update(std::span<const std::uint8_t>(bytes, 8));
}

void Fnv1a::update(std::span<const double> values) {
    for (double v : values) {
        update(std::bit_cast<std::uint64_t>(v));
    }
}

std::string to_hex(std::uint64_t value) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

}  // namespace tickerlab
