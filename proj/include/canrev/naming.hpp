// Channel naming codec.
//
// Canonical grammar (all lowercase, underscore separated):
//
//   <id>_byte_<index>                              width 8
//   <id>_<msb|lsb>_<width-word>_bit_<index>        widths 9..16
//
// where <width-word> is one of nine, ten, eleven, twelve, thirteen,
// fourteen, fifteen, sixteen and <id> is the decimal frame ID.
// Examples: "241_byte_1", "125_lsb_sixteen_bit_2", "564_msb_fifteen_bit_2".
//
// parse_channel_name() also accepts spaces as separators ("lsb nine bit 2"),
// since field reports mix the two styles.
#pragma once

#include <array>
#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "canrev/types.hpp"

namespace canrev {

namespace detail {

inline constexpr std::array<const char*, 8> kWidthWords = {
    "nine", "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen"};

inline int width_from_word(std::string_view w) {
    for (std::size_t i = 0; i < kWidthWords.size(); ++i)
        if (w == kWidthWords[i]) return static_cast<int>(i) + 9;
    return 0;
}

inline std::vector<std::string_view> split_name(std::string_view name) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= name.size(); ++i) {
        if (i == name.size() || name[i] == '_' || name[i] == ' ') {
            out.push_back(name.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

inline std::uint64_t parse_uint_token(std::string_view tok, const char* what) {
    if (tok.empty())
        throw ParseError(std::string("channel name: missing ") + what);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ParseError(std::string("channel name: bad ") + what + " '" + std::string(tok) + "'");
    return v;
}

}  // namespace detail

// Canonical name for a valid spec. Injective over valid specs.
inline std::string channel_name(const ChannelSpec& spec) {
    std::string out = std::to_string(spec.frame_id);
    if (spec.width_bits == 8) {
        out += "_byte_";
    } else {
        out += spec.endianness == Endian::LSB ? "_lsb_" : "_msb_";
        out += detail::kWidthWords[static_cast<std::size_t>(spec.width_bits - 9)];
        out += "_bit_";
    }
    out += std::to_string(spec.index);
    return out;
}

// The name without its leading frame ID, as report tables print it in the
// Channel column ("msb_sixteen_bit_2"). Recombine with the ID column via
// parse_channel_name(id + "_" + field).
inline std::string field_name(const ChannelSpec& spec) {
    const std::string full = channel_name(spec);
    return full.substr(full.find('_') + 1);
}

// Inverse of channel_name(). Throws ParseError naming the offending token.
inline ChannelSpec parse_channel_name(std::string_view name) {
    if (name.empty()) throw ParseError("channel name: empty");
    auto tok = detail::split_name(name);

    ChannelSpec spec;
    std::uint64_t id = detail::parse_uint_token(tok[0], "frame id");
    if (id > kMaxFrameId)
        throw ParseError("channel name: frame id '" + std::string(tok[0]) + "' exceeds 29 bits");
    spec.frame_id = static_cast<std::uint32_t>(id);

    if (tok.size() == 3 && tok[1] == "byte") {
        spec.width_bits = 8;
        spec.endianness = Endian::MSB;
        std::uint64_t idx = detail::parse_uint_token(tok[2], "index");
        if (idx > 7)
            throw ParseError("channel name: byte index '" + std::string(tok[2]) + "' out of range");
        spec.index = static_cast<int>(idx);
        return spec;
    }

    if (tok.size() == 5 && tok[3] == "bit") {
        if (tok[1] == "msb")
            spec.endianness = Endian::MSB;
        else if (tok[1] == "lsb")
            spec.endianness = Endian::LSB;
        else
            throw ParseError("channel name: bad endianness '" + std::string(tok[1]) + "'");
        spec.width_bits = detail::width_from_word(tok[2]);
        if (spec.width_bits == 0)
            throw ParseError("channel name: bad width word '" + std::string(tok[2]) + "'");
        std::uint64_t idx = detail::parse_uint_token(tok[4], "index");
        if (idx > 6)
            throw ParseError("channel name: window index '" + std::string(tok[4]) + "' out of range");
        spec.index = static_cast<int>(idx);
        return spec;
    }

    // Produce a specific message for the common truncation cases.
    if (tok.size() >= 2 && tok[1] == "byte")
        throw ParseError("channel name: missing index after 'byte' in '" + std::string(name) + "'");
    if (tok.size() >= 2 && (tok[1] == "msb" || tok[1] == "lsb"))
        throw ParseError("channel name: incomplete windowed channel '" + std::string(name) + "'");
    throw ParseError("channel name: unrecognized form '" + std::string(name) + "'");
}

}  // namespace canrev
