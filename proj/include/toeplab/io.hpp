#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "toeplab/operators.hpp"

// Dense operator dumps for cross-checking with external tools: one JSON header
// line, then the matrix row-major as (re, im) pairs. The binary payload is
// little-endian IEEE-754 float64; the text payload holds one row per line.

namespace toeplab {

enum class DumpFormat { binary, text };

namespace detail {

inline void put_le(std::ostream& out, double x)
{
    auto bits = std::bit_cast<std::uint64_t>(x);
    char bytes[8];
    for (int i = 0; i < 8; ++i) {
        bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    }
    out.write(bytes, 8);
}

inline double get_le(std::istream& in)
{
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
        throw ParseError("operator dump payload is truncated");
    }
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) {
        bits = (bits << 8) | bytes[i];
    }
    return std::bit_cast<double>(bits);
}

} // namespace detail

inline nlohmann::ordered_json dump_header(const FiniteSectionOperator& a, DumpFormat format)
{
    nlohmann::ordered_json h;
    h["model"] = a.model().to_string();
    h["basis"] = basis_name(a.basis());
    h["dimension"] = a.dimension();
    h["layout"] = "row-major";
    h["scalar"] = "complex128";
    h["endianness"] = "little";
    h["format"] = format == DumpFormat::binary ? "binary" : "text";
    return h;
}

inline void write_operator(std::ostream& out, const FiniteSectionOperator& a, DumpFormat format = DumpFormat::binary)
{
    out << dump_header(a, format).dump() << '\n';
    const auto& m = a.matrix();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (format == DumpFormat::binary) {
                detail::put_le(out, m(r, c).real());
                detail::put_le(out, m(r, c).imag());
            } else {
                out << (c ? " " : "") << text::format_g17(m(r, c).real()) << ' ' << text::format_g17(m(r, c).imag());
            }
        }
        if (format == DumpFormat::text) {
            out << '\n';
        }
    }
}

inline FiniteSectionOperator read_operator(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("operator dump has no header");
    }
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("operator dump header: ") + e.what());
    }
    if (h.value("layout", "") != "row-major" || h.value("scalar", "") != "complex128"
        || h.value("endianness", "") != "little") {
        throw ParseError("unsupported operator dump layout");
    }
    const auto model = GroupModel::parse(h.at("model").get<std::string>());
    const auto basis = parse_basis(h.at("basis").get<std::string>());
    const auto n = h.at("dimension").get<Eigen::Index>();
    if (n != basis_dimension(model, basis)) {
        throw ModelMismatch("dump dimension does not match its model and basis");
    }
    const auto format = h.at("format").get<std::string>();
    CMatrix m(n, n);
    if (format == "binary") {
        for (Eigen::Index r = 0; r < n; ++r) {
            for (Eigen::Index c = 0; c < n; ++c) {
                const double re = detail::get_le(in);
                m(r, c) = {re, detail::get_le(in)};
            }
        }
    } else if (format == "text") {
        for (Eigen::Index r = 0; r < n; ++r) {
            if (!std::getline(in, line)) {
                throw ParseError("operator dump payload is truncated");
            }
            const auto fields = text::split(text::trim(line), ' ');
            if (static_cast<Eigen::Index>(fields.size()) != 2 * n) {
                throw ParseError("operator dump row " + std::to_string(r) + " has the wrong length");
            }
            for (Eigen::Index c = 0; c < n; ++c) {
                m(r, c) = {text::parse_double(fields[2 * c]), text::parse_double(fields[2 * c + 1])};
            }
        }
    } else {
        throw ParseError("unknown operator dump format '" + format + "'");
    }
    return {model, basis, std::move(m)};
}

} // namespace toeplab
