#ifndef FRACDIM_DATASET_IO_HPP
#define FRACDIM_DATASET_IO_HPP

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dataset.hpp"
#include "error.hpp"

namespace fracdim {

enum class DataFormat { Csv, Fdbin };

/// Picks the format from the file extension (".fdbin" or anything else as CSV).
inline DataFormat format_from_path(const std::filesystem::path& path) {
    return path.extension() == ".fdbin" ? DataFormat::Fdbin : DataFormat::Csv;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

/// Strict decimal parse; the whole field must be consumed.
inline bool parse_double(std::string_view field, double& out) {
    field = trim(field);
    if (field.empty()) return false;
    if (field.front() == '+') field.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    return ec == std::errc() && ptr == field.data() + field.size();
}

inline bool parse_int(std::string_view field, long long& out) {
    field = trim(field);
    if (field.empty()) return false;
    if (field.front() == '+') field.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    return ec == std::errc() && ptr == field.data() + field.size();
}

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

inline std::string read_file(const std::filesystem::path& path, bool binary) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) fail(ErrorCode::IoFailure, "read failed for " + path.string());
    return content;
}

inline void write_file(const std::filesystem::path& path, std::string_view content, bool binary) {
    std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) fail(ErrorCode::IoFailure, "write failed for " + path.string());
}

template <typename T>
void put_le(std::string& out, T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    const U bits = std::bit_cast<U>(value);
    for (std::size_t b = 0; b < sizeof(U); ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFFu));
}

template <typename T>
T get_le(std::string_view in, std::size_t offset) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    U bits = 0;
    for (std::size_t b = 0; b < sizeof(U); ++b) {
        bits |= static_cast<U>(static_cast<unsigned char>(in[offset + b])) << (8 * b);
    }
    return std::bit_cast<T>(bits);
}

}  // namespace detail

/// CSV: one sample per line, d feature values then an integer label.
inline Dataset parse_csv_dataset(std::string_view text) {
    Matrix features;
    std::vector<Label> labels;
    std::vector<double> row;
    std::size_t width = 0;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = detail::trim(text.substr(start, end - start));
        start = end + 1;
        ++line_no;
        if (line.empty()) continue;

        const auto fields = detail::split(line, ',');
        if (fields.size() < 2) {
            throw RowError(ErrorCode::MalformedValue, line_no, "expected at least one feature and a label");
        }
        if (width == 0) {
            width = fields.size();
        } else if (fields.size() != width) {
            throw RowError(ErrorCode::InconsistentRowWidth, line_no,
                           "expected " + std::to_string(width) + " fields, got " + std::to_string(fields.size()));
        }
        row.clear();
        for (std::size_t j = 0; j + 1 < fields.size(); ++j) {
            double v;
            if (!detail::parse_double(fields[j], v)) {
                throw RowError(ErrorCode::MalformedValue, line_no,
                               "cannot parse feature '" + std::string(detail::trim(fields[j])) + "'");
            }
            if (!std::isfinite(v)) throw RowError(ErrorCode::NonFiniteInput, line_no, "non-finite feature");
            row.push_back(v);
        }
        long long label;
        if (!detail::parse_int(fields.back(), label)) {
            throw RowError(ErrorCode::MalformedValue, line_no,
                           "cannot parse label '" + std::string(detail::trim(fields.back())) + "'");
        }
        if (label < 0) throw RowError(ErrorCode::NegativeLabel, line_no, "negative label");
        if (label > static_cast<long long>(UINT32_MAX)) {
            throw RowError(ErrorCode::MalformedValue, line_no, "label out of range");
        }
        features.append_row(row);
        labels.push_back(static_cast<Label>(label));
    }
    return Dataset(std::move(features), std::move(labels));
}

inline std::string format_csv_dataset(const Dataset& dataset) {
    std::string out;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        for (double v : dataset.point(i)) {
            out += detail::format_double(v);
            out += ',';
        }
        out += std::to_string(dataset.label(i));
        out += '\n';
    }
    return out;
}

inline constexpr std::array<char, 4> kFdbinMagic{'F', 'D', 'I', 'M'};
inline constexpr std::uint32_t kFdbinVersion = 1;

/// fdbin (little-endian): "FDIM", u32 version, u32 n, u32 d, n*d f64, n u32.
inline std::string encode_fdbin(const Dataset& dataset) {
    std::string out(kFdbinMagic.begin(), kFdbinMagic.end());
    detail::put_le(out, kFdbinVersion);
    detail::put_le(out, static_cast<std::uint32_t>(dataset.size()));
    detail::put_le(out, static_cast<std::uint32_t>(dataset.dim()));
    for (double v : dataset.features().values()) detail::put_le(out, v);
    for (Label l : dataset.labels()) detail::put_le(out, l);
    return out;
}

inline Dataset decode_fdbin(std::string_view bytes) {
    constexpr std::size_t header = 16;
    if (bytes.size() < header || bytes.substr(0, 4) != std::string_view(kFdbinMagic.data(), 4)) {
        fail(ErrorCode::MalformedFile, "missing FDIM magic");
    }
    const auto version = detail::get_le<std::uint32_t>(bytes, 4);
    if (version != kFdbinVersion) fail(ErrorCode::MalformedFile, "unsupported fdbin version " + std::to_string(version));
    const std::size_t n = detail::get_le<std::uint32_t>(bytes, 8);
    const std::size_t d = detail::get_le<std::uint32_t>(bytes, 12);
    const std::size_t expected = header + n * d * 8 + n * 4;
    if (bytes.size() != expected) {
        fail(ErrorCode::MalformedFile, "fdbin size " + std::to_string(bytes.size()) + " does not match header (expected " +
                                           std::to_string(expected) + ")");
    }
    std::vector<double> values(n * d);
    for (std::size_t k = 0; k < n * d; ++k) {
        values[k] = detail::get_le<double>(bytes, header + 8 * k);
        if (!std::isfinite(values[k])) {
            throw RowError(ErrorCode::NonFiniteInput, k / d + 1, "non-finite feature");
        }
    }
    std::vector<Label> labels(n);
    const std::size_t label_offset = header + n * d * 8;
    for (std::size_t i = 0; i < n; ++i) labels[i] = detail::get_le<std::uint32_t>(bytes, label_offset + 4 * i);
    return Dataset(Matrix(n, d, std::move(values)), std::move(labels));
}

inline Dataset load_dataset(const std::filesystem::path& path, DataFormat format) {
    const bool binary = format == DataFormat::Fdbin;
    const std::string content = detail::read_file(path, binary);
    return binary ? decode_fdbin(content) : parse_csv_dataset(content);
}

inline Dataset load_dataset(const std::filesystem::path& path) { return load_dataset(path, format_from_path(path)); }

inline void save_dataset(const Dataset& dataset, const std::filesystem::path& path, DataFormat format) {
    const bool binary = format == DataFormat::Fdbin;
    detail::write_file(path, binary ? encode_fdbin(dataset) : format_csv_dataset(dataset), binary);
}

inline void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    save_dataset(dataset, path, format_from_path(path));
}

}  // namespace fracdim

#endif
