// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "tenrank/kruskal.hpp"
#include "tenrank/solver.hpp"
#include "tenrank/tensor.hpp"

namespace tenrank {

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void put_u64le(std::ostream& os, std::uint64_t v) {
    std::array<unsigned char, 8> b;
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b.data()), 8);
}

inline std::uint64_t get_u64le(std::istream& is) {
    std::array<unsigned char, 8> b;
    is.read(reinterpret_cast<char*>(b.data()), 8);
    if (!is) throw FormatError("tensor file: truncated header");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

// full-precision round-trippable decimal
inline std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace detail

inline constexpr char kTensorMagic[4] = {'T', '3', 'D', '1'};

/// .t3 format: magic "T3D1", three u64 little-endian extents, then
/// I*J*K f64 little-endian values in vec order.
inline void save_tensor(const DenseTensor3& t, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    os.write(kTensorMagic, 4);
    detail::put_u64le(os, static_cast<std::uint64_t>(t.dim(0)));
    detail::put_u64le(os, static_cast<std::uint64_t>(t.dim(1)));
    detail::put_u64le(os, static_cast<std::uint64_t>(t.dim(2)));
    static_assert(sizeof(double) == 8 && std::numeric_limits<double>::is_iec559);
    os.write(reinterpret_cast<const char*>(t.data().data()),
             static_cast<std::streamsize>(8 * t.size()));
    if (!os) throw IoError("write failed: " + path.string());
}

inline DenseTensor3 load_tensor(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kTensorMagic, 4) != 0)
        throw FormatError("tensor file: bad magic in " + path.string());
    const std::uint64_t i = detail::get_u64le(is);
    const std::uint64_t j = detail::get_u64le(is);
    const std::uint64_t k = detail::get_u64le(is);
    constexpr std::uint64_t max_elems = std::uint64_t(1) << 40;
    if (i == 0 || j == 0 || k == 0)
        throw FormatError("tensor file: zero extent in " + path.string());
    if (i > max_elems / j || i * j > max_elems / k)
        throw FormatError("tensor file: extents overflow in " + path.string());
    const Index n = static_cast<Index>(i * j * k);
    Vec data(n);
    is.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(8 * n));
    if (is.gcount() != static_cast<std::streamsize>(8 * n))
        throw FormatError("tensor file: truncated payload in " + path.string());
    // trailing bytes mean the header and payload disagree
    is.peek();
    if (!is.eof())
        throw FormatError("tensor file: payload longer than header implies in " + path.string());
    return DenseTensor3(static_cast<Index>(i), static_cast<Index>(j), static_cast<Index>(k),
                        std::move(data));
}

inline const char* kTraceHeader =
    "iter,psi,residual,residual_sq,relative,nnz_alpha,beta_k,q_alpha,step_norm_sq";

inline void write_trace_csv(const std::vector<IterTrace>& trace,
                            const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);  // '\n' line endings everywhere
    if (!os) throw IoError("cannot open for writing: " + path.string());
    os << kTraceHeader << "\n";
    for (const IterTrace& t : trace) {
        os << t.iter << ',' << detail::fmt_double(t.psi) << ','
           << detail::fmt_double(t.residual) << ',' << detail::fmt_double(t.residual_sq) << ','
           << detail::fmt_double(t.relative) << ',' << t.nnz_alpha << ','
           << detail::fmt_double(t.beta_k) << ',' << detail::fmt_double(t.q_alpha) << ','
           << detail::fmt_double(t.step_norm_sq) << "\n";
    }
    if (!os) throw IoError("write failed: " + path.string());
}

namespace detail {

inline void write_matrix_csv(const Mat& m, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) os << ',';
            os << fmt_double(m(i, j));
        }
        os << "\n";
    }
    if (!os) throw IoError("write failed: " + path.string());
}

inline Mat read_matrix_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open: " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw FormatError("ragged csv: " + path.string());
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw FormatError("empty csv: " + path.string());
    Mat m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

}  // namespace detail

/// Writes A.csv, B.csv, C.csv (one row per tensor index) and alpha.csv
/// (one value per line) into dir.
inline void write_factors(const KruskalModel& m, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    detail::write_matrix_csv(m.A, dir / "A.csv");
    detail::write_matrix_csv(m.B, dir / "B.csv");
    detail::write_matrix_csv(m.C, dir / "C.csv");
    detail::write_matrix_csv(m.alpha, dir / "alpha.csv");
}

inline KruskalModel load_factors(const std::filesystem::path& dir) {
    Mat a = detail::read_matrix_csv(dir / "A.csv");
    Mat b = detail::read_matrix_csv(dir / "B.csv");
    Mat c = detail::read_matrix_csv(dir / "C.csv");
    Mat alpha = detail::read_matrix_csv(dir / "alpha.csv");
    if (alpha.cols() != 1) throw FormatError("alpha.csv must have one value per line");
    return KruskalModel(std::move(a), std::move(b), std::move(c), Vec(alpha.col(0)));
}

}  // namespace tenrank
