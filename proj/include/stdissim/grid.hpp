#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace stdissim {

/// Dense row-major matrix of doubles. Rows index space, columns index time
/// wherever the matrix represents a space-time grid.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        Matrix m;
        m.rows_ = rows.size();
        m.cols_ = rows.size() == 0 ? 0 : rows.begin()->size();
        m.data_.reserve(m.rows_ * m.cols_);
        for (const auto& r : rows) {
            if (r.size() != m.cols_) throw InvalidInput("ragged matrix rows");
            m.data_.insert(m.data_.end(), r.begin(), r.end());
        }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix column(std::size_t j) const {
        Matrix c(rows_, 1);
        for (std::size_t i = 0; i < rows_; ++i) c(i, 0) = (*this)(i, j);
        return c;
    }

    Matrix row_matrix(std::size_t i) const {
        Matrix r(1, cols_);
        std::copy(row(i).begin(), row(i).end(), r.data_.begin());
        return r;
    }

    double sum_of_squares() const noexcept {
        double s = 0.0;
        for (double v : data_) s += v * v;
        return s;
    }

    double mean() const noexcept {
        double s = 0.0;
        for (double v : data_) s += v;
        return data_.empty() ? 0.0 : s / static_cast<double>(data_.size());
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// L x T grid with every element in [-1, 1]; the input of every dissimilarity
/// computation. Only constructible through normalize_grid or from values that
/// already satisfy the range invariant.
class SpaceTimeGrid {
public:
    static SpaceTimeGrid from_normalized(Matrix values) {
        if (values.empty()) throw InvalidInput("empty grid");
        for (double v : values.data())
            if (!(v >= -1.0 && v <= 1.0)) throw InvalidInput("grid value outside [-1, 1]");
        return SpaceTimeGrid(std::move(values));
    }

    std::size_t space() const noexcept { return values_.rows(); }
    std::size_t time() const noexcept { return values_.cols(); }
    const Matrix& values() const noexcept { return values_; }

    SpaceTimeGrid negated() const {
        Matrix m = values_;
        for (double& v : m.data()) v = -v;
        return SpaceTimeGrid(std::move(m));
    }
    SpaceTimeGrid transposed() const { return SpaceTimeGrid(values_.transposed()); }
    SpaceTimeGrid column(std::size_t j) const { return SpaceTimeGrid(values_.column(j)); }
    SpaceTimeGrid row(std::size_t i) const { return SpaceTimeGrid(values_.row_matrix(i)); }

private:
    explicit SpaceTimeGrid(Matrix values) : values_(std::move(values)) {}
    Matrix values_;
};

/// Affine map of the raw values onto [-1, 1] (min -> -1, max -> +1).
/// A constant input has no pattern and maps to all zeros.
inline SpaceTimeGrid normalize_grid(const Matrix& raw) {
    if (raw.empty()) throw InvalidInput("normalize_grid: empty matrix");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double v : raw.data()) {
        if (!std::isfinite(v)) throw InvalidInput("normalize_grid: non-finite element");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    Matrix out(raw.rows(), raw.cols(), 0.0);
    if (hi > lo) {
        const double scale = 2.0 / (hi - lo);
        auto src = raw.data();
        auto dst = out.data();
        for (std::size_t i = 0; i < src.size(); ++i)
            dst[i] = std::clamp((src[i] - lo) * scale - 1.0, -1.0, 1.0);
    }
    return SpaceTimeGrid::from_normalized(std::move(out));
}

// ---------------------------------------------------------------------------
// CSV: rows = space, columns = time, no header, decimal floats.

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view field) {
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
        field.remove_suffix(1);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size())
        throw InvalidInput("malformed number '" + std::string(field) + "'");
    return v;
}

inline Matrix read_matrix_csv(std::istream& in) {
    std::vector<double> values;
    std::size_t cols = 0, rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::size_t n = 0;
        std::string_view rest(line);
        while (true) {
            auto comma = rest.find(',');
            values.push_back(parse_double(rest.substr(0, comma)));
            ++n;
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (rows == 0) cols = n;
        else if (n != cols) throw InvalidInput("csv row " + std::to_string(rows + 1) + " has " +
                                               std::to_string(n) + " columns, expected " +
                                               std::to_string(cols));
        ++rows;
    }
    if (rows == 0) throw InvalidInput("csv contains no data rows");
    Matrix m(rows, cols);
    std::copy(values.begin(), values.end(), m.data().begin());
    return m;
}

inline Matrix read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    return read_matrix_csv(in);
}

inline void write_matrix_csv(std::ostream& out, const Matrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

} // namespace stdissim
