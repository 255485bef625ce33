#include "ustat/matrix.hpp"

#include "ustat/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ustat {

DataMatrix::DataMatrix(Eigen::MatrixXd values, std::vector<std::string> names)
    : values_(std::move(values)), names_(std::move(names)) {
    if (values_.rows() < 2 || values_.cols() < 2)
        fail(ErrorCode::Shape, "data matrix needs n >= 2 and p >= 2, got n=" +
                                   std::to_string(values_.rows()) + " p=" +
                                   std::to_string(values_.cols()));
    if (!values_.allFinite())
        fail(ErrorCode::InvalidArgument, "data matrix contains NaN or Inf");
    if (!names_.empty() && static_cast<Eigen::Index>(names_.size()) != values_.cols())
        fail(ErrorCode::DimensionMismatch, "column name count does not match p");
}

GroupedSample::GroupedSample(DataMatrix x_, DataMatrix y_) : x(std::move(x_)), y(std::move(y_)) {
    if (x.p() != y.p())
        fail(ErrorCode::DimensionMismatch, "samples have different column counts (" +
                                               std::to_string(x.p()) + " vs " +
                                               std::to_string(y.p()) + ")");
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return cells;
}

struct Table {
    Eigen::MatrixXd m;
    std::vector<std::string> names;
};

Table parse_table(const std::string& text, bool has_header, const std::string& origin) {
    std::vector<std::string> names;
    std::vector<double> cells;
    std::size_t p = 0, rows = 0, line_no = 0;
    std::size_t pos = 0;
    bool header_pending = has_header;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        std::string_view line(text.data() + pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (trim(line).empty()) {
            if (pos > text.size()) break;
            continue;
        }
        auto parts = split_commas(line);
        if (header_pending) {
            for (auto c : parts) names.emplace_back(c);
            p = parts.size();
            header_pending = false;
            continue;
        }
        if (p == 0) p = parts.size();
        if (parts.size() != p)
            fail(ErrorCode::Parse, origin + ": row " + std::to_string(line_no) + ": expected " +
                                       std::to_string(p) + " columns, found " +
                                       std::to_string(parts.size()));
        for (std::size_t j = 0; j < parts.size(); ++j) {
            auto c = parts[j];
            double v = 0;
            const char* b = c.data();
            const char* e = c.data() + c.size();
            if (!c.empty() && *b == '+') ++b;
            auto res = std::from_chars(b, e, v);
            if (c.empty() || res.ec != std::errc() || res.ptr != e || !std::isfinite(v))
                fail(ErrorCode::Parse, origin + ": row " + std::to_string(line_no) + ", column " +
                                           std::to_string(j + 1) + ": cannot parse '" +
                                           std::string(c) + "' as a finite number");
            cells.push_back(v);
        }
        ++rows;
    }
    Table t;
    t.m.resize(rows, p);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < p; ++j) t.m(i, j) = cells[i * p + j];
    t.names = std::move(names);
    return t;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) fail(ErrorCode::Io, "error reading '" + path + "'");
    return buf.str();
}

}  // namespace

DataMatrix parse_csv(const std::string& text, bool has_header, const std::string& origin) {
    Table t = parse_table(text, has_header, origin);
    if (t.m.rows() < 2 || t.m.cols() < 2)
        fail(ErrorCode::Shape, origin + ": need at least 2 rows and 2 columns, got " +
                                   std::to_string(t.m.rows()) + "x" + std::to_string(t.m.cols()));
    return DataMatrix(std::move(t.m), std::move(t.names));
}

DataMatrix load_csv(const std::string& path, bool has_header) {
    return parse_csv(slurp(path), has_header, path);
}

Eigen::MatrixXd load_numeric_csv(const std::string& path, bool has_header) {
    Table t = parse_table(slurp(path), has_header, path);
    if (t.m.rows() < 1 || t.m.cols() < 1) fail(ErrorCode::Shape, path + ": no data rows");
    return t.m;
}

Eigen::VectorXd parse_vector_csv(const std::string& text, bool has_header, const std::string& origin) {
    Table t = parse_table(text, has_header, origin);
    if (t.m.cols() != 1)
        fail(ErrorCode::Shape, origin + ": expected a single column, found " + std::to_string(t.m.cols()));
    if (t.m.rows() < 2) fail(ErrorCode::Shape, origin + ": need at least 2 rows");
    return t.m.col(0);
}

Eigen::VectorXd load_vector_csv(const std::string& path, bool has_header) {
    return parse_vector_csv(slurp(path), has_header, path);
}

std::string to_csv(const DataMatrix& m) {
    std::string out;
    char cell[40];
    if (!m.names().empty()) {
        for (std::size_t j = 0; j < m.names().size(); ++j) {
            if (j) out += ',';
            out += m.names()[j];
        }
        out += '\n';
    }
    for (Eigen::Index i = 0; i < m.n(); ++i) {
        for (Eigen::Index j = 0; j < m.p(); ++j) {
            if (j) out += ',';
            std::snprintf(cell, sizeof cell, "%.17g", m(i, j));
            out += cell;
        }
        out += '\n';
    }
    return out;
}

void write_csv(const DataMatrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
    out << to_csv(m);
}

Eigen::MatrixXd centered(const Eigen::MatrixXd& x) {
    Eigen::RowVectorXd mu = x.colwise().mean();
    Eigen::MatrixXd xc = x.rowwise() - mu;
    // constant columns become exactly zero rather than rounding noise
    for (Eigen::Index j = 0; j < x.cols(); ++j)
        if (x.col(j).minCoeff() == x.col(j).maxCoeff()) xc.col(j).setZero();
    return xc;
}

ColumnStats column_stats(const DataMatrix& m) {
    ColumnStats st;
    st.means = m.values().colwise().mean().transpose();
    Eigen::MatrixXd xc = centered(m.values());
    st.cov_matrix = (xc.transpose() * xc) / static_cast<double>(m.n());
    st.variances = st.cov_matrix.diagonal();
    return st;
}

DataMatrix center(const DataMatrix& m) {
    return DataMatrix(centered(m.values()), m.names());
}

}  // namespace ustat
