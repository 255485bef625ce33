#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace ustat {

// n observations (rows) by p variables (columns). Immutable once built.
class DataMatrix {
public:
    DataMatrix() = default;
    // throws ShapeError (n < 2 or p < 2) or InvalidArgument (non-finite entry)
    explicit DataMatrix(Eigen::MatrixXd values, std::vector<std::string> names = {});

    Eigen::Index n() const { return values_.rows(); }
    Eigen::Index p() const { return values_.cols(); }
    const Eigen::MatrixXd& values() const { return values_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }
    const std::vector<std::string>& names() const { return names_; }

private:
    Eigen::MatrixXd values_;
    std::vector<std::string> names_;
};

struct GroupedSample {
    GroupedSample(DataMatrix x_, DataMatrix y_);
    DataMatrix x;
    DataMatrix y;
};

// Covariances use divisor n, not n - 1.
struct ColumnStats {
    Eigen::VectorXd means;
    Eigen::VectorXd variances;
    Eigen::MatrixXd cov_matrix;
    double cov(Eigen::Index j1, Eigen::Index j2) const { return cov_matrix(j1, j2); }
};

DataMatrix load_csv(const std::string& path, bool has_header);
DataMatrix parse_csv(const std::string& text, bool has_header, const std::string& origin = "<memory>");
// one value per line (a response vector). throws Shape unless exactly one column
Eigen::VectorXd parse_vector_csv(const std::string& text, bool has_header, const std::string& origin = "<memory>");
Eigen::VectorXd load_vector_csv(const std::string& path, bool has_header);
// any rectangular numeric table with at least one row and column
Eigen::MatrixXd load_numeric_csv(const std::string& path, bool has_header);
void write_csv(const DataMatrix& m, const std::string& path);
std::string to_csv(const DataMatrix& m);

ColumnStats column_stats(const DataMatrix& m);
Eigen::MatrixXd centered(const Eigen::MatrixXd& x);
DataMatrix center(const DataMatrix& m);

}  // namespace ustat
