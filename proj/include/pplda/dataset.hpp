#ifndef PPLDA_DATASET_HPP
#define PPLDA_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pplda/errors.hpp"

namespace pplda {

/// n observations of dimension p, stored row-major.
struct Dataset {
    std::size_t n = 0;
    std::size_t p = 0;
    std::vector<double> rows; // n*p values

    Dataset() = default;
    Dataset(std::size_t n_, std::size_t p_) : n(n_), p(p_), rows(n_ * p_, 0.0) {
        if (n_ < 1) throw ValidationError("Dataset: need at least one row");
    }

    double operator()(std::size_t i, std::size_t j) const { return rows[i * p + j]; }
    double& operator()(std::size_t i, std::size_t j) { return rows[i * p + j]; }
    const double* row(std::size_t i) const { return rows.data() + i * p; }
    double* row(std::size_t i) { return rows.data() + i * p; }
};

/// Dataset with binary labels; label 1 marks the group with mean mu1.
struct LabeledDataset {
    Dataset data;
    std::vector<std::uint8_t> labels;
};

} // namespace pplda

#endif
