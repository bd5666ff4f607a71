#pragma once

#include <cstddef>
#include <iosfwd>

#include <Eigen/Core>
#include "json.hpp"

#include "vistra/features.hpp"

namespace vistra::features {

struct PcaModel {
    Eigen::VectorXd mean;
    Eigen::MatrixXd components;          // theta x cols, orthonormal rows
    Eigen::VectorXd explained_variance;  // theta values, non-increasing
    double total_variance = 0.0;

    std::size_t theta() const { return static_cast<std::size_t>(components.rows()); }
};

/// Full covariance spectrum (descending, sample covariance with n-1).
Eigen::VectorXd covariance_spectrum(const Eigen::MatrixXd& x);

/// Top-theta principal directions. Requires 1 <= theta <= min(rows-1, cols).
/// Each direction is signed so its largest-magnitude entry is positive.
PcaModel pca_fit(const FeatureMatrix& x, std::size_t theta);

/// Smallest theta whose cumulative explained variance reaches `fraction`.
/// Zero-variance data yields theta = 1.
std::size_t theta_for_variance(const FeatureMatrix& x, double fraction);

/// Projects centered rows; labels and SNR tags are carried over.
FeatureMatrix pca_transform(const PcaModel& model, const FeatureMatrix& x);

nlohmann::json to_json(const PcaModel& model);
PcaModel pca_from_json(const nlohmann::json& j);

}  // namespace vistra::features
