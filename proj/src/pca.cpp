#include "vistra/pca.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "vistra/error.hpp"

namespace vistra::features {

namespace {

struct Decomposition {
    Eigen::VectorXd values;   // descending, clamped at 0
    Eigen::MatrixXd vectors;  // cols x r, matching `values`
};

Eigen::MatrixXd centered(const Eigen::MatrixXd& x, Eigen::VectorXd& mean) {
    mean = x.colwise().mean().transpose();
    return x.rowwise() - mean.transpose();
}

// Eigenpairs of the sample covariance. Wide matrices go through the
// rows x rows Gram matrix, which shares the covariance's nonzero spectrum.
Decomposition decompose(const Eigen::MatrixXd& xc, bool want_vectors) {
    const Eigen::Index n = xc.rows();
    const Eigen::Index d = xc.cols();
    const double denom = static_cast<double>(n - 1);
    Decomposition out;
    if (d <= n) {
        const Eigen::MatrixXd cov = (xc.transpose() * xc) / denom;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, want_vectors ? Eigen::ComputeEigenvectors
                                                                              : Eigen::EigenvaluesOnly);
        out.values = es.eigenvalues().reverse().cwiseMax(0.0);
        if (want_vectors) out.vectors = es.eigenvectors().rowwise().reverse();
        return out;
    }
    const Eigen::MatrixXd gram = (xc * xc.transpose()) / denom;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, want_vectors ? Eigen::ComputeEigenvectors
                                                                          : Eigen::EigenvaluesOnly);
    out.values = es.eigenvalues().reverse().cwiseMax(0.0);
    if (!want_vectors) return out;

    const Eigen::MatrixXd u = es.eigenvectors().rowwise().reverse();
    const double tol = std::max(out.values.size() ? out.values(0) : 0.0, 1.0) * 1e-12;
    Eigen::MatrixXd v(d, n);
    Eigen::Index good = 0;
    for (Eigen::Index i = 0; i < n && out.values(i) > tol; ++i, ++good) {
        v.col(i) = (xc.transpose() * u.col(i)).normalized();
    }
    if (good < n) {
        // Complete the basis for the null directions; their projections vanish.
        Eigen::MatrixXd seed(d, good + d);
        seed.leftCols(good) = v.leftCols(good);
        seed.rightCols(d) = Eigen::MatrixXd::Identity(d, d);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(seed);
        const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, n);
        v.rightCols(n - good) = q.rightCols(n - good);
    }
    out.vectors = v;
    return out;
}

void apply_sign_convention(Eigen::MatrixXd& rows) {
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
        Eigen::Index best = 0;
        for (Eigen::Index c = 1; c < rows.cols(); ++c) {
            if (std::abs(rows(r, c)) > std::abs(rows(r, best))) best = c;
        }
        if (rows(r, best) < 0.0) rows.row(r) *= -1.0;
    }
}

}  // namespace

Eigen::VectorXd covariance_spectrum(const Eigen::MatrixXd& x) {
    if (x.rows() < 2) throw std::invalid_argument("PCA needs at least 2 rows");
    Eigen::VectorXd mean;
    const Eigen::MatrixXd xc = centered(x, mean);
    Eigen::VectorXd values = decompose(xc, false).values;
    if (values.size() < x.cols()) {
        Eigen::VectorXd full = Eigen::VectorXd::Zero(x.cols());
        full.head(values.size()) = values;
        values = full;
    }
    return values;
}

PcaModel pca_fit(const FeatureMatrix& x, std::size_t theta) {
    x.validate();
    const std::size_t limit = std::min(x.row_count() > 0 ? x.row_count() - 1 : 0, x.col_count());
    if (theta < 1 || theta > limit) {
        throw std::invalid_argument("theta=" + std::to_string(theta) + " outside [1, " + std::to_string(limit) + "]");
    }
    PcaModel model;
    const Eigen::MatrixXd xc = centered(x.rows, model.mean);
    const Decomposition dec = decompose(xc, true);
    const auto t = static_cast<Eigen::Index>(theta);
    model.components = dec.vectors.leftCols(t).transpose();
    apply_sign_convention(model.components);
    model.explained_variance = dec.values.head(t);
    model.total_variance = dec.values.sum();
    return model;
}

std::size_t theta_for_variance(const FeatureMatrix& x, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("variance fraction must be in (0, 1]");
    const Eigen::VectorXd spectrum = covariance_spectrum(x.rows);
    const std::size_t limit = std::min(x.row_count() - 1, x.col_count());
    const double total = spectrum.sum();
    if (!(total > 0.0)) return 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < limit; ++i) {
        acc += spectrum(static_cast<Eigen::Index>(i));
        if (acc >= fraction * total * (1.0 - 1e-12)) return i + 1;
    }
    return limit;
}

FeatureMatrix pca_transform(const PcaModel& model, const FeatureMatrix& x) {
    x.validate();
    if (static_cast<Eigen::Index>(x.col_count()) != model.mean.size()) {
        throw std::invalid_argument("feature width " + std::to_string(x.col_count()) + " does not match PCA model (" +
                                    std::to_string(model.mean.size()) + ")");
    }
    FeatureMatrix out;
    out.rows = (x.rows.rowwise() - model.mean.transpose()) * model.components.transpose();
    out.labels = x.labels;
    out.snr_db = x.snr_db;
    for (std::size_t i = 0; i < model.theta(); ++i) out.columns.push_back(ColumnMeta{"pca", 0, 0, i});
    return out;
}

nlohmann::json to_json(const PcaModel& model) {
    nlohmann::json j;
    j["mean"] = std::vector<double>(model.mean.data(), model.mean.data() + model.mean.size());
    nlohmann::json comps = nlohmann::json::array();
    for (Eigen::Index r = 0; r < model.components.rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(model.components.cols()));
        for (Eigen::Index c = 0; c < model.components.cols(); ++c) row[static_cast<std::size_t>(c)] = model.components(r, c);
        comps.push_back(row);
    }
    j["components"] = comps;
    j["explained_variance"] = std::vector<double>(model.explained_variance.data(),
                                                  model.explained_variance.data() + model.explained_variance.size());
    j["total_variance"] = model.total_variance;
    return j;
}

PcaModel pca_from_json(const nlohmann::json& j) {
    try {
        PcaModel m;
        const auto mean = j.at("mean").get<std::vector<double>>();
        m.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
        const auto& comps = j.at("components");
        m.components.resize(static_cast<Eigen::Index>(comps.size()), m.mean.size());
        for (std::size_t r = 0; r < comps.size(); ++r) {
            const auto row = comps[r].get<std::vector<double>>();
            if (row.size() != mean.size()) throw DataError("PCA component width mismatch");
            for (std::size_t c = 0; c < row.size(); ++c) {
                m.components(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
            }
        }
        const auto ev = j.at("explained_variance").get<std::vector<double>>();
        m.explained_variance = Eigen::Map<const Eigen::VectorXd>(ev.data(), static_cast<Eigen::Index>(ev.size()));
        m.total_variance = j.at("total_variance").get<double>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("PCA model: ") + e.what());
    }
}

}  // namespace vistra::features
