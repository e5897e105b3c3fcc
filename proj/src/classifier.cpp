#include "oclreid/classifier.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "oclreid/errors.hpp"

namespace oclreid {

void DesignBlock::add_sample(const PartFeatures& feat, int label) {
    for (int k = 0; k < PartScheme::kNumParts; ++k) {
        if (!feat.vis.bits[static_cast<size_t>(k)]) continue;
        rows[static_cast<size_t>(k)].push_back(feat.F.row(k).transpose());
        labels[static_cast<size_t>(k)].push_back(static_cast<double>(label));
    }
}

RidgeClassifier fit(const DesignBlock& block, double lambda) {
    if (lambda <= 0.0) throw ConfigError("ridge fit: lambda must be positive");
    int feat_dim = 0;
    for (const auto& part_rows : block.rows)
        if (!part_rows.empty()) {
            feat_dim = static_cast<int>(part_rows.front().size());
            break;
        }
    RidgeClassifier clf;
    clf.lambda = lambda;
    clf.W = Eigen::MatrixXd::Zero(PartScheme::kNumParts, std::max(feat_dim, 1));
    for (int k = 0; k < PartScheme::kNumParts; ++k) {
        const auto& part_rows = block.rows[static_cast<size_t>(k)];
        const auto& part_y = block.labels[static_cast<size_t>(k)];
        if (part_rows.empty()) continue;
        const int rows_n = static_cast<int>(part_rows.size());
        Eigen::MatrixXd X(rows_n, feat_dim);
        Eigen::VectorXd y(rows_n);
        for (int r = 0; r < rows_n; ++r) {
            X.row(r) = part_rows[static_cast<size_t>(r)].transpose();
            y(r) = part_y[static_cast<size_t>(r)];
        }
        if (!X.allFinite() || !y.allFinite())
            throw NumericError("ridge fit: non-finite design block");
        const Eigen::MatrixXd A =
            X.transpose() * X +
            lambda * Eigen::MatrixXd::Identity(feat_dim, feat_dim);
        clf.W.row(k) = A.ldlt().solve(X.transpose() * y).transpose();
        clf.trained_mask[static_cast<size_t>(k)] = 1;
    }
    return clf;
}

double confidence(const RidgeClassifier& clf, const PartFeatures& F) {
    double num = 0.0;
    int den = 0;
    for (int k = 0; k < PartScheme::kNumParts; ++k) {
        if (!F.vis.bits[static_cast<size_t>(k)] ||
            !clf.trained_mask[static_cast<size_t>(k)])
            continue;
        num += clf.W.row(k).dot(F.F.row(k));
        ++den;
    }
    if (den == 0)
        throw ConfidenceUnavailableError(
            "confidence: no part both visible and trained");
    return num / den;
}

void save_classifier(std::ostream& out, const RidgeClassifier& clf) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", clf.lambda);
    out << "oclreid-ridge v1\n"
        << clf.W.rows() << ' ' << clf.W.cols() << ' ' << buf << '\n';
    for (auto b : clf.trained_mask) out << int(b) << ' ';
    out << '\n';
    for (Eigen::Index i = 0; i < clf.W.rows(); ++i) {
        for (Eigen::Index j = 0; j < clf.W.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", clf.W(i, j));
            out << buf << (j + 1 < clf.W.cols() ? " " : "");
        }
        out << '\n';
    }
}

RidgeClassifier load_classifier(std::istream& in) {
    std::string word, ver;
    Eigen::Index rows, cols;
    RidgeClassifier clf;
    if (!(in >> word >> ver >> rows >> cols >> clf.lambda) ||
        word != "oclreid-ridge" || ver != "v1")
        throw IoError("classifier: bad header");
    for (auto& b : clf.trained_mask) {
        int v;
        if (!(in >> v)) throw IoError("classifier: bad mask");
        b = static_cast<std::uint8_t>(v != 0);
    }
    clf.W.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            if (!(in >> clf.W(i, j))) throw IoError("classifier: truncated");
    return clf;
}

} // namespace oclreid
