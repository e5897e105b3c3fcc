#ifndef OCLREID_CLASSIFIER_HPP
#define OCLREID_CLASSIFIER_HPP

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <vector>

#include "oclreid/core.hpp"

namespace oclreid {

// Per-part ridge regression weights.  Rows for parts that never saw a
// visible training row stay zero and are masked out of the confidence.
struct RidgeClassifier {
    Eigen::MatrixXd W; // N x C
    double lambda = 1.0;
    std::array<std::uint8_t, PartScheme::kNumParts> trained_mask{};

    bool any_trained() const {
        for (auto b : trained_mask)
            if (b) return true;
        return false;
    }
};

// Per-part design matrices gathered from short-term features: rows only from
// observations where the part is visible.
struct DesignBlock {
    std::array<std::vector<Eigen::VectorXd>, PartScheme::kNumParts> rows;
    std::array<std::vector<double>, PartScheme::kNumParts> labels;

    void add_sample(const PartFeatures& feat, int label);
};

constexpr double kDefaultRidgeLambda = 1.0;

// Closed-form solve of (X'X + lambda I) w = X'y per part.
RidgeClassifier fit(const DesignBlock& block, double lambda);

// Visibility- and trained-mask-weighted mean of per-part scores.
double confidence(const RidgeClassifier& clf, const PartFeatures& F);

void save_classifier(std::ostream& out, const RidgeClassifier& clf);
RidgeClassifier load_classifier(std::istream& in);

} // namespace oclreid

#endif
