#ifndef OCLREID_EXTRACTOR_HPP
#define OCLREID_EXTRACTOR_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "oclreid/core.hpp"
#include "oclreid/rng.hpp"

namespace oclreid {

struct ModelDims {
    int d_raw = 32;
    int hidden = 64;
    int feat = 16;
    int parts = PartScheme::kNumParts;

    bool operator==(const ModelDims&) const = default;
};

// All trainable parameters of the part-based embedding network and its two
// identity heads.  Layer 1 is shared across parts with an additive per-part
// code; layer 2 maps to the C-dimensional part feature.
struct ExtractorParams {
    ModelDims dims;
    Eigen::MatrixXd W1;         // D x H
    Eigen::VectorXd b1;         // H
    Eigen::MatrixXd W2;         // H x C
    Eigen::VectorXd b2;         // C
    Eigen::MatrixXd part_embed; // N x H
    Eigen::MatrixXd Hg;         // C x 2
    Eigen::Vector2d bg;
    Eigen::MatrixXd Hc;         // (C*N) x 2
    Eigen::Vector2d bc;
    std::uint64_t version = 0;

    static ExtractorParams zeros(const ModelDims& dims);
    static ExtractorParams random_init(const ModelDims& dims, Rng& rng,
                                       double scale = 0.1);

    bool same_values(const ExtractorParams& other) const;
};

enum class Provenance { kShortTerm, kLongTerm };

struct TrainBatch {
    std::vector<Observation> samples;
    std::vector<Provenance> tags; // parallel to samples

    void add(Observation obs, Provenance tag) {
        samples.push_back(std::move(obs));
        tags.push_back(tag);
    }
    size_t size() const { return samples.size(); }
};

struct LossReport {
    double total = 0.0;
    double ce_g = 0.0;
    double ce_c = 0.0;
    double triplet = 0.0;
    std::vector<double> per_sample;
};

// Parameter-shaped gradient accumulator.
struct ExtractorGradients {
    Eigen::MatrixXd W1, W2, part_embed, Hg, Hc;
    Eigen::VectorXd b1, b2;
    Eigen::Vector2d bg, bc;

    static ExtractorGradients zeros(const ModelDims& dims);
};

PartFeatures forward(const ExtractorParams& params, const Observation& obs);

// (logits_g, logits_c): global head on the visible-row mean, concat head on
// the stacked rows.
std::pair<Eigen::Vector2d, Eigen::Vector2d> heads(const ExtractorParams& params,
                                                  const PartFeatures& F);

constexpr double kDefaultTripletMargin = 0.3;

LossReport mixed_loss(const ExtractorParams& params, const TrainBatch& batch,
                      double margin = kDefaultTripletMargin);

// mixed_loss with exact backpropagation; grad may be null.
LossReport mixed_loss_with_grad(const ExtractorParams& params,
                                const TrainBatch& batch, double margin,
                                ExtractorGradients* grad);

// One plain SGD step on the mixed loss.  The report is the pre-step loss.
std::pair<ExtractorParams, LossReport> sgd_step(
    const ExtractorParams& params, const TrainBatch& batch, double lr,
    double margin = kDefaultTripletMargin);

ExtractorParams snapshot(const ExtractorParams& params);

// Value-exact text checkpoint.
void save_checkpoint(std::ostream& out, const ExtractorParams& params);
ExtractorParams load_checkpoint(std::istream& in);

} // namespace oclreid

#endif
