#include "oclreid/evalkit.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "oclreid/errors.hpp"

namespace oclreid {

double success_rate(const std::vector<std::optional<BBox>>& pred,
                    const std::vector<BBox>& gt) {
    if (pred.size() != gt.size())
        throw ConfigError("success_rate: length mismatch");
    if (pred.empty()) return 0.0;
    int hits = 0;
    for (size_t i = 0; i < pred.size(); ++i)
        if (pred[i].has_value() &&
            bbox_center_distance(*pred[i], gt[i]) < kSuccessRadiusPixels)
            ++hits;
    return 100.0 * hits / static_cast<double>(pred.size());
}

SegmentAccuracy segment_accuracy(const RidgeClassifier& clf,
                                 const ExtractorParams& params,
                                 const std::vector<Observation>& eval_set) {
    SegmentAccuracy result;
    if (eval_set.empty()) return result;
    int correct = 0;
    for (const auto& obs : eval_set) {
        bool predicted_target = false;
        try {
            predicted_target = confidence(clf, forward(params, obs)) > 0.5;
        } catch (const ConfidenceUnavailableError&) {
            ++result.unavailable;
            // counts as misclassified: force the wrong prediction
            predicted_target = obs.label != 1;
        }
        if (predicted_target == (obs.label == 1)) ++correct;
    }
    result.accuracy = static_cast<double>(correct) /
                      static_cast<double>(eval_set.size());
    return result;
}

double r_mEAcc(const AccMatrix& m) {
    double sum = 0.0;
    for (int j = 0; j < kNumSegments; ++j) {
        const auto& cell = m.a[kNumSegments - 1][static_cast<size_t>(j)];
        if (!cell.has_value())
            throw ConfigError("r_mEAcc: final row incomplete");
        sum += *cell;
    }
    return 100.0 * sum / kNumSegments;
}

const char* to_string(Action a) {
    switch (a) {
        case Action::kMoveForward: return "move-forward";
        case Action::kMoveBackward: return "move-backward";
        case Action::kNoOp: return "no-op";
        case Action::kForwardLeft: return "forward-left";
        case Action::kForwardRight: return "forward-right";
        case Action::kTurnLeft: return "turn-left";
        case Action::kTurnRight: return "turn-right";
    }
    return "?";
}

Action bbox_to_action(const BBox& box, double expected_w, double expected_h,
                      double image_w, double image_h) {
    (void)image_h;
    if (image_w <= 0.0 || expected_w * expected_h <= 0.0)
        throw ConfigError("bbox_to_action: non-positive reference size");
    const double x_err = (box.cx - image_w / 2.0) / (image_w / 2.0);
    const double s_err = (box.w * box.h - expected_w * expected_h) /
                         (expected_w * expected_h);
    // rules applied in order, first match wins
    if (std::abs(x_err) <= 0.1 && s_err <= -0.2) return Action::kMoveForward;
    if (std::abs(x_err) <= 0.1 && s_err >= 0.2) return Action::kMoveBackward;
    if (std::abs(x_err) < 0.1 && std::abs(s_err) < 0.2) return Action::kNoOp;
    if (x_err >= 0.1 && x_err <= 0.3) return Action::kForwardRight;
    if (x_err > 0.3) return Action::kTurnRight;
    if (x_err >= -0.3 && x_err <= -0.1) return Action::kForwardLeft;
    return Action::kTurnLeft; // x_err < -0.3
}

bool relaxed_action_match(Action pred, TargetSide gt_side) {
    switch (gt_side) {
        case TargetSide::kLeft:
            return pred == Action::kMoveBackward || pred == Action::kTurnLeft ||
                   pred == Action::kForwardLeft;
        case TargetSide::kRight:
            return pred == Action::kMoveBackward || pred == Action::kTurnRight ||
                   pred == Action::kForwardRight;
        case TargetSide::kCenter:
            return pred == Action::kMoveForward ||
                   pred == Action::kMoveBackward || pred == Action::kNoOp;
    }
    return false;
}

void dump_acc_matrix(std::ostream& out, const AccMatrix& m) {
    char buf[32];
    for (int i = 0; i < kNumSegments; ++i) {
        for (int j = 0; j <= i; ++j) {
            const auto& cell = m.a[static_cast<size_t>(i)][static_cast<size_t>(j)];
            if (cell.has_value())
                std::snprintf(buf, sizeof(buf), "%.6f", *cell);
            else
                std::snprintf(buf, sizeof(buf), "-");
            out << buf << (j < i ? " " : "");
        }
        out << '\n';
    }
}

std::string metric_record(const std::string& metric, const std::string& scenario,
                          const std::string& strategy, std::uint64_t seed,
                          double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return metric + " " + scenario + " " + strategy + " " +
           std::to_string(seed) + " " + buf;
}

} // namespace oclreid
