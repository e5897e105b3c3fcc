#ifndef OCLREID_EVALKIT_HPP
#define OCLREID_EVALKIT_HPP

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oclreid/classifier.hpp"
#include "oclreid/core.hpp"
#include "oclreid/extractor.hpp"

namespace oclreid {

constexpr int kNumSegments = 8;
constexpr double kSuccessRadiusPixels = 50.0;

// Held-out labeled observations per stream segment; never trained on.
struct SegmentEvalSet {
    std::array<std::vector<Observation>, kNumSegments> segments;
};

// Lower-triangular accuracy grid: a[i][j] = accuracy on segment j after
// training through segment i.
struct AccMatrix {
    std::array<std::array<std::optional<double>, kNumSegments>, kNumSegments> a;
};

// Fraction (in %) of frames whose predicted center is strictly within
// 50 pixels of ground truth; absent predictions count as misses.
double success_rate(const std::vector<std::optional<BBox>>& pred,
                    const std::vector<BBox>& gt);

struct SegmentAccuracy {
    double accuracy = 0.0;
    int unavailable = 0; // samples without computable confidence
};

// Binary classification accuracy at the s > 0.5 decision rule.
SegmentAccuracy segment_accuracy(const RidgeClassifier& clf,
                                 const ExtractorParams& params,
                                 const std::vector<Observation>& eval_set);

// Mean of the final row of the accuracy grid, in percent.
double r_mEAcc(const AccMatrix& m);

enum class Action {
    kMoveForward,
    kMoveBackward,
    kNoOp,
    kForwardLeft,
    kForwardRight,
    kTurnLeft,
    kTurnRight,
};

const char* to_string(Action a);

// Rule-ordered mapping from a bounding box to a camera action.
Action bbox_to_action(const BBox& box, double expected_w, double expected_h,
                      double image_w, double image_h);

enum class TargetSide { kLeft, kCenter, kRight };

// Relaxed matching: any action that corrects toward the target side counts.
bool relaxed_action_match(Action pred, TargetSide gt_side);

void dump_acc_matrix(std::ostream& out, const AccMatrix& m);

// One metrics record per line: metric scenario strategy seed value.
std::string metric_record(const std::string& metric, const std::string& scenario,
                          const std::string& strategy, std::uint64_t seed,
                          double value);

} // namespace oclreid

#endif
