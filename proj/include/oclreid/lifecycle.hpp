#ifndef OCLREID_LIFECYCLE_HPP
#define OCLREID_LIFECYCLE_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oclreid/core.hpp"

namespace oclreid {

enum class Mode { kFollowing, kLost };

enum class LifecycleEvent {
    kIdSwitchGuard,
    kReidSuccess,
    kTrainSkipped,
    kConfUnavailable,
};

const char* to_string(LifecycleEvent e);

struct LifecycleThresholds {
    double delta_sw = 0.35;   // id switch guard
    double delta_reid = 0.7;  // re-identification confidence
    int zeta_reid = 5;        // consecutive frames required
};

struct LifecycleState {
    Mode mode = Mode::kFollowing;
    int target_id = -1; // -1 encodes lost
    std::map<int, int> reid_streaks;
    LifecycleThresholds thresholds;

    static LifecycleState following(int target_id,
                                    LifecycleThresholds thresholds = {});
    static LifecycleState lost(LifecycleThresholds thresholds = {});
};

struct FrameDecision {
    std::optional<BBox> target_position;
    bool trained_this_frame = false;
    std::vector<LifecycleEvent> events;
    std::map<int, double> track_confidence; // tracks with computable s
};

// Side effects the runner executes on the learner side.
struct TrainRequests {
    std::vector<Observation> short_term; // labeled target + negatives -> S
    std::vector<Observation> long_term_negatives;
    std::optional<Observation> keyframe_candidate; // target sample for L
    bool refit_classifier = false;
    bool learner_step = false;

    bool any() const {
        return refit_classifier || learner_step || !short_term.empty() ||
               !long_term_negatives.empty() || keyframe_candidate.has_value();
    }
};

// Returns nullopt when confidence is unavailable for the observation.
using ConfidenceFn =
    std::function<std::optional<double>(const Observation&)>;

struct StepResult {
    LifecycleState state;
    FrameDecision decision;
    TrainRequests requests;
};

// One frame of the target-ReID lifecycle.  Pure given the confidence values.
StepResult step(const LifecycleState& state,
                const std::vector<Observation>& frame_obs,
                const ConfidenceFn& confidence_of);

// Assigns y = 1 to the target track, 0 to all others.  FOLLOWING only.
std::vector<Observation> label_frame(const LifecycleState& state,
                                     std::vector<Observation> frame_obs);

std::string format_event_log_line(long frame, const LifecycleState& state,
                                  const FrameDecision& decision);

} // namespace oclreid

#endif
