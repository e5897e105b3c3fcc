#include "oclreid/lifecycle.hpp"

#include <algorithm>
#include <sstream>

#include "oclreid/errors.hpp"

namespace oclreid {

const char* to_string(LifecycleEvent e) {
    switch (e) {
        case LifecycleEvent::kIdSwitchGuard: return "ID_SWITCH_GUARD";
        case LifecycleEvent::kReidSuccess: return "REID_SUCCESS";
        case LifecycleEvent::kTrainSkipped: return "TRAIN_SKIPPED";
        case LifecycleEvent::kConfUnavailable: return "CONF_UNAVAILABLE";
    }
    return "?";
}

LifecycleState LifecycleState::following(int target_id,
                                         LifecycleThresholds thresholds) {
    LifecycleState s;
    s.mode = Mode::kFollowing;
    s.target_id = target_id;
    s.thresholds = thresholds;
    return s;
}

LifecycleState LifecycleState::lost(LifecycleThresholds thresholds) {
    LifecycleState s;
    s.mode = Mode::kLost;
    s.target_id = -1;
    s.thresholds = thresholds;
    return s;
}

std::vector<Observation> label_frame(const LifecycleState& state,
                                     std::vector<Observation> frame_obs) {
    if (state.mode != Mode::kFollowing)
        throw ContractViolationError("label_frame called while LOST");
    bool target_seen = false;
    for (auto& obs : frame_obs) {
        obs.label = (obs.track_id == state.target_id) ? 1 : 0;
        target_seen |= (obs.label == 1);
    }
    if (!target_seen)
        throw ContractViolationError("label_frame: target track absent");
    return frame_obs;
}

namespace {

StepResult step_following(const LifecycleState& state,
                          const std::vector<Observation>& frame_obs,
                          const ConfidenceFn& confidence_of) {
    StepResult result;
    result.state = state;

    const Observation* target = nullptr;
    for (const auto& obs : frame_obs)
        if (obs.track_id == state.target_id) target = &obs;
    if (target == nullptr) {
        // track dropped (occlusion): lost without the switch-guard event
        result.state = LifecycleState::lost(state.thresholds);
        return result;
    }

    std::optional<double> s = confidence_of(*target);
    if (s.has_value())
        result.decision.track_confidence[target->track_id] = *s;
    else
        result.decision.events.push_back(LifecycleEvent::kConfUnavailable);

    if (!s.has_value() || *s <= state.thresholds.delta_sw) {
        result.state = LifecycleState::lost(state.thresholds);
        result.decision.events.push_back(LifecycleEvent::kIdSwitchGuard);
        return result;
    }

    std::vector<Observation> labeled = label_frame(state, frame_obs);
    for (auto& obs : labeled) {
        if (!obs.vis.any()) continue;
        if (obs.label == 0) result.requests.long_term_negatives.push_back(obs);
        if (obs.label == 1) result.requests.keyframe_candidate = obs;
        result.requests.short_term.push_back(std::move(obs));
    }
    result.requests.refit_classifier = true;
    result.requests.learner_step = true;
    result.decision.trained_this_frame = true;
    result.decision.target_position = target->bbox;
    return result;
}

StepResult step_lost(const LifecycleState& state,
                     const std::vector<Observation>& frame_obs,
                     const ConfidenceFn& confidence_of) {
    StepResult result;
    result.state = state;
    result.state.reid_streaks.clear();

    int reid_id = -1;
    const Observation* reid_obs = nullptr;
    // iterate in ascending track id so the tie-break is the lowest id
    std::vector<const Observation*> sorted;
    for (const auto& obs : frame_obs) sorted.push_back(&obs);
    std::sort(sorted.begin(), sorted.end(),
              [](const Observation* a, const Observation* b) {
                  return a->track_id < b->track_id;
              });
    for (const Observation* obs : sorted) {
        std::optional<double> s = confidence_of(*obs);
        int streak = 0;
        if (!s.has_value()) {
            result.decision.events.push_back(LifecycleEvent::kConfUnavailable);
        } else {
            result.decision.track_confidence[obs->track_id] = *s;
            if (*s > state.thresholds.delta_reid) {
                auto it = state.reid_streaks.find(obs->track_id);
                streak = (it == state.reid_streaks.end() ? 0 : it->second) + 1;
                streak = std::min(streak, state.thresholds.zeta_reid);
            }
        }
        result.state.reid_streaks[obs->track_id] = streak;
        if (streak >= state.thresholds.zeta_reid && reid_id < 0) {
            reid_id = obs->track_id;
            reid_obs = obs;
        }
    }
    if (reid_id >= 0) {
        result.state = LifecycleState::following(reid_id, state.thresholds);
        result.decision.events.push_back(LifecycleEvent::kReidSuccess);
        result.decision.target_position = reid_obs->bbox;
    }
    return result;
}

} // namespace

StepResult step(const LifecycleState& state,
                const std::vector<Observation>& frame_obs,
                const ConfidenceFn& confidence_of) {
    if (state.mode == Mode::kFollowing)
        return step_following(state, frame_obs, confidence_of);
    return step_lost(state, frame_obs, confidence_of);
}

std::string format_event_log_line(long frame, const LifecycleState& state,
                                  const FrameDecision& decision) {
    std::ostringstream out;
    out << "frame=" << frame
        << " mode=" << (state.mode == Mode::kFollowing ? "FOLLOWING" : "LOST")
        << " target_id=" << state.target_id << " s=[";
    bool first = true;
    for (const auto& [id, s] : decision.track_confidence) {
        if (!first) out << ',';
        first = false;
        out << id << ':';
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6f", s);
        out << buf;
    }
    out << "] events=[";
    first = true;
    for (auto e : decision.events) {
        if (!first) out << ',';
        first = false;
        out << to_string(e);
    }
    out << ']';
    return out.str();
}

} // namespace oclreid
