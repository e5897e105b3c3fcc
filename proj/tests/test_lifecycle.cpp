#include <doctest.h>

#include <map>
#include <vector>

#include "oclreid/lifecycle.hpp"

using namespace oclreid;

namespace {

Observation track_obs(int track_id, double cx = 100.0) {
    VisibilityMask vis = VisibilityMask::all_visible();
    Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(PartScheme::kNumParts, 4);
    return Observation::make(0, track_id, 0, BBox{cx, 120, 40, 110}, vis,
                             std::move(raw));
}

// confidence script keyed by track id; missing id = unavailable
ConfidenceFn script(std::map<int, double> table) {
    return [table = std::move(table)](
               const Observation& obs) -> std::optional<double> {
        auto it = table.find(obs.track_id);
        if (it == table.end()) return std::nullopt;
        return it->second;
    };
}

bool has_event(const FrameDecision& d, LifecycleEvent e) {
    for (auto x : d.events)
        if (x == e) return true;
    return false;
}

} // namespace

TEST_CASE("following with confident target keeps tracking and trains") {
    const LifecycleState state = LifecycleState::following(3);
    const std::vector<Observation> frame = {track_obs(3, 210), track_obs(5)};
    const StepResult r = step(state, frame, script({{3, 0.40}, {5, 0.10}}));
    CHECK(r.state.mode == Mode::kFollowing);
    CHECK(r.state.target_id == 3);
    REQUIRE(r.decision.target_position.has_value());
    CHECK(r.decision.target_position->cx == 210);
    CHECK(r.decision.trained_this_frame);
    CHECK(r.requests.learner_step);
    CHECK(r.requests.refit_classifier);
    REQUIRE(r.requests.keyframe_candidate.has_value());
    CHECK(r.requests.keyframe_candidate->track_id == 3);
    CHECK(r.requests.keyframe_candidate->label == 1);
    REQUIRE(r.requests.short_term.size() == 2);
    REQUIRE(r.requests.long_term_negatives.size() == 1);
    CHECK(r.requests.long_term_negatives[0].track_id == 5);
    CHECK(r.requests.long_term_negatives[0].label == 0);
}

TEST_CASE("low confidence triggers the id-switch guard") {
    const LifecycleState state = LifecycleState::following(3);
    const std::vector<Observation> frame = {track_obs(3)};
    const StepResult r = step(state, frame, script({{3, 0.30}}));
    CHECK(r.state.mode == Mode::kLost);
    CHECK(r.state.target_id == -1);
    CHECK_FALSE(r.decision.target_position.has_value());
    CHECK(has_event(r.decision, LifecycleEvent::kIdSwitchGuard));
    CHECK_FALSE(r.requests.any());

    // exactly at the threshold is still a switch (strict >)
    const StepResult boundary = step(state, frame, script({{3, 0.35}}));
    CHECK(boundary.state.mode == Mode::kLost);
    CHECK(has_event(boundary.decision, LifecycleEvent::kIdSwitchGuard));
}

TEST_CASE("unavailable confidence while following counts as below threshold") {
    const LifecycleState state = LifecycleState::following(3);
    const StepResult r = step(state, {track_obs(3)}, script({}));
    CHECK(r.state.mode == Mode::kLost);
    CHECK(has_event(r.decision, LifecycleEvent::kConfUnavailable));
    CHECK(has_event(r.decision, LifecycleEvent::kIdSwitchGuard));
    CHECK_FALSE(r.requests.any());
}

TEST_CASE("target track dropping from the frame loses the target quietly") {
    const LifecycleState state = LifecycleState::following(3);
    const StepResult r = step(state, {track_obs(5)}, script({{5, 0.9}}));
    CHECK(r.state.mode == Mode::kLost);
    CHECK(r.decision.events.empty());
    CHECK_FALSE(r.requests.any());
}

TEST_CASE("five consecutive confident frames re-identify the target") {
    LifecycleState state = LifecycleState::lost();
    const std::vector<Observation> frame = {track_obs(7, 300)};
    for (int f = 1; f <= 4; ++f) {
        const StepResult r = step(state, frame, script({{7, 0.75}}));
        state = r.state;
        CHECK(state.mode == Mode::kLost);
        CHECK(state.reid_streaks.at(7) == f);
        CHECK_FALSE(r.requests.any()); // no training while lost
    }
    const StepResult r = step(state, frame, script({{7, 0.75}}));
    CHECK(r.state.mode == Mode::kFollowing);
    CHECK(r.state.target_id == 7);
    CHECK(has_event(r.decision, LifecycleEvent::kReidSuccess));
    REQUIRE(r.decision.target_position.has_value());
    CHECK(r.decision.target_position->cx == 300);
}

TEST_CASE("a dip in confidence resets the re-identification streak") {
    LifecycleState state = LifecycleState::lost();
    const std::vector<Observation> frame = {track_obs(7)};
    const double seq[] = {0.75, 0.75, 0.75, 0.75, 0.60, 0.75, 0.75,
                          0.75, 0.75};
    for (double s : seq) {
        const StepResult r = step(state, frame, script({{7, s}}));
        state = r.state;
        CHECK(state.mode == Mode::kLost); // never 5 consecutive hits
    }
    CHECK(state.reid_streaks.at(7) == 4);
    const StepResult r = step(state, frame, script({{7, 0.75}}));
    CHECK(r.state.mode == Mode::kFollowing);
}

TEST_CASE("boundary confidence does not advance the streak") {
    LifecycleState state = LifecycleState::lost();
    const StepResult r = step(state, {track_obs(7)}, script({{7, 0.70}}));
    CHECK(r.state.reid_streaks.at(7) == 0);
}

TEST_CASE("streaks reset when the track disappears for a frame") {
    LifecycleState state = LifecycleState::lost();
    for (int f = 0; f < 3; ++f)
        state = step(state, {track_obs(7)}, script({{7, 0.9}})).state;
    CHECK(state.reid_streaks.at(7) == 3);
    state = step(state, {track_obs(8)}, script({{8, 0.1}})).state;
    CHECK(state.reid_streaks.count(7) == 0);
    state = step(state, {track_obs(7)}, script({{7, 0.9}})).state;
    CHECK(state.reid_streaks.at(7) == 1);
}

TEST_CASE("ties between simultaneous candidates go to the lowest track id") {
    LifecycleState state = LifecycleState::lost();
    // present in descending order to prove sorting, not input order, decides
    const std::vector<Observation> frame = {track_obs(9, 400), track_obs(2, 50)};
    for (int f = 0; f < 4; ++f)
        state = step(state, frame, script({{9, 0.9}, {2, 0.9}})).state;
    const StepResult r = step(state, frame, script({{9, 0.9}, {2, 0.9}}));
    CHECK(r.state.mode == Mode::kFollowing);
    CHECK(r.state.target_id == 2);
    CHECK(r.decision.target_position->cx == 50);
}

TEST_CASE("unavailable confidence while lost resets that track only") {
    LifecycleState state = LifecycleState::lost();
    const std::vector<Observation> frame = {track_obs(1), track_obs(2)};
    for (int f = 0; f < 3; ++f)
        state = step(state, frame, script({{1, 0.9}, {2, 0.9}})).state;
    const StepResult r = step(state, frame, script({{2, 0.9}}));
    CHECK(has_event(r.decision, LifecycleEvent::kConfUnavailable));
    CHECK(r.state.reid_streaks.at(1) == 0);
    CHECK(r.state.reid_streaks.at(2) == 4);
}

TEST_CASE("streaks never exceed the required count") {
    LifecycleState state = LifecycleState::lost();
    LifecycleThresholds t;
    // drive one track past the threshold while another stays just below
    const std::vector<Observation> frame = {track_obs(4)};
    for (int f = 0; f < 12; ++f) {
        const StepResult r = step(state, frame, script({{4, 0.69}}));
        state = r.state;
        CHECK(state.reid_streaks.at(4) <= t.zeta_reid);
        CHECK(state.mode == Mode::kLost); // 0.69 <= 0.7 never re-identifies
    }
}

TEST_CASE("label_frame assigns the target positive and the rest negative") {
    const LifecycleState state = LifecycleState::following(3);
    const auto labeled = label_frame(state, {track_obs(3), track_obs(5)});
    REQUIRE(labeled.size() == 2);
    for (const auto& obs : labeled)
        CHECK(obs.label == (obs.track_id == 3 ? 1 : 0));

    const auto solo = label_frame(state, {track_obs(3)});
    REQUIRE(solo.size() == 1);
    CHECK(solo[0].label == 1);

    CHECK_THROWS_AS(label_frame(state, {track_obs(5)}), ContractViolationError);
    CHECK_THROWS_AS(label_frame(LifecycleState::lost(), {track_obs(3)}),
                    ContractViolationError);
}

TEST_CASE("event log line carries mode, confidences, and events") {
    const LifecycleState state = LifecycleState::following(3);
    const StepResult r =
        step(state, {track_obs(3)}, script({{3, 0.415}}));
    const std::string line = format_event_log_line(12, r.state, r.decision);
    CHECK(line.find("frame=12") != std::string::npos);
    CHECK(line.find("mode=FOLLOWING") != std::string::npos);
    CHECK(line.find("3:0.415000") != std::string::npos);
}
