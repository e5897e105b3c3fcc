#ifndef OCLREID_SIMSTREAM_HPP
#define OCLREID_SIMSTREAM_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oclreid/core.hpp"
#include "oclreid/rng.hpp"

namespace oclreid {

struct DriftEvent {
    long frame = 0;
    double scale = 0.0;
    int direction_id = 0; // events sharing a direction form a staged ramp
};

struct OcclusionEvent {
    enum class Mode { kFull, kParts };
    long start = 0;
    long end = 0; // exclusive
    int person = 0;
    Mode mode = Mode::kFull;
};

struct OrientationFlip {
    long frame = 0;
    int person = 0;
};

// Person 0 is the target; the others are distractors.
struct ScenarioConfig {
    std::string name = "custom";
    std::uint64_t seed = 1;
    int persons = 2;
    long frames = 1000;
    double distractor_similarity = 0.0; // 0 independent .. 1 identical
    std::vector<DriftEvent> drift_schedule;
    std::vector<OcclusionEvent> occlusion_script;
    std::vector<OrientationFlip> viewpoint_script;
    double flip_prob = 0.0;
    double noise_sigma = 0.1;
    double image_w = 640.0;
    double image_h = 480.0;
    int d_raw = 32;

    void validate() const;
};

struct FrameTruth {
    long frame = 0;
    BBox gt_target_bbox;
    int gt_target_track_id = 0;
    bool target_present = false;
    std::vector<int> visible_tracks;
    int segment_index = 0; // floor(8 * frame / T)
};

struct StreamFrame {
    std::vector<Observation> observations;
    FrameTruth truth;
};

// Deterministic frame-by-frame world.  The target's track id is reassigned
// each time a full occlusion of the target ends.
class StreamGenerator {
public:
    explicit StreamGenerator(ScenarioConfig config);

    std::optional<StreamFrame> next();
    long total_frames() const { return config_.frames; }
    const ScenarioConfig& config() const { return config_; }

private:
    struct Person {
        Eigen::MatrixXd latent; // N x D_raw
        bool facing_front = true;
        int track_id = 0;
        double ax, ay, wx, wy, px, py; // trajectory parameters
        double box_w, box_h;
    };

    BBox bbox_at(const Person& person, long frame) const;

    ScenarioConfig config_;
    std::vector<Person> people_;
    long frame_ = 0;
    int next_track_id_ = 0;
    bool target_was_fully_occluded_ = false;
};

// IID labeled set from a population disjoint from the scenario (fresh
// seeds); person 0 of the warm-up population is the positive class.
std::vector<Observation> warmup_population(const ScenarioConfig& config,
                                           int persons, long frames);

// Presets: "corridor" (long, two drift events, crossing occluders) and
// "room" (short, similar distractor, full mid-stream target occlusion).
ScenarioConfig make_preset(const std::string& name, std::uint64_t seed);

} // namespace oclreid

#endif
