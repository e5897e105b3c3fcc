#include "oclreid/simstream.hpp"

#include <algorithm>
#include <cmath>

#include "oclreid/errors.hpp"

namespace oclreid {

void ScenarioConfig::validate() const {
    if (persons < 1) throw ConfigError("scenario: persons must be >= 1");
    if (frames < 1) throw ConfigError("scenario: frames must be >= 1");
    if (distractor_similarity < 0.0 || distractor_similarity > 1.0)
        throw ConfigError("scenario: distractor_similarity outside [0,1]");
    if (flip_prob < 0.0 || flip_prob > 1.0)
        throw ConfigError("scenario: flip_prob outside [0,1]");
    if (noise_sigma < 0.0) throw ConfigError("scenario: negative noise_sigma");
    if (image_w <= 0.0 || image_h <= 0.0)
        throw ConfigError("scenario: non-positive image size");
    for (const auto& e : drift_schedule)
        if (e.frame < 0 || e.frame >= frames)
            throw ConfigError("scenario: drift event outside [0, T)");
    for (const auto& e : occlusion_script) {
        if (e.start < 0 || e.end > frames || e.start >= e.end)
            throw ConfigError("scenario: occlusion range outside [0, T)");
        if (e.person < 0 || e.person >= persons)
            throw ConfigError("scenario: occlusion person out of range");
    }
    for (const auto& e : viewpoint_script) {
        if (e.frame < 0 || e.frame >= frames)
            throw ConfigError("scenario: viewpoint flip outside [0, T)");
        if (e.person < 0 || e.person >= persons)
            throw ConfigError("scenario: viewpoint person out of range");
    }
}

namespace {

Eigen::MatrixXd gauss_matrix(int rows, int cols, Rng& rng) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.gauss();
    return m;
}

Eigen::VectorXd drift_direction(const ScenarioConfig& config, int direction_id) {
    Rng rng(derive_seed(config.seed, "drift-direction",
                        static_cast<std::uint64_t>(direction_id)));
    Eigen::VectorXd dir(config.d_raw);
    for (int i = 0; i < config.d_raw; ++i) dir(i) = rng.gauss();
    const double nrm = dir.norm();
    return nrm > 0.0 ? Eigen::VectorXd(dir / nrm) : dir;
}

Eigen::VectorXd bias_at(const ScenarioConfig& config, long frame) {
    const DriftEvent* active = nullptr;
    for (const auto& e : config.drift_schedule)
        if (e.frame <= frame && (active == nullptr || e.frame >= active->frame))
            active = &e;
    if (active == nullptr) return Eigen::VectorXd::Zero(config.d_raw);
    return active->scale * drift_direction(config, active->direction_id);
}

// Parts hidden by a partial occlusion: legs and feet of both halves.
bool part_occluded(int part) {
    const int within_half = part % 5;
    return within_half == 2 || within_half == 3;
}

} // namespace

StreamGenerator::StreamGenerator(ScenarioConfig config)
    : config_(std::move(config)) {
    config_.validate();
    const int N = PartScheme::kNumParts;
    Rng target_rng(derive_seed(config_.seed, "latent", 0));
    Eigen::MatrixXd target_latent = gauss_matrix(N, config_.d_raw, target_rng);
    const double eps = config_.distractor_similarity;
    for (int p = 0; p < config_.persons; ++p) {
        Person person;
        if (p == 0) {
            person.latent = target_latent;
        } else {
            Rng own_rng(derive_seed(config_.seed, "latent",
                                    static_cast<std::uint64_t>(p)));
            // spherical mix keeps the per-entry variance at 1
            person.latent = eps * target_latent +
                            std::sqrt(1.0 - eps * eps) *
                                gauss_matrix(N, config_.d_raw, own_rng);
        }
        Rng traj(derive_seed(config_.seed, "traj", static_cast<std::uint64_t>(p)));
        person.ax = (0.15 + 0.20 * traj.real01()) * config_.image_w;
        person.ay = (0.05 + 0.10 * traj.real01()) * config_.image_h;
        person.wx = 0.004 + 0.008 * traj.real01();
        person.wy = 0.003 + 0.006 * traj.real01();
        person.px = 6.283185307179586 * traj.real01();
        person.py = 6.283185307179586 * traj.real01();
        person.box_w = 50.0 + 20.0 * traj.real01();
        person.box_h = 110.0 + 30.0 * traj.real01();
        person.facing_front = true; // orientation changes only via flips
        person.track_id = p;
        people_.push_back(std::move(person));
    }
    next_track_id_ = config_.persons;
}

BBox StreamGenerator::bbox_at(const Person& person, long frame) const {
    BBox box;
    box.cx = config_.image_w / 2.0 +
             person.ax * std::sin(person.wx * frame + person.px);
    box.cy = config_.image_h / 2.0 +
             person.ay * std::sin(person.wy * frame + person.py);
    box.w = person.box_w;
    box.h = person.box_h;
    box.cx = std::clamp(box.cx, box.w / 2.0, config_.image_w - box.w / 2.0);
    box.cy = std::clamp(box.cy, box.h / 2.0, config_.image_h - box.h / 2.0);
    return box;
}

std::optional<StreamFrame> StreamGenerator::next() {
    if (frame_ >= config_.frames) return std::nullopt;
    const long f = frame_++;
    Rng frame_rng(derive_seed(config_.seed, "frame",
                              static_cast<std::uint64_t>(f)));
    const Eigen::VectorXd bias = bias_at(config_, f);

    // orientation updates happen whether or not the person is occluded
    for (int p = 0; p < config_.persons; ++p) {
        bool flip = frame_rng.bernoulli(config_.flip_prob);
        for (const auto& e : config_.viewpoint_script)
            if (e.frame == f && e.person == p) flip = !flip;
        if (flip) people_[static_cast<size_t>(p)].facing_front =
            !people_[static_cast<size_t>(p)].facing_front;
    }

    bool target_fully_occluded = false;
    StreamFrame out;
    out.truth.frame = f;
    out.truth.segment_index =
        static_cast<int>((8 * f) / config_.frames);

    for (int p = 0; p < config_.persons; ++p) {
        Person& person = people_[static_cast<size_t>(p)];
        bool full = false, partial = false;
        for (const auto& e : config_.occlusion_script) {
            if (e.person != p || f < e.start || f >= e.end) continue;
            if (e.mode == OcclusionEvent::Mode::kFull) full = true;
            else partial = true;
        }
        if (p == 0) target_fully_occluded = full;
        if (full) continue;

        if (p == 0 && target_was_fully_occluded_) {
            // re-appearance after full occlusion: the tracker assigns a
            // fresh id, forcing re-identification
            person.track_id = next_track_id_++;
        }

        VisibilityMask vis;
        for (int k = 0; k < PartScheme::kNumParts; ++k) {
            const bool half_visible =
                PartScheme::is_front(k) == person.facing_front;
            vis.bits[static_cast<size_t>(k)] =
                static_cast<std::uint8_t>(half_visible &&
                                          !(partial && part_occluded(k)));
        }
        Eigen::MatrixXd raw =
            Eigen::MatrixXd::Zero(PartScheme::kNumParts, config_.d_raw);
        for (int k = 0; k < PartScheme::kNumParts; ++k) {
            if (!vis.bits[static_cast<size_t>(k)]) continue;
            for (int d = 0; d < config_.d_raw; ++d)
                raw(k, d) = person.latent(k, d) + bias(d) +
                            config_.noise_sigma * frame_rng.gauss();
        }
        const BBox box = bbox_at(person, f);
        out.observations.push_back(Observation::make(
            f, person.track_id, p == 0 ? 1 : 0, box, vis, std::move(raw)));
        out.truth.visible_tracks.push_back(person.track_id);
    }

    out.truth.gt_target_bbox = bbox_at(people_[0], f);
    out.truth.gt_target_track_id = people_[0].track_id;
    out.truth.target_present = !target_fully_occluded;
    target_was_fully_occluded_ = target_fully_occluded;
    return out;
}

std::vector<Observation> warmup_population(const ScenarioConfig& config,
                                           int persons, long frames) {
    if (persons < 2 && frames > 0)
        throw ConfigError("warmup: needs at least two persons");
    const int N = PartScheme::kNumParts;
    const std::uint64_t warm_seed = derive_seed(config.seed, "warmup");
    std::vector<Eigen::MatrixXd> latents;
    for (int p = 0; p < persons; ++p) {
        Rng rng(derive_seed(warm_seed, "latent", static_cast<std::uint64_t>(p)));
        latents.push_back(gauss_matrix(N, config.d_raw, rng));
    }
    Rng rng(derive_seed(warm_seed, "samples"));
    std::vector<Observation> out;
    for (long f = 0; f < frames; ++f) {
        for (int p = 0; p < persons; ++p) {
            const bool front = rng.bernoulli(0.5);
            VisibilityMask vis;
            for (int k = 0; k < N; ++k)
                vis.bits[static_cast<size_t>(k)] =
                    static_cast<std::uint8_t>(PartScheme::is_front(k) == front);
            Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(N, config.d_raw);
            for (int k = 0; k < N; ++k) {
                if (!vis.bits[static_cast<size_t>(k)]) continue;
                for (int d = 0; d < config.d_raw; ++d)
                    raw(k, d) = latents[static_cast<size_t>(p)](k, d) +
                                config.noise_sigma * rng.gauss();
            }
            BBox box{config.image_w / 2.0, config.image_h / 2.0, 60.0, 120.0};
            out.push_back(Observation::make(f, p, p == 0 ? 1 : 0, box, vis,
                                            std::move(raw)));
        }
    }
    return out;
}

ScenarioConfig make_preset(const std::string& name, std::uint64_t seed) {
    ScenarioConfig cfg;
    cfg.seed = seed;
    if (name == "corridor" || name == "corridor-like") {
        cfg.name = "corridor";
        cfg.persons = 2;
        cfg.frames = 4000;
        cfg.distractor_similarity = 0.5;
        cfg.flip_prob = 0.0;
        cfg.noise_sigma = 0.1;
        // Two drift events, each ramped to a large absolute bias over five
        // piecewise-constant steps.  The magnitude is tuned so the frozen
        // extractor's old-regime geometry breaks and replay-free fine-tuning
        // visibly forgets early segments, while replay from long-term memory
        // keeps all regimes separable.
        cfg.drift_schedule = {
            {1300, 3.2, 0}, {1325, 6.4, 0}, {1350, 9.6, 0},
            {1375, 12.8, 0}, {1400, 16.0, 0},
            {2650, 3.2, 1}, {2675, 6.4, 1}, {2700, 9.6, 1},
            {2725, 12.8, 1}, {2750, 16.0, 1},
        };
        // Scripted back-facing stints, synchronized across both walkers: one
        // inside the label-trusted bootstrap window so the back-view rows get
        // trained before the confidence guard can trip on an all-zero score,
        // then one stint per 500-frame segment so both orientations keep
        // being exercised and evaluated.
        cfg.viewpoint_script = {{10, 0}, {10, 1}, {30, 0}, {30, 1}};
        for (long s = 0; s < 8; ++s) {
            for (long f : {s * 500 + 150, s * 500 + 350}) {
                cfg.viewpoint_script.push_back({f, 0});
                cfg.viewpoint_script.push_back({f, 1});
            }
        }
        cfg.occlusion_script = {
            {700, 730, 0, OcclusionEvent::Mode::kParts},
            {1000, 1040, 1, OcclusionEvent::Mode::kFull},
            {1900, 1930, 0, OcclusionEvent::Mode::kParts},
            {2200, 2240, 1, OcclusionEvent::Mode::kFull},
            {3100, 3130, 0, OcclusionEvent::Mode::kParts},
        };
    } else if (name == "room" || name == "room-like") {
        cfg.name = "room";
        cfg.persons = 2;
        cfg.frames = 1200;
        cfg.distractor_similarity = 0.8;
        cfg.flip_prob = 0.0;
        cfg.noise_sigma = 0.1;
        cfg.occlusion_script = {
            {550, 650, 0, OcclusionEvent::Mode::kFull},
        };
        // Scripted back-facing stints, synchronized across both walkers: one
        // inside the label-trusted bootstrap window so the back-view rows get
        // trained before the confidence guard can trip on an all-zero score,
        // then one stint before and one after the occlusion.
        cfg.viewpoint_script = {
            {10, 0},  {10, 1},  {30, 0},  {30, 1},  {200, 0}, {200, 1},
            {300, 0}, {300, 1}, {800, 0}, {800, 1}, {900, 0}, {900, 1},
        };
    } else {
        throw ConfigError("unknown preset: " + name);
    }
    cfg.validate();
    return cfg;
}

} // namespace oclreid
